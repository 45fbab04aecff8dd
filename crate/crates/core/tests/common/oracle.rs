//! Deliberately naive reference implementations used as test oracles.
//! Nothing here calls into the library's numerical code.

#![allow(dead_code)]

use std::f64::consts::PI;

/// `(1 - k/K)^(w2 - 1)` normalized over `k = 1..=K`, with `0^0 = 1`.
pub fn beta_weights(k_max: usize, w2: f64) -> Vec<f64> {
    if k_max == 1 {
        return vec![1.0];
    }
    let raw: Vec<f64> = (1..=k_max)
        .map(|k| {
            let base = 1.0 - k as f64 / k_max as f64;
            if w2 == 1.0 {
                1.0
            } else {
                base.powf(w2 - 1.0)
            }
        })
        .collect();
    let s: f64 = raw.iter().sum();
    raw.iter().map(|v| v / s).collect()
}

#[derive(Debug, Clone, Copy)]
pub struct Params {
    pub mu: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub m: f64,
    pub rv: Option<(f64, f64)>,
    pub mv: Option<(f64, f64)>,
}

#[derive(Debug, Clone, Copy)]
pub struct Setup {
    pub rolling: bool,
    pub lags: usize,
    pub window: usize,
    /// 1 for day spacing, `window` for month spacing.
    pub stride: usize,
}

/// Daily returns with the index of their calendar month, plus one macro value per month.
pub struct Data<'a> {
    pub r: &'a [f64],
    pub month_of_day: &'a [usize],
    pub macro_by_month: &'a [f64],
}

pub fn sample_start(d: &Data, s: &Setup) -> usize {
    let first_of_month_k = d.month_of_day.iter().position(|&m| m == s.lags).unwrap();
    let burn = s.window + 1 + (s.lags - 1) * s.stride;
    first_of_month_k.max(burn)
}

fn rolling_rv(r: &[f64], day: usize, window: usize) -> f64 {
    let mut acc = 0.0;
    for j in 1..=window {
        acc += r[day - j] * r[day - j];
    }
    acc
}

fn rolling_mv(d: &Data, day: usize, window: usize) -> f64 {
    let mut acc = 0.0;
    for j in 1..=window {
        acc += d.macro_by_month[d.month_of_day[day - j]];
    }
    acc / window as f64
}

fn monthly_rv(d: &Data, month: usize) -> f64 {
    let mut acc = 0.0;
    for (i, &m) in d.month_of_day.iter().enumerate() {
        if m == month {
            acc += d.r[i] * d.r[i];
        }
    }
    acc
}

pub fn tau(d: &Data, s: &Setup, p: &Params, day: usize) -> f64 {
    let mut log_tau = p.m;
    if s.rolling {
        if let Some((theta, w2)) = p.rv {
            let w = beta_weights(s.lags, w2);
            for k in 1..=s.lags {
                log_tau += theta * w[k - 1] * rolling_rv(d.r, day - 1 - (k - 1) * s.stride, s.window);
            }
        }
        if let Some((theta, w2)) = p.mv {
            let w = beta_weights(s.lags, w2);
            for k in 1..=s.lags {
                log_tau += theta * w[k - 1] * rolling_mv(d, day - 1 - (k - 1) * s.stride, s.window);
            }
        }
    } else {
        let t = d.month_of_day[day];
        if let Some((theta, w2)) = p.rv {
            let w = beta_weights(s.lags, w2);
            for k in 1..=s.lags {
                log_tau += theta * w[k - 1] * monthly_rv(d, t - k);
            }
        }
        if let Some((theta, w2)) = p.mv {
            let w = beta_weights(s.lags, w2);
            for k in 1..=s.lags {
                log_tau += theta * w[k - 1] * d.macro_by_month[t - k];
            }
        }
    }
    log_tau.exp()
}

/// Term-by-term Gaussian log-likelihood over the sample, skipping its first day.
pub fn log_likelihood(d: &Data, s: &Setup, p: &Params) -> f64 {
    let start = sample_start(d, s);
    let n = d.r.len();
    let mut taus = Vec::with_capacity(n - start);
    for day in start..n {
        taus.push(tau(d, s, p, day));
    }
    let mut g_prev = 1.0;
    let mut total = 0.0;
    for day in start + 1..n {
        let prev = d.r[day - 1];
        let e_prev = prev - p.mu;
        let leverage = if prev < 0.0 { p.gamma } else { 0.0 };
        let tau_i = taus[day - start];
        let g =
            (1.0 - p.alpha - p.beta - p.gamma / 2.0) + (p.alpha + leverage) * e_prev * e_prev / tau_i + p.beta * g_prev;
        let s2 = tau_i * g;
        let e = d.r[day] - p.mu;
        let term = -0.5 * ((2.0 * PI).ln() + s2.ln() + e * e / s2);
        total += term;
        g_prev = g;
    }
    total
}

/// Plain GJR-GARCH(1,1): `s2_i = w + (a + c 1{r_{i-1} < 0}) e_{i-1}^2 + b s2_{i-1}`,
/// started from `s2_0` on the first day, which is excluded from the sum.
pub fn plain_gjr_loglik(r: &[f64], mu: f64, w: f64, a: f64, b: f64, c: f64, s2_0: f64) -> f64 {
    let mut s2 = s2_0;
    let mut total = 0.0;
    for i in 1..r.len() {
        let e_prev = r[i - 1] - mu;
        let lev = if r[i - 1] < 0.0 { c } else { 0.0 };
        s2 = w + (a + lev) * e_prev * e_prev + b * s2;
        if s2.is_nan() || s2 <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let e = r[i] - mu;
        total -= 0.5 * ((2.0 * PI).ln() + s2.ln() + e * e / s2);
    }
    total
}

/// `(mu, w, a, b, c)` with the recursion started at the unconditional variance.
pub fn plain_gjr(r: &[f64], x: &[f64; 5]) -> f64 {
    let [mu, w, a, b, c] = *x;
    let persistence = a + b + c / 2.0;
    if w <= 0.0 || a < 0.0 || b < 0.0 || a + c < 0.0 || persistence >= 1.0 {
        return f64::NEG_INFINITY;
    }
    plain_gjr_loglik(r, mu, w, a, b, c, w / (1.0 - persistence))
}

/// Hooke-Jeeves pattern search with step halving.
pub fn maximize_plain_gjr(r: &[f64]) -> ([f64; 5], f64) {
    let mean = r.iter().sum::<f64>() / r.len() as f64;
    let var = variance(r);
    let mut x = [mean, 0.05 * var, 0.05, 0.9, 0.0];
    let mut step = [0.05 * var.sqrt(), 0.02 * var, 0.02, 0.02, 0.02];
    let mut best = plain_gjr(r, &x);
    while step.iter().zip(&x).any(|(s, v)| *s > 1e-7 * v.abs().max(1e-3)) {
        let mut improved = false;
        for k in 0..5 {
            for dir in [1.0, -1.0] {
                let mut y = x;
                y[k] += dir * step[k];
                let f = plain_gjr(r, &y);
                if f > best {
                    let mut z = y;
                    z[k] += dir * step[k];
                    let fz = plain_gjr(r, &z);
                    (x, best) = if fz > f { (z, fz) } else { (y, f) };
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            step.iter_mut().for_each(|s| *s *= 0.5);
        }
    }
    (x, best)
}

/// `ln Gamma(a)` for `a` a positive multiple of 1/2, computed exactly from factorials.
fn ln_gamma_half_integer(a: f64) -> f64 {
    let twice = (2.0 * a).round() as u64;
    if twice.is_multiple_of(2) {
        (1..twice / 2).map(|k| (k as f64).ln()).sum()
    } else {
        // Gamma(n + 1/2) = sqrt(pi) (2n)! / (4^n n!)
        let n = (twice - 1) / 2;
        let ln_fact = |m: u64| (1..=m).map(|k| (k as f64).ln()).sum::<f64>();
        0.5 * PI.ln() + ln_fact(2 * n) - n as f64 * 4f64.ln() - ln_fact(n)
    }
}

/// Chi-square upper tail from the power series of the lower incomplete gamma:
/// `P(a, x) = x^a e^-x sum_n x^n / Gamma(a + n + 1)`.
pub fn chi_square_sf_series(x: f64, df: usize) -> f64 {
    let a = df as f64 / 2.0;
    let z = x / 2.0;
    if z == 0.0 {
        return 1.0;
    }
    let mut term = (a * z.ln() - z - ln_gamma_half_integer(a + 1.0)).exp();
    let mut sum = term;
    let mut n = 1.0;
    while term > 1e-18 * sum || n < z {
        term *= z / (a + n);
        sum += term;
        n += 1.0;
        if n > 10_000.0 {
            break;
        }
    }
    1.0 - sum
}

pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    sxy / (sxx * syy).sqrt()
}

/// Population variance.
pub fn variance(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n
}

/// Real roots of `x^3 + b x^2 + c x + d` with three real roots, descending.
pub fn cubic_roots(b: f64, c: f64, d: f64) -> [f64; 3] {
    let p = c - b * b / 3.0;
    let q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    let r = (-p / 3.0).sqrt();
    let arg = (-q / (2.0 * r * r * r)).clamp(-1.0, 1.0);
    let phi = arg.acos();
    let mut roots = [0.0; 3];
    for (k, root) in roots.iter_mut().enumerate() {
        *root = 2.0 * r * ((phi + 2.0 * PI * k as f64) / 3.0).cos() - b / 3.0;
    }
    roots.sort_by(|x, y| y.total_cmp(x));
    roots
}
