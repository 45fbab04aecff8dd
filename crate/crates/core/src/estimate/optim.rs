//! Derivative-free simplex search plus a damped Newton polish, both minimizing.

use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone)]
pub struct NelderMeadOptions {
    pub max_iterations: usize,
    /// Relative spread of objective values across the simplex.
    pub f_tol: f64,
    /// Largest coordinate distance of any vertex from the best vertex.
    pub x_tol: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self { max_iterations: 2000, f_tol: 1e-8, x_tol: 1e-6 }
    }
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn finite_or_inf(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else {
        f64::INFINITY
    }
}

/// Nelder-Mead with the standard coefficients (1, 2, 1/2, 1/2). Non-finite
/// objective values are treated as +inf, so infeasible points are simply
/// never accepted.
pub fn nelder_mead<F>(f: F, x0: &[f64], steps: &[f64], opts: &NelderMeadOptions) -> Minimum
where
    F: Fn(&[f64]) -> f64,
{
    let n = x0.len();
    let eval = |x: &[f64]| finite_or_inf(f(x));
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += steps[i];
        simplex.push(v);
    }
    let mut fv: Vec<f64> = simplex.iter().map(|x| eval(x)).collect();
    let mut order: Vec<usize> = (0..=n).collect();
    let mut iterations = 0;
    let mut converged = false;

    loop {
        order.sort_by(|&a, &b| fv[a].total_cmp(&fv[b]).then(a.cmp(&b)));
        let (best, worst, second) = (order[0], order[n], order[n - 1]);
        let spread = (fv[worst] - fv[best]).abs();
        let size = simplex
            .iter()
            .map(|v| v.iter().zip(&simplex[best]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if fv[best].is_finite() && spread <= opts.f_tol * (fv[best].abs() + 1e-12) && size <= opts.x_tol {
            converged = true;
            break;
        }
        if iterations >= opts.max_iterations {
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; n];
        for &k in &order[..n] {
            for (c, x) in centroid.iter_mut().zip(&simplex[k]) {
                *c += x / n as f64;
            }
        }
        let along =
            |t: f64| -> Vec<f64> { centroid.iter().zip(&simplex[worst]).map(|(c, w)| c + t * (c - w)).collect() };
        let xr = along(1.0);
        let fr = eval(&xr);
        if fr < fv[best] {
            let xe = along(2.0);
            let fe = eval(&xe);
            if fe < fr {
                simplex[worst] = xe;
                fv[worst] = fe;
            } else {
                simplex[worst] = xr;
                fv[worst] = fr;
            }
            continue;
        }
        if fr < fv[second] {
            simplex[worst] = xr;
            fv[worst] = fr;
            continue;
        }
        let (xc, fc) = if fr < fv[worst] {
            let xc = along(0.5);
            let fc = eval(&xc);
            (xc, fc)
        } else {
            let xc = along(-0.5);
            let fc = eval(&xc);
            (xc, fc)
        };
        if fc < fv[worst].min(fr) {
            simplex[worst] = xc;
            fv[worst] = fc;
            continue;
        }
        let xb = simplex[best].clone();
        for &k in &order[1..] {
            let shrunk: Vec<f64> = simplex[k].iter().zip(&xb).map(|(x, b)| b + 0.5 * (x - b)).collect();
            fv[k] = eval(&shrunk);
            simplex[k] = shrunk;
        }
    }
    let best = order[0];
    Minimum { x: simplex[best].clone(), f: fv[best], iterations, converged }
}

/// Central-difference gradient with absolute step `h`.
pub fn gradient<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64], h: f64) -> Vec<f64> {
    let mut xp = x.to_vec();
    (0..x.len())
        .map(|i| {
            xp[i] = x[i] + h;
            let fp = f(&xp);
            xp[i] = x[i] - h;
            let fm = f(&xp);
            xp[i] = x[i];
            (fp - fm) / (2.0 * h)
        })
        .collect()
}

/// Central-difference Hessian with per-coordinate steps.
pub fn hessian<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64], steps: &[f64]) -> DMatrix<f64> {
    let n = x.len();
    let f0 = f(x);
    let mut h = DMatrix::zeros(n, n);
    let mut xp = x.to_vec();
    for i in 0..n {
        let hi = steps[i];
        xp[i] = x[i] + hi;
        let fp = f(&xp);
        xp[i] = x[i] - hi;
        let fm = f(&xp);
        xp[i] = x[i];
        h[(i, i)] = (fp - 2.0 * f0 + fm) / (hi * hi);
        for j in 0..i {
            let hj = steps[j];
            let mut corner = |si: f64, sj: f64| {
                xp[i] = x[i] + si * hi;
                xp[j] = x[j] + sj * hj;
                let v = f(&xp);
                xp[i] = x[i];
                xp[j] = x[j];
                v
            };
            let v = (corner(1.0, 1.0) - corner(1.0, -1.0) - corner(-1.0, 1.0) + corner(-1.0, -1.0)) / (4.0 * hi * hj);
            h[(i, j)] = v;
            h[(j, i)] = v;
        }
    }
    h
}

#[derive(Debug, Clone)]
pub struct Polish {
    pub x: Vec<f64>,
    pub f: f64,
    pub grad_norm: f64,
    pub steps: usize,
    pub converged: bool,
}

/// Levenberg-damped Newton iterations from a point already near a minimum.
pub fn newton_polish<F: Fn(&[f64]) -> f64>(f: &F, x0: &[f64], f0: f64, grad_tol: f64, max_steps: usize) -> Polish {
    const GRAD_STEP: f64 = 1e-5;
    const HESS_STEP: f64 = 1e-4;
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut fx = f0;
    let mut g = gradient(f, &x, GRAD_STEP);
    let mut gnorm = norm(&g);
    let mut lambda = 1e-6;
    let mut steps = 0;
    while gnorm > grad_tol && steps < max_steps {
        steps += 1;
        let hess = hessian(f, &x, &vec![HESS_STEP; n]);
        let scale = hess.diagonal().iter().map(|d| d.abs()).fold(1.0, f64::max);
        let gv = DVector::from_vec(g.clone());
        let mut improved = false;
        for _ in 0..12 {
            let damped = &hess + DMatrix::identity(n, n) * (lambda * scale);
            if let Some(ch) = damped.cholesky() {
                let d = ch.solve(&(-&gv));
                let xn: Vec<f64> = x.iter().zip(d.iter()).map(|(a, b)| a + b).collect();
                let fnew = f(&xn);
                if fnew.is_finite() && fnew <= fx {
                    x = xn;
                    fx = fnew;
                    lambda = (lambda * 0.1).max(1e-12);
                    improved = true;
                    break;
                }
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
        g = gradient(f, &x, GRAD_STEP);
        gnorm = norm(&g);
    }
    Polish { x, f: fx, grad_norm: gnorm, steps, converged: gnorm <= grad_tol }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
