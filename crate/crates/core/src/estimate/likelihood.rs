//! Gaussian quasi-likelihood of a GJR-GARCH-MIDAS specification.

use crate::error::{Error, Result};
use crate::midas::fill_beta_weights;
use crate::timeseries::{
    expand_monthly_to_daily, monthly_realized_vol, rolling_macro_series, rolling_realized_vol_series, MonthlySeries,
    ReturnPanel,
};
use crate::volmodel::{log_tau_into, short_run_fill, DriverTerm, ModelSpec, ParamSet, Span, VariancePath};

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Return panel plus the optional monthly macro driver (already transformed).
#[derive(Debug, Clone)]
pub struct ModelData {
    pub panel: ReturnPanel,
    pub macro_series: Option<MonthlySeries>,
}

impl ModelData {
    pub fn new(panel: ReturnPanel, macro_series: Option<MonthlySeries>) -> Self {
        Self { panel, macro_series }
    }
}

/// `-1/2 * sum (ln 2pi + ln s2 + (r - mu)^2 / s2)` over aligned slices.
pub fn gaussian_loglik(returns: &[f64], mu: f64, sigma2: &[f64]) -> Result<f64> {
    if returns.len() != sigma2.len() {
        return Err(Error::Mismatch { left: returns.len(), right: sigma2.len() });
    }
    let mut acc = 0.0;
    for (d, (r, s2)) in returns.iter().zip(sigma2).enumerate() {
        if !(*s2 > 0.0 && s2.is_finite()) {
            return Err(Error::Numeric { day: d, what: format!("conditional variance {s2}") });
        }
        let e = r - mu;
        acc += s2.ln() + e * e / s2;
    }
    Ok(-0.5 * (returns.len() as f64 * LN_2PI + acc))
}

/// Driver histories and burn-in bookkeeping for one (data, spec) pair.
///
/// The likelihood sample starts at the later of (a) the first day of month K
/// and (b) the first day with a complete set of rolling lags, for both span
/// modes, so fixed-span and rolling fits of the same data share a sample.
#[derive(Debug, Clone)]
pub struct Prepared {
    spec: ModelSpec,
    returns: Vec<f64>,
    start: usize,
    month_of_day: Vec<usize>,
    day_counts: Vec<usize>,
    rv: Option<Vec<f64>>,
    mv: Option<Vec<f64>>,
}

impl Prepared {
    pub fn new(data: &ModelData, spec: &ModelSpec) -> Result<Self> {
        spec.validate()?;
        let panel = &data.panel;
        if spec.drivers.has_mv() && data.macro_series.is_none() {
            return Err(Error::Config(format!("drivers `{}` need a macro series", spec.drivers.as_str())));
        }
        let n_months = panel.n_months();
        if n_months <= spec.lags {
            let first_valid = panel.months().last().map(|b| b.start + b.len).unwrap_or(0) + 1;
            return Err(Error::Window { first_valid });
        }
        let start = panel.months()[spec.lags].start.max(spec.rolling_burn_in());
        if start + 1 >= panel.n_days() {
            return Err(Error::Window { first_valid: start });
        }
        let (rv, mv) = match spec.span {
            Span::Fixed => {
                let rv = spec.drivers.has_rv().then(|| monthly_realized_vol(panel));
                let mv = match (&data.macro_series, spec.drivers.has_mv()) {
                    (Some(m), true) => Some(
                        panel
                            .months()
                            .iter()
                            .map(|b| m.get(b.month).ok_or_else(|| Error::Coverage(b.month.to_string())))
                            .collect::<Result<Vec<_>>>()?,
                    ),
                    _ => None,
                };
                (rv, mv)
            }
            Span::Rolling => {
                let rv = spec.drivers.has_rv().then(|| rolling_realized_vol_series(panel.returns(), spec.window));
                let mv = match (&data.macro_series, spec.drivers.has_mv()) {
                    (Some(m), true) => {
                        let daily = expand_monthly_to_daily(m, panel.dates())?;
                        Some(rolling_macro_series(daily.values(), spec.window))
                    }
                    _ => None,
                };
                (rv, mv)
            }
        };
        Ok(Self {
            spec: *spec,
            returns: panel.returns().to_vec(),
            start,
            month_of_day: panel.month_index_of_days(),
            day_counts: panel.months().iter().map(|b| b.len).collect(),
            rv,
            mv,
        })
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    /// First day of the likelihood sample (its `g` is initialized to 1).
    pub fn sample_start(&self) -> usize {
        self.start
    }

    /// Days contributing to the likelihood: the sample minus its first day.
    pub fn n_obs(&self) -> usize {
        self.returns.len() - self.start - 1
    }

    pub fn sample_returns(&self) -> &[f64] {
        &self.returns[self.start..]
    }

    pub fn rv_driver(&self) -> Option<&[f64]> {
        self.rv.as_deref()
    }

    pub fn mv_driver(&self) -> Option<&[f64]> {
        self.mv.as_deref()
    }

    /// Day counts of the calendar months lying entirely inside the sample.
    pub fn full_sample_month_counts(&self) -> Vec<usize> {
        let first_month = self.month_of_day[self.start];
        let skip_first = self.start > 0 && self.month_of_day[self.start - 1] == first_month;
        let from = if skip_first { first_month + 1 } else { first_month };
        self.day_counts[from..].to_vec()
    }

    /// Offset of the first full month within the sample.
    pub(crate) fn full_month_offset(&self) -> usize {
        let first_month = self.month_of_day[self.start];
        if self.start > 0 && self.month_of_day[self.start - 1] == first_month {
            self.day_counts[..=first_month].iter().sum::<usize>() - self.start
        } else {
            0
        }
    }

    fn tau(&self, p: &ParamSet) -> Result<Vec<f64>> {
        let spec = &self.spec;
        let mut w_rv = vec![0.0; spec.lags];
        let mut w_mv = vec![0.0; spec.lags];
        let mut terms = Vec::with_capacity(2);
        let (valid_from, stride) = match spec.span {
            Span::Fixed => (0, 1),
            Span::Rolling => (spec.window, spec.rolling_stride()),
        };
        if let Some(series) = self.rv.as_deref() {
            fill_beta_weights(&mut w_rv, 1.0, p.omega2_rv.unwrap_or(1.0))?;
            terms.push(DriverTerm { theta: p.theta_rv.unwrap_or(0.0), weights: &w_rv, series, valid_from, stride });
        }
        if let Some(series) = self.mv.as_deref() {
            fill_beta_weights(&mut w_mv, 1.0, p.omega2_mv.unwrap_or(1.0))?;
            terms.push(DriverTerm { theta: p.theta_mv.unwrap_or(0.0), weights: &w_mv, series, valid_from, stride });
        }
        let n = self.returns.len();
        let mut tau = vec![0.0; n - self.start];
        match spec.span {
            Span::Fixed => {
                let m0 = self.month_of_day[self.start];
                let m1 = self.day_counts.len();
                let mut log_tau = vec![0.0; m1 - m0];
                log_tau_into(p.m, &terms, m0, m1, &mut log_tau);
                let monthly: Vec<f64> = log_tau.iter().map(|l| l.exp()).collect();
                for (t, d) in tau.iter_mut().zip(self.start..n) {
                    *t = monthly[self.month_of_day[d] - m0];
                }
            }
            Span::Rolling => {
                log_tau_into(p.m, &terms, self.start, n, &mut tau);
                tau.iter_mut().for_each(|t| *t = t.exp());
            }
        }
        if let Some(k) = tau.iter().position(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(Error::Numeric { day: self.start + k, what: format!("long-run component {}", tau[k]) });
        }
        Ok(tau)
    }

    /// Variance path over the sample days plus the log-likelihood.
    pub fn evaluate(&self, p: &ParamSet) -> Result<(f64, VariancePath)> {
        p.validate(self.spec.drivers)?;
        let tau = self.tau(p)?;
        let r = &self.returns[self.start..];
        let mut g = vec![0.0; r.len()];
        g[0] = 1.0;
        short_run_fill(p, self.spec.indicator, r, &tau, &mut g);
        let sigma2: Vec<f64> = tau.iter().zip(&g).map(|(t, g)| t * g).collect();
        let llf = gaussian_loglik(&r[1..], p.mu, &sigma2[1..]).map_err(|e| match e {
            Error::Numeric { day, what } => Error::Numeric { day: self.start + 1 + day, what },
            other => other,
        })?;
        Ok((llf, VariancePath { tau, g, sigma2 }))
    }

    pub fn log_likelihood(&self, p: &ParamSet) -> Result<f64> {
        self.evaluate(p).map(|(llf, _)| llf)
    }
}

/// Log-likelihood of `params` on `data` under `spec`.
pub fn log_likelihood(params: &ParamSet, data: &ModelData, spec: &ModelSpec) -> Result<f64> {
    Prepared::new(data, spec)?.log_likelihood(params)
}
