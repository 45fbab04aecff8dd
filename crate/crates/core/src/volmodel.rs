//! Long-run (MIDAS) and short-run (GJR-GARCH(1,1)) variance components.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::midas::fill_beta_weights;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Drivers {
    #[serde(rename = "rv")]
    Rv,
    #[serde(rename = "mv")]
    Mv,
    #[serde(rename = "rv+mv")]
    RvMv,
}

impl Drivers {
    pub fn has_rv(self) -> bool {
        matches!(self, Drivers::Rv | Drivers::RvMv)
    }

    pub fn has_mv(self) -> bool {
        matches!(self, Drivers::Mv | Drivers::RvMv)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Drivers::Rv => "rv",
            Drivers::Mv => "mv",
            Drivers::RvMv => "rv+mv",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Span {
    /// tau constant within each calendar month
    Fixed,
    /// tau updated every trading day from trailing windows
    Rolling,
}

impl Span {
    pub fn as_str(self) -> &'static str {
        match self {
            Span::Fixed => "fixed",
            Span::Rolling => "rolling",
        }
    }
}

/// Spacing between the K lagged rolling-window drivers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LagSpacing {
    /// lag k is the window ending k trading days back (overlapping windows)
    Day,
    /// lags step back one full window length (non-overlapping windows)
    Month,
}

/// What the leverage indicator tests for negativity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Indicator {
    /// `r[i-1] < 0`
    RawReturn,
    /// `r[i-1] - mu < 0`
    Innovation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelSpec {
    pub drivers: Drivers,
    pub span: Span,
    /// MIDAS lag order K.
    pub lags: usize,
    /// Rolling window length N' in trading days.
    pub window: usize,
    pub lag_spacing: LagSpacing,
    pub indicator: Indicator,
}

impl Default for ModelSpec {
    fn default() -> Self {
        Self {
            drivers: Drivers::Rv,
            span: Span::Fixed,
            lags: 36,
            window: 22,
            lag_spacing: LagSpacing::Day,
            indicator: Indicator::RawReturn,
        }
    }
}

impl ModelSpec {
    pub fn new(drivers: Drivers, span: Span) -> Self {
        Self { drivers, span, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.lags == 0 {
            return Err(Error::Config("lag order K must be at least 1".into()));
        }
        if self.window == 0 {
            return Err(Error::Config("rolling window N' must be at least 1".into()));
        }
        Ok(())
    }

    /// Index distance between consecutive lagged rolling drivers.
    pub fn rolling_stride(&self) -> usize {
        match self.lag_spacing {
            LagSpacing::Day => 1,
            LagSpacing::Month => self.window,
        }
    }

    /// First trading day with a complete set of rolling lags.
    pub fn rolling_burn_in(&self) -> usize {
        self.window + 1 + (self.lags - 1) * self.rolling_stride()
    }
}

/// Model parameters in natural coordinates; omega1 is pinned to 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamSet {
    pub mu: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub m: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub theta_rv: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub omega2_rv: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub theta_mv: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub omega2_mv: Option<f64>,
}

impl ParamSet {
    /// GJR parameters with the driver blocks set from `drivers`.
    pub fn new(drivers: Drivers, mu: f64, alpha: f64, beta: f64, gamma: f64, m: f64) -> Self {
        Self {
            mu,
            alpha,
            beta,
            gamma,
            m,
            theta_rv: drivers.has_rv().then_some(0.0),
            omega2_rv: drivers.has_rv().then_some(1.0),
            theta_mv: drivers.has_mv().then_some(0.0),
            omega2_mv: drivers.has_mv().then_some(1.0),
        }
    }

    pub fn with_rv(mut self, theta: f64, omega2: f64) -> Self {
        self.theta_rv = Some(theta);
        self.omega2_rv = Some(omega2);
        self
    }

    pub fn with_mv(mut self, theta: f64, omega2: f64) -> Self {
        self.theta_mv = Some(theta);
        self.omega2_mv = Some(omega2);
        self
    }

    /// `alpha + beta + gamma / 2`.
    pub fn persistence(&self) -> f64 {
        self.alpha + self.beta + 0.5 * self.gamma
    }

    /// Checks the GJR constraint set and that the driver blocks match `drivers`.
    pub fn validate(&self, drivers: Drivers) -> Result<()> {
        let all = [self.mu, self.alpha, self.beta, self.gamma, self.m];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("non-finite parameter".into()));
        }
        if !(self.alpha > 0.0) {
            return Err(Error::Domain(format!("alpha must be > 0, got {}", self.alpha)));
        }
        if !(self.beta >= 0.0) {
            return Err(Error::Domain(format!("beta must be >= 0, got {}", self.beta)));
        }
        if !(self.persistence() < 1.0) {
            return Err(Error::Domain(format!("alpha + beta + gamma/2 = {} must be < 1", self.persistence())));
        }
        if !(self.alpha + self.gamma >= 0.0) {
            return Err(Error::Domain(format!("alpha + gamma = {} must be >= 0", self.alpha + self.gamma)));
        }
        check_block("rv", drivers.has_rv(), self.theta_rv, self.omega2_rv)?;
        check_block("mv", drivers.has_mv(), self.theta_mv, self.omega2_mv)?;
        Ok(())
    }
}

fn check_block(name: &str, wanted: bool, theta: Option<f64>, omega2: Option<f64>) -> Result<()> {
    match (wanted, theta, omega2) {
        (true, Some(t), Some(w)) => {
            if !t.is_finite() {
                return Err(Error::Domain(format!("theta_{name} is not finite")));
            }
            if !(w >= 1.0) || !w.is_finite() {
                return Err(Error::Domain(format!("omega2_{name} must be >= 1, got {w}")));
            }
            Ok(())
        }
        (false, None, None) => Ok(()),
        (true, _, _) => Err(Error::Domain(format!("missing theta_{name}/omega2_{name}"))),
        (false, _, _) => {
            Err(Error::Domain(format!("theta_{name}/omega2_{name} given for a model without that driver")))
        }
    }
}

/// Long-run component over a contiguous index range.
#[derive(Debug, Clone, PartialEq)]
pub struct LongRun {
    /// Index (month in fixed mode, trading day in rolling mode) of `tau[0]`.
    pub first: usize,
    pub tau: Vec<f64>,
}

/// One lag-filtered driver term of `log tau`.
pub(crate) struct DriverTerm<'a> {
    pub theta: f64,
    pub weights: &'a [f64],
    /// Driver history; entries before `valid_from` are never read.
    pub series: &'a [f64],
    pub valid_from: usize,
    pub stride: usize,
}

impl DriverTerm<'_> {
    fn first_output(&self) -> usize {
        self.valid_from + 1 + (self.weights.len() - 1) * self.stride
    }
}

/// Accumulates `log tau[i] = m + sum over terms of theta * sum_k phi_k x[i-1-(k-1)*stride]`
/// for `i` in `from..to` into `out`.
pub(crate) fn log_tau_into(m: f64, terms: &[DriverTerm<'_>], from: usize, to: usize, out: &mut [f64]) {
    debug_assert_eq!(out.len(), to - from);
    out.fill(m);
    for term in terms {
        if term.theta == 0.0 {
            continue;
        }
        for (o, i) in out.iter_mut().zip(from..to) {
            let mut acc = 0.0;
            let mut idx = i - 1;
            for &w in term.weights {
                acc += w * term.series[idx];
                idx = idx.wrapping_sub(term.stride);
            }
            *o += term.theta * acc;
        }
    }
}

fn driver_weights(lags: usize, omega2: Option<f64>) -> Result<Vec<f64>> {
    let mut w = vec![0.0; lags];
    fill_beta_weights(&mut w, 1.0, omega2.unwrap_or(1.0))?;
    Ok(w)
}

fn long_run(
    params: &ParamSet,
    spec: &ModelSpec,
    rv: Option<&[f64]>,
    mv: Option<&[f64]>,
    valid_from: usize,
    stride: usize,
) -> Result<LongRun> {
    spec.validate()?;
    params.validate(spec.drivers)?;
    let need = |name: &str, wanted: bool, s: Option<&[f64]>| -> Result<Option<Vec<f64>>> {
        match (wanted, s) {
            (true, Some(x)) => Ok(Some(x.to_vec())),
            (true, None) => Err(Error::Config(format!("model needs a {name} driver series"))),
            (false, _) => Ok(None),
        }
    };
    let rv = need("realized-volatility", spec.drivers.has_rv(), rv)?;
    let mv = need("macro", spec.drivers.has_mv(), mv)?;
    let w_rv = driver_weights(spec.lags, params.omega2_rv)?;
    let w_mv = driver_weights(spec.lags, params.omega2_mv)?;
    let mut terms = Vec::new();
    if let Some(x) = rv.as_deref() {
        terms.push(DriverTerm { theta: params.theta_rv.unwrap_or(0.0), weights: &w_rv, series: x, valid_from, stride });
    }
    if let Some(x) = mv.as_deref() {
        terms.push(DriverTerm { theta: params.theta_mv.unwrap_or(0.0), weights: &w_mv, series: x, valid_from, stride });
    }
    let first = valid_from + 1 + (spec.lags - 1) * stride;
    let len = terms.iter().map(|t| t.series.len()).min().unwrap_or(0);
    for t in &terms {
        debug_assert_eq!(t.first_output(), first);
        if t.series[valid_from..].iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric { day: valid_from, what: "non-finite driver value".into() });
        }
    }
    if len <= first {
        return Err(Error::Window { first_valid: first });
    }
    let mut tau = vec![0.0; len - first];
    log_tau_into(params.m, &terms, first, len, &mut tau);
    for t in tau.iter_mut() {
        *t = t.exp();
    }
    if let Some(k) = tau.iter().position(|t| !(t.is_finite() && *t > 0.0)) {
        return Err(Error::Numeric { day: first + k, what: "long-run component overflowed".into() });
    }
    Ok(LongRun { first, tau })
}

/// Monthly long-run component from per-month driver histories (one entry per
/// month, oldest first). The first K months only serve as lag history, so
/// the result starts at month K.
pub fn long_run_fixed(
    params: &ParamSet,
    spec: &ModelSpec,
    rv_monthly: Option<&[f64]>,
    mv_monthly: Option<&[f64]>,
) -> Result<LongRun> {
    long_run(params, spec, rv_monthly, mv_monthly, 0, 1)
}

/// Daily long-run component from rolling-window drivers (full-length daily
/// arrays whose first N' entries are undefined).
pub fn long_run_rolling(
    params: &ParamSet,
    spec: &ModelSpec,
    rv_rolling: Option<&[f64]>,
    mv_rolling: Option<&[f64]>,
) -> Result<LongRun> {
    long_run(params, spec, rv_rolling, mv_rolling, spec.window, spec.rolling_stride())
}

/// GJR-GARCH(1,1) short-run component. `tau[i]` divides the squared
/// innovation of day `i-1` when forming `g[i]`; `g[0] = g_init`.
pub fn short_run_path(
    params: &ParamSet,
    indicator: Indicator,
    returns: &[f64],
    tau: &[f64],
    g_init: f64,
) -> Result<Vec<f64>> {
    if returns.len() != tau.len() {
        return Err(Error::Mismatch { left: returns.len(), right: tau.len() });
    }
    if !(g_init > 0.0) {
        return Err(Error::Domain(format!("g_init must be positive, got {g_init}")));
    }
    if let Some(k) = tau.iter().position(|t| !(*t > 0.0)) {
        return Err(Error::Domain(format!("tau must be positive (day {k})")));
    }
    let mut g = vec![0.0; returns.len()];
    if g.is_empty() {
        return Ok(g);
    }
    g[0] = g_init;
    short_run_fill(params, indicator, returns, tau, &mut g);
    Ok(g)
}

/// Fills `g[1..]` given `g[0]`.
pub(crate) fn short_run_fill(p: &ParamSet, indicator: Indicator, r: &[f64], tau: &[f64], g: &mut [f64]) {
    let omega = 1.0 - p.alpha - p.beta - 0.5 * p.gamma;
    for i in 1..g.len() {
        let e = r[i - 1] - p.mu;
        let negative = match indicator {
            Indicator::RawReturn => r[i - 1] < 0.0,
            Indicator::Innovation => e < 0.0,
        };
        let a = if negative { p.alpha + p.gamma } else { p.alpha };
        g[i] = omega + a * e * e / tau[i] + p.beta * g[i - 1];
    }
}

/// `sigma2 = tau * g` with both components kept.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariancePath {
    pub tau: Vec<f64>,
    pub g: Vec<f64>,
    pub sigma2: Vec<f64>,
}

pub fn conditional_variance(tau: Vec<f64>, g: Vec<f64>) -> Result<VariancePath> {
    if tau.len() != g.len() {
        return Err(Error::Mismatch { left: tau.len(), right: g.len() });
    }
    if tau.iter().chain(&g).any(|v| !(*v > 0.0)) {
        return Err(Error::Domain("variance components must be positive".into()));
    }
    let sigma2 = tau.iter().zip(&g).map(|(t, g)| t * g).collect();
    Ok(VariancePath { tau, g, sigma2 })
}

/// Repeats each month's value for each of its `day_counts` trading days.
pub fn broadcast_monthly(monthly: &[f64], day_counts: &[usize]) -> Vec<f64> {
    monthly.iter().zip(day_counts).flat_map(|(&v, &n)| std::iter::repeat_n(v, n)).collect()
}
