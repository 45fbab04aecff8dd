//! Normality, autocorrelation and ARCH-effect tests with chi-square p-values.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::timeseries::descriptive_stats;

pub const DEFAULT_LB_LAGS: usize = 20;
pub const DEFAULT_ARCH_LAGS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestResult {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lags: Option<usize>,
    /// Set when the test had nothing to measure (e.g. constant squares).
    pub degenerate: bool,
}

impl TestResult {
    fn new(statistic: f64, df: usize, lags: Option<usize>) -> Self {
        Self { statistic, df, p_value: chi_square_sf(statistic, df), lags, degenerate: false }
    }
}

/// Upper tail of the chi-square distribution with `df` degrees of freedom.
pub fn chi_square_sf(x: f64, df: usize) -> f64 {
    assert!(df >= 1, "chi-square needs df >= 1");
    if x <= 0.0 {
        return 1.0;
    }
    if x.is_infinite() {
        return 0.0;
    }
    let dist = ChiSquared::new(df as f64).expect("df >= 1");
    dist.sf(x).clamp(0.0, 1.0)
}

/// `JB = n (S^2/6 + (K-3)^2/24)` with two degrees of freedom.
pub fn jarque_bera(series: &[f64]) -> Result<TestResult> {
    if series.len() < 4 {
        return Err(Error::Length { needed: 4, got: series.len() });
    }
    let s = descriptive_stats(series)?;
    let (skew, kurt) = match (s.skewness, s.kurtosis) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::ZeroVariance("jarque-bera input".into())),
    };
    let n = series.len() as f64;
    let jb = n * (skew * skew / 6.0 + (kurt - 3.0).powi(2) / 24.0);
    Ok(TestResult::new(jb, 2, None))
}

/// Autocorrelations at lags `1..=max_lag` with the n-denominator estimator.
pub fn autocorrelations(series: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    let n = series.len();
    let mean = series.iter().sum::<f64>() / n as f64;
    let d: Vec<f64> = series.iter().map(|x| x - mean).collect();
    let c0: f64 = d.iter().map(|x| x * x).sum();
    if !(c0 > 0.0) {
        return Err(Error::ZeroVariance("autocorrelation input".into()));
    }
    Ok((1..=max_lag).map(|k| d[k..].iter().zip(&d[..n - k]).map(|(a, b)| a * b).sum::<f64>() / c0).collect())
}

/// `Q = n (n+2) sum_{k=1}^{m} rho_k^2 / (n - k)` on `m` degrees of freedom.
pub fn ljung_box(series: &[f64], lags: usize) -> Result<TestResult> {
    let n = series.len();
    if lags == 0 || n <= lags {
        return Err(Error::Domain(format!("ljung-box needs n > m >= 1 (n = {n}, m = {lags})")));
    }
    let rho = autocorrelations(series, lags)?;
    let nf = n as f64;
    let q = nf * (nf + 2.0) * rho.iter().enumerate().map(|(k, r)| r * r / (nf - (k + 1) as f64)).sum::<f64>();
    Ok(TestResult::new(q, lags, Some(lags)))
}

/// Ljung-Box on the squared series.
pub fn ljung_box_squared(series: &[f64], lags: usize) -> Result<TestResult> {
    let sq: Vec<f64> = series.iter().map(|x| x * x).collect();
    ljung_box(&sq, lags)
}

/// Engle's LM test: regress squared demeaned values on an intercept and `q`
/// of their own lags; `LM = n_eff * R^2` on `q` degrees of freedom.
pub fn arch_lm(series: &[f64], lags: usize) -> Result<TestResult> {
    let n = series.len();
    if lags == 0 || n <= 2 * lags + 1 {
        return Err(Error::Domain(format!("arch-lm needs n > 2q + 1 (n = {n}, q = {lags})")));
    }
    let mean = series.iter().sum::<f64>() / n as f64;
    let e2: Vec<f64> = series.iter().map(|x| (x - mean) * (x - mean)).collect();
    let n_eff = n - lags;
    let y = DVector::from_iterator(n_eff, e2[lags..].iter().copied());
    let x = DMatrix::from_fn(n_eff, lags + 1, |t, j| if j == 0 { 1.0 } else { e2[lags + t - j] });
    let degenerate = TestResult { statistic: 0.0, df: lags, p_value: 1.0, lags: Some(lags), degenerate: true };

    let y_mean = y.mean();
    let tss: f64 = y.iter().map(|v| (v - y_mean) * (v - y_mean)).sum();
    if !(tss > 1e-24 * (1.0 + y_mean * y_mean) * n_eff as f64) {
        return Ok(degenerate);
    }
    let xtx = x.transpose() * &x;
    let xty = x.transpose() * &y;
    let beta = match xtx.cholesky() {
        Some(ch) => ch.solve(&xty),
        None => return Ok(degenerate),
    };
    let resid = &y - &x * beta;
    let rss = resid.norm_squared();
    let r2 = (1.0 - rss / tss).clamp(0.0, 1.0);
    Ok(TestResult::new(n_eff as f64 * r2, lags, Some(lags)))
}
