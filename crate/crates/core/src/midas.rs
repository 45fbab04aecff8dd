//! Beta-polynomial MIDAS lag weights.
//!
//! `phi_k ∝ (k/K)^(w1-1) (1-k/K)^(w2-1)` for `k = 1..=K`, normalized to one.
//! The grid is `k/K`, so for `w2 > 1` the last lag gets weight zero. `0^0`
//! is taken as 1, which makes `w1 = w2 = 1` exactly uniform.

use serde::Serialize;

use crate::error::{Error, Result};

/// Above this exponent the terms are built in log space.
const LOG_SPACE_EXPONENT: f64 = 50.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightVector {
    pub weights: Vec<f64>,
    pub omega1: f64,
    pub omega2: f64,
}

impl WeightVector {
    pub fn lags(&self) -> usize {
        self.weights.len()
    }

    /// `sum_k phi_k * x[k-1]`, where `x[0]` is the most recent lag.
    pub fn apply(&self, lagged: &[f64]) -> f64 {
        self.weights.iter().zip(lagged).map(|(w, x)| w * x).sum()
    }
}

pub fn beta_weights(lags: usize, omega1: f64, omega2: f64) -> Result<WeightVector> {
    let mut weights = vec![0.0; lags];
    fill_beta_weights(&mut weights, omega1, omega2)?;
    Ok(WeightVector { weights, omega1, omega2 })
}

/// The decaying form with `omega1` pinned to 1.
pub fn beta_weights_restricted(lags: usize, omega2: f64) -> Result<WeightVector> {
    beta_weights(lags, 1.0, omega2)
}

/// Writes normalized beta weights into `out` (its length is the lag order).
pub fn fill_beta_weights(out: &mut [f64], omega1: f64, omega2: f64) -> Result<()> {
    let lags = out.len();
    if lags == 0 {
        return Err(Error::Domain("lag order K must be at least 1".into()));
    }
    if !(omega1 >= 1.0 && omega2 >= 1.0) || !omega1.is_finite() || !omega2.is_finite() {
        return Err(Error::Domain(format!("shape parameters must be >= 1, got ({omega1}, {omega2})")));
    }
    if lags == 1 {
        // A single lag carries all the weight; the grid point k/K = 1 would
        // otherwise give 0/0 whenever omega2 > 1.
        out[0] = 1.0;
        return Ok(());
    }
    let (a, b) = (omega1 - 1.0, omega2 - 1.0);
    let kf = lags as f64;
    if a.max(b) > LOG_SPACE_EXPONENT {
        let mut max_log = f64::NEG_INFINITY;
        for (j, w) in out.iter_mut().enumerate() {
            let x = (j + 1) as f64 / kf;
            let l = log_pow(x, a) + log_pow(1.0 - x, b);
            *w = l;
            max_log = max_log.max(l);
        }
        if max_log == f64::NEG_INFINITY {
            return Err(Error::Degenerate("all beta-weight numerators are zero".into()));
        }
        for w in out.iter_mut() {
            *w = (*w - max_log).exp();
        }
    } else {
        for (j, w) in out.iter_mut().enumerate() {
            let x = (j + 1) as f64 / kf;
            *w = pow0(x, a) * pow0(1.0 - x, b);
        }
    }
    let total: f64 = out.iter().sum();
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::Degenerate("beta weights cannot be normalized".into()));
    }
    for w in out.iter_mut() {
        *w /= total;
    }
    Ok(())
}

/// `x^e` with `0^0 = 1`.
fn pow0(x: f64, e: f64) -> f64 {
    if e == 0.0 {
        1.0
    } else {
        x.powf(e)
    }
}

fn log_pow(x: f64, e: f64) -> f64 {
    if e == 0.0 {
        0.0
    } else {
        e * x.ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn uniform_when_both_shapes_are_one() {
        let w = beta_weights(3, 1.0, 1.0).unwrap();
        for x in &w.weights {
            assert_relative_eq!(*x, 1.0 / 3.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn linear_decay() {
        let w = beta_weights(4, 1.0, 2.0).unwrap();
        let expect = [0.5, 1.0 / 3.0, 1.0 / 6.0, 0.0];
        for (x, e) in w.weights.iter().zip(expect) {
            assert_relative_eq!(*x, e, epsilon = 1e-15);
        }
    }

    #[test]
    fn restricted_quadratic_decay() {
        let w = beta_weights_restricted(4, 3.0).unwrap();
        // (1 - k/4)^2 = [0.5625, 0.25, 0.0625, 0] over a total of 0.875
        let expect = [0.5625 / 0.875, 0.25 / 0.875, 0.0625 / 0.875, 0.0];
        for (x, e) in w.weights.iter().zip(expect) {
            assert_relative_eq!(*x, e, epsilon = 1e-15);
        }
        assert_relative_eq!(w.weights[0], 0.642857, epsilon = 1e-6);
        assert_eq!(beta_weights_restricted(2, 1.0).unwrap().weights, vec![0.5, 0.5]);
    }

    #[test]
    fn restricted_equals_full_with_unit_first_shape() {
        for &(k, w2) in &[(5, 1.0), (36, 6.0271), (100, 69.8142), (7, 2.5)] {
            assert_eq!(beta_weights_restricted(k, w2).unwrap(), beta_weights(k, 1.0, w2).unwrap());
        }
    }

    #[test]
    fn k36_estimate_shape() {
        let w = beta_weights(36, 1.0, 6.0271).unwrap();
        assert!(w.weights[..35].windows(2).all(|p| p[0] > p[1]));
        assert!(w.weights[..35].iter().all(|&x| x > 0.0));
        assert_eq!(w.weights[35], 0.0);
        assert_relative_eq!(w.weights.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
        // head weight by direct evaluation of (1 - k/36)^5.0271
        let raw: Vec<f64> = (1..=36).map(|k| (1.0 - k as f64 / 36.0).powf(5.0271)).collect();
        let total: f64 = raw.iter().sum();
        assert_relative_eq!(w.weights[0], raw[0] / total, epsilon = 1e-15);
    }

    #[test]
    fn hump_shape_with_free_first_parameter() {
        let w = beta_weights(10, 3.0, 3.0).unwrap();
        let peak = w.weights.iter().cloned().fold(0.0, f64::max);
        assert!(w.weights[0] < peak && w.weights[9] < peak);
    }

    #[test]
    fn log_space_branch_agrees_with_direct() {
        let w = beta_weights(40, 1.0, 50.5).unwrap();
        let raw: Vec<f64> = (1..=40).map(|k| (1.0 - k as f64 / 40.0).powf(49.5)).collect();
        let total: f64 = raw.iter().sum();
        for (x, r) in w.weights.iter().zip(&raw) {
            assert_relative_eq!(*x, r / total, max_relative = 1e-12, epsilon = 1e-300);
        }
    }

    #[test]
    fn single_lag_takes_all_weight() {
        assert_eq!(beta_weights(1, 1.0, 1.0).unwrap().weights, vec![1.0]);
        assert_eq!(beta_weights(1, 1.0, 7.0).unwrap().weights, vec![1.0]);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(beta_weights(0, 1.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(beta_weights(5, 0.5, 1.0), Err(Error::Domain(_))));
        assert!(matches!(beta_weights(5, 1.0, 0.99), Err(Error::Domain(_))));
        assert!(matches!(beta_weights(5, 1.0, f64::NAN), Err(Error::Domain(_))));
    }
}
