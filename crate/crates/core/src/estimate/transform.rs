//! Bijection between the open GJR constraint set and unconstrained space.
//!
//! The GJR block is written as three positive shares of the persistence
//! `s = alpha + beta + gamma/2`:
//!
//! ```text
//! alpha/2, (alpha + gamma)/2, beta  =  s * softmax(v1, v2, 0),   s = logistic(u)
//! ```
//!
//! so `alpha > 0`, `beta > 0`, `alpha + gamma > 0` and `s < 1` hold for every
//! real `(u, v1, v2)`, while `gamma` itself may be negative. Shape parameters
//! map through `omega2 = 1 + (OMEGA2_MAX - 1) * logistic(w)`. Location and
//! loading parameters pass through unchanged.

use crate::error::{Error, Result};
use crate::estimate::ParamLayout;
use crate::volmodel::ParamSet;

/// Upper guard on the MIDAS shape parameter.
pub const OMEGA2_MAX: f64 = 300.0;

fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

pub(crate) fn gjr_to_free(alpha: f64, beta: f64, gamma: f64) -> Result<[f64; 3]> {
    let a = 0.5 * alpha;
    let c = 0.5 * (alpha + gamma);
    let b = beta;
    if !(a > 0.0 && b > 0.0 && c > 0.0) {
        return Err(Error::Domain(format!(
            "need alpha > 0, beta > 0, alpha + gamma > 0 for the transform (got {alpha}, {beta}, {gamma})"
        )));
    }
    let s = a + b + c;
    if !(s < 1.0) {
        return Err(Error::Domain(format!("persistence {s} must be < 1")));
    }
    Ok([logit(s), (a / b).ln(), (c / b).ln()])
}

pub(crate) fn gjr_from_free(u: f64, v1: f64, v2: f64) -> (f64, f64, f64) {
    let s = logistic(u);
    // softmax with the beta share as reference, shifted for stability
    let top = v1.max(v2).max(0.0);
    let (e1, e2, e3) = ((v1 - top).exp(), (v2 - top).exp(), (-top).exp());
    let total = e1 + e2 + e3;
    let a = s * e1 / total;
    let c = s * e2 / total;
    let b = s * e3 / total;
    let alpha = 2.0 * a;
    (alpha, b, 2.0 * c - alpha)
}

pub(crate) fn omega2_to_free(omega2: f64) -> Result<f64> {
    if !(omega2 > 1.0 && omega2 < OMEGA2_MAX) {
        return Err(Error::Domain(format!("omega2 = {omega2} outside the open interval (1, {OMEGA2_MAX})")));
    }
    Ok(logit((omega2 - 1.0) / (OMEGA2_MAX - 1.0)))
}

pub(crate) fn omega2_from_free(w: f64) -> f64 {
    1.0 + (OMEGA2_MAX - 1.0) * logistic(w)
}

/// Natural parameters to the unconstrained vector (same layout and length).
pub fn transform_params(params: &ParamSet, layout: &ParamLayout) -> Result<Vec<f64>> {
    let nat = layout.to_vec(params)?;
    let mut z = nat.clone();
    let [u, v1, v2] = gjr_to_free(nat[1], nat[2], nat[3])?;
    z[1] = u;
    z[2] = v1;
    z[3] = v2;
    for &k in layout.omega2_slots() {
        z[k] = omega2_to_free(nat[k])?;
    }
    Ok(z)
}

/// Inverse of [`transform_params`].
pub fn untransform_params(z: &[f64], layout: &ParamLayout) -> Result<ParamSet> {
    if z.len() != layout.len() {
        return Err(Error::Mismatch { left: z.len(), right: layout.len() });
    }
    let mut nat = z.to_vec();
    let (alpha, beta, gamma) = gjr_from_free(z[1], z[2], z[3]);
    nat[1] = alpha;
    nat[2] = beta;
    nat[3] = gamma;
    for &k in layout.omega2_slots() {
        nat[k] = omega2_from_free(z[k]);
    }
    layout.from_vec(&nat)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::volmodel::Drivers;
    use approx::assert_relative_eq;

    #[test]
    fn gjr_round_trip() {
        let z = gjr_to_free(0.05, 0.9, 0.04).unwrap();
        let (a, b, g) = gjr_from_free(z[0], z[1], z[2]);
        assert_relative_eq!(a, 0.05, epsilon = 1e-12);
        assert_relative_eq!(b, 0.9, epsilon = 1e-12);
        assert_relative_eq!(g, 0.04, epsilon = 1e-12);
    }

    #[test]
    fn negative_gamma_is_reachable() {
        let z = gjr_to_free(0.1, 0.8, -0.05).unwrap();
        let (_, _, g) = gjr_from_free(z[0], z[1], z[2]);
        assert_relative_eq!(g, -0.05, epsilon = 1e-12);
    }

    #[test]
    fn persistence_vanishes_as_u_goes_to_minus_infinity() {
        let (a, b, g) = gjr_from_free(-60.0, 0.3, -0.2);
        assert!(a + b + 0.5 * g < 1e-25);
    }

    #[test]
    fn boundary_inputs_rejected() {
        assert!(gjr_to_free(0.0, 0.9, 0.04).is_err());
        assert!(gjr_to_free(0.05, 0.0, 0.04).is_err());
        assert!(gjr_to_free(0.05, 0.9, -0.05).is_err());
        assert!(gjr_to_free(0.05, 0.95, 0.0).is_err());
        assert!(omega2_to_free(1.0).is_err());
        assert!(omega2_to_free(300.0).is_err());
    }

    #[test]
    fn full_vector_round_trip() {
        let layout = ParamLayout::new(Drivers::RvMv);
        let p = ParamSet::new(Drivers::RvMv, 0.02, 0.05, 0.9, 0.04, 0.1).with_rv(0.004, 6.0271).with_mv(-0.3, 69.8142);
        let z = transform_params(&p, &layout).unwrap();
        let back = untransform_params(&z, &layout).unwrap();
        let (x, y) = (layout.to_vec(&p).unwrap(), layout.to_vec(&back).unwrap());
        for (a, b) in x.iter().zip(&y) {
            assert_relative_eq!(a, b, epsilon = 1e-12, max_relative = 1e-12);
        }
    }
}
