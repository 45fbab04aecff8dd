//! Standard errors from the inverse observed information.

use nalgebra::{DMatrix, SymmetricEigen};

use super::likelihood::{ModelData, Prepared};
use super::optim::hessian;
use super::ParamLayout;
use crate::error::Result;
use crate::volmodel::{ModelSpec, ParamSet};

const REL_STEP: f64 = 1e-4;
const STEP_FLOOR: f64 = 1e-2;
/// Loading on a near-null eigenvector above which a coordinate is unidentified.
const NULL_LOADING: f64 = 1e-3;
const NULL_EIG_REL: f64 = 1e-10;

/// Standard errors from the central-difference Hessian of `neg_llf` at `x`.
///
/// Coordinates whose Hessian rows are non-finite, or which load on a
/// (near-)null direction of the Hessian, get `None`; the rest come from the
/// inverse of the remaining positive-definite block.
pub fn observed_information_std_errors<F: Fn(&[f64]) -> f64>(neg_llf: F, x: &[f64]) -> Vec<Option<f64>> {
    let n = x.len();
    let steps: Vec<f64> = x.iter().map(|v| REL_STEP * v.abs().max(STEP_FLOOR)).collect();
    let h = hessian(&neg_llf, x, &steps);
    let mut keep: Vec<usize> = (0..n).filter(|&i| h[(i, i)].is_finite()).collect();
    // drop the worst row until the kept block is finite
    loop {
        let bad: Vec<usize> = keep.iter().map(|&i| keep.iter().filter(|&&j| !h[(i, j)].is_finite()).count()).collect();
        match bad.iter().enumerate().filter(|(_, c)| **c > 0).max_by_key(|(_, c)| **c) {
            Some((a, _)) => {
                keep.remove(a);
            }
            None => break,
        }
    }

    let mut out = vec![None; n];
    loop {
        if keep.is_empty() {
            return out;
        }
        let sub = DMatrix::from_fn(keep.len(), keep.len(), |a, b| h[(keep[a], keep[b])]);
        let eig = SymmetricEigen::new(sub.clone());
        let top = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut drop = vec![false; keep.len()];
        for (j, &lam) in eig.eigenvalues.iter().enumerate() {
            if lam <= NULL_EIG_REL * top {
                for (a, d) in drop.iter_mut().enumerate() {
                    if eig.eigenvectors[(a, j)].abs() > NULL_LOADING {
                        *d = true;
                    }
                }
            }
        }
        if drop.iter().any(|d| *d) {
            keep = keep.iter().zip(&drop).filter(|(_, d)| !**d).map(|(k, _)| *k).collect();
            continue;
        }
        let Some(ch) = sub.cholesky() else { return out };
        let inv = ch.inverse();
        for (a, &k) in keep.iter().enumerate() {
            let v = inv[(a, a)];
            if v > 0.0 && v.is_finite() {
                out[k] = Some(v.sqrt());
            }
        }
        return out;
    }
}

pub(crate) fn std_errors_prepared(
    params: &ParamSet,
    prep: &Prepared,
    layout: &ParamLayout,
    free: &[bool],
) -> Vec<Option<f64>> {
    let Ok(nat) = layout.to_vec(params) else { return vec![None; layout.len()] };
    let free_idx: Vec<usize> = (0..nat.len()).filter(|&k| free[k]).collect();
    let x: Vec<f64> = free_idx.iter().map(|&k| nat[k]).collect();
    let neg_llf = |y: &[f64]| {
        let mut v = nat.clone();
        for (&k, &yk) in free_idx.iter().zip(y) {
            v[k] = yk;
        }
        layout.from_vec(&v).and_then(|p| prep.log_likelihood(&p)).map(|l| -l).unwrap_or(f64::NAN)
    };
    let se = observed_information_std_errors(neg_llf, &x);
    let mut out = vec![None; nat.len()];
    for (&k, s) in free_idx.iter().zip(se) {
        out[k] = s;
    }
    out
}

/// Standard errors of every parameter of `params`, in layout order.
pub fn std_errors(params: &ParamSet, data: &ModelData, spec: &ModelSpec) -> Result<Vec<Option<f64>>> {
    let prep = Prepared::new(data, spec)?;
    let layout = ParamLayout::new(spec.drivers);
    params.validate(spec.drivers)?;
    Ok(std_errors_prepared(params, &prep, &layout, &vec![true; layout.len()]))
}
