//! Serializable summary of a fit.

use serde::{Deserialize, Serialize};

use super::{Convergence, FitResult, ParamLayout};
use crate::volmodel::ModelSpec;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamEntry {
    pub name: String,
    pub value: f64,
    pub std_error: Option<f64>,
    pub t_stat: Option<f64>,
    pub pinned: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub schema_version: u32,
    pub series: String,
    pub spec: ModelSpec,
    pub converged: bool,
    pub params: Vec<ParamEntry>,
    pub llf: f64,
    pub aic: f64,
    pub bic: f64,
    pub k: usize,
    pub n_obs: usize,
    /// Percent.
    pub variance_ratio: f64,
    pub persistence: f64,
    pub sample_start: usize,
    pub convergence: Convergence,
}

impl FitReport {
    pub fn new(series: impl Into<String>, fit: &FitResult) -> Self {
        let layout = ParamLayout::new(fit.spec.drivers);
        let values = layout.to_vec_unchecked(&fit.params);
        let params = fit
            .names
            .iter()
            .zip(values)
            .zip(fit.std_errors.iter().zip(&fit.pinned))
            .map(|((name, value), (se, pinned))| ParamEntry {
                name: name.clone(),
                value,
                std_error: *se,
                t_stat: se.filter(|s| *s > 0.0).map(|s| value / s),
                pinned: *pinned,
            })
            .collect();
        Self {
            schema_version: SCHEMA_VERSION,
            series: series.into(),
            spec: fit.spec,
            converged: fit.convergence.converged,
            params,
            llf: fit.llf,
            aic: fit.aic,
            bic: fit.bic,
            k: fit.k,
            n_obs: fit.n_obs,
            variance_ratio: 100.0 * fit.variance_ratio,
            persistence: fit.params.persistence(),
            sample_start: fit.sample_start,
            convergence: fit.convergence.clone(),
        }
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }
}
