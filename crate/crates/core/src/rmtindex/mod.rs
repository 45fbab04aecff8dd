//! Composite risk indices from the leading eigenvector of the correlation
//! matrix of member series.
//!
//! Members are intersected to their common month range, standardized with the
//! population standard deviation, correlated, and decomposed. The composite
//! index weights the *raw* member series by the leading eigenvector and
//! divides by the eigenvector sum. The eigenvector sign is chosen so that
//! this sum is positive.

mod groups;
mod jacobi;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::timeseries::MonthlySeries;

pub use groups::{default_groups, load_groups, parse_groups, GroupConfig};
pub use jacobi::{jacobi_eigen, SymmetricEigen};

/// Off-diagonal tolerance for the Jacobi solver.
pub const JACOBI_TOL: f64 = 1e-12;
/// Below this magnitude the eigenvector sum is treated as zero.
pub const WEIGHT_SUM_EPS: f64 = 1e-12;

/// Zero mean, unit population standard deviation.
pub fn standardize(series: &MonthlySeries) -> Result<MonthlySeries> {
    let x = series.values();
    if x.len() < 2 {
        return Err(Error::Length { needed: 2, got: x.len() });
    }
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let sd = var.sqrt();
    if !(sd > 0.0) || sd <= 1e-14 * mean.abs() {
        return Err(Error::ZeroVariance(series.label().to_string()));
    }
    let values = x.iter().map(|v| (v - mean) / sd).collect();
    MonthlySeries::new(series.label(), series.months().to_vec(), values)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationMatrix {
    pub labels: Vec<String>,
    #[serde(serialize_with = "serialize_matrix")]
    pub values: DMatrix<f64>,
}

fn serialize_matrix<S: serde::Serializer>(m: &DMatrix<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(m.nrows()))?;
    for r in 0..m.nrows() {
        seq.serialize_element(&m.row(r).iter().copied().collect::<Vec<f64>>())?;
    }
    seq.end()
}

/// Correlation of series that already share an identical month range.
pub fn correlation_matrix(panel: &[MonthlySeries]) -> Result<CorrelationMatrix> {
    let first = panel.first().ok_or(Error::Length { needed: 1, got: 0 })?;
    for s in panel {
        if s.months() != first.months() {
            return Err(Error::Alignment(format!(
                "`{}` covers {:?}..{:?}, `{}` covers {:?}..{:?}",
                s.label(),
                s.first_month(),
                s.last_month(),
                first.label(),
                first.first_month(),
                first.last_month()
            )));
        }
    }
    let z = panel.iter().map(standardize).collect::<Result<Vec<_>>>()?;
    let n = panel.len();
    let len = first.len() as f64;
    let mut c = DMatrix::<f64>::identity(n, n);
    for i in 0..n {
        for j in 0..i {
            let r = z[i].values().iter().zip(z[j].values()).map(|(a, b)| a * b).sum::<f64>() / len;
            let r = r.clamp(-1.0, 1.0);
            c[(i, j)] = r;
            c[(j, i)] = r;
        }
    }
    Ok(CorrelationMatrix { labels: panel.iter().map(|s| s.label().to_string()).collect(), values: c })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Eigenportfolio {
    pub labels: Vec<String>,
    /// Descending.
    pub eigenvalues: Vec<f64>,
    /// Leading unit eigenvector, signed so that its entries sum to a positive value.
    pub leading_vector: Vec<f64>,
    /// `leading_vector / sum(leading_vector)`.
    pub weights: Vec<f64>,
    #[serde(skip)]
    pub index: Option<MonthlySeries>,
}

/// Decomposes `C` and fixes the sign of the leading eigenvector.
pub fn eigen_decompose(corr: &CorrelationMatrix) -> Result<Eigenportfolio> {
    let eig = jacobi_eigen(&corr.values, JACOBI_TOL)?;
    let mut u: Vec<f64> = eig.eigenvectors.column(0).iter().copied().collect();
    let sum: f64 = u.iter().sum();
    if sum.abs() <= WEIGHT_SUM_EPS {
        return Err(Error::Degenerate("leading eigenvector sums to zero under both signs".into()));
    }
    if sum < 0.0 {
        u.iter_mut().for_each(|x| *x = -*x);
    }
    let total: f64 = u.iter().sum();
    Ok(Eigenportfolio {
        labels: corr.labels.clone(),
        eigenvalues: eig.eigenvalues.iter().copied().collect(),
        weights: u.iter().map(|x| x / total).collect(),
        leading_vector: u,
        index: None,
    })
}

/// Fills in the composite index: the eigenvector-weighted average of the raw series.
pub fn eigenportfolio_index(panel: &[MonthlySeries], mut ep: Eigenportfolio, name: &str) -> Result<Eigenportfolio> {
    if panel.len() < 2 {
        return Err(Error::Config(format!("`{name}` needs at least 2 members, got {}", panel.len())));
    }
    if panel.len() != ep.leading_vector.len() {
        return Err(Error::Mismatch { left: panel.len(), right: ep.leading_vector.len() });
    }
    let sum: f64 = ep.leading_vector.iter().sum();
    if sum.abs() <= WEIGHT_SUM_EPS {
        return Err(Error::Degenerate("eigenvector weights sum to zero".into()));
    }
    let len = panel[0].len();
    let values = (0..len)
        .map(|t| panel.iter().zip(&ep.leading_vector).map(|(s, u)| u * s.values()[t]).sum::<f64>() / sum)
        .collect();
    ep.index = Some(MonthlySeries::new(name, panel[0].months().to_vec(), values)?);
    Ok(ep)
}

/// Restricts every series to the months they all cover.
pub fn intersect_ranges(panel: &[MonthlySeries]) -> Result<Vec<MonthlySeries>> {
    let lo = panel.iter().filter_map(|s| s.first_month()).max();
    let hi = panel.iter().filter_map(|s| s.last_month()).min();
    match (lo, hi) {
        (Some(lo), Some(hi)) if lo <= hi && panel.iter().all(|s| !s.is_empty()) => {
            panel.iter().map(|s| s.slice(lo, hi)).collect()
        }
        _ => Err(Error::Alignment("member series have no months in common".into())),
    }
}

/// Full pipeline for one group: resolve members, align, correlate, decompose, index.
pub fn construct_index(group: &GroupConfig, available: &[MonthlySeries]) -> Result<Eigenportfolio> {
    group.validate()?;
    let members = group
        .members
        .iter()
        .map(|label| {
            available
                .iter()
                .find(|s| s.label() == label)
                .cloned()
                .ok_or_else(|| Error::Config(format!("group `{}`: unknown member `{label}`", group.name)))
        })
        .collect::<Result<Vec<_>>>()?;
    let aligned = intersect_ranges(&members)?;
    let corr = correlation_matrix(&aligned)?;
    let ep = eigen_decompose(&corr)?;
    eigenportfolio_index(&aligned, ep, &group.name)
}

/// `max |U^T U - I|` for an eigenvector matrix.
pub fn orthonormality_error(u: &DMatrix<f64>) -> f64 {
    let n = u.ncols();
    (u.transpose() * u - DMatrix::<f64>::identity(n, n)).amax()
}

/// Equicorrelation matrix with off-diagonal `rho`.
pub fn equicorrelation(n: usize, rho: f64) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { rho })
}

/// Pearson correlation of two equal-length slices.
pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    sxy / (sxx * syy).sqrt()
}

/// Convenience wrapper for tests and reports: eigenvalues of a raw matrix.
pub fn eigenvalues_of(m: &DMatrix<f64>) -> Result<DVector<f64>> {
    Ok(jacobi_eigen(m, JACOBI_TOL)?.eigenvalues)
}
