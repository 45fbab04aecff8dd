use std::path::PathBuf;

use clap::Args;
use midasvol::estimate::FitReport;
use serde::Serialize;

use crate::{ensure_dir, out_dir, write_text, CliError, CliResult};

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    /// Fit report JSON files written by `fit`.
    #[arg(required = true)]
    pub fits: Vec<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub file: String,
    pub series: String,
    pub drivers: String,
    pub span: String,
    pub k: usize,
    pub n_obs: usize,
    pub llf: f64,
    pub aic: f64,
    pub bic: f64,
    pub variance_ratio: f64,
    pub converged: bool,
    /// AIC minus the smallest AIC in the comparison.
    pub delta_aic: f64,
    pub delta_bic: f64,
}

/// Fixed versus rolling fits of the same series and drivers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpanComparison {
    pub series: String,
    pub drivers: String,
    pub aic_fixed: f64,
    pub aic_rolling: f64,
    /// `aic_rolling - aic_fixed`; negative favours the rolling window.
    pub aic_difference: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub schema_version: u32,
    pub rows: Vec<ComparisonRow>,
    pub best_aic: String,
    pub best_bic: String,
    pub span_comparisons: Vec<SpanComparison>,
}

pub fn compare(named: &[(String, FitReport)]) -> CliResult<ComparisonReport> {
    if named.is_empty() {
        return Err(CliError::usage("no fit reports given"));
    }
    let min_aic = named.iter().map(|(_, r)| r.aic).fold(f64::INFINITY, f64::min);
    let min_bic = named.iter().map(|(_, r)| r.bic).fold(f64::INFINITY, f64::min);
    let rows: Vec<ComparisonRow> = named
        .iter()
        .map(|(file, r)| ComparisonRow {
            file: file.clone(),
            series: r.series.clone(),
            drivers: r.spec.drivers.as_str().into(),
            span: r.spec.span.as_str().into(),
            k: r.k,
            n_obs: r.n_obs,
            llf: r.llf,
            aic: r.aic,
            bic: r.bic,
            variance_ratio: r.variance_ratio,
            converged: r.converged,
            delta_aic: r.aic - min_aic,
            delta_bic: r.bic - min_bic,
        })
        .collect();
    // first row wins ties, so the result does not depend on float comparisons of equal values
    let pick = |key: fn(&ComparisonRow) -> f64| {
        rows.iter().fold(&rows[0], |best, r| if key(r) < key(best) { r } else { best }).file.clone()
    };
    let mut span_comparisons = Vec::new();
    for f in rows.iter().filter(|r| r.span == "fixed") {
        if let Some(r) = rows.iter().find(|r| r.span == "rolling" && r.series == f.series && r.drivers == f.drivers) {
            span_comparisons.push(SpanComparison {
                series: f.series.clone(),
                drivers: f.drivers.clone(),
                aic_fixed: f.aic,
                aic_rolling: r.aic,
                aic_difference: r.aic - f.aic,
            });
        }
    }
    Ok(ComparisonReport {
        schema_version: midasvol::estimate::SCHEMA_VERSION,
        best_aic: pick(|r| r.aic),
        best_bic: pick(|r| r.bic),
        rows,
        span_comparisons,
    })
}

pub fn render_table(c: &ComparisonReport) -> String {
    let mut out = format!(
        "{:<36}{:>7}{:>9}{:>13}{:>13}{:>13}{:>9}{:>10}\n",
        "file", "drivers", "span", "llf", "aic", "bic", "vr %", "d_aic"
    );
    for r in &c.rows {
        let flag = if r.converged { "" } else { "  (not converged)" };
        out.push_str(&format!(
            "{:<36}{:>7}{:>9}{:>13.2}{:>13.2}{:>13.2}{:>9.2}{:>10.2}{flag}\n",
            r.file, r.drivers, r.span, r.llf, r.aic, r.bic, r.variance_ratio, r.delta_aic
        ));
    }
    for s in &c.span_comparisons {
        out.push_str(&format!("{} {}: AIC rolling - fixed = {:.2}\n", s.series, s.drivers, s.aic_difference));
    }
    out.push_str(&format!("best by AIC: {}\nbest by BIC: {}\n", c.best_aic, c.best_bic));
    out
}

pub fn run(args: &ReportArgs) -> CliResult<()> {
    let mut named = Vec::with_capacity(args.fits.len());
    for p in &args.fits {
        let text = std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
        let r: FitReport = serde_json::from_str(&text)
            .map_err(|e| CliError { kind: crate::ErrorKind::Input, message: format!("{}: {e}", p.display()) })?;
        let file = p.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        named.push((file, r));
    }
    let c = compare(&named)?;
    print!("{}", render_table(&c));
    let dir = out_dir(&args.out);
    ensure_dir(&dir)?;
    let path = dir.join("comparison.json");
    write_text(&path, &(serde_json::to_string_pretty(&c)? + "\n"))?;
    println!("wrote {}", path.display());
    Ok(())
}
