use std::path::PathBuf;

use clap::Args;
use midasvol::diagnostics::{
    arch_lm, jarque_bera, ljung_box, ljung_box_squared, TestResult, DEFAULT_ARCH_LAGS, DEFAULT_LB_LAGS,
};
use midasvol::timeseries::{descriptive_stats, Stats};
use midasvol::Error;
use serde::Serialize;

use crate::fit::load_returns;
use crate::{ensure_dir, out_dir, stem, write_text, CliResult};

#[derive(Debug, Clone, Args)]
pub struct DiagnoseArgs {
    /// Daily price CSV (`date,value`).
    #[arg(long)]
    pub prices: PathBuf,
    #[arg(long, default_value_t = DEFAULT_LB_LAGS)]
    pub lb_lags: usize,
    #[arg(long, default_value_t = DEFAULT_ARCH_LAGS)]
    pub arch_lags: usize,
    #[arg(long)]
    pub no_scale: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticsReport {
    pub schema_version: u32,
    pub series: String,
    pub stats: Stats,
    pub jarque_bera: TestResult,
    pub ljung_box: TestResult,
    pub ljung_box_squared: TestResult,
    pub arch_lm: TestResult,
    /// ADF and PP are outside this toolkit's scope.
    pub unit_root: &'static str,
}

/// Turns "nothing to measure" errors into a flagged neutral result.
fn tolerant(r: midasvol::Result<TestResult>, df: usize, lags: Option<usize>) -> midasvol::Result<TestResult> {
    match r {
        Err(Error::ZeroVariance(_)) | Err(Error::Degenerate(_)) => {
            Ok(TestResult { statistic: 0.0, df, p_value: 1.0, lags, degenerate: true })
        }
        other => other,
    }
}

pub fn diagnose_returns(series: &str, r: &[f64], lb: usize, q: usize) -> midasvol::Result<DiagnosticsReport> {
    Ok(DiagnosticsReport {
        schema_version: midasvol::estimate::SCHEMA_VERSION,
        series: series.to_string(),
        stats: descriptive_stats(r)?,
        jarque_bera: tolerant(jarque_bera(r), 2, None)?,
        ljung_box: tolerant(ljung_box(r, lb), lb, Some(lb))?,
        ljung_box_squared: tolerant(ljung_box_squared(r, lb), lb, Some(lb))?,
        arch_lm: tolerant(arch_lm(r, q), q, Some(q))?,
        unit_root: "not computed",
    })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.4}")).unwrap_or_else(|| "n/a".into())
}

pub fn render_table(r: &DiagnosticsReport) -> String {
    let s = &r.stats;
    let mut out = format!("series {} (n = {})\n", r.series, s.n);
    for (k, v) in [
        ("max", format!("{:.4}", s.max)),
        ("min", format!("{:.4}", s.min)),
        ("mean", format!("{:.4}", s.mean)),
        ("std dev", format!("{:.4}", s.std_dev)),
        ("skewness", fmt_opt(s.skewness)),
        ("kurtosis", fmt_opt(s.kurtosis)),
    ] {
        out.push_str(&format!("  {k:<18}{v:>14}\n"));
    }
    out.push_str(&format!("  {:<18}{:>14}{:>6}{:>12}\n", "test", "statistic", "df", "p-value"));
    for (name, t) in [
        ("Jarque-Bera", &r.jarque_bera),
        ("Ljung-Box", &r.ljung_box),
        ("Ljung-Box (sq)", &r.ljung_box_squared),
        ("ARCH-LM", &r.arch_lm),
    ] {
        let flag = if t.degenerate { "  degenerate" } else { "" };
        out.push_str(&format!("  {name:<18}{:>14.4}{:>6}{:>12.4}{flag}\n", t.statistic, t.df, t.p_value));
    }
    out.push_str(&format!("  {:<18}{:>14}\n", "ADF / PP", r.unit_root));
    out
}

pub fn run(args: &DiagnoseArgs) -> CliResult<()> {
    if args.lb_lags == 0 || args.arch_lags == 0 {
        return Err(crate::CliError::usage("--lb-lags and --arch-lags must be positive"));
    }
    let panel = load_returns(&args.prices, args.no_scale)?;
    let name = stem(&args.prices);
    let report = diagnose_returns(&name, panel.returns(), args.lb_lags, args.arch_lags)?;
    print!("{}", render_table(&report));
    let dir = out_dir(&args.out);
    ensure_dir(&dir)?;
    let path = dir.join(format!("diagnostics_{name}.json"));
    write_text(&path, &(serde_json::to_string_pretty(&report)? + "\n"))?;
    println!("wrote {}", path.display());
    Ok(())
}
