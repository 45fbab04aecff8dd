use std::path::{Path, PathBuf};

use clap::Args;
use midasvol::estimate::{fit, FitReport, ModelData, OptimOptions};
use midasvol::timeseries::{align_monthly, log_returns, log_transform, scale_returns};
use midasvol::{DailySeries, Error, FitResult, MonthlySeries, ReturnPanel};

use crate::{ensure_dir, out_dir, stem, write_text, CliError, CliResult, ErrorKind, SpecArgs};

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    /// Daily price CSV (`date,value`).
    #[arg(long)]
    pub prices: PathBuf,
    /// Monthly macro CSV (`month,value`), needed for `mv` drivers.
    #[arg(long = "macro")]
    pub macro_path: Option<PathBuf>,
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Keep log returns in natural units instead of percent.
    #[arg(long)]
    pub no_scale: bool,
    /// Use the macro series as given instead of its natural log.
    #[arg(long)]
    pub no_log_mv: bool,
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write `date,tau,g,sigma2` for the likelihood sample.
    #[arg(long)]
    pub paths: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Prices to (optionally percent) daily log returns grouped by month.
pub(crate) fn load_returns(path: &Path, no_scale: bool) -> CliResult<ReturnPanel> {
    let prices = DailySeries::read_csv(path)?;
    let mut r = log_returns(&prices, 1)?;
    if !no_scale {
        r = scale_returns(&r, 100.0)?;
    }
    Ok(align_monthly(&r)?)
}

fn load_macro(path: &Path, no_log: bool) -> CliResult<MonthlySeries> {
    let mv = MonthlySeries::read_csv(path)?;
    Ok(if no_log { mv } else { log_transform(&mv)? })
}

fn write_paths(path: &Path, panel: &ReturnPanel, fit: &FitResult) -> CliResult<()> {
    let dates = &panel.dates()[fit.sample_start..];
    let p = &fit.path;
    let mut text = String::from("date,tau,g,sigma2\n");
    for (k, d) in dates.iter().enumerate() {
        text.push_str(&format!("{d},{},{},{}\n", p.tau[k], p.g[k], p.sigma2[k]));
    }
    write_text(path, &text)
}

pub fn run(args: &FitArgs) -> CliResult<()> {
    let spec = args.spec.spec();
    if spec.drivers.has_mv() && args.macro_path.is_none() {
        return Err(CliError::usage(format!("drivers `{}` need --macro", spec.drivers.as_str())));
    }
    if args.restarts == 0 {
        return Err(CliError::usage("--restarts must be at least 1"));
    }
    spec.validate()?;
    let panel = load_returns(&args.prices, args.no_scale)?;
    let macro_series = match (&args.macro_path, spec.drivers.has_mv()) {
        (Some(p), true) => Some(load_macro(p, args.no_log_mv)?),
        _ => None,
    };
    let data = ModelData::new(panel, macro_series);
    let opts = OptimOptions { restarts: args.restarts, seed: args.seed, ..Default::default() };
    let name = stem(&args.prices);
    let dir = out_dir(&args.out);
    ensure_dir(&dir)?;
    let tag = format!("{}_{}_{}", name, spec.drivers.as_str().replace('+', ""), spec.span.as_str());

    let (result, failure) = match fit(&data, &spec, &opts) {
        Ok(r) => (r, None),
        Err(Error::NonConvergence { restarts, best }) => {
            let msg = format!("optimizer failed to converge after {restarts} restarts (partial report written)");
            (*best, Some(CliError { kind: ErrorKind::Numeric, message: msg }))
        }
        Err(e) => return Err(e.into()),
    };
    let report = FitReport::new(&name, &result);
    let json_path = dir.join(format!("fit_{tag}.json"));
    write_text(&json_path, &(report.to_json()? + "\n"))?;
    println!("{}", summary_line(&report));
    println!("wrote {}", json_path.display());
    if args.paths {
        let p = dir.join(format!("paths_{tag}.csv"));
        write_paths(&p, &data.panel, &result)?;
        println!("wrote {}", p.display());
    }
    match failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn summary_line(r: &FitReport) -> String {
    let params: Vec<String> = r
        .params
        .iter()
        .map(|p| match p.std_error {
            Some(se) => format!("{}={:.4} ({:.4})", p.name, p.value, se),
            None => format!("{}={:.4} (n/a)", p.name, p.value),
        })
        .collect();
    format!(
        "{} {} {}: {}\nllf={:.2} aic={:.2} bic={:.2} vr={:.2}% n={} converged={}",
        r.series,
        r.spec.drivers.as_str(),
        r.spec.span.as_str(),
        params.join(" "),
        r.llf,
        r.aic,
        r.bic,
        r.variance_ratio,
        r.n_obs,
        r.converged
    )
}
