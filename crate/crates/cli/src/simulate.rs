use std::path::PathBuf;

use clap::Args;
use midasvol::simulate::{simulate_panel, write_simulation, DgpConfig};
use midasvol::{Drivers, ParamSet};

use crate::{out_dir, CliError, CliResult, DriversArg, SpacingArg, SpanArg};

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// TOML data-generating process (all other model flags are then ignored).
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "mv")]
    pub drivers: DriversArg,
    #[arg(long, value_enum, default_value = "fixed")]
    pub span: SpanArg,
    #[arg(long, default_value_t = 36)]
    pub lags: usize,
    #[arg(long, default_value_t = 22)]
    pub window: usize,
    #[arg(long, value_enum, default_value = "day")]
    pub lag_spacing: SpacingArg,
    #[arg(long, default_value_t = 480)]
    pub months: usize,
    #[arg(long, default_value_t = 22)]
    pub days: usize,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub mu: f64,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.90)]
    pub beta: f64,
    #[arg(long, default_value_t = 0.04, allow_negative_numbers = true)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
    pub m: f64,
    #[arg(long, default_value_t = 0.004, allow_negative_numbers = true)]
    pub theta_rv: f64,
    #[arg(long, default_value_t = 0.3, allow_negative_numbers = true)]
    pub theta_mv: f64,
    #[arg(long, default_value_t = 5.0)]
    pub omega2: f64,
    /// Overrides the seed of `--config` when both are given.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl SimulateArgs {
    pub fn dgp(&self) -> CliResult<DgpConfig> {
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            let mut c: DgpConfig =
                toml::from_str(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
            if let Some(s) = self.seed {
                c.seed = s;
            }
            return Ok(c);
        }
        let spec_args = crate::SpecArgs {
            drivers: self.drivers,
            span: self.span,
            lags: self.lags,
            window: self.window,
            lag_spacing: self.lag_spacing,
        };
        let spec = spec_args.spec();
        let drivers: Drivers = self.drivers.into();
        let mut p = ParamSet::new(drivers, self.mu, self.alpha, self.beta, self.gamma, self.m);
        if drivers.has_rv() {
            p = p.with_rv(self.theta_rv, self.omega2);
        }
        if drivers.has_mv() {
            p = p.with_mv(self.theta_mv, self.omega2);
        }
        let mut c = DgpConfig::new(p, spec, self.months, self.seed.unwrap_or(42));
        c.days_per_month = self.days;
        Ok(c)
    }
}

pub fn run(args: &SimulateArgs) -> CliResult<()> {
    let config = args.dgp()?;
    config.validate().map_err(|e| CliError::usage(e.to_string()))?;
    let sim = simulate_panel(&config)?;
    let dir = out_dir(&args.out);
    write_simulation(&sim, &dir)?;
    println!("seed {}", config.seed);
    println!(
        "wrote {} days / {} months to {} (prices.csv, macro.csv, truth.csv)",
        sim.panel.n_days(),
        sim.panel.n_months(),
        dir.display()
    );
    Ok(())
}
