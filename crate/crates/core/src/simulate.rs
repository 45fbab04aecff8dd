//! Seeded data-generating process for GJR-GARCH-MIDAS panels.
//!
//! Random numbers come from ChaCha8 seeded with `seed_from_u64(seed)`. All
//! macro innovations (pre-sample and sample months, oldest first) are drawn
//! before the daily return innovations, which are then drawn one per day in
//! calendar order. Normals use the ziggurat sampler of `rand_distr`.

use std::path::Path;

use chrono::{Duration, NaiveDate};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::midas::beta_weights_restricted;
use crate::timeseries::{align_monthly, DailySeries, MonthlySeries, ReturnPanel, YearMonth};
use crate::volmodel::{Indicator, ModelSpec, ParamSet, Span, VariancePath};

/// Months simulated with `tau = exp(m)` before the reported sample.
pub const PRESAMPLE_MONTHS: usize = 48;
/// Any conditional variance above this aborts the simulation.
pub const EXPLOSIVE_SIGMA2: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MacroProcess {
    pub phi: f64,
    pub sigma: f64,
    /// Unconditional mean of the (log-scale) macro variable.
    pub mean: f64,
}

impl Default for MacroProcess {
    fn default() -> Self {
        Self { phi: 0.9, sigma: 0.3, mean: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DgpConfig {
    pub params: ParamSet,
    pub spec: ModelSpec,
    pub months: usize,
    #[serde(default = "default_days")]
    pub days_per_month: usize,
    #[serde(default)]
    pub macro_process: MacroProcess,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_start")]
    pub start: YearMonth,
}

fn default_days() -> usize {
    22
}

fn default_start() -> YearMonth {
    YearMonth { year: 1990, month: 1 }
}

impl DgpConfig {
    pub fn new(params: ParamSet, spec: ModelSpec, months: usize, seed: u64) -> Self {
        Self {
            params,
            spec,
            months,
            days_per_month: default_days(),
            macro_process: MacroProcess::default(),
            seed,
            start: default_start(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        self.params.validate(self.spec.drivers)?;
        if self.months < self.spec.lags + 24 {
            return Err(Error::Config(format!(
                "need at least K + 24 = {} months, got {}",
                self.spec.lags + 24,
                self.months
            )));
        }
        if self.days_per_month == 0 || self.days_per_month > 28 {
            return Err(Error::Config(format!("days per month must be in 1..=28, got {}", self.days_per_month)));
        }
        let mp = &self.macro_process;
        if !(mp.phi.abs() < 1.0) || !(mp.sigma >= 0.0) || !mp.mean.is_finite() {
            return Err(Error::Config("macro process needs |phi| < 1, sigma >= 0 and a finite mean".into()));
        }
        Ok(())
    }

    /// Pre-sample months: enough for every lag to be filled by simulated data.
    fn presample(&self) -> usize {
        let d = self.days_per_month;
        let burn_days = self.spec.rolling_burn_in();
        PRESAMPLE_MONTHS.max(self.spec.lags).max(burn_days.div_ceil(d) + 1)
    }
}

#[derive(Debug, Clone)]
pub struct Simulation {
    pub panel: ReturnPanel,
    /// Log-scale macro variable over the sample months.
    pub macro_series: MonthlySeries,
    /// Latent components over the sample days.
    pub truth: VariancePath,
}

/// Simulates returns, the macro driver and the latent variance components.
pub fn simulate_panel(config: &DgpConfig) -> Result<Simulation> {
    config.validate()?;
    let p = &config.params;
    let spec = &config.spec;
    let d = config.days_per_month;
    let pre = config.presample();
    let total_months = pre + config.months;
    let n = total_months * d;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mp = config.macro_process;
    let mut mv = Vec::with_capacity(total_months);
    let mut x = mp.mean;
    for _ in 0..total_months {
        let e: f64 = StandardNormal.sample(&mut rng);
        x = mp.mean + mp.phi * (x - mp.mean) + mp.sigma * e;
        mv.push(x);
    }

    let w_rv = p.omega2_rv.map(|w| beta_weights_restricted(spec.lags, w).map(|v| v.weights)).transpose()?;
    let w_mv = p.omega2_mv.map(|w| beta_weights_restricted(spec.lags, w).map(|v| v.weights)).transpose()?;
    let theta_rv = p.theta_rv.unwrap_or(0.0);
    let theta_mv = p.theta_mv.unwrap_or(0.0);
    let stride = spec.rolling_stride();
    let window = spec.window;

    let mut r = vec![0.0; n];
    let mut tau = vec![0.0; n];
    let mut g = vec![0.0; n];
    let mut sigma2 = vec![0.0; n];
    // monthly realized variance, filled when a month completes
    let mut rv_month = vec![0.0; total_months];
    // rolling drivers indexed by day: sums/means over the `window` days before it
    let mut rv_roll = vec![f64::NAN; n];
    let mut mv_roll = vec![f64::NAN; n];
    let omega = 1.0 - p.alpha - p.beta - 0.5 * p.gamma;
    let mut tau_month = p.m.exp();

    for i in 0..n {
        let month = i / d;
        if i >= window {
            rv_roll[i] = r[i - window..i].iter().map(|v| v * v).sum();
            mv_roll[i] = (i - window..i).map(|j| mv[j / d]).sum::<f64>() / window as f64;
        }
        let in_sample = month >= pre;
        tau[i] = match spec.span {
            _ if !in_sample => p.m.exp(),
            Span::Fixed => {
                if i % d == 0 {
                    let mut lt = p.m;
                    for k in 1..=spec.lags {
                        if let Some(w) = &w_rv {
                            lt += theta_rv * w[k - 1] * rv_month[month - k];
                        }
                        if let Some(w) = &w_mv {
                            lt += theta_mv * w[k - 1] * mv[month - k];
                        }
                    }
                    tau_month = lt.exp();
                }
                tau_month
            }
            Span::Rolling => {
                let mut lt = p.m;
                for k in 0..spec.lags {
                    let idx = i - 1 - k * stride;
                    if let Some(w) = &w_rv {
                        lt += theta_rv * w[k] * rv_roll[idx];
                    }
                    if let Some(w) = &w_mv {
                        lt += theta_mv * w[k] * mv_roll[idx];
                    }
                }
                lt.exp()
            }
        };
        g[i] = if i == 0 {
            1.0
        } else {
            let e = r[i - 1] - p.mu;
            let negative = match spec.indicator {
                Indicator::RawReturn => r[i - 1] < 0.0,
                Indicator::Innovation => e < 0.0,
            };
            let a = if negative { p.alpha + p.gamma } else { p.alpha };
            omega + a * e * e / tau[i] + p.beta * g[i - 1]
        };
        sigma2[i] = tau[i] * g[i];
        if !(sigma2[i] <= EXPLOSIVE_SIGMA2) {
            return Err(Error::Explosive { step: i, sigma2: sigma2[i] });
        }
        let eps: f64 = StandardNormal.sample(&mut rng);
        r[i] = p.mu + sigma2[i].sqrt() * eps;
        if i % d == d - 1 {
            rv_month[month] = r[i + 1 - d..=i].iter().map(|v| v * v).sum();
        }
    }

    let first = pre * d;
    let mut dates = Vec::with_capacity(config.months * d);
    let mut ym = config.start;
    for _ in 0..config.months {
        let day1 = ym.first_day();
        dates.extend((0..d as i64).map(|k| day1 + Duration::days(k)));
        ym = ym.succ();
    }
    let daily = DailySeries::new("simulated", dates, r[first..].to_vec())?;
    let panel = align_monthly(&daily)?;
    let macro_series = MonthlySeries::from_start("macro", config.start, mv[pre..].to_vec())?;
    let truth = VariancePath { tau: tau[first..].to_vec(), g: g[first..].to_vec(), sigma2: sigma2[first..].to_vec() };
    Ok(Simulation { panel, macro_series, truth })
}

/// Prices `P_0 = 100` (dated the day before the first return) and
/// `P_i = P_{i-1} exp(r_i / 100)`, so percent log returns are recovered.
pub fn price_series(panel: &ReturnPanel) -> Result<DailySeries> {
    let dates = panel.dates();
    let first = *dates.first().ok_or(Error::Length { needed: 1, got: 0 })?;
    let mut out_dates = vec![first.pred_opt().unwrap_or(NaiveDate::MIN)];
    let mut prices = vec![100.0];
    for (dt, r) in dates.iter().zip(panel.returns()) {
        out_dates.push(*dt);
        prices.push(prices.last().unwrap() * (r / 100.0).exp());
    }
    DailySeries::new("price", out_dates, prices)
}

/// Writes `prices.csv`, `macro.csv` (levels, i.e. `exp` of the log-scale
/// variable) and `truth.csv` (`date,return,tau,g,sigma2`) into `dir`.
pub fn write_simulation(sim: &Simulation, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    price_series(&sim.panel)?.write_csv(dir.join("prices.csv"))?;
    let levels: Vec<f64> = sim.macro_series.values().iter().map(|v| v.exp()).collect();
    let start = sim.macro_series.first_month().ok_or(Error::Length { needed: 1, got: 0 })?;
    MonthlySeries::from_start("macro", start, levels)?.write_csv(dir.join("macro.csv"))?;

    let path = dir.join("truth.csv");
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(["date", "return", "tau", "g", "sigma2"])?;
    let t = &sim.truth;
    for (k, dt) in sim.panel.dates().iter().enumerate() {
        w.write_record([
            dt.to_string(),
            sim.panel.returns()[k].to_string(),
            t.tau[k].to_string(),
            t.g[k].to_string(),
            t.sigma2[k].to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(&path, e))
}
