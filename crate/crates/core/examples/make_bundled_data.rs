//! Regenerates the synthetic data shipped under `crates/core/data`.
//!
//! ```text
//! cargo run -p midasvol --example make_bundled_data
//! ```
//!
//! Writes `gpr_panel.csv` (44 economies, 286 months, one global factor plus
//! regional factors) and `reference/{prices,macro,truth}.csv` from a seeded
//! rolling-window RV+MV data-generating process.

use std::collections::BTreeMap;
use std::path::PathBuf;

use midasvol::rmtindex::default_groups;
use midasvol::simulate::{simulate_panel, write_simulation, DgpConfig};
use midasvol::timeseries::write_wide_monthly_csv;
use midasvol::{Drivers, ModelSpec, MonthlySeries, ParamSet, Span, YearMonth};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

const MONTHS: usize = 286;
const PANEL_SEED: u64 = 20_240_501;
const REFERENCE_SEED: u64 = 6003;

fn ar1(rng: &mut ChaCha8Rng, n: usize, phi: f64, sigma: f64) -> Vec<f64> {
    let mut x = 0.0;
    (0..n)
        .map(|_| {
            let e: f64 = StandardNormal.sample(rng);
            x = phi * x + sigma * e;
            x
        })
        .collect()
}

fn main() -> midasvol::Result<()> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data");
    let start = YearMonth::new(2000, 1)?;

    // regions are the first six groups; other economies share a residual factor
    let groups = default_groups();
    let mut region: BTreeMap<String, usize> = BTreeMap::new();
    for (r, g) in groups.iter().take(6).enumerate() {
        for m in &g.members {
            region.insert(m.clone(), r);
        }
    }
    for g in &groups {
        for m in &g.members {
            region.entry(m.clone()).or_insert(6);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(PANEL_SEED);
    let global = ar1(&mut rng, MONTHS, 0.85, 0.35);
    let regional: Vec<Vec<f64>> = (0..7).map(|_| ar1(&mut rng, MONTHS, 0.6, 0.25)).collect();
    let mut panel = Vec::new();
    for (label, &r) in &region {
        let level: f64 = rng.gen_range(3.5..4.8);
        let load: f64 = rng.gen_range(0.6..1.4);
        let reg: f64 = rng.gen_range(0.3..0.9);
        let noise = ar1(&mut rng, MONTHS, 0.3, 0.3);
        let values = (0..MONTHS).map(|t| (level + load * global[t] + reg * regional[r][t] + noise[t]).exp()).collect();
        panel.push(MonthlySeries::from_start(label.clone(), start, values)?);
    }
    write_wide_monthly_csv(&panel, dir.join("gpr_panel.csv"))?;
    println!("gpr_panel.csv: {} economies x {MONTHS} months", panel.len());

    let drivers = Drivers::RvMv;
    let spec = ModelSpec::new(drivers, Span::Rolling);
    let params = ParamSet::new(drivers, 0.02, 0.05, 0.90, 0.04, 0.1).with_rv(0.004, 5.0).with_mv(0.2, 8.0);
    let mut config = DgpConfig::new(params, spec, MONTHS, REFERENCE_SEED);
    config.start = start;
    let sim = simulate_panel(&config)?;
    write_simulation(&sim, dir.join("reference"))?;
    println!("reference/: {} trading days", sim.panel.n_days());
    Ok(())
}
