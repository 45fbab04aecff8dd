mod common;

use common::cases::{oracle_llf, random_case};
use common::oracle;
use midasvol::estimate::log_likelihood;
use midasvol::timeseries::{align_monthly, log_returns, monthly_realized_vol, scale_returns};
use midasvol::volmodel::long_run_fixed;
use midasvol::{DailySeries, Drivers, ModelSpec, ParamSet, Span};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn matches_termwise_oracle_on_random_cases() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut worst: f64 = 0.0;
    for case in 0..100 {
        let c = random_case(&mut rng);
        let got = log_likelihood(&c.params, &c.data, &c.spec).unwrap();
        let want = oracle_llf(&c);
        let diff = (got - want).abs();
        worst = worst.max(diff);
        assert!(diff <= 1e-10, "case {case} {:?}: {got} vs {want}", c.spec);
    }
    println!("worst absolute difference {worst:e}");
}

#[test]
fn bundled_rv_history_long_run_matches_direct_sum() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/reference/prices.csv");
    let prices = DailySeries::read_csv(path).unwrap();
    let r = scale_returns(&log_returns(&prices, 1).unwrap(), 100.0).unwrap();
    let panel = align_monthly(&r).unwrap();
    let rv = monthly_realized_vol(&panel);
    let spec = ModelSpec::new(Drivers::Rv, Span::Fixed);
    let p = ParamSet::new(Drivers::Rv, 0.0161, 0.1051, 0.8382, -0.0408, 0.9134).with_rv(0.0051, 6.0271);
    let lr = long_run_fixed(&p, &spec, Some(&rv), None).unwrap();
    assert_eq!(lr.first, 36);
    let w = oracle::beta_weights(36, 6.0271);
    for (j, tau) in lr.tau.iter().enumerate() {
        let t = lr.first + j;
        let mut log_tau = 0.9134;
        for k in 1..=36 {
            log_tau += 0.0051 * w[k - 1] * rv[t - k];
        }
        let want = log_tau.exp();
        assert!((tau - want).abs() <= 1e-12 * want.max(1.0), "month {t}: {tau} vs {want}");
    }
}
