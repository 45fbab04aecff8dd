use midasvol::diagnostics::jarque_bera;
use midasvol::estimate::{log_likelihood, ModelData, OptimOptions};
use midasvol::simulate::{price_series, simulate_panel, DgpConfig};
use midasvol::timeseries::{log_returns, scale_returns};
use midasvol::{fit, Drivers, ModelSpec, ParamSet, Span};

fn mv_truth(theta: f64) -> ParamSet {
    ParamSet::new(Drivers::Mv, 0.0, 0.05, 0.90, 0.04, 0.1).with_mv(theta, 5.0)
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

#[test]
fn unconditional_variance_is_exp_m() {
    let spec = ModelSpec::new(Drivers::Mv, Span::Fixed);
    let variances: Vec<f64> = (0..8)
        .map(|seed| {
            let sim = simulate_panel(&DgpConfig::new(mv_truth(0.0), spec, 1000, seed)).unwrap();
            let r = sim.panel.returns();
            let m = mean(r);
            r.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / r.len() as f64
        })
        .collect();
    let v = mean(&variances);
    assert!((v / 0.1f64.exp() - 1.0).abs() < 0.05, "{v}");
}

#[test]
fn short_run_component_has_unit_mean() {
    let spec = ModelSpec::new(Drivers::Mv, Span::Fixed);
    let sim = simulate_panel(&DgpConfig::new(mv_truth(0.3), spec, 1000, 1)).unwrap();
    assert!((mean(&sim.truth.g) - 1.0).abs() < 0.05);
    for i in 0..sim.truth.g.len() {
        assert!((sim.truth.sigma2[i] - sim.truth.tau[i] * sim.truth.g[i]).abs() <= 1e-12 * sim.truth.sigma2[i]);
    }
}

#[test]
fn iid_configuration_looks_gaussian() {
    let spec = ModelSpec::new(Drivers::Mv, Span::Fixed);
    let p = ParamSet::new(Drivers::Mv, 0.0, 1e-12, 0.0, 0.0, 0.0).with_mv(0.0, 1.0);
    let sim = simulate_panel(&DgpConfig::new(p, spec, 200, 8)).unwrap();
    assert!(sim.truth.sigma2.iter().all(|s| (s - 1.0).abs() < 1e-9));
    assert!(jarque_bera(sim.panel.returns()).unwrap().p_value > 0.01);
}

#[test]
fn same_seed_same_draws() {
    let spec = ModelSpec::new(Drivers::RvMv, Span::Rolling);
    let p = ParamSet::new(Drivers::RvMv, 0.0, 0.05, 0.9, 0.04, 0.1).with_rv(0.004, 5.0).with_mv(0.2, 5.0);
    let a = simulate_panel(&DgpConfig::new(p, spec, 100, 3)).unwrap();
    let b = simulate_panel(&DgpConfig::new(p, spec, 100, 3)).unwrap();
    let c = simulate_panel(&DgpConfig::new(p, spec, 100, 4)).unwrap();
    assert_eq!(a.panel.returns(), b.panel.returns());
    assert_eq!(a.truth, b.truth);
    assert_ne!(a.panel.returns(), c.panel.returns());
}

#[test]
fn prices_reproduce_returns() {
    let spec = ModelSpec::new(Drivers::Mv, Span::Fixed);
    let sim = simulate_panel(&DgpConfig::new(mv_truth(0.3), spec, 60, 2)).unwrap();
    let prices = price_series(&sim.panel).unwrap();
    assert_eq!(prices.len(), sim.panel.n_days() + 1);
    let r = scale_returns(&log_returns(&prices, 1).unwrap(), 100.0).unwrap();
    for (a, b) in r.values().iter().zip(sim.panel.returns()) {
        assert!((a - b).abs() < 1e-9);
    }
}

#[test]
fn refit_from_truth_does_not_lose_likelihood() {
    for (drivers, span) in [(Drivers::Mv, Span::Fixed), (Drivers::Rv, Span::Rolling)] {
        let spec = ModelSpec::new(drivers, span);
        let truth = match drivers {
            Drivers::Rv => ParamSet::new(Drivers::Rv, 0.0, 0.05, 0.9, 0.04, 0.1).with_rv(0.004, 5.0),
            _ => mv_truth(0.3),
        };
        let sim = simulate_panel(&DgpConfig::new(truth, spec, 200, 21)).unwrap();
        let data = ModelData::new(sim.panel, Some(sim.macro_series));
        let at_truth = log_likelihood(&truth, &data, &spec).unwrap();
        let res = fit(&data, &spec, &OptimOptions { restarts: 1, start: Some(truth), ..Default::default() }).unwrap();
        assert!(res.llf >= at_truth - 1e-6, "{:?}: {} < {at_truth}", spec, res.llf);
    }
}

#[test]
fn short_samples_are_rejected() {
    let spec = ModelSpec::new(Drivers::Mv, Span::Fixed);
    assert!(DgpConfig::new(mv_truth(0.3), spec, spec.lags + 23, 0).validate().is_err());
    assert!(DgpConfig::new(mv_truth(0.3), spec, spec.lags + 24, 0).validate().is_ok());
}
