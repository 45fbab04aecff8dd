//! Random model inputs paired with the oracle's view of the same data.

use chrono::NaiveDate;
use midasvol::estimate::ModelData;
use midasvol::timeseries::align_monthly;
use midasvol::{DailySeries, Drivers, LagSpacing, ModelSpec, MonthlySeries, ParamSet, Span, YearMonth};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::oracle::{self, Data, Params, Setup};

pub struct Case {
    pub spec: ModelSpec,
    pub params: ParamSet,
    pub data: ModelData,
    pub month_of_day: Vec<usize>,
    pub macro_by_month: Vec<f64>,
}

pub fn random_case(rng: &mut ChaCha8Rng) -> Case {
    let drivers = [Drivers::Rv, Drivers::Mv, Drivers::RvMv][rng.gen_range(0..3)];
    let span = if rng.gen_bool(0.5) { Span::Fixed } else { Span::Rolling };
    let mut spec = ModelSpec::new(drivers, span);
    spec.lags = rng.gen_range(1..=12);
    spec.window = rng.gen_range(3..=25);
    spec.lag_spacing = if rng.gen_bool(0.5) { LagSpacing::Day } else { LagSpacing::Month };

    let burn = spec.rolling_burn_in();
    let months = (spec.lags + 6).max(burn / 15 + 4);
    let scale: f64 = rng.gen_range(0.3..2.0);
    let start = YearMonth::new(2001, 1).unwrap();
    let (mut dates, mut r, mut month_of_day) = (Vec::new(), Vec::new(), Vec::new());
    let mut ym = start;
    for t in 0..months {
        let len = rng.gen_range(15..=23);
        for d in 0..len {
            dates.push(NaiveDate::from_ymd_opt(ym.year, ym.month, d + 1).unwrap());
            let e: f64 = StandardNormal.sample(rng);
            r.push(scale * e);
            month_of_day.push(t);
        }
        ym = ym.succ();
    }
    let macro_by_month: Vec<f64> = (0..months).map(|_| rng.gen_range(-1.0..2.0)).collect();
    let panel = align_monthly(&DailySeries::new("r", dates, r).unwrap()).unwrap();
    let mv = MonthlySeries::from_start("mv", start, macro_by_month.clone()).unwrap();

    let params = loop {
        let alpha = rng.gen_range(0.01..0.15);
        let beta = rng.gen_range(0.5..0.88);
        let gamma = rng.gen_range(-alpha..0.1);
        let mut p = ParamSet::new(drivers, rng.gen_range(-0.1..0.1), alpha, beta, gamma, rng.gen_range(-0.5..0.5));
        if drivers.has_rv() {
            p = p.with_rv(rng.gen_range(-0.05..0.05) / scale / scale, rng.gen_range(1.0..20.0));
        }
        if drivers.has_mv() {
            p = p.with_mv(rng.gen_range(-0.5..0.5), rng.gen_range(1.0..20.0));
        }
        if p.validate(drivers).is_ok() {
            break p;
        }
    };
    Case { spec, params, data: ModelData::new(panel, Some(mv)), month_of_day, macro_by_month }
}

pub fn oracle_llf(c: &Case) -> f64 {
    let s = Setup {
        rolling: c.spec.span == Span::Rolling,
        lags: c.spec.lags,
        window: c.spec.window,
        stride: c.spec.rolling_stride(),
    };
    let p = &c.params;
    let op = Params {
        mu: p.mu,
        alpha: p.alpha,
        beta: p.beta,
        gamma: p.gamma,
        m: p.m,
        rv: p.theta_rv.zip(p.omega2_rv),
        mv: p.theta_mv.zip(p.omega2_mv),
    };
    let d = Data { r: c.data.panel.returns(), month_of_day: &c.month_of_day, macro_by_month: &c.macro_by_month };
    oracle::log_likelihood(&d, &s, &op)
}
