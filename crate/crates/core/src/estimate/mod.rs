//! Quasi-maximum-likelihood estimation: multi-start simplex search in an
//! unconstrained parameterization, observed-information standard errors,
//! information criteria and the variance-ratio decomposition.

mod likelihood;
pub mod optim;
mod report;
mod stderr;
mod transform;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::volmodel::{Drivers, ModelSpec, ParamSet, Span, VariancePath};

pub use likelihood::{gaussian_loglik, log_likelihood, ModelData, Prepared};
pub use report::{FitReport, ParamEntry, SCHEMA_VERSION};
pub use stderr::{observed_information_std_errors, std_errors};
pub use transform::{transform_params, untransform_params, OMEGA2_MAX};

/// Minimum number of likelihood days a fit requires.
pub const MIN_OBS: usize = 100;
/// Gradient norm (scaled transformed space) below which a fit counts as converged.
pub const GRAD_TOL: f64 = 1e-3;

/// Names and order of the parameter vector for a driver set:
/// `mu, alpha, beta, gamma, m, [theta_rv, omega2_rv], [theta_mv, omega2_mv]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamLayout {
    drivers: Drivers,
    names: Vec<&'static str>,
    omega2_slots: Vec<usize>,
}

impl ParamLayout {
    pub fn new(drivers: Drivers) -> Self {
        let mut names = vec!["mu", "alpha", "beta", "gamma", "m"];
        let mut omega2_slots = Vec::new();
        if drivers.has_rv() {
            names.push("theta_rv");
            names.push("omega2_rv");
            omega2_slots.push(names.len() - 1);
        }
        if drivers.has_mv() {
            names.push("theta_mv");
            names.push("omega2_mv");
            omega2_slots.push(names.len() - 1);
        }
        Self { drivers, names, omega2_slots }
    }

    pub fn drivers(&self) -> Drivers {
        self.drivers
    }

    pub fn names(&self) -> &[&'static str] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| *n == name)
    }

    pub(crate) fn omega2_slots(&self) -> &[usize] {
        &self.omega2_slots
    }

    pub fn to_vec(&self, p: &ParamSet) -> Result<Vec<f64>> {
        p.validate(self.drivers)?;
        let mut v = vec![p.mu, p.alpha, p.beta, p.gamma, p.m];
        if self.drivers.has_rv() {
            v.push(p.theta_rv.unwrap_or_default());
            v.push(p.omega2_rv.unwrap_or_default());
        }
        if self.drivers.has_mv() {
            v.push(p.theta_mv.unwrap_or_default());
            v.push(p.omega2_mv.unwrap_or_default());
        }
        Ok(v)
    }

    /// Builds a `ParamSet` without checking the constraint set.
    pub fn from_vec(&self, v: &[f64]) -> Result<ParamSet> {
        if v.len() != self.len() {
            return Err(Error::Mismatch { left: v.len(), right: self.len() });
        }
        let mut p = ParamSet {
            mu: v[0],
            alpha: v[1],
            beta: v[2],
            gamma: v[3],
            m: v[4],
            theta_rv: None,
            omega2_rv: None,
            theta_mv: None,
            omega2_mv: None,
        };
        let mut k = 5;
        if self.drivers.has_rv() {
            p.theta_rv = Some(v[k]);
            p.omega2_rv = Some(v[k + 1]);
            k += 2;
        }
        if self.drivers.has_mv() {
            p.theta_mv = Some(v[k]);
            p.omega2_mv = Some(v[k + 1]);
        }
        Ok(p)
    }
}

#[derive(Debug, Clone)]
pub struct OptimOptions {
    pub restarts: usize,
    pub max_iterations: usize,
    /// Relative LLF change across the simplex.
    pub tolerance: f64,
    pub seed: u64,
    /// Parameters held fixed at the given natural value. Only `mu`, `m`,
    /// `theta_*` and `omega2_*` may be pinned.
    pub pinned: Vec<(String, f64)>,
    /// Overrides the moment-based starting point of the first restart.
    pub start: Option<ParamSet>,
}

impl Default for OptimOptions {
    fn default() -> Self {
        Self { restarts: 8, max_iterations: 2000, tolerance: 1e-8, seed: 0, pinned: Vec::new(), start: None }
    }
}

impl OptimOptions {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.max_iterations == 0 || !(self.tolerance > 0.0) {
            return Err(Error::Config("restarts, max_iterations and tolerance must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Convergence {
    /// Simplex iterations of the selected restart.
    pub iterations: usize,
    pub grad_norm: f64,
    pub restarts_used: usize,
    pub converged: bool,
    /// Index of the selected restart.
    pub best_restart: usize,
    /// Per restart; `None` where the likelihood was not finite.
    pub start_llf: Vec<Option<f64>>,
    pub final_llf: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub spec: ModelSpec,
    pub params: ParamSet,
    pub names: Vec<String>,
    /// `None` where the observed information is singular or the parameter was pinned.
    pub std_errors: Vec<Option<f64>>,
    pub pinned: Vec<bool>,
    pub llf: f64,
    pub aic: f64,
    pub bic: f64,
    /// Number of free parameters.
    pub k: usize,
    pub n_obs: usize,
    /// Fraction in [0, 1].
    pub variance_ratio: f64,
    /// Over the sample days, starting at `sample_start`.
    pub path: VariancePath,
    pub sample_start: usize,
    pub convergence: Convergence,
}

/// `(aic, bic) = (2k - 2 llf, k ln n - 2 llf)`.
pub fn information_criteria(llf: f64, k: usize, n: usize) -> (f64, f64) {
    let k = k as f64;
    (2.0 * k - 2.0 * llf, k * (n as f64).ln() - 2.0 * llf)
}

/// How `g` is aggregated before computing the variance ratio.
#[derive(Debug, Clone, Copy)]
pub enum VrAggregation<'a> {
    /// Per-day `tau` and `g`.
    Daily,
    /// Consecutive months with these day counts; `g` is summed within each
    /// month and `tau` must be constant within it.
    Monthly(&'a [usize]),
}

/// `Var(log tau) / Var(log(tau * g))`, as a fraction.
pub fn variance_ratio(tau: &[f64], g: &[f64], agg: VrAggregation<'_>) -> Result<f64> {
    if tau.len() != g.len() {
        return Err(Error::Mismatch { left: tau.len(), right: g.len() });
    }
    if tau.iter().chain(g).any(|v| !(*v > 0.0)) {
        return Err(Error::Domain("variance components must be positive".into()));
    }
    let (log_tau, log_total): (Vec<f64>, Vec<f64>) = match agg {
        VrAggregation::Daily => tau.iter().zip(g).map(|(t, g)| (t.ln(), (t * g).ln())).unzip(),
        VrAggregation::Monthly(counts) => {
            let mut out = (Vec::with_capacity(counts.len()), Vec::with_capacity(counts.len()));
            let mut at = 0;
            for &n in counts {
                if n == 0 || at + n > tau.len() {
                    return Err(Error::Mismatch { left: at + n, right: tau.len() });
                }
                let t = tau[at];
                let g_sum: f64 = g[at..at + n].iter().sum();
                out.0.push(t.ln());
                out.1.push((t * g_sum).ln());
                at += n;
            }
            out
        }
    };
    if log_tau.len() < 2 {
        return Err(Error::Length { needed: 2, got: log_tau.len() });
    }
    let denom = population_variance(&log_total);
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok(population_variance(&log_tau) / denom)
}

fn population_variance(x: &[f64]) -> f64 {
    // the running mean of identical values can be off by an ulp
    if x.iter().all(|v| *v == x[0]) {
        return 0.0;
    }
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n
}

/// Variance ratio of a sample path using the aggregation implied by the span mode.
pub fn path_variance_ratio(prep: &Prepared, path: &VariancePath) -> Result<f64> {
    match prep.spec().span {
        Span::Rolling => variance_ratio(&path.tau, &path.g, VrAggregation::Daily),
        Span::Fixed => {
            let off = prep.full_month_offset();
            let counts = prep.full_sample_month_counts();
            variance_ratio(&path.tau[off..], &path.g[off..], VrAggregation::Monthly(&counts))
        }
    }
}

const PINNABLE: &[&str] = &["mu", "m", "theta_rv", "omega2_rv", "theta_mv", "omega2_mv"];

struct Problem<'a> {
    prep: &'a Prepared,
    layout: ParamLayout,
    /// Natural-coordinate values of pinned slots.
    pinned: Vec<Option<f64>>,
    free: Vec<usize>,
}

impl Problem<'_> {
    fn params_from_free(&self, z_free: &[f64], z_template: &[f64]) -> Result<ParamSet> {
        let mut z = z_template.to_vec();
        for (&k, &v) in self.free.iter().zip(z_free) {
            z[k] = v;
        }
        let p = untransform_params(&z, &self.layout)?;
        let mut nat = self.layout.to_vec_unchecked(&p);
        for (k, pin) in self.pinned.iter().enumerate() {
            if let Some(v) = pin {
                nat[k] = *v;
            }
        }
        self.layout.from_vec(&nat)
    }

    fn neg_llf(&self, z_free: &[f64], z_template: &[f64]) -> f64 {
        match self.params_from_free(z_free, z_template).and_then(|p| self.prep.log_likelihood(&p)) {
            Ok(l) => -l,
            Err(_) => f64::INFINITY,
        }
    }
}

impl ParamLayout {
    pub(crate) fn to_vec_unchecked(&self, p: &ParamSet) -> Vec<f64> {
        let mut v = vec![p.mu, p.alpha, p.beta, p.gamma, p.m];
        if self.drivers.has_rv() {
            v.push(p.theta_rv.unwrap_or_default());
            v.push(p.omega2_rv.unwrap_or_default());
        }
        if self.drivers.has_mv() {
            v.push(p.theta_mv.unwrap_or_default());
            v.push(p.omega2_mv.unwrap_or_default());
        }
        v
    }
}

#[derive(Debug, Clone)]
struct RestartOutcome {
    start_llf: f64,
    llf: f64,
    z_free: Vec<f64>,
    iterations: usize,
    grad_norm: f64,
    converged: bool,
}

fn resolve_pins(layout: &ParamLayout, opts: &OptimOptions) -> Result<Vec<Option<f64>>> {
    let mut pinned = vec![None; layout.len()];
    for (name, value) in &opts.pinned {
        if !PINNABLE.contains(&name.as_str()) {
            return Err(Error::Config(format!("parameter `{name}` cannot be pinned")));
        }
        let k = layout
            .index_of(name)
            .ok_or_else(|| Error::Config(format!("parameter `{name}` is not part of this model")))?;
        if !value.is_finite() {
            return Err(Error::Config(format!("pinned value for `{name}` is not finite")));
        }
        pinned[k] = Some(*value);
    }
    // a zero loading leaves its shape parameter unidentified
    for (theta, omega) in [("theta_rv", "omega2_rv"), ("theta_mv", "omega2_mv")] {
        if let (Some(t), Some(o)) = (layout.index_of(theta), layout.index_of(omega)) {
            if pinned[t] == Some(0.0) && pinned[o].is_none() {
                pinned[o] = Some(1.0);
            }
        }
    }
    Ok(pinned)
}

fn initial_params(prep: &Prepared, layout: &ParamLayout) -> ParamSet {
    let r = prep.sample_returns();
    let n = r.len() as f64;
    let mean = r.iter().sum::<f64>() / n;
    let var = r.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    let mut p = ParamSet::new(layout.drivers(), mean, 0.05, 0.90, 0.02, var.max(1e-300).ln());
    if layout.drivers().has_rv() {
        p = p.with_rv(0.0, 3.0);
    }
    if layout.drivers().has_mv() {
        p = p.with_mv(0.0, 3.0);
    }
    p
}

fn driver_scale(x: Option<&[f64]>) -> f64 {
    let Some(x) = x else { return 1.0 };
    let v: Vec<f64> = x.iter().copied().filter(|v| v.is_finite()).collect();
    if v.len() < 2 {
        return 1.0;
    }
    let sd = population_variance(&v).sqrt();
    if sd > 0.0 {
        sd
    } else {
        v[0].abs().max(1.0)
    }
}

/// Initial simplex step per coordinate of the transformed vector.
fn simplex_steps(prep: &Prepared, layout: &ParamLayout) -> Vec<f64> {
    let r = prep.sample_returns();
    let sd = population_variance(r).sqrt().max(1e-12);
    layout
        .names()
        .iter()
        .map(|&name| match name {
            "mu" => 0.1 * sd,
            "alpha" | "beta" | "gamma" => 0.3,
            "m" => 0.5,
            "theta_rv" => 0.2 / driver_scale(prep.rv_driver()),
            "theta_mv" => 0.2 / driver_scale(prep.mv_driver()),
            _ => 0.5,
        })
        .collect()
}

/// Fits `spec` to `data` by maximizing the Gaussian quasi-likelihood.
pub fn fit(data: &ModelData, spec: &ModelSpec, opts: &OptimOptions) -> Result<FitResult> {
    opts.validate()?;
    let prep = Prepared::new(data, spec)?;
    fit_prepared(&prep, opts)
}

pub fn fit_prepared(prep: &Prepared, opts: &OptimOptions) -> Result<FitResult> {
    opts.validate()?;
    if prep.n_obs() < MIN_OBS {
        return Err(Error::Length { needed: MIN_OBS, got: prep.n_obs() });
    }
    let layout = ParamLayout::new(prep.spec().drivers);
    let pinned = resolve_pins(&layout, opts)?;
    let free: Vec<usize> = (0..layout.len()).filter(|&k| pinned[k].is_none()).collect();

    let mut start = opts.start.unwrap_or_else(|| initial_params(prep, &layout));
    start.validate(layout.drivers())?;
    {
        // keep the start strictly inside the transform's domain
        let mut nat = layout.to_vec(&start)?;
        for &k in layout.omega2_slots() {
            nat[k] = nat[k].clamp(1.0 + 1e-6, OMEGA2_MAX - 1e-6);
        }
        nat[2] = nat[2].max(1e-6);
        if nat[1] + nat[3] <= 0.0 {
            nat[3] = -nat[1] + 1e-6;
        }
        start = layout.from_vec(&nat)?;
    }
    let z_template = transform_params(&start, &layout)?;
    let problem = Problem { prep, layout: layout.clone(), pinned: pinned.clone(), free: free.clone() };
    let all_steps = simplex_steps(prep, &layout);
    let steps: Vec<f64> = free.iter().map(|&k| all_steps[k]).collect();
    // the search runs in z / step so every coordinate has unit scale
    let y0: Vec<f64> = free.iter().zip(&steps).map(|(&k, s)| z_template[k] / s).collect();
    let unit = vec![1.0; free.len()];
    let to_z = |y: &[f64]| -> Vec<f64> { y.iter().zip(&steps).map(|(a, s)| a * s).collect() };

    let nm_opts = optim::NelderMeadOptions { max_iterations: opts.max_iterations, f_tol: opts.tolerance, x_tol: 1e-6 };
    let run = |r: usize| -> RestartOutcome {
        let objective = |y: &[f64]| problem.neg_llf(&to_z(y), &z_template);
        let mut x: Vec<f64> = y0.clone();
        if r > 0 {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(r as u64));
            for xi in x.iter_mut() {
                let e: f64 = StandardNormal.sample(&mut rng);
                *xi += 2.0 * e;
            }
        }
        let start_f = objective(&x);
        let mut best = optim::Minimum { x: x.clone(), f: start_f, iterations: 0, converged: false };
        let mut iterations = 0;
        let mut nm_converged = false;
        for _pass in 0..3 {
            let m = optim::nelder_mead(objective, &best.x, &unit, &nm_opts);
            iterations += m.iterations;
            let gain = best.f - m.f;
            let improved_little = best.f.is_finite() && gain <= opts.tolerance * best.f.abs().max(1.0);
            nm_converged = m.converged;
            if m.f <= best.f {
                best = m;
            }
            if improved_little {
                break;
            }
        }
        let polish = optim::newton_polish(&objective, &best.x, best.f, GRAD_TOL * 0.1, 25);
        RestartOutcome {
            start_llf: -start_f,
            llf: -polish.f,
            z_free: to_z(&polish.x),
            iterations,
            grad_norm: polish.grad_norm,
            converged: (nm_converged || polish.converged) && polish.grad_norm <= GRAD_TOL,
        }
    };
    let outcomes: Vec<RestartOutcome> = (0..opts.restarts).into_par_iter().map(run).collect();

    let mut best_idx = 0;
    for (k, o) in outcomes.iter().enumerate() {
        if o.llf > outcomes[best_idx].llf {
            best_idx = k;
        }
    }
    let best = &outcomes[best_idx];
    if !best.llf.is_finite() {
        return Err(Error::Numeric { day: prep.sample_start(), what: "no restart reached a finite likelihood".into() });
    }
    let params = problem.params_from_free(&best.z_free, &z_template)?;
    let (llf, path) = prep.evaluate(&params)?;
    let free_mask: Vec<bool> = pinned.iter().map(|p| p.is_none()).collect();
    let std_errors = stderr::std_errors_prepared(&params, prep, &layout, &free_mask);
    let k = free.len();
    let n_obs = prep.n_obs();
    let (aic, bic) = information_criteria(llf, k, n_obs);
    let variance_ratio = path_variance_ratio(prep, &path)?;
    let result = FitResult {
        spec: *prep.spec(),
        params,
        names: layout.names().iter().map(|s| s.to_string()).collect(),
        std_errors,
        pinned: pinned.iter().map(|p| p.is_some()).collect(),
        llf,
        aic,
        bic,
        k,
        n_obs,
        variance_ratio,
        path,
        sample_start: prep.sample_start(),
        convergence: Convergence {
            iterations: best.iterations,
            grad_norm: best.grad_norm,
            restarts_used: outcomes.len(),
            converged: best.converged,
            best_restart: best_idx,
            start_llf: outcomes.iter().map(|o| o.start_llf.is_finite().then_some(o.start_llf)).collect(),
            final_llf: outcomes.iter().map(|o| o.llf.is_finite().then_some(o.llf)).collect(),
        },
    };
    if result.convergence.converged {
        Ok(result)
    } else {
        Err(Error::NonConvergence { restarts: outcomes.len(), best: Box::new(result) })
    }
}
