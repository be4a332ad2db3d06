//! Adaptive component-wise random-walk Metropolis in unconstrained coordinates.

use serde::Serialize;

use super::mle::{mle_fit, representative_points, MleOptions};
use super::model::{ModelSpec, Posterior, Transform};
use crate::dtp::{Observation, ParamName};
use crate::priors::PriorSpec;
use crate::error::{Error, Result};
use crate::numerics::{stats, RngStream};

/// Acceptance rate targeted by the scale adaptation.
pub const TARGET_ACCEPTANCE: f64 = 0.44;
/// Iterations between scale updates during burn-in.
pub const ADAPT_BATCH: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McmcConfig {
    /// Total iterations, burn-in included.
    pub iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub seed: u64,
    /// Starting proposal standard deviations in unconstrained coordinates.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial_scales: Option<Vec<f64>>,
}

impl Default for McmcConfig {
    fn default() -> Self {
        Self { iterations: 50_000, burn_in: 10_000, thin: 5, seed: 1, initial_scales: None }
    }
}

impl McmcConfig {
    pub fn new(iterations: usize, burn_in: usize, thin: usize, seed: u64) -> Self {
        Self { iterations, burn_in, thin, seed, initial_scales: None }
    }

    pub fn validate(&self) -> Result<()> {
        if self.thin == 0 || self.burn_in >= self.iterations {
            return Err(Error::Input(format!(
                "need thin ≥ 1 and burn-in ({}) below iterations ({})",
                self.burn_in, self.iterations
            )));
        }
        Ok(())
    }

    pub fn kept(&self) -> usize {
        (self.iterations - self.burn_in) / self.thin
    }
}

/// Post-burn-in, thinned draws in natural coordinates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Chain {
    pub param_names: Vec<String>,
    pub draws: Vec<Vec<f64>>,
    pub log_post: Vec<f64>,
    /// Post-burn-in acceptance rate of each block.
    pub acceptance_stats: Vec<f64>,
    pub seed: u64,
    pub transforms: Vec<Transform>,
    /// Parameters held fixed, with their values.
    pub fixed: Vec<(String, f64)>,
}

impl Chain {
    pub fn len(&self) -> usize {
        self.draws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.param_names.iter().position(|n| n == name)
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.draws.iter().map(|d| d[j]).collect()
    }

    /// Draws of a parameter by name; fixed parameters repeat their value.
    pub fn values(&self, name: &str) -> Option<Vec<f64>> {
        if let Some(j) = self.index_of(name) {
            return Some(self.column(j));
        }
        self.fixed.iter().find(|(n, _)| n == name).map(|&(_, v)| vec![v; self.len()])
    }

    pub fn summary(&self) -> Vec<ParamSummary> {
        (0..self.param_names.len())
            .map(|j| {
                let mut col = self.column(j);
                col.sort_by(f64::total_cmp);
                ParamSummary {
                    name: self.param_names[j].clone(),
                    mean: stats::mean(&col),
                    sd: stats::variance(&col).max(0.0).sqrt(),
                    median: stats::quantile_sorted(&col, 0.5),
                    q025: stats::quantile_sorted(&col, 0.025),
                    q975: stats::quantile_sorted(&col, 0.975),
                    acceptance: self.acceptance_stats.get(j).copied().unwrap_or(f64::NAN),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamSummary {
    pub name: String,
    pub mean: f64,
    pub sd: f64,
    pub median: f64,
    pub q025: f64,
    pub q975: f64,
    pub acceptance: f64,
}

/// One-coordinate-at-a-time adaptive random walk.
#[derive(Debug, Clone)]
pub(crate) struct AdaptiveRwm {
    log_scales: Vec<f64>,
    batch_accepts: Vec<usize>,
    batch_len: usize,
    batches: usize,
    frozen: bool,
    kept_accepts: Vec<usize>,
    kept_sweeps: usize,
}

impl AdaptiveRwm {
    pub(crate) fn new(scales: &[f64]) -> Self {
        let d = scales.len();
        AdaptiveRwm {
            log_scales: scales.iter().map(|s| s.ln()).collect(),
            batch_accepts: vec![0; d],
            batch_len: 0,
            batches: 0,
            frozen: false,
            kept_accepts: vec![0; d],
            kept_sweeps: 0,
        }
    }

    /// One sweep over all coordinates; `g` is the log target in unconstrained coordinates.
    pub(crate) fn sweep<G: Fn(&[f64]) -> f64>(&mut self, z: &mut [f64], gz: &mut f64, g: &G, rng: &mut RngStream) {
        for j in 0..z.len() {
            let old = z[j];
            z[j] = old + self.log_scales[j].exp() * rng.normal();
            let proposal = g(z);
            if !self.accept(j, proposal, gz, rng) {
                z[j] = old;
            }
        }
        self.end_sweep();
    }

    /// Metropolis update of coordinate `j` alone, for targets whose conditional is cheap.
    pub(crate) fn step<G: Fn(f64) -> f64>(&mut self, j: usize, zj: &mut f64, gz: &mut f64, g: G, rng: &mut RngStream) {
        let proposal_z = *zj + self.log_scales[j].exp() * rng.normal();
        let proposal = g(proposal_z);
        if self.accept(j, proposal, gz, rng) {
            *zj = proposal_z;
        }
    }

    fn accept(&mut self, j: usize, proposal: f64, gz: &mut f64, rng: &mut RngStream) -> bool {
        let log_u = rng.uniform().ln();
        if proposal.is_finite() && log_u < proposal - *gz {
            *gz = proposal;
            self.batch_accepts[j] += 1;
            if self.frozen {
                self.kept_accepts[j] += 1;
            }
            true
        } else {
            false
        }
    }

    /// Closes a sweep made of [`AdaptiveRwm::step`] calls.
    pub(crate) fn end_sweep(&mut self) {
        if self.frozen {
            self.kept_sweeps += 1;
        } else {
            self.batch_len += 1;
            if self.batch_len == ADAPT_BATCH {
                self.adapt();
            }
        }
    }

    fn adapt(&mut self) {
        self.batches += 1;
        let step = (1.0 / (self.batches as f64).sqrt()).min(0.1);
        for j in 0..self.log_scales.len() {
            let rate = self.batch_accepts[j] as f64 / self.batch_len as f64;
            self.log_scales[j] += if rate > TARGET_ACCEPTANCE { step } else { -step };
            self.log_scales[j] = self.log_scales[j].clamp(-40.0, 10.0);
            self.batch_accepts[j] = 0;
        }
        self.batch_len = 0;
    }

    pub(crate) fn freeze(&mut self) {
        self.frozen = true;
    }

    pub(crate) fn acceptance(&self) -> Vec<f64> {
        self.kept_accepts
            .iter()
            .map(|&a| if self.kept_sweeps == 0 { 0.0 } else { a as f64 / self.kept_sweeps as f64 })
            .collect()
    }
}

/// Log target in unconstrained coordinates: `log_post(x(z)) + Σ ln |dx/dz|`.
pub(crate) fn unconstrained<'a, F: Fn(&[f64]) -> f64 + 'a>(
    log_post: F,
    transforms: &'a [Transform],
) -> impl Fn(&[f64]) -> f64 + 'a {
    move |z: &[f64]| {
        let x: Vec<f64> = z.iter().zip(transforms).map(|(&v, t)| t.to_x(v)).collect();
        let jac: f64 = z.iter().zip(transforms).map(|(&v, t)| t.ln_jacobian(v)).sum();
        let lp = log_post(&x);
        if lp.is_nan() {
            f64::NEG_INFINITY
        } else {
            lp + jac
        }
    }
}

/// Samples the density `exp(log_post)` given in natural coordinates.
///
/// Proposals act on `z = transform⁻¹(x)`; scales adapt every [`ADAPT_BATCH`]
/// iterations toward [`TARGET_ACCEPTANCE`] during burn-in and are frozen afterwards.
pub fn mcmc_sample<F: Fn(&[f64]) -> f64>(
    log_post: F,
    init: &[f64],
    transforms: &[Transform],
    names: &[String],
    config: &McmcConfig,
) -> Result<Chain> {
    config.validate()?;
    if init.len() != transforms.len() || names.len() != init.len() {
        return Err(Error::Input("init, transforms and names must have equal length".into()));
    }
    let g = unconstrained(&log_post, transforms);
    let mut z: Vec<f64> = init.iter().zip(transforms).map(|(&x, t)| t.to_z(x)).collect();
    let mut gz = g(&z);
    if !gz.is_finite() {
        return Err(Error::Input(format!("log posterior is not finite at the initial point {init:?}")));
    }
    let scales = match &config.initial_scales {
        Some(s) if s.len() == init.len() && s.iter().all(|v| *v > 0.0) => s.clone(),
        Some(_) => return Err(Error::Input("initial scales must be positive, one per parameter".into())),
        None => z.iter().map(|v| 0.1 * (1.0 + v.abs()).min(10.0)).collect(),
    };
    let mut kernel = AdaptiveRwm::new(&scales);
    let mut rng = RngStream::new(config.seed);
    let mut draws = Vec::with_capacity(config.kept());
    let mut log_post_trace = Vec::with_capacity(config.kept());
    for it in 0..config.iterations {
        if it == config.burn_in {
            kernel.freeze();
        }
        kernel.sweep(&mut z, &mut gz, &g, &mut rng);
        if it >= config.burn_in && (it - config.burn_in + 1) % config.thin == 0 {
            let x: Vec<f64> = z.iter().zip(transforms).map(|(&v, t)| t.to_x(v)).collect();
            log_post_trace.push(log_post(&x));
            draws.push(x);
        }
    }
    Ok(Chain {
        param_names: names.to_vec(),
        draws,
        log_post: log_post_trace,
        acceptance_stats: kernel.acceptance(),
        seed: config.seed,
        transforms: transforms.to_vec(),
        fixed: vec![],
    })
}

/// Posterior sampling of one model, started at the MLE clipped into the prior support.
pub fn fit_bayes(data: &[Observation], model: ModelSpec, prior: &PriorSpec, config: &McmcConfig) -> Result<Chain> {
    let post = Posterior::new(data.to_vec(), model, prior.clone())?;
    let init = initial_point(&post, config.seed)?;
    let mut config = config.clone();
    if config.initial_scales.is_none() {
        let n = data.len().max(1) as f64;
        let sigma = post.params(&init).sigma;
        config.initial_scales = Some(
            post.free_params()
                .iter()
                .map(|&p| if p == ParamName::Mu { 1.5 * sigma / n.sqrt() } else { 1.5 / n.sqrt() })
                .collect(),
        );
    }
    let mut chain = mcmc_sample(|t| post.log_posterior(t), &init, &post.transforms(), &post.names(), &config)?;
    chain.fixed = post.fixed();
    Ok(chain)
}

pub(crate) fn initial_point(post: &Posterior, seed: u64) -> Result<Vec<f64>> {
    let opts = MleOptions { restarts: 4, seed, ..Default::default() };
    let mut theta = match mle_fit(&post.data, post.model, None, opts) {
        Ok(fit) => post.theta_of(&fit.eps_skew()),
        Err(_) => {
            let xs = representative_points(&post.data);
            let mut p = post.params(&vec![0.0; post.free_params().len()]);
            p.mu = stats::quantile(&xs, 0.5);
            p.sigma = ((stats::quantile(&xs, 0.75) - stats::quantile(&xs, 0.25)) / 1.349).max(1e-3);
            post.theta_of(&p)
        }
    };
    for (v, &p) in theta.iter_mut().zip(post.free_params()) {
        let (lo, hi) = post.prior.get(p).support();
        let width = if lo.is_finite() && hi.is_finite() { hi - lo } else { 1.0 };
        let (a, b) = (lo + 1e-3 * width, hi - 1e-3 * width);
        if *v < a || *v > b {
            *v = v.clamp(a, b);
        }
    }
    if !post.log_posterior(&theta).is_finite() {
        return Err(Error::Input(format!("{}: posterior is zero at the starting point {theta:?}", post.model)));
    }
    Ok(theta)
}
