//! Bayes factors: Savage–Dickey density ratios and importance-sampled evidence.

use rayon::prelude::*;
use serde::Serialize;

use super::kde::ProductKde;
use super::mcmc::Chain;
use super::model::{Posterior, Transform};
use crate::dtp::ParamName;
use crate::error::{Error, Result};
use crate::numerics::{ln_gamma, stats, RngStream};
use crate::priors::{Marginal, PriorSpec};

/// Batches used for the Monte Carlo standard error of a Savage–Dickey ratio.
pub const SD_BATCHES: usize = 20;
/// Kernel-window share below which a Savage–Dickey estimate is flagged.
pub const SD_MIN_WINDOW_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SavageDickey {
    /// Bayes factor of the restricted model against the full one.
    pub bf: f64,
    pub se: f64,
    pub posterior_density: f64,
    pub prior_density: f64,
    /// Kernel bandwidths in the transformed coordinates.
    pub bandwidths: Vec<f64>,
    pub window_fraction: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

/// Ratio of posterior to prior marginal density of `restricted` at `point`.
///
/// The posterior density is a product-kernel estimate on the sampler's
/// unconstrained coordinates, mapped back through the Jacobian at the point.
pub fn savage_dickey_bf(chain: &Chain, prior: &PriorSpec, restricted: &[ParamName], point: &[f64]) -> Result<SavageDickey> {
    if restricted.is_empty() || restricted.len() != point.len() {
        return Err(Error::Input("Savage–Dickey needs one point value per restricted parameter".into()));
    }
    if chain.len() < 2 * SD_BATCHES {
        return Err(Error::Input(format!("Savage–Dickey needs at least {} draws, chain has {}", 2 * SD_BATCHES, chain.len())));
    }
    let mut columns = Vec::new();
    let mut bounds = Vec::new();
    let mut z0 = Vec::new();
    let mut ln_prior = 0.0;
    let mut ln_jac = 0.0;
    for (&p, &x0) in restricted.iter().zip(point) {
        let marginal = prior.get(p);
        let (lo, hi) = marginal.support();
        if marginal.is_point_mass() || !(x0 > lo && x0 < hi) {
            return Err(Error::Domain(format!("restriction {p} = {x0} is not interior to the prior support [{lo}, {hi}]")));
        }
        if !marginal.is_proper() {
            return Err(Error::Domain(format!("the prior on {p} is improper; its density at {x0} is not normalised")));
        }
        let j = chain
            .index_of(p.name())
            .ok_or_else(|| Error::Input(format!("parameter {p} was not sampled in this chain")))?;
        let t = chain.transforms[j];
        ln_prior += marginal.ln_density(x0);
        let z = t.to_z(x0);
        ln_jac += t.ln_jacobian(z);
        z0.push(z);
        columns.push(chain.column(j).into_iter().map(|x| t.to_z(x)).collect::<Vec<f64>>());
        bounds.push((t.to_z(lo), t.to_z(hi)));
    }
    if !ln_prior.is_finite() {
        return Err(Error::Domain(format!("prior density vanishes at {point:?}")));
    }
    let kde = ProductKde::new(columns, bounds)?;
    let to_x = |dz: f64| dz / ln_jac.exp();
    let posterior_density = to_x(kde.density(&z0));
    let n = kde.len();
    let batch = n / SD_BATCHES;
    let batch_values: Vec<f64> = (0..SD_BATCHES).map(|b| to_x(kde.density_on(&z0, b * batch..(b + 1) * batch))).collect();
    let se_post = (stats::variance(&batch_values) / SD_BATCHES as f64).sqrt();
    let prior_density = ln_prior.exp();
    let window_fraction = kde.window_fraction(&z0);
    let warning = (window_fraction < SD_MIN_WINDOW_FRACTION).then(|| {
        format!(
            "only {:.3}% of draws fall within one bandwidth of the restriction point; the ratio is unreliable",
            100.0 * window_fraction
        )
    });
    Ok(SavageDickey {
        bf: posterior_density / prior_density,
        se: se_post / prior_density,
        posterior_density,
        prior_density,
        bandwidths: kde.bandwidths().to_vec(),
        window_fraction,
        warning,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IsConfig {
    pub draws: usize,
    pub seed: u64,
    /// Degrees of freedom of the elliptical t component.
    pub df: f64,
    /// Mixture weight of the prior component.
    pub prior_weight: f64,
}

impl Default for IsConfig {
    fn default() -> Self {
        Self { draws: 20_000, seed: 1, df: 5.0, prior_weight: 0.1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvidenceEstimate {
    pub log_evidence: f64,
    /// Standard error of the evidence relative to its value, which is also the delta-method SE of `log_evidence`.
    pub se_log_evidence: f64,
    pub ess: f64,
    pub draws: usize,
}

impl EvidenceEstimate {
    pub fn evidence(&self) -> f64 {
        self.log_evidence.exp()
    }

    pub fn se(&self) -> f64 {
        self.evidence() * self.se_log_evidence
    }
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Lower-triangular `L` with `L Lᵀ = a`, or `None` when `a` is not positive definite.
fn cholesky(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let d = a.len();
    let mut l = vec![vec![0.0; d]; d];
    for i in 0..d {
        for j in 0..=i {
            let s: f64 = a[i][j] - (0..j).map(|k| l[i][k] * l[j][k]).sum::<f64>();
            if i == j {
                if !(s > 1e-14 * a[i][i].abs().max(1e-300)) {
                    return None;
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    Some(l)
}

struct MvT {
    mean: Vec<f64>,
    chol: Vec<Vec<f64>>,
    df: f64,
    ln_norm: f64,
}

impl MvT {
    fn new(mean: Vec<f64>, cov: &[Vec<f64>], df: f64) -> Result<Self> {
        let d = mean.len() as f64;
        let chol = cholesky(cov).ok_or_else(|| Error::Degenerate("chain covariance is singular".into()))?;
        let ln_det: f64 = chol.iter().enumerate().map(|(i, r)| r[i].ln()).sum();
        let ln_norm = ln_gamma(0.5 * (df + d))? - ln_gamma(0.5 * df)? - 0.5 * d * (df * std::f64::consts::PI).ln() - ln_det;
        Ok(MvT { mean, chol, df, ln_norm })
    }

    fn sample(&self, rng: &mut RngStream) -> Vec<f64> {
        let d = self.mean.len();
        let g: Vec<f64> = (0..d).map(|_| rng.normal()).collect();
        let chi2 = 2.0 * rng.gamma(0.5 * self.df);
        let s = (self.df / chi2).sqrt();
        (0..d).map(|i| self.mean[i] + s * (0..=i).map(|k| self.chol[i][k] * g[k]).sum::<f64>()).collect()
    }

    fn ln_pdf(&self, z: &[f64]) -> f64 {
        let d = self.mean.len();
        let mut u = vec![0.0; d];
        for i in 0..d {
            let s: f64 = (0..i).map(|k| self.chol[i][k] * u[k]).sum();
            u[i] = (z[i] - self.mean[i] - s) / self.chol[i][i];
        }
        let q: f64 = u.iter().map(|v| v * v).sum();
        self.ln_norm - 0.5 * (self.df + d as f64) * (q / self.df).ln_1p()
    }
}

/// Importance-sampling estimate of `∫ exp(log_post_unnorm)`.
///
/// The proposal mixes a multivariate t fitted to the chain in unconstrained
/// coordinates with the prior; `priors` lists the chain's marginals in order.
pub fn marginal_lik_is<F: Fn(&[f64]) -> f64 + Sync>(
    chain: &Chain,
    log_post_unnorm: F,
    priors: &[Marginal],
    config: &IsConfig,
) -> Result<EvidenceEstimate> {
    let d = chain.param_names.len();
    if priors.len() != d {
        return Err(Error::Input(format!("{} prior marginals for {d} sampled parameters", priors.len())));
    }
    if let Some((j, _)) = priors.iter().enumerate().find(|(_, m)| !m.is_proper()) {
        return Err(Error::Input(format!(
            "evidence is undefined under the improper prior on {}",
            chain.param_names[j]
        )));
    }
    if config.draws == 0 || !(0.0..1.0).contains(&config.prior_weight) || !(config.df > 0.0) {
        return Err(Error::Input("importance sampling needs draws > 0, df > 0 and prior weight in [0, 1)".into()));
    }
    if chain.len() < d + 2 {
        return Err(Error::Degenerate(format!("{} draws cannot fit a {d}-dimensional proposal", chain.len())));
    }
    let transforms: &[Transform] = &chain.transforms;
    let z_draws: Vec<Vec<f64>> = chain
        .draws
        .iter()
        .map(|x| x.iter().zip(transforms).map(|(&v, t)| t.to_z(v)).collect())
        .collect();
    let n = z_draws.len() as f64;
    let mean: Vec<f64> = (0..d).map(|j| z_draws.iter().map(|z| z[j]).sum::<f64>() / n).collect();
    let cov: Vec<Vec<f64>> = (0..d)
        .map(|a| {
            (0..d)
                .map(|b| z_draws.iter().map(|z| (z[a] - mean[a]) * (z[b] - mean[b])).sum::<f64>() / (n - 1.0))
                .collect()
        })
        .collect();
    let t = MvT::new(mean, &cov, config.df)?;

    let mut rng = RngStream::new(config.seed);
    let mut proposals = Vec::with_capacity(config.draws);
    for _ in 0..config.draws {
        if rng.uniform() < config.prior_weight {
            let x = priors.iter().map(|m| m.sample(&mut rng)).collect::<Result<Vec<f64>>>()?;
            proposals.push(x.iter().zip(transforms).map(|(&v, t)| t.to_z(v)).collect::<Vec<f64>>());
        } else {
            proposals.push(t.sample(&mut rng));
        }
    }
    let (ln_a, ln_b) = ((1.0 - config.prior_weight).ln(), config.prior_weight.ln());
    let log_w: Vec<f64> = proposals
        .par_iter()
        .map(|z| {
            if z.iter().any(|v| !v.is_finite()) {
                return f64::NEG_INFINITY;
            }
            let x: Vec<f64> = z.iter().zip(transforms).map(|(&v, t)| t.to_x(v)).collect();
            let jac: f64 = z.iter().zip(transforms).map(|(&v, t)| t.ln_jacobian(v)).sum();
            let ln_prior_z: f64 = priors.iter().zip(&x).map(|(m, &v)| m.ln_density(v)).sum::<f64>() + jac;
            let ln_q = log_sum_exp(&[ln_a + t.ln_pdf(z), ln_b + ln_prior_z]);
            let target = log_post_unnorm(&x);
            if target.is_nan() || target == f64::NEG_INFINITY {
                f64::NEG_INFINITY
            } else {
                target + jac - ln_q
            }
        })
        .collect();
    let m = config.draws as f64;
    let log_sum = log_sum_exp(&log_w);
    if !log_sum.is_finite() {
        return Err(Error::Degenerate("every importance weight vanished".into()));
    }
    let log_evidence = log_sum - m.ln();
    let r: Vec<f64> = log_w.iter().map(|lw| (lw - log_evidence).exp()).collect();
    let sum_r: f64 = r.iter().sum();
    let sum_r2: f64 = r.iter().map(|v| v * v).sum();
    let se_rel = if config.draws > 1 { (r.iter().map(|v| (v - 1.0).powi(2)).sum::<f64>() / (m * (m - 1.0))).sqrt() } else { f64::INFINITY };
    Ok(EvidenceEstimate { log_evidence, se_log_evidence: se_rel, ess: sum_r * sum_r / sum_r2, draws: config.draws })
}

/// Evidence of a posterior from its own chain.
pub fn posterior_evidence(post: &Posterior, chain: &Chain, config: &IsConfig) -> Result<EvidenceEstimate> {
    let priors: Vec<Marginal> = post.free_params().iter().map(|&p| post.prior.get(p).clone()).collect();
    marginal_lik_is(chain, |t| post.log_posterior(t), &priors, config)
}
