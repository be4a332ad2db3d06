//! Random-effects meta-analysis: `y_j | θ_j ~ N(θ_j, σ_j²)`, `θ_j ~ P(hyper)`, with P a DTP law.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::mcmc::{initial_point, unconstrained, AdaptiveRwm, Chain, McmcConfig};
use super::model::{ModelSpec, Posterior, Transform};
use super::predictive::posterior_predictive;
use crate::dtp::{Dtp, ModelKind, Observation};
use crate::error::{Error, Result};
use crate::family::FamilyId;
use crate::numerics::RngStream;
use crate::priors::PriorSpec;

/// Study estimates with known within-study standard deviations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HierData {
    pub y: Vec<f64>,
    pub sigma: Vec<f64>,
}

impl HierData {
    pub fn new(y: Vec<f64>, sigma: Vec<f64>) -> Result<Self> {
        if y.is_empty() || y.len() != sigma.len() {
            return Err(Error::Input(format!("{} estimates and {} standard deviations", y.len(), sigma.len())));
        }
        if let Some(j) = (0..y.len()).find(|&j| !(y[j].is_finite() && sigma[j] > 0.0 && sigma[j].is_finite())) {
            return Err(Error::Input(format!("study {j}: need finite y and σ > 0, got ({}, {})", y[j], sigma[j])));
        }
        Ok(HierData { y, sigma })
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }
}

/// Law of the study effects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EffectsLaw {
    Normal,
    SasSymmetric,
    TpscNormal,
    TpscSas,
    TpshSas,
    DtpSas,
}

impl EffectsLaw {
    pub const ALL: [EffectsLaw; 6] = [
        EffectsLaw::Normal,
        EffectsLaw::SasSymmetric,
        EffectsLaw::TpscNormal,
        EffectsLaw::TpscSas,
        EffectsLaw::TpshSas,
        EffectsLaw::DtpSas,
    ];

    pub fn model(self) -> ModelSpec {
        let (family, kind) = match self {
            EffectsLaw::Normal => (FamilyId::Normal, ModelKind::Symmetric),
            EffectsLaw::SasSymmetric => (FamilyId::SasSymmetric, ModelKind::Symmetric),
            EffectsLaw::TpscNormal => (FamilyId::Normal, ModelKind::Tpsc),
            EffectsLaw::TpscSas => (FamilyId::SasSymmetric, ModelKind::Tpsc),
            EffectsLaw::TpshSas => (FamilyId::SasSymmetric, ModelKind::Tpsh),
            EffectsLaw::DtpSas => (FamilyId::SasSymmetric, ModelKind::Dtp),
        };
        ModelSpec::new(family, kind)
    }

    pub fn name(self) -> &'static str {
        match self {
            EffectsLaw::Normal => "normal",
            EffectsLaw::SasSymmetric => "sas_symmetric",
            EffectsLaw::TpscNormal => "tpsc_normal",
            EffectsLaw::TpscSas => "tpsc_sas",
            EffectsLaw::TpshSas => "tpsh_sas",
            EffectsLaw::DtpSas => "dtp_sas",
        }
    }
}

impl fmt::Display for EffectsLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for EffectsLaw {
    type Err = Error;

    /// Case-insensitive; `-` and `_` are interchangeable and `sas` abbreviates `sas_symmetric`.
    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        let key = if key == "sas" { "sas_symmetric".to_string() } else { key };
        EffectsLaw::ALL
            .into_iter()
            .find(|l| l.name() == key)
            .ok_or_else(|| Error::Input(format!("unknown effects law `{s}`")))
    }
}

fn theta_name(j: usize) -> String {
    format!("theta[{j}]")
}

/// Metropolis-within-Gibbs over θ and the effects-law hyper-parameters.
///
/// Each θ_j takes an adaptive scalar random-walk step against its full
/// conditional; the hyper-parameters then take a sweep of the blocked kernel
/// conditional on θ. Point-mass priors fix their hyper-parameter.
pub fn hier_fit(data: &HierData, law: EffectsLaw, prior: &PriorSpec, config: &McmcConfig) -> Result<Chain> {
    config.validate()?;
    let model = law.model();
    let points = data.y.iter().map(|&y| Observation::point(y)).collect::<Result<Vec<_>>>()?;
    let post = Posterior::new(points, model, prior.clone())?;
    let transforms = post.transforms();
    let n_hyper = transforms.len();
    let mut hyper = if n_hyper == 0 { vec![] } else { initial_point(&post, config.seed)? };
    let mut theta = data.y.clone();

    let law_at = |h: &[f64]| Dtp::new(post.params(h)).ok();
    let ln_hyper = |h: &[f64], theta: &[f64]| {
        let lp = post.log_prior(h);
        if lp == f64::NEG_INFINITY {
            return lp;
        }
        match law_at(h) {
            Some(d) => lp + theta.iter().map(|&t| d.ln_pdf(t)).sum::<f64>(),
            None => f64::NEG_INFINITY,
        }
    };
    let ln_obs = |j: usize, t: f64| {
        let r = (data.y[j] - t) / data.sigma[j];
        -0.5 * r * r
    };

    let effects_scale = post.params(&hyper).sigma;
    let theta_scales: Vec<f64> = data
        .sigma
        .iter()
        .map(|&s| 2.0 / (1.0 / (s * s) + 1.0 / (effects_scale * effects_scale)).sqrt())
        .collect();
    let mut theta_kernel = AdaptiveRwm::new(&theta_scales);
    let n = data.len() as f64;
    let mut hyper_kernel = AdaptiveRwm::new(&vec![1.5 / n.sqrt(); n_hyper]);
    let mut hyper_z: Vec<f64> = hyper.iter().zip(&transforms).map(|(&x, t)| t.to_z(x)).collect();
    let mut rng = RngStream::new(config.seed);
    let mut effects = law_at(&hyper).ok_or_else(|| Error::Input(format!("{law}: invalid starting hyper-parameters {hyper:?}")))?;
    if !ln_hyper(&hyper, &theta).is_finite() {
        return Err(Error::Input(format!("{law}: joint density is zero at the starting point")));
    }

    let mut draws = Vec::with_capacity(config.kept());
    let mut log_post = Vec::with_capacity(config.kept());
    for it in 0..config.iterations {
        if it == config.burn_in {
            theta_kernel.freeze();
            hyper_kernel.freeze();
        }
        for j in 0..theta.len() {
            let g = |t: f64| ln_obs(j, t) + effects.ln_pdf(t);
            let mut gz = g(theta[j]);
            theta_kernel.step(j, &mut theta[j], &mut gz, g, &mut rng);
        }
        theta_kernel.end_sweep();
        if n_hyper > 0 {
            let target = unconstrained(|h: &[f64]| ln_hyper(h, &theta), &transforms);
            let mut gz = target(&hyper_z);
            hyper_kernel.sweep(&mut hyper_z, &mut gz, &target, &mut rng);
            hyper = hyper_z.iter().zip(&transforms).map(|(&z, t)| t.to_x(z)).collect();
            effects = law_at(&hyper).expect("accepted hyper-parameters are valid");
        }
        if it >= config.burn_in && (it - config.burn_in + 1) % config.thin == 0 {
            let joint = ln_hyper(&hyper, &theta) + (0..theta.len()).map(|j| ln_obs(j, theta[j])).sum::<f64>();
            log_post.push(joint);
            draws.push(hyper.iter().chain(&theta).copied().collect::<Vec<f64>>());
        }
    }
    let mut param_names = post.names();
    param_names.extend((0..data.len()).map(theta_name));
    let mut all_transforms = transforms.clone();
    all_transforms.extend(std::iter::repeat(Transform::Identity).take(data.len()));
    let mut acceptance_stats = hyper_kernel.acceptance();
    acceptance_stats.extend(theta_kernel.acceptance());
    Ok(Chain {
        param_names,
        draws,
        log_post,
        acceptance_stats,
        seed: config.seed,
        transforms: all_transforms,
        fixed: post.fixed(),
    })
}

/// Predictive density of a new study effect: the draw-average of the effects-law density.
pub fn hier_predictive(chain: &Chain, law: EffectsLaw, grid: &[f64]) -> Result<Vec<f64>> {
    posterior_predictive(chain, law.model(), grid)
}

/// Draws of θ_j from a hierarchical chain.
pub fn theta_draws(chain: &Chain, j: usize) -> Option<Vec<f64>> {
    chain.index_of(&theta_name(j)).map(|k| chain.column(k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dtp::DtpParamsEpsSkew;
    use crate::numerics::stats;
    use crate::priors::Marginal;

    fn normal_effects(n: usize, mu: f64, tau: f64, s: f64, seed: u64) -> HierData {
        let mut rng = RngStream::new(seed);
        let theta: Vec<f64> = (0..n).map(|_| mu + tau * rng.normal()).collect();
        let y = theta.iter().map(|t| t + s * rng.normal()).collect();
        HierData::new(y, vec![s; n]).unwrap()
    }

    #[test]
    fn validates_data_and_parses_laws() {
        assert!(HierData::new(vec![1.0], vec![0.0]).is_err());
        assert!(HierData::new(vec![1.0, 2.0], vec![1.0]).is_err());
        assert_eq!("TPSC-SAS".parse::<EffectsLaw>().unwrap(), EffectsLaw::TpscSas);
        assert_eq!("sas".parse::<EffectsLaw>().unwrap(), EffectsLaw::SasSymmetric);
        for l in EffectsLaw::ALL {
            assert_eq!(l.name().parse::<EffectsLaw>().unwrap(), l);
        }
    }

    #[test]
    fn precise_studies_pin_their_effects() {
        let data = normal_effects(15, 0.0, 1.0, 1e-4, 3);
        let prior = PriorSpec::benchmark(FamilyId::Normal).unwrap();
        let chain = hier_fit(&data, EffectsLaw::Normal, &prior, &McmcConfig::new(6_000, 2_000, 2, 1)).unwrap();
        for j in 0..data.len() {
            let t = theta_draws(&chain, j).unwrap();
            let width = stats::quantile(&t, 0.975) - stats::quantile(&t, 0.025);
            assert!(width < 5.0 * data.sigma[j], "{j}: {width}");
        }
    }

    #[test]
    fn normal_law_recovers_hyper_parameters() {
        let data = normal_effects(200, 1.5, 0.7, 0.2, 4);
        let prior = PriorSpec::benchmark(FamilyId::Normal).unwrap();
        let chain = hier_fit(&data, EffectsLaw::Normal, &prior, &McmcConfig::new(12_000, 2_000, 5, 2)).unwrap();
        for (name, truth) in [("mu", 1.5), ("sigma", 0.7)] {
            let v = chain.values(name).unwrap();
            let (m, s) = (stats::mean(&v), stats::variance(&v).sqrt());
            assert!((m - truth).abs() < 3.0 * s, "{name}: {m} ± {s}");
        }
        assert!(chain.acceptance_stats.iter().all(|a| (0.0..=1.0).contains(a)));
    }

    #[test]
    fn vague_studies_return_the_effects_law() {
        let law = EffectsLaw::TpscSas;
        let truth = DtpParamsEpsSkew::new(0.5, 1.0, 0.4, 0.8, 0.0, FamilyId::SasSymmetric).unwrap();
        let mut prior = PriorSpec::benchmark(FamilyId::SasSymmetric).unwrap();
        prior.mu = Marginal::point(truth.mu).unwrap();
        prior.sigma = Marginal::point(truth.sigma).unwrap();
        prior.gamma = Marginal::point(truth.gamma).unwrap();
        prior.delta = Marginal::point(truth.delta).unwrap();
        let data = HierData::new(vec![0.0; 20], vec![1e6; 20]).unwrap();
        let chain = hier_fit(&data, law, &prior, &McmcConfig::new(30_000, 2_000, 20, 6)).unwrap();
        assert_eq!(chain.param_names.len(), 20);
        let pooled: Vec<f64> = (0..20).flat_map(|j| theta_draws(&chain, j).unwrap()).collect();
        let d = Dtp::new(truth).unwrap();
        let ks = stats::ks_statistic(&pooled, |x| d.cdf(x));
        assert!(ks < stats::ks_critical_value(pooled.len(), 0.01), "{ks}");
        let grid = [-1.0, 0.5, 2.0];
        let pred = hier_predictive(&chain, law, &grid).unwrap();
        for (x, v) in grid.iter().zip(pred) {
            assert!((v - d.pdf(*x)).abs() < 1e-12);
        }
    }
}
