//! Marginal likelihood by importance sampling, checked on a conjugate model.
//!
//! `cargo run --release --example evidence`

use dtp::dtp::{ModelKind, Observation, ParamName};
use dtp::family::FamilyId;
use dtp::inference::{fit_bayes, posterior_evidence, savage_dickey_bf, IsConfig, McmcConfig, ModelSpec, Posterior};
use dtp::numerics::RngStream;
use dtp::priors::{Marginal, PriorSpec};

fn main() -> dtp::Result<()> {
    // y_i ~ N(μ, 1) with μ ~ N(0, 1): the evidence and the Bayes factor for μ = 0 are closed-form.
    let mut rng = RngStream::new(77);
    let ys: Vec<f64> = (0..20).map(|_| 0.1 + rng.normal()).collect();
    let mut prior = PriorSpec::benchmark(FamilyId::Normal)?;
    prior.mu = Marginal::normal(0.0, 1.0)?;
    prior.sigma = Marginal::point(1.0)?;
    let data: Vec<Observation> = ys.iter().map(|&y| Observation::point(y)).collect::<dtp::Result<_>>()?;
    let post = Posterior::new(data, ModelSpec::new(FamilyId::Normal, ModelKind::Symmetric), prior.clone())?;
    let chain = fit_bayes(&post.data, post.model, &prior, &McmcConfig::new(42_000, 2_000, 2, 5))?;

    let n = ys.len() as f64;
    let (s, ss): (f64, f64) = (ys.iter().sum(), ys.iter().map(|y| y * y).sum());
    let log_z = -0.5 * n * (2.0 * std::f64::consts::PI).ln() - 0.5 * (1.0 + n).ln() - 0.5 * (ss - s * s / (n + 1.0));
    let ev = posterior_evidence(&post, &chain, &IsConfig { draws: 50_000, ..Default::default() })?;
    println!("log evidence: exact {log_z:.5}, importance sampling {:.5} ± {:.5} (ESS {:.0})", ev.log_evidence, ev.se_log_evidence, ev.ess);

    let (m, v) = (s / (n + 1.0), 1.0 / (n + 1.0));
    let exact_bf = (-0.5 * m * m / v).exp() / v.sqrt();
    let sd = savage_dickey_bf(&chain, &prior, &[ParamName::Mu], &[0.0])?;
    println!("BF(μ = 0): exact {exact_bf:.4}, Savage–Dickey {:.4} ± {:.4}", sd.bf, sd.se);
    Ok(())
}
