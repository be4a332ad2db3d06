//! Posterior sampling and a Savage–Dickey test of symmetry.
//!
//! `cargo run --release --example bayes`

use dtp::dtp::{Dtp, DtpParamsEpsSkew, ModelKind, Observation, ParamName};
use dtp::family::FamilyId;
use dtp::inference::{fit_bayes, posterior_predictive, savage_dickey_bf, McmcConfig, ModelSpec};
use dtp::numerics::RngStream;
use dtp::priors::PriorSpec;

fn main() -> dtp::Result<()> {
    let truth = DtpParamsEpsSkew::new(0.0, 1.0, 0.3, 4.0, 0.0, FamilyId::StudentT)?;
    let mut rng = RngStream::new(21);
    let data: Vec<Observation> =
        Dtp::new(truth)?.sample(&mut rng, 400)?.into_iter().map(Observation::point).collect::<dtp::Result<_>>()?;

    let model = ModelSpec::new(FamilyId::StudentT, ModelKind::Tpsc);
    let prior = PriorSpec::weakly_informative(FamilyId::StudentT, -10.0, 10.0, 1.0)?;
    let chain = fit_bayes(&data, model, &prior, &McmcConfig::new(30_000, 5_000, 5, 1))?;
    println!("{} draws kept", chain.len());
    println!("{:<6} {:>8} {:>8} {:>8} {:>8} {:>6}", "param", "mean", "sd", "2.5%", "97.5%", "acc");
    for s in chain.summary() {
        println!("{:<6} {:>8.3} {:>8.3} {:>8.3} {:>8.3} {:>6.2}", s.name, s.mean, s.sd, s.q025, s.q975, s.acceptance);
    }

    let sd = savage_dickey_bf(&chain, &prior, &[ParamName::Gamma], &[0.0])?;
    println!("\nBF(γ = 0 vs TPSC) = {:.4} ± {:.4}", sd.bf, sd.se);

    let grid: Vec<f64> = (-4..=4).map(|i| i as f64).collect();
    let pred = posterior_predictive(&chain, model, &grid)?;
    println!("\nposterior predictive density:");
    for (x, f) in grid.iter().zip(pred) {
        println!("  {x:>4}: {f:.4}");
    }
    Ok(())
}
