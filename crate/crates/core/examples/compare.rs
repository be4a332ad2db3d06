//! Likelihood and Bayes-factor comparison of nested DTP models.
//!
//! `cargo run --release --example compare`

use dtp::dtp::{Dtp, DtpParamsEpsSkew, ModelKind, Observation};
use dtp::family::FamilyId;
use dtp::inference::{compare_models, CompareConfig, CompetitorId, McmcConfig, ModelSpec};
use dtp::numerics::RngStream;
use dtp::priors::PriorSpec;

fn main() -> dtp::Result<()> {
    let truth = DtpParamsEpsSkew::new(0.0, 1.0, 0.4, 4.0, 0.0, FamilyId::StudentT)?;
    let mut rng = RngStream::new(4);
    let data: Vec<Observation> =
        Dtp::new(truth)?.sample(&mut rng, 500)?.into_iter().map(Observation::point).collect::<dtp::Result<_>>()?;

    let models: Vec<ModelSpec> =
        [ModelKind::Dtp, ModelKind::Tpsc, ModelKind::Tpsh, ModelKind::Symmetric].map(|k| ModelSpec::new(FamilyId::StudentT, k)).to_vec();
    let prior = PriorSpec::weakly_informative(FamilyId::StudentT, -10.0, 10.0, 1.0)?;
    let config = CompareConfig {
        mcmc: McmcConfig::new(20_000, 4_000, 2, 9),
        priors: Some(vec![prior; models.len()]),
        competitors: CompetitorId::ALL.to_vec(),
        ..Default::default()
    };
    let report = compare_models(&data, &models, &config)?;
    println!("reference: {}", report.reference);
    println!("{:<22} {:>10} {:>10} {:>12} {:>10}  method", "model", "AIC", "BIC", "BF", "BF se");
    for r in &report.rows {
        let f = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.4}"));
        println!("{:<22} {:>10.2} {:>10.2} {:>12} {:>10}  {:?}", r.model.to_string(), r.mle.aic, r.mle.bic, f(r.bf), f(r.bf_se), r.method);
    }
    for c in &report.competitors {
        println!("{:<22} {:>10.2} {:>10.2}", c.id.to_string(), c.aic, c.bic);
    }
    let order: Vec<String> = report.aic_order().iter().map(|m| m.to_string()).collect();
    println!("\nAIC order: {}", order.join(" < "));
    Ok(())
}
