//! Maximum likelihood fits of DTP submodels and skewed-t competitors, ranked by AIC and BIC.
//!
//! `cargo run --release --example mle`

use dtp::dtp::{Dtp, DtpParamsEpsSkew, ModelKind, Observation};
use dtp::family::FamilyId;
use dtp::inference::{competitor_mle, mle_fit, CompetitorId, MleOptions, ModelSpec};
use dtp::numerics::RngStream;

fn main() -> dtp::Result<()> {
    let truth = DtpParamsEpsSkew::new(0.0, 1.0, 0.5, 1.0, -0.3, FamilyId::SasSymmetric)?;
    let mut rng = RngStream::new(100);
    let data: Vec<Observation> =
        Dtp::new(truth)?.sample(&mut rng, 2000)?.into_iter().map(Observation::point).collect::<dtp::Result<_>>()?;
    println!("2000 draws from {truth:?}\n");

    println!("{:<26} {:>10} {:>10} {:>10}", "model", "log-lik", "AIC", "BIC");
    for kind in [ModelKind::Dtp, ModelKind::Tpsc, ModelKind::Tpsh, ModelKind::Symmetric] {
        let model = ModelSpec::new(FamilyId::SasSymmetric, kind);
        let fit = mle_fit(&data, model, None, MleOptions { restarts: 4, ..Default::default() })?;
        println!("{:<26} {:>10.2} {:>10.2} {:>10.2}", model.to_string(), fit.log_lik, fit.aic, fit.bic);
        if kind == ModelKind::Dtp {
            let e = fit.eps_skew();
            println!(
                "    μ = {:.3}, σ = {:.3}, γ = {:.3}, δ = {:.3}, ζ = {:.3}",
                e.mu, e.sigma, e.gamma, e.delta, e.zeta
            );
        }
    }
    for id in CompetitorId::ALL {
        let fit = competitor_mle(&data, id, 4, 1)?;
        println!("{:<26} {:>10.2} {:>10.2} {:>10.2}", id.to_string(), fit.log_lik, fit.aic, fit.bic);
    }
    Ok(())
}
