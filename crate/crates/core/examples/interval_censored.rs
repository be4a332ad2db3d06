//! Likelihood fits with interval-censored observations.
//!
//! `cargo run --release --example interval_censored`

use dtp::dtp::{log_likelihood, Dtp, DtpParamsEpsSkew, ModelKind, Observation};
use dtp::family::FamilyId;
use dtp::inference::{mle_fit, MleOptions, ModelSpec};
use dtp::numerics::RngStream;

fn main() -> dtp::Result<()> {
    let truth = DtpParamsEpsSkew::new(2.0, 1.0, -0.4, 1.0, 0.0, FamilyId::Normal)?;
    let mut rng = RngStream::new(12);
    let xs = Dtp::new(truth)?.sample(&mut rng, 400)?;

    // Round to unit bins and right-censor at 4.
    let censored: Vec<Observation> = xs
        .iter()
        .map(|&x| if x > 4.0 { Observation::interval(4.0, f64::INFINITY) } else { Observation::interval(x.floor(), x.floor() + 1.0) })
        .collect::<dtp::Result<_>>()?;
    let exact: Vec<Observation> = xs.iter().map(|&x| Observation::point(x)).collect::<dtp::Result<_>>()?;
    println!("log-likelihood at the truth: binned {:.2}", log_likelihood(truth, &censored)?);

    let model = ModelSpec::new(FamilyId::Normal, ModelKind::Tpsc);
    for (label, data) in [("exact", &exact), ("binned", &censored)] {
        let fit = mle_fit(data, model, None, MleOptions::default())?;
        let e = fit.eps_skew();
        println!("{label:>7}: μ = {:.3}, σ = {:.3}, γ = {:.3}  (log-lik {:.2})", e.mu, e.sigma, e.gamma, fit.log_lik);
    }
    Ok(())
}
