//! Random-effects meta-analysis with skewed effects laws and predictive densities.
//!
//! `cargo run --release --example hierarchical`

use dtp::dtp::{Dtp, DtpParamsEpsSkew, ParamName};
use dtp::family::FamilyId;
use dtp::inference::{hier_fit, hier_predictive, savage_dickey_bf, EffectsLaw, HierData, McmcConfig};
use dtp::numerics::{stats, RngStream};
use dtp::priors::PriorSpec;

fn main() -> dtp::Result<()> {
    // Seventy studies with skewed true effects (wider right half) and known standard errors.
    let effects = Dtp::new(DtpParamsEpsSkew::new(0.3, 0.15, -0.6, 1.0, 0.0, FamilyId::Normal)?)?;
    let mut rng = RngStream::new(8);
    let theta = effects.sample(&mut rng, 70)?;
    let sigma: Vec<f64> = (0..70).map(|_| 0.02 + 0.04 * rng.uniform()).collect();
    let y: Vec<f64> = theta.iter().zip(&sigma).map(|(t, s)| t + s * rng.normal()).collect();
    let data = HierData::new(y, sigma)?;

    let grid: Vec<f64> = (0..=400).map(|i| -1.0 + 0.0075 * i as f64).collect();
    for law in [EffectsLaw::Normal, EffectsLaw::TpscNormal, EffectsLaw::TpscSas] {
        let family = law.model().family;
        let prior = PriorSpec::weakly_informative(family, -10.0, 10.0, 1.0)?;
        let chain = hier_fit(&data, law, &prior, &McmcConfig::new(20_000, 5_000, 5, 2))?;
        let pred = hier_predictive(&chain, law, &grid)?;
        let below: Vec<f64> = grid.iter().zip(&pred).map(|(&x, &f)| if x < 0.05 { f } else { 0.0 }).collect();
        print!("{:<12} P(effect < 0.05) ≈ {:.4}", law.name(), stats::trapezoid(&grid, &below));
        if law.model().kind.gamma_free() {
            let bf = savage_dickey_bf(&chain, &prior, &[ParamName::Gamma], &[0.0])?;
            print!("   BF(γ = 0) = {:.4}", bf.bf);
        }
        println!();
    }
    Ok(())
}
