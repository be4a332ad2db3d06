//! Prior on δ induced by a uniform prior on κ, and its truncation.
//!
//! `cargo run --release --example induced_prior`

use dtp::family::FamilyId;
use dtp::measures::{kappa_measure, kappa_range};
use dtp::numerics::{stats, RngStream};
use dtp::priors::induce_delta_prior;

fn main() -> dtp::Result<()> {
    for id in [FamilyId::StudentT, FamilyId::SasSymmetric] {
        let prior = induce_delta_prior(id)?;
        let range = kappa_range(id)?;
        println!("{id}: κ range ({:.4}, {:.4}), δ support {:?}", range.lo, range.hi, prior.support());
        for d in [0.5, 1.0, 2.0, 5.0, 20.0] {
            println!("  p(δ = {d:>4}) = {:.5}", prior.ln_density(d).exp());
        }
        // Pushed back through κ, prior draws are uniform on the range.
        let mut rng = RngStream::new(3);
        let kappas: Vec<f64> = (0..5000)
            .map(|_| kappa_measure(id, prior.sample(&mut rng).unwrap()).unwrap())
            .collect();
        let ks = stats::ks_statistic(&kappas, |k| ((k - range.lo) / range.width()).clamp(0.0, 1.0));
        println!("  KS distance of κ(δ) draws to uniform: {ks:.4}");
    }

    // Truncating δ > 2 keeps second moments finite for the Student-t.
    let t = induce_delta_prior(FamilyId::StudentT)?.truncated(2.0, f64::INFINITY)?;
    println!("\nStudent-t prior truncated to δ > 2: support {:?}, p(δ = 3) = {:.5}", t.support(), t.ln_density(3.0).exp());
    Ok(())
}
