//! Posterior-propriety audits for tied and interval-censored data.
//!
//! `cargo run --release --example propriety`

use dtp::dtp::{ModelKind, Observation};
use dtp::family::FamilyId;
use dtp::priors::{repeated_obs_threshold, thm2_audit, Marginal, PriorSpec};

fn show(label: &str, v: dtp::priors::ProprietyVerdict) {
    println!("{label}: {:?}", v.status);
    for (t, c) in v.theorem_trail.iter().zip(&v.conditions) {
        println!("    [{t}] {c}");
    }
}

fn main() -> dtp::Result<()> {
    // 1793 distinct values plus one value repeated 30 times.
    let mut data: Vec<Observation> = (0..1793).map(|i| Observation::point(i as f64 * 0.001)).collect::<dtp::Result<_>>()?;
    data.extend(std::iter::repeat(Observation::point(5.5)?).take(30));
    println!("shape parameters must exceed (k−1)/(n−k) = {:.6}\n", repeated_obs_threshold(1823, 30)?);

    let benchmark = PriorSpec::benchmark(FamilyId::StudentT)?;
    show("benchmark prior", thm2_audit(FamilyId::StudentT, ModelKind::Dtp, &benchmark, &data));

    let mut restricted = benchmark.clone();
    restricted.delta = restricted.delta.truncated(2.0, f64::INFINITY)?;
    restricted.zeta = Marginal::uniform(-0.99, 0.99)?;
    show("δ > 2 and |ζ| < 0.99", thm2_audit(FamilyId::StudentT, ModelKind::Dtp, &restricted, &data));

    let sets = vec![Observation::interval(0.0, 1.0)?, Observation::interval(2.0, 3.0)?];
    show("two separated intervals", thm2_audit(FamilyId::StudentT, ModelKind::Dtp, &benchmark, &sets));
    Ok(())
}
