//! The AG skewness measure, the CJ functional and the κ kurtosis measure.
//!
//! `cargo run --release --example measures`

use dtp::dtp::DtpParamsNatural;
use dtp::family::FamilyId;
use dtp::measures::{ag_measure, cj_curve, kappa_measure, kappa_range};

fn main() -> dtp::Result<()> {
    println!("AG of TPSH laws (σ1 = σ2, asymmetry from the shapes alone):");
    let rows = [
        (FamilyId::StudentT, 0.5, 10.0),
        (FamilyId::SasSymmetric, 5.0, 1.0),
        (FamilyId::SmnBs, 1.0, 10.0),
        (FamilyId::ExpPower, 1.0, 2.0),
    ];
    for (id, d1, d2) in rows {
        let ag = ag_measure(DtpParamsNatural::tpsh(0.0, 1.0, d1, d2, id)?)?;
        println!("  {id:<14} δ = ({d1}, {d2}): AG = {ag:+.4}");
    }

    // For TPSC laws the CJ curve is flat at AG; for TPSH laws it varies with the density level.
    let grid: Vec<f64> = (1..=9).map(|i| i as f64 / 10.0).collect();
    let tpsc = cj_curve(DtpParamsNatural::tpsc(0.0, 1.0, 2.0, 3.0, FamilyId::StudentT)?, &grid)?;
    let tpsh = cj_curve(DtpParamsNatural::tpsh(0.0, 1.0, 0.5, 10.0, FamilyId::StudentT)?, &grid)?;
    println!("\n  p     CJ TPSC   CJ TPSH");
    for (i, p) in grid.iter().enumerate() {
        println!("  {p:.1}  {:+.5}  {:+.5}", tpsc.cj_values[i], tpsh.cj_values[i]);
    }

    println!("\nκ of the base families:");
    println!("  normal: {:.4}", kappa_measure(FamilyId::Normal, 1.0)?);
    for id in [FamilyId::StudentT, FamilyId::SasSymmetric, FamilyId::SmnBs] {
        let r = kappa_range(id)?;
        let samples: Vec<String> = [0.5, 1.0, 2.0].iter().map(|&d| format!("{:.4}", kappa_measure(id, d).unwrap())).collect();
        println!("  {id:<14} range ({:.4}, {:.4}); κ at δ = 0.5, 1, 2: {}", r.lo, r.hi, samples.join(", "));
    }
    Ok(())
}
