//! Asymmetry and kurtosis functionals: AG, the CJ curve and κ.

use serde::Serialize;

use crate::dtp::{Dtp, DtpParams};
use crate::error::{domain, Error, Result};
use crate::family::{FamilyId, SymmetricEval};
use crate::numerics::quad::Bracket;
use crate::numerics::roots::brent;

/// Successive κ differences smaller than this are treated as quadrature noise.
pub const MONOTONE_TOL: f64 = 1e-9;

/// `1 − 2ε`.
pub fn ag_measure(params: impl Into<DtpParams>) -> Result<f64> {
    Ok(1.0 - 2.0 * Dtp::new(params)?.epsilon())
}

/// `u > 0` with `f(u; δ) = p·f(0; δ)`.
///
/// Solved on the log density over `[0, 50·spread]`, widened for heavy tails.
pub fn density_level_point(base: &SymmetricEval, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return domain(format!("relative density level {p} outside (0, 1)"));
    }
    let target = p.ln() + base.ln_height_at_mode();
    let h = |u: f64| base.ln_pdf(u) - target;
    let mut hi = 50.0 * base.spread();
    let mut tries = 0;
    while h(hi) > 0.0 {
        hi *= 8.0;
        tries += 1;
        if tries > 100 || !hi.is_finite() {
            return Err(Error::NonConvergence(format!("{}: density level {p} not reached", base.id())));
        }
    }
    brent(h, Bracket::new(0.0, hi)?, 1e-15 * hi, 0.0)
}

/// `(x_R − 2μ + x_L) / (x_R − x_L)` at relative density height `p`.
pub fn cj_functional(params: impl Into<DtpParams>, p: f64) -> Result<f64> {
    let d = Dtp::new(params)?;
    cj_with(&d, p)
}

/// CJ for a prebuilt evaluator.
pub fn cj_with(d: &Dtp, p: f64) -> Result<f64> {
    let n = d.params();
    let left = n.sigma1 * density_level_point(d.left_base(), p)?;
    let right = if d.right_base() == d.left_base() {
        n.sigma2 * left / n.sigma1
    } else {
        n.sigma2 * density_level_point(d.right_base(), p)?
    };
    Ok((right - left) / (right + left))
}

/// CJ on a grid of heights.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CjCurve {
    pub p_grid: Vec<f64>,
    pub cj_values: Vec<f64>,
}

pub fn cj_curve(params: impl Into<DtpParams>, p_grid: &[f64]) -> Result<CjCurve> {
    let d = Dtp::new(params)?;
    let cj_values = p_grid.iter().map(|&p| cj_with(&d, p)).collect::<Result<Vec<_>>>()?;
    Ok(CjCurve { p_grid: p_grid.to_vec(), cj_values })
}

/// Interval of δ on which κ is defined and used (open bounds).
pub fn kappa_validity(id: FamilyId) -> Option<(f64, f64)> {
    match id {
        FamilyId::StudentT | FamilyId::SasSymmetric | FamilyId::JohnsonSuSymmetric => Some((0.0, f64::INFINITY)),
        FamilyId::ExpPower => Some((1.0, f64::INFINITY)),
        FamilyId::SmnBs => Some((0.0, SMN_BS_KAPPA_MAX_DELTA)),
        FamilyId::Normal | FamilyId::Laplace => None,
    }
}

/// Upper end of the δ range on which the SMN-BS κ is injective.
pub const SMN_BS_KAPPA_MAX_DELTA: f64 = 2.65;

/// `(offset, lo, hi)`: κ grids are log-spaced in `δ − offset` over `[lo, hi]`.
fn grid_span(id: FamilyId) -> (f64, f64, f64) {
    match id {
        FamilyId::StudentT => (0.0, 1e-3, 1e7),
        FamilyId::ExpPower => (1.0, 1e-6, 1e4),
        FamilyId::SasSymmetric | FamilyId::JohnsonSuSymmetric => (0.0, 1e-2, 1e2),
        FamilyId::SmnBs => (0.0, 1e-4, SMN_BS_KAPPA_MAX_DELTA),
        FamilyId::Normal | FamilyId::Laplace => (0.0, 1.0, 1.0),
    }
}

/// Offset below which the κ grid variable `ln(δ − offset)` is undefined.
pub fn kappa_grid_offset(id: FamilyId) -> f64 {
    grid_span(id).0
}

/// `n` κ-grid nodes covering the finite part of the validity range.
pub fn kappa_grid(id: FamilyId, n: usize) -> Result<Vec<f64>> {
    if !id.has_shape_param() {
        return domain(format!("{id} has no shape parameter"));
    }
    if n < 2 {
        return domain("κ grid needs at least two nodes");
    }
    let (off, lo, hi) = grid_span(id);
    Ok(log_grid(lo, hi, n).into_iter().map(|v| off + v).collect())
}

/// `2 f(π_R)/f(0) − 1`, with `π_R` the positive inflection point.
pub fn kappa_measure(id: FamilyId, delta: f64) -> Result<f64> {
    if id == FamilyId::Laplace {
        return domain("κ is undefined for the laplace base (no inflection point)");
    }
    if let Some((lo, hi)) = kappa_validity(id) {
        if !(delta > lo && delta <= hi) {
            return domain(format!("δ = {delta} outside the κ-validity range ({lo}, {hi}) of {id}"));
        }
    }
    let base = SymmetricEval::new(id, delta)?;
    let pi_r = base.inflection_point()?;
    Ok(2.0 * (base.ln_pdf(pi_r) - base.ln_height_at_mode()).exp() - 1.0)
}

/// κ evaluated on a δ grid with the largest strictly monotone end segment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KappaProfile {
    pub delta_grid: Vec<f64>,
    pub kappa_values: Vec<f64>,
    pub injective_on: Option<(f64, f64)>,
}

/// Range of κ over the validity range, with the evaluation grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KappaRange {
    pub lo: f64,
    pub hi: f64,
    pub delta_grid: Vec<f64>,
    pub kappa_values: Vec<f64>,
}

impl KappaRange {
    pub fn contains(&self, kappa: f64) -> bool {
        kappa > self.lo && kappa < self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    let mut g: Vec<f64> = (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect();
    g[0] = lo;
    g[n - 1] = hi;
    g
}

pub fn kappa_range(id: FamilyId) -> Result<KappaRange> {
    let grid = kappa_grid(id, 241)?;
    let kappa = grid.iter().map(|&d| kappa_measure(id, d)).collect::<Result<Vec<_>>>()?;
    let kmin = kappa.iter().cloned().fold(f64::INFINITY, f64::min);
    let kmax = kappa.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(KappaRange { lo: kmin, hi: kmax, delta_grid: grid, kappa_values: kappa })
}

/// Length `(start, end)` (inclusive indices) of the longest strictly monotone run
/// touching either end of `values`.
fn monotone_end_run(values: &[f64]) -> Option<(usize, usize)> {
    let n = values.len();
    if n < 2 {
        return None;
    }
    let run = |idx: &mut dyn Iterator<Item = usize>| -> usize {
        let mut dir = 0.0;
        let mut len = 0;
        let mut prev: Option<usize> = None;
        for i in idx {
            if let Some(j) = prev {
                let d = values[i] - values[j];
                if d.abs() > MONOTONE_TOL {
                    if dir == 0.0 {
                        dir = d.signum();
                    } else if d.signum() != dir {
                        break;
                    }
                }
                len += 1;
            }
            prev = Some(i);
        }
        if dir == 0.0 {
            0
        } else {
            len
        }
    };
    let prefix = run(&mut (0..n));
    let suffix = run(&mut (0..n).rev());
    if prefix == 0 && suffix == 0 {
        None
    } else if prefix >= suffix {
        Some((0, prefix))
    } else {
        Some((n - 1 - suffix, n - 1))
    }
}

pub fn scan_injectivity(id: FamilyId, delta_grid: &[f64]) -> Result<KappaProfile> {
    if delta_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return domain("δ grid must be strictly increasing");
    }
    let desc = id.descriptor();
    if delta_grid.iter().any(|&d| !desc.contains(d)) {
        return domain(format!("δ grid leaves the shape domain of {id}"));
    }
    let kappa_values = delta_grid
        .iter()
        .map(|&d| {
            let base = SymmetricEval::new(id, d)?;
            let pi_r = base.inflection_point()?;
            Ok(2.0 * (base.ln_pdf(pi_r) - base.ln_height_at_mode()).exp() - 1.0)
        })
        .collect::<Result<Vec<_>>>()?;
    let injective_on = monotone_end_run(&kappa_values).map(|(a, b)| (delta_grid[a], delta_grid[b]));
    Ok(KappaProfile { delta_grid: delta_grid.to_vec(), kappa_values, injective_on })
}

/// δ with `κ(δ) = target`, within 1e-8.
pub fn invert_kappa(id: FamilyId, target: f64) -> Result<f64> {
    let range = kappa_range(id)?;
    invert_kappa_in(id, &range, target)
}

/// As [`invert_kappa`] with a precomputed range.
pub fn invert_kappa_in(id: FamilyId, range: &KappaRange, target: f64) -> Result<f64> {
    if !range.contains(target) {
        return domain(format!("κ = {target} outside the attainable range ({}, {}) of {id}", range.lo, range.hi));
    }
    let g = &range.delta_grid;
    let k = &range.kappa_values;
    let i = (0..g.len() - 1)
        .find(|&i| (k[i] - target) * (k[i + 1] - target) <= 0.0)
        .ok_or_else(|| Error::Injectivity(format!("κ = {target} not bracketed on the {id} grid")))?;
    if k[i] == target {
        return Ok(g[i]);
    }
    let h = |u: f64| kappa_measure(id, u.exp()).map(|v| v - target).unwrap_or(f64::NAN);
    let u = brent(h, Bracket::new(g[i].ln(), g[i + 1].ln())?, 1e-14, 1e-10)?;
    Ok(u.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dtp::DtpParamsNatural;

    fn tpsh(id: FamilyId, d1: f64, d2: f64) -> DtpParamsNatural {
        DtpParamsNatural::tpsh(0.0, 1.0, d1, d2, id).unwrap()
    }

    #[test]
    fn ag_examples() {
        assert_eq!(ag_measure(tpsh(FamilyId::ExpPower, 2.0, 2.0)).unwrap(), 0.0);
        assert!((ag_measure(tpsh(FamilyId::SasSymmetric, 5.0, 1.0)).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((ag_measure(tpsh(FamilyId::StudentT, 1.0, 10.0)).unwrap() + 0.1).abs() < 0.005);
    }

    /// `(family, δ1, δ2, printed AG, tolerance)`.
    const TABLE1: [(FamilyId, f64, f64, f64, f64); 16] = [
        (FamilyId::StudentT, 0.1, 10.0, -0.45, 0.005),
        (FamilyId::StudentT, 0.5, 10.0, -0.18, 0.005),
        (FamilyId::StudentT, 1.0, 10.0, -0.10, 0.005),
        (FamilyId::StudentT, 5.0, 10.0, -0.01, 0.005),
        (FamilyId::SasSymmetric, 5.0, 1.0, 2.0 / 3.0, 1e-15),
        (FamilyId::SasSymmetric, 5.0, 2.0, 0.43, 0.005),
        (FamilyId::SasSymmetric, 1.0, 0.25, 3.0 / 5.0, 1e-15),
        (FamilyId::SasSymmetric, 1.0, 0.5, 1.0 / 3.0, 1e-15),
        (FamilyId::SmnBs, 1.0, 50.0, -0.44, 0.005),
        (FamilyId::SmnBs, 1.0, 10.0, -0.09, 0.005),
        (FamilyId::SmnBs, 1.0, 5.0, 0.03, 0.005),
        (FamilyId::SmnBs, 2.0, 1.0, -0.07, 0.01),
        (FamilyId::ExpPower, 1.0, 2.0, 0.11, 0.005),
        (FamilyId::ExpPower, 1.5, 2.0, 0.03, 0.005),
        (FamilyId::ExpPower, 2.0, 2.0, 0.0, 0.0),
        (FamilyId::ExpPower, 2.5, 2.0, -0.01, 0.005),
    ];

    #[test]
    fn table1_rows() {
        for &(id, d1, d2, printed, tol) in &TABLE1 {
            let ag = ag_measure(tpsh(id, d1, d2)).unwrap();
            assert!((ag - printed).abs() <= tol, "{id} ({d1}, {d2}): {ag} vs {printed}");
        }
    }

    /// Independent oracle: bisection for equal-height points on the assembled density.
    fn brute_cj(p: DtpParamsNatural, level: f64) -> f64 {
        let d = Dtp::new(p).unwrap();
        let target = level * d.pdf(p.mu);
        let bisect = |mut inside: f64, mut outside: f64| {
            for _ in 0..200 {
                let mid = 0.5 * (inside + outside);
                if d.pdf(mid) > target {
                    inside = mid;
                } else {
                    outside = mid;
                }
            }
            0.5 * (inside + outside)
        };
        let mut far = 1.0;
        while d.pdf(p.mu - far) > target {
            far *= 2.0;
        }
        let xl = bisect(p.mu, p.mu - far);
        let mut far = 1.0;
        while d.pdf(p.mu + far) > target {
            far *= 2.0;
        }
        let xr = bisect(p.mu, p.mu + far);
        (xr - 2.0 * p.mu + xl) / (xr - xl)
    }

    #[test]
    fn cj_matches_bruteforce_oracle() {
        let p = tpsh(FamilyId::StudentT, 0.1, 10.0);
        assert!((cj_functional(p, 0.5).unwrap() - brute_cj(p, 0.5)).abs() < 1e-6);
        let q = DtpParamsNatural::new(1.0, 0.6, 2.0, 0.5, 3.0, FamilyId::SmnBs).unwrap();
        for &lvl in &[0.05, 0.3, 0.9] {
            assert!((cj_functional(q, lvl).unwrap() - brute_cj(q, lvl)).abs() < 1e-6);
        }
    }

    #[test]
    fn cj_reductions_and_reflection() {
        let sym = DtpParamsNatural::new(0.0, 1.5, 1.5, 0.8, 0.8, FamilyId::SasSymmetric).unwrap();
        let tpsc = DtpParamsNatural::tpsc(0.0, 2.0, 0.7, 3.0, FamilyId::StudentT).unwrap();
        let ag = ag_measure(tpsc).unwrap();
        let shaped = DtpParamsNatural::new(0.0, 0.9, 1.3, 0.6, 4.0, FamilyId::ExpPower).unwrap();
        for i in 1..20 {
            let p = 0.05 * i as f64;
            assert!(cj_functional(sym, p).unwrap().abs() < 1e-12);
            assert!((cj_functional(tpsc, p).unwrap() - ag).abs() < 1e-8);
            let a = cj_functional(shaped, p).unwrap();
            let b = cj_functional(shaped.reflected(), p).unwrap();
            assert!((a + b).abs() < 1e-12);
        }
        assert!((ag_measure(shaped).unwrap() + ag_measure(shaped.reflected()).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn kappa_anchors() {
        assert!((kappa_measure(FamilyId::Normal, 0.0).unwrap() - 0.213).abs() < 0.001);
        assert!((kappa_measure(FamilyId::ExpPower, 2.0).unwrap() - 0.213).abs() < 0.001);
        assert!((kappa_measure(FamilyId::StudentT, 1e4).unwrap() - 0.213).abs() < 0.002);
        let exact = 2.0 * (-0.5f64).exp() - 1.0;
        assert!((kappa_measure(FamilyId::SasSymmetric, 1.0).unwrap() - exact).abs() < 1e-7);
        assert!(kappa_measure(FamilyId::SmnBs, 3.0).is_err());
        assert!(kappa_measure(FamilyId::ExpPower, 0.9).is_err());
        assert!(kappa_measure(FamilyId::Laplace, 0.0).is_err());
    }

    #[test]
    fn kappa_ranges() {
        let t = kappa_range(FamilyId::StudentT).unwrap();
        assert!((t.lo - 0.213).abs() < 0.005 && (t.hi - 0.633).abs() < 0.005, "{} {}", t.lo, t.hi);
        let s = kappa_range(FamilyId::SmnBs).unwrap();
        assert!((s.lo - 0.213).abs() < 0.005 && (s.hi - 0.560).abs() < 0.005, "{} {}", s.lo, s.hi);
        assert!(kappa_range(FamilyId::Normal).is_err());
    }

    #[test]
    fn injectivity_scans() {
        let t = log_grid(0.5, 100.0, 60);
        let prof = scan_injectivity(FamilyId::StudentT, &t).unwrap();
        assert_eq!(prof.injective_on, Some((t[0], t[59])));
        let e: Vec<f64> = (1..=60).map(|i| 1.0 + 3.0 * i as f64 / 60.0).collect();
        let prof = scan_injectivity(FamilyId::ExpPower, &e).unwrap();
        assert_eq!(prof.injective_on, Some((e[0], e[59])));
        let s = log_grid(0.01, 6.0, 80);
        let prof = scan_injectivity(FamilyId::SmnBs, &s).unwrap();
        let (a, b) = prof.injective_on.unwrap();
        assert_eq!(a, s[0]);
        assert!(b > 2.4 && b < 2.9, "monotone up to {b}");
    }

    #[test]
    fn kappa_inversion() {
        let big = invert_kappa(FamilyId::StudentT, 0.213 + 1e-3).unwrap();
        assert!(big > 50.0);
        for &d in &[0.3, 1.0, 4.0, 20.0] {
            let k = kappa_measure(FamilyId::StudentT, d).unwrap();
            assert!((invert_kappa(FamilyId::StudentT, k).unwrap() - d).abs() < 1e-6 * d.max(1.0));
        }
        let r = kappa_range(FamilyId::SmnBs).unwrap();
        let near_top = invert_kappa_in(FamilyId::SmnBs, &r, r.hi - 2e-3).unwrap();
        assert!(near_top > 1.5, "{near_top}");
        assert!(invert_kappa(FamilyId::StudentT, 0.7).is_err());
    }
}
