//! Executable posterior-propriety audits.

use serde::Serialize;

use super::{Marginal, PriorSpec};
use crate::dtp::{ModelKind, Observation};
use crate::error::{domain, Result};
use crate::family::{height_at_mode, FamilyId};
use crate::numerics::{adaptive_quad_with, QuadOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProprietyStatus {
    Improper,
    NecessaryConditionViolated,
    /// No covered result applies, or the case sits on a boundary that cannot be decided numerically.
    Inconclusive,
    ProperUnderConditions,
    Proper,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProprietyVerdict {
    pub status: ProprietyStatus,
    pub conditions: Vec<String>,
    pub theorem_trail: Vec<String>,
    /// Set when the status rests on quadrature-based divergence probing.
    pub numerical: bool,
}

impl ProprietyVerdict {
    fn new(status: ProprietyStatus, trail: &str, condition: impl Into<String>) -> Self {
        ProprietyVerdict { status, conditions: vec![condition.into()], theorem_trail: vec![trail.into()], numerical: false }
    }

    fn and(mut self, trail: &str, condition: impl Into<String>) -> Self {
        self.theorem_trail.insert(0, trail.into());
        self.conditions.insert(0, condition.into());
        self
    }
}

const TRAIL_IMPROPER_SHAPE: &str = "improper shape prior: necessary conditions";
const TRAIL_SMN_BENCHMARK: &str = "scale-mixture base under the 1/σ benchmark prior";
const TRAIL_EPS_SKEW: &str = "(δ, ζ) product prior via change of variables";
const TRAIL_SETS: &str = "set observations with a separated pair";
const TRAIL_PROPER: &str = "all priors proper";

/// `(k−1)/(n−k)`: shape parameters must exceed this with `k` tied values among `n`.
pub fn repeated_obs_threshold(n: usize, k: usize) -> Result<f64> {
    if !(1 < k && k < n) {
        return domain(format!("repeated-observation threshold needs 1 < k < n, got n = {n}, k = {k}"));
    }
    Ok((k - 1) as f64 / (n - k) as f64)
}

/// Size of the largest group of identical values.
pub fn max_tie_count(xs: &[f64]) -> usize {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let mut best = usize::from(!v.is_empty());
    let mut run = 1;
    for w in v.windows(2) {
        if w[0] == w[1] {
            run += 1;
            best = best.max(run);
        } else {
            run = 1;
        }
    }
    best
}

/// Slice-doubling limit for divergence probing.
const PROBE_DOUBLINGS: usize = 40;
/// Consecutive non-decaying slices that flag divergence.
const PROBE_RUN: usize = 5;
const PROBE_RATIO: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Probe {
    Divergent { toward: f64, at: f64 },
    Convergent,
    Failed,
}

/// Log of `∫ exp(g)` over one slice, scaled by the largest of three probe values.
fn ln_slice<G: Fn(f64) -> f64>(g: &G, a: f64, b: f64) -> Option<f64> {
    let reference = [a, 0.5 * (a + b), b].iter().map(|&x| g(x)).fold(f64::NEG_INFINITY, f64::max);
    if reference == f64::NEG_INFINITY {
        return Some(f64::NEG_INFINITY);
    }
    let opts = QuadOptions { abs_tol: 1e-300, rel_tol: 1e-6, max_intervals: 400 };
    let r = adaptive_quad_with(|x| (g(x) - reference).exp(), a, b, opts).ok()?;
    Some(reference + r.value.ln())
}

/// Probes `∫ exp(g)` over `[lo, hi]` for divergence at infinite or zero ends.
fn probe_divergence<G: Fn(f64) -> f64>(g: G, lo: f64, hi: f64) -> Probe {
    let mut runs: Vec<(f64, Box<dyn Fn(f64) -> (f64, f64)>, f64)> = Vec::new();
    if hi == f64::INFINITY {
        let start = if lo > 0.0 { (2.0 * lo).max(1.0) } else { 1.0 };
        runs.push((start, Box::new(|l| (l, 2.0 * l)), f64::INFINITY));
    }
    if lo == 0.0 {
        let start = if hi.is_finite() { (0.5 * hi).min(1.0) } else { 1.0 };
        runs.push((start, Box::new(|l| (0.5 * l, l)), 0.0));
    }
    for (start, slice, toward) in runs {
        let mut l = start;
        let mut prev: Option<f64> = None;
        let mut run = 0;
        for _ in 0..PROBE_DOUBLINGS {
            let (a, b) = slice(l);
            let Some(cur) = ln_slice(&g, a, b) else { return Probe::Failed };
            if let Some(p) = prev {
                let ratio = if cur == f64::NEG_INFINITY { 0.0 } else { (cur - p).exp() };
                run = if ratio >= PROBE_RATIO { run + 1 } else { 0 };
                if run >= PROBE_RUN {
                    return Probe::Divergent { toward, at: l };
                }
            }
            prev = Some(cur);
            l = if toward == 0.0 { 0.5 * l } else { 2.0 * l };
        }
    }
    Probe::Convergent
}

fn mode_height_bounded(id: FamilyId, lo: f64, hi: f64) -> bool {
    match id {
        FamilyId::Normal | FamilyId::Laplace | FamilyId::StudentT => true,
        FamilyId::SasSymmetric | FamilyId::JohnsonSuSymmetric => hi.is_finite(),
        FamilyId::ExpPower => lo > 0.0,
        FamilyId::SmnBs => lo > 0.0 && hi.is_finite(),
    }
}

/// Finite window used to inspect `f(0; δ)` over a possibly unbounded support.
fn clipped(lo: f64, hi: f64) -> (f64, f64) {
    (lo.max(1e-8), hi.min(1e8))
}

/// `ln f(0; δ)` on a log grid if strictly monotone there.
fn monotone_mode_height(id: FamilyId, lo: f64, hi: f64) -> Option<Vec<f64>> {
    let (a, b) = clipped(lo, hi);
    if !(a < b) {
        return None;
    }
    let vals: Vec<f64> = (0..=200)
        .map(|i| {
            let d = (a.ln() + (b.ln() - a.ln()) * i as f64 / 200.0).exp();
            height_at_mode(id, d).map(f64::ln).unwrap_or(f64::NAN)
        })
        .collect();
    if vals.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let diffs: Vec<f64> = vals.windows(2).map(|w| w[1] - w[0]).collect();
    let up = diffs.iter().all(|&d| d > 0.0);
    let down = diffs.iter().all(|&d| d < 0.0);
    (up || down).then_some(vals)
}

/// Necessary conditions for an improper prior on a shape parameter with `n` observations.
pub fn thm1_audit(id: FamilyId, prior_on_delta: &Marginal, n: usize) -> ProprietyVerdict {
    use ProprietyStatus::*;
    let trail = TRAIL_IMPROPER_SHAPE;
    if n == 0 {
        return ProprietyVerdict::new(Inconclusive, trail, "needs at least one observation");
    }
    if prior_on_delta.is_proper() {
        return ProprietyVerdict::new(
            ProperUnderConditions,
            trail,
            format!("p(δ) = {prior_on_delta} is proper, so both integrability conditions hold"),
        );
    }
    if !id.has_shape_param() {
        return ProprietyVerdict::new(
            Improper,
            trail,
            format!("f(0) of {id} does not depend on δ, so the improper p(δ) = {prior_on_delta} carries infinite mass"),
        );
    }
    let (dlo, dhi) = id.descriptor().delta_domain;
    let (slo, shi) = prior_on_delta.support();
    let (lo, hi) = (slo.max(dlo), shi.min(dhi));
    let nf = n as f64;
    let ln_p = |d: f64| prior_on_delta.ln_density(d);
    let ln_f0 = |d: f64| height_at_mode(id, d).map(f64::ln).unwrap_or(f64::NEG_INFINITY);

    let (probe, clause) = if mode_height_bounded(id, lo, hi) {
        let g = |d: f64| nf * ln_f0(d) + ln_p(d);
        (probe_divergence(g, lo, hi), format!("∫ f(0; δ)^{n} p(δ) dδ < ∞"))
    } else if let Some(vals) = monotone_mode_height(id, lo, hi) {
        let m = 0.5 * (vals[0].exp() + vals[vals.len() - 1].exp());
        let g = |d: f64| {
            let f0 = ln_f0(d);
            nf * (f0 - (f0.exp() + m).ln()) + ln_p(d)
        };
        (probe_divergence(g, lo, hi), format!("∫ [f(0; δ)/(f(0; δ) + {m:.6})]^{n} p(δ) dδ < ∞"))
    } else {
        return ProprietyVerdict::new(
            Inconclusive,
            trail,
            format!("f(0; δ) of {id} is neither bounded nor monotone on [{lo}, {hi}]; no necessary condition applies"),
        );
    };
    let mut v = match probe {
        Probe::Divergent { toward, at } => ProprietyVerdict::new(
            NecessaryConditionViolated,
            trail,
            format!("{clause} fails: slice integrals stop decaying toward δ = {toward} (probed to {at:e})"),
        ),
        Probe::Convergent => ProprietyVerdict::new(
            Inconclusive,
            trail,
            format!("{clause} holds numerically; this is necessary but not sufficient"),
        ),
        Probe::Failed => ProprietyVerdict::new(Inconclusive, trail, format!("{clause} could not be evaluated")),
    };
    v.numerical = true;
    v
}

/// Whether a location marginal is flat on ℝ or has a bounded density.
fn location_covered(m: &Marginal) -> bool {
    match m {
        Marginal::Flat { lo, hi } => *lo == f64::NEG_INFINITY && *hi == f64::INFINITY,
        Marginal::Uniform { .. } | Marginal::Normal { .. } => true,
        _ => false,
    }
}

/// Whether a scale marginal is dominated by `c/σ`.
fn scale_covered(m: &Marginal) -> bool {
    matches!(m, Marginal::Reciprocal | Marginal::HalfCauchy { .. } | Marginal::Uniform { .. })
}

/// Sufficient and necessary conditions for point data under the benchmark structure.
pub fn thm2_audit(id: FamilyId, kind: ModelKind, prior: &PriorSpec, data: &[Observation]) -> ProprietyVerdict {
    use ProprietyStatus::*;
    if data.iter().any(|o| !o.is_point()) {
        let shapes_proper = prior.free_marginals(kind, id).iter().skip(2).all(|(_, m)| m.is_proper());
        return set_obs_audit(data, shapes_proper);
    }
    let trail = TRAIL_SMN_BENCHMARK;
    let xs: Vec<f64> = data.iter().map(|o| o.bounds().0).collect();
    let n = xs.len();
    if prior.is_proper(kind, id) {
        return ProprietyVerdict::new(Proper, TRAIL_PROPER, "every free parameter has a proper prior");
    }
    let shaped = id.has_shape_param();
    if shaped && !prior.delta.is_proper() {
        return thm1_audit(id, &prior.delta, n).and(trail, "p(δ) is improper; the benchmark result needs it proper");
    }
    if (kind.gamma_free() && !prior.gamma.is_proper()) || (shaped && kind.zeta_free() && !prior.zeta.is_proper()) {
        return ProprietyVerdict::new(Inconclusive, trail, "improper p(γ) or p(ζ) is outside the covered structure");
    }
    if !location_covered(&prior.mu) || !scale_covered(&prior.sigma) {
        return ProprietyVerdict::new(
            Inconclusive,
            trail,
            format!("location prior {} / scale prior {} are not dominated by the flat × 1/σ benchmark", prior.mu, prior.sigma),
        );
    }
    if n < 2 {
        return ProprietyVerdict::new(Improper, trail, format!("n = {n}; at least two observations are needed"));
    }
    let (dlo, dhi) = if shaped { prior.delta.support() } else { (1.0, 1.0) };
    let desc = id.descriptor();
    let smn = desc.smn_everywhere() || (shaped && desc.smn_member(dlo) && desc.smn_member(dhi));
    if !smn {
        return ProprietyVerdict::new(
            Inconclusive,
            trail,
            format!("{id} is not a scale mixture of normals on δ ∈ [{dlo}, {dhi}]; only fully proper priors are covered"),
        );
    }
    let k = max_tie_count(&xs);
    if k == 1 {
        let v = ProprietyVerdict::new(Proper, trail, format!("n = {n} ≥ 2 and all observations distinct"));
        return if kind.zeta_free() && shaped { v.and(TRAIL_EPS_SKEW, "proper p(δ) p(ζ)") } else { v };
    }
    if k == n {
        return ProprietyVerdict::new(Improper, trail, format!("all {n} observations are identical"));
    }
    let zeta_max = if shaped && kind.zeta_free() {
        let (a, b) = prior.zeta.support();
        a.abs().max(b.abs())
    } else {
        0.0
    };
    let di_lo = dlo * (1.0 - zeta_max);
    let di_clause = if zeta_max > 0.0 {
        format!("δ1, δ2 ≥ {dlo}·(1 − {zeta_max}) = {di_lo}")
    } else {
        format!("δ1, δ2 ≥ {di_lo}")
    };
    match id {
        FamilyId::Normal => ProprietyVerdict::new(
            Proper,
            trail,
            format!("largest tie group k = {k} < n = {n}; the normal mixing law is degenerate so the mixing condition holds"),
        ),
        FamilyId::StudentT => {
            let t = repeated_obs_threshold(n, k).expect("1 < k < n");
            let clause = format!("k = {k} tied of n = {n}: need δ1, δ2 > (k−1)/(n−k) = {t:.6}; prior gives {di_clause}");
            let rel = (di_lo - t) / t;
            if rel > 1e-12 {
                ProprietyVerdict::new(Proper, trail, clause)
            } else if rel < -1e-12 {
                ProprietyVerdict::new(NecessaryConditionViolated, trail, format!("{clause}; prior mass lies below the threshold"))
            } else if zeta_max == 0.0 && prior.delta.ln_density(t * (1.0 + 1e-12)).is_finite() {
                ProprietyVerdict::new(
                    NecessaryConditionViolated,
                    trail,
                    format!("{clause}; the prior density is positive at the threshold so the near-threshold integral diverges"),
                )
            } else {
                ProprietyVerdict::new(Inconclusive, trail, format!("{clause}; support touches the threshold (boundary case)"))
            }
        }
        FamilyId::SmnBs => {
            if di_lo > 0.0 {
                ProprietyVerdict::new(
                    ProperUnderConditions,
                    trail,
                    format!("k = {k} tied of n = {n}; {di_clause} > 0 truncates the shapes away from zero"),
                )
            } else {
                ProprietyVerdict::new(Inconclusive, trail, format!("k = {k} tied; truncate δ1, δ2 away from zero ({di_clause})"))
            }
        }
        _ => ProprietyVerdict::new(
            Inconclusive,
            trail,
            format!("k = {k} tied of n = {n}; the general mixing condition is evaluated only for student_t and smn_bs"),
        ),
    }
}

/// Sufficient condition for interval data: two sets at positive distance.
pub fn set_obs_audit(data: &[Observation], shape_priors_proper: bool) -> ProprietyVerdict {
    use ProprietyStatus::*;
    if data.len() < 2 {
        return ProprietyVerdict::new(Inconclusive, TRAIL_SETS, format!("n = {} set observations; need at least two", data.len()));
    }
    if !shape_priors_proper {
        return ProprietyVerdict::new(Inconclusive, TRAIL_SETS, "p(γ) and the shape priors must be proper");
    }
    let max_lo = data.iter().map(|o| o.bounds().0).fold(f64::NEG_INFINITY, f64::max);
    let min_hi = data.iter().map(|o| o.bounds().1).fold(f64::INFINITY, f64::min);
    let gap = max_lo - min_hi;
    if gap > 0.0 {
        ProprietyVerdict::new(Proper, TRAIL_SETS, format!("two sets are separated by a gap of {gap}"))
    } else {
        ProprietyVerdict::new(Inconclusive, TRAIL_SETS, "no pair of sets is separated by a positive gap; propriety not established")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::priors::induce_delta_prior;
    use proptest::prelude::*;
    use ProprietyStatus::*;

    fn points(xs: &[f64]) -> Vec<Observation> {
        xs.iter().map(|&x| Observation::point(x).unwrap()).collect()
    }

    #[test]
    fn threshold_values() {
        assert!((repeated_obs_threshold(1823, 30).unwrap() - 29.0 / 1793.0).abs() < 1e-17);
        assert!((repeated_obs_threshold(1823, 30).unwrap() - 0.016174).abs() < 5e-7);
        assert_eq!(repeated_obs_threshold(10, 2).unwrap(), 0.125);
        assert!(repeated_obs_threshold(1_000_000, 2).unwrap() < 1e-5);
        assert!(repeated_obs_threshold(10, 1).is_err());
        assert!(repeated_obs_threshold(10, 10).is_err());
    }

    #[test]
    fn thm1_cases() {
        let flat = Marginal::flat(0.0, f64::INFINITY).unwrap();
        let v = thm1_audit(FamilyId::StudentT, &flat, 10);
        assert_eq!(v.status, NecessaryConditionViolated, "{v:?}");
        assert!(v.numerical);
        assert_eq!(thm1_audit(FamilyId::SasSymmetric, &flat, 10).status, NecessaryConditionViolated);
        assert_eq!(thm1_audit(FamilyId::StudentT, &Marginal::Reciprocal, 5).status, NecessaryConditionViolated);
        let induced = induce_delta_prior(FamilyId::StudentT).unwrap();
        assert_eq!(thm1_audit(FamilyId::StudentT, &induced, 10).status, ProperUnderConditions);
        assert_eq!(thm1_audit(FamilyId::Normal, &flat, 10).status, Improper);
        assert_eq!(thm1_audit(FamilyId::ExpPower, &flat, 10).status, Inconclusive);
    }

    #[test]
    fn thm2_examples() {
        let mut prior = PriorSpec::benchmark(FamilyId::StudentT).unwrap();
        let v = thm2_audit(FamilyId::StudentT, ModelKind::Dtp, &prior, &points(&[0.1, 2.0]));
        assert_eq!(v.status, Proper, "{v:?}");
        assert_eq!(thm2_audit(FamilyId::StudentT, ModelKind::Dtp, &prior, &points(&[0.1])).status, Improper);

        // 1823 observations with a 30-fold tie, δ truncated above 2 and |ζ| < 0.99.
        let mut xs: Vec<f64> = (0..1793).map(|i| i as f64 * 0.001).collect();
        xs.extend(std::iter::repeat(5.5).take(30));
        prior.delta = prior.delta.truncated(2.0, f64::INFINITY).unwrap();
        prior.zeta = Marginal::uniform(-0.99, 0.99).unwrap();
        let v = thm2_audit(FamilyId::StudentT, ModelKind::Dtp, &prior, &points(&xs));
        assert_eq!(v.status, Proper, "{v:?}");
        assert_eq!(thm2_audit(FamilyId::StudentT, ModelKind::Tpsc, &prior, &points(&xs)).status, Proper);
        prior.zeta = Marginal::uniform(-1.0, 1.0).unwrap();
        assert_eq!(thm2_audit(FamilyId::StudentT, ModelKind::Dtp, &prior, &points(&xs)).status, NecessaryConditionViolated);

        let mut small = PriorSpec::benchmark(FamilyId::StudentT).unwrap();
        small.delta = Marginal::uniform(0.0, 1.0).unwrap();
        let ties = points(&[1.0, 1.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]);
        let v = thm2_audit(FamilyId::StudentT, ModelKind::Tpsc, &small, &ties);
        assert_eq!(v.status, NecessaryConditionViolated, "{v:?}");
        small.delta = Marginal::uniform(2.0 / 7.0, 1.0).unwrap();
        assert_eq!(thm2_audit(FamilyId::StudentT, ModelKind::Tpsc, &small, &ties).status, NecessaryConditionViolated);

        let mut bs = PriorSpec::benchmark(FamilyId::SmnBs).unwrap();
        bs.delta = bs.delta.truncated(1e-6, 2.65).unwrap();
        bs.zeta = Marginal::uniform(-0.999, 0.999).unwrap();
        assert_eq!(thm2_audit(FamilyId::SmnBs, ModelKind::Dtp, &bs, &ties).status, ProperUnderConditions);
        let sas = PriorSpec::benchmark(FamilyId::SasSymmetric).unwrap();
        assert_eq!(thm2_audit(FamilyId::SasSymmetric, ModelKind::Dtp, &sas, &points(&[0.0, 1.0])).status, Inconclusive);
        let proper = PriorSpec::weakly_informative(FamilyId::SasSymmetric, -1.0, 1.0, 1.0).unwrap();
        assert_eq!(thm2_audit(FamilyId::SasSymmetric, ModelKind::Dtp, &proper, &points(&[0.0])).status, Proper);
    }

    #[test]
    fn set_observation_gaps() {
        let iv = |a, b| Observation::interval(a, b).unwrap();
        assert_eq!(set_obs_audit(&[iv(0.0, 1.0), iv(2.0, 3.0)], true).status, Proper);
        assert_eq!(set_obs_audit(&[iv(0.0, 2.0), iv(1.0, 3.0)], true).status, Inconclusive);
        let halves = [iv(f64::NEG_INFINITY, 0.0), iv(0.0, f64::INFINITY)];
        assert_eq!(set_obs_audit(&halves, true).status, Inconclusive);
        assert_eq!(set_obs_audit(&[iv(0.0, 1.0), iv(2.0, 3.0)], false).status, Inconclusive);
    }

    #[test]
    fn tie_counting() {
        assert_eq!(max_tie_count(&[]), 0);
        assert_eq!(max_tie_count(&[1.0, 2.0]), 1);
        assert_eq!(max_tie_count(&[3.0, 1.0, 3.0, 2.0, 3.0, 1.0]), 3);
    }

    proptest! {
        #[test]
        fn threshold_monotone(n in 4usize..5000, k in 2usize..100) {
            prop_assume!(k + 1 < n);
            let t = repeated_obs_threshold(n, k).unwrap();
            prop_assert!(repeated_obs_threshold(n, k + 1).unwrap() > t);
            prop_assert!(repeated_obs_threshold(n + 1, k).unwrap() < t);
        }

        #[test]
        fn truncation_never_hurts(cut in 0.01f64..3.0, extra in 0.0f64..2.0) {
            let ties = points(&[1.0, 1.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]);
            let mut prior = PriorSpec::benchmark(FamilyId::StudentT).unwrap();
            prior.delta = Marginal::uniform(cut, 10.0).unwrap();
            let a = thm2_audit(FamilyId::StudentT, ModelKind::Tpsc, &prior, &ties).status;
            prior.delta = Marginal::uniform(cut + extra, 10.0 + extra).unwrap();
            let b = thm2_audit(FamilyId::StudentT, ModelKind::Tpsc, &prior, &ties).status;
            prop_assert!(b >= a);
        }

        #[test]
        fn set_audit_permutation_invariant(mut bounds in proptest::collection::vec((-10.0f64..10.0, 0.01f64..5.0), 2..8), seed in 0u64..1000) {
            let data: Vec<Observation> = bounds.iter().map(|&(a, w)| Observation::interval(a, a + w).unwrap()).collect();
            let before = set_obs_audit(&data, true).status;
            let len = bounds.len();
            bounds.rotate_left((seed as usize) % len);
            bounds.reverse();
            let data: Vec<Observation> = bounds.iter().map(|&(a, w)| Observation::interval(a, a + w).unwrap()).collect();
            prop_assert_eq!(set_obs_audit(&data, true).status, before);
        }
    }
}
