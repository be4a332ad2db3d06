//! Skew-t competitors fitted for information-criterion comparison.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::mle::{aic, bic, representative_points};
use super::optim::{nelder_mead_polished, SimplexOptions};
use crate::dtp::Observation;
use crate::error::{domain, Error, Result};
use crate::family::{FamilyId, SymmetricEval};
use crate::numerics::{adaptive_quad, ln_gamma, reg_inc_beta, stats, RngStream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CompetitorId {
    /// Jones–Faddy skew-t with tail parameters `(a, b)`.
    #[serde(rename = "s_jf")]
    SJf,
    /// Azzalini–Capitanio skew-t with degrees of freedom `δ` and slant `λ`.
    #[serde(rename = "s_ac")]
    SAc,
}

impl CompetitorId {
    pub const ALL: [CompetitorId; 2] = [CompetitorId::SJf, CompetitorId::SAc];

    pub fn name(self) -> &'static str {
        match self {
            CompetitorId::SJf => "s_jf",
            CompetitorId::SAc => "s_ac",
        }
    }

    /// Names of `shape1` and `shape2` for this competitor.
    pub fn shape_names(self) -> [&'static str; 2] {
        match self {
            CompetitorId::SJf => ["a", "b"],
            CompetitorId::SAc => ["delta", "lambda"],
        }
    }
}

impl fmt::Display for CompetitorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for CompetitorId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "s_jf" | "jf" => Ok(CompetitorId::SJf),
            "s_ac" | "ac" => Ok(CompetitorId::SAc),
            other => Err(Error::Input(format!("unknown competitor `{other}` (expected s_jf or s_ac)"))),
        }
    }
}

/// Location, scale and two shapes: `(a, b)` for s_jf, `(δ, λ)` for s_ac.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompetitorParams {
    pub mu: f64,
    pub sigma: f64,
    pub shape1: f64,
    pub shape2: f64,
}

impl CompetitorParams {
    pub fn new(mu: f64, sigma: f64, shape1: f64, shape2: f64) -> Self {
        Self { mu, sigma, shape1, shape2 }
    }
}

/// Validated competitor density with its normalising constants precomputed.
#[derive(Debug, Clone)]
pub struct Competitor {
    id: CompetitorId,
    p: CompetitorParams,
    ln_c: f64,
    t_nu: Option<(SymmetricEval, SymmetricEval)>,
}

impl Competitor {
    pub fn new(id: CompetitorId, p: CompetitorParams) -> Result<Self> {
        if !(p.mu.is_finite() && p.sigma > 0.0 && p.sigma.is_finite()) {
            return domain(format!("{id}: need finite μ and σ > 0, got {p:?}"));
        }
        match id {
            CompetitorId::SJf => {
                let (a, b) = (p.shape1, p.shape2);
                if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
                    return domain(format!("s_jf: need a, b > 0, got ({a}, {b})"));
                }
                let ln_beta = ln_gamma(a)? + ln_gamma(b)? - ln_gamma(a + b)?;
                let ln_c = (a + b - 1.0) * std::f64::consts::LN_2 + ln_beta + 0.5 * (a + b).ln();
                Ok(Competitor { id, p, ln_c, t_nu: None })
            }
            CompetitorId::SAc => {
                let (nu, lambda) = (p.shape1, p.shape2);
                if !(nu > 0.0 && nu.is_finite() && lambda.is_finite()) {
                    return domain(format!("s_ac: need δ > 0 and finite λ, got ({nu}, {lambda})"));
                }
                let pair = (SymmetricEval::new(FamilyId::StudentT, nu)?, SymmetricEval::new(FamilyId::StudentT, nu + 1.0)?);
                Ok(Competitor { id, p, ln_c: 0.0, t_nu: Some(pair) })
            }
        }
    }

    pub fn params(&self) -> CompetitorParams {
        self.p
    }

    pub fn ln_pdf(&self, x: f64) -> f64 {
        let t = (x - self.p.mu) / self.p.sigma;
        let ln_sigma = self.p.sigma.ln();
        match self.id {
            CompetitorId::SJf => {
                let (a, b) = (self.p.shape1, self.p.shape2);
                let r = (a + b + t * t).sqrt();
                // 1 ± t/r without cancellation.
                let (plus, minus) = if t >= 0.0 { (1.0 + t / r, (a + b) / (r * (r + t))) } else { ((a + b) / (r * (r - t)), 1.0 - t / r) };
                (a + 0.5) * plus.ln() + (b + 0.5) * minus.ln() - self.ln_c - ln_sigma
            }
            CompetitorId::SAc => {
                let (f, g) = self.t_nu.as_ref().expect("s_ac evaluators");
                let nu = self.p.shape1;
                let w = self.p.shape2 * t * ((nu + 1.0) / (nu + t * t)).sqrt();
                std::f64::consts::LN_2 + f.ln_pdf(t) + g.cdf(w).ln() - ln_sigma
            }
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.ln_pdf(x).exp()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x == f64::NEG_INFINITY {
            return 0.0;
        }
        if x == f64::INFINITY {
            return 1.0;
        }
        match self.id {
            CompetitorId::SJf => {
                let (a, b) = (self.p.shape1, self.p.shape2);
                let t = (x - self.p.mu) / self.p.sigma;
                let u = 0.5 * (1.0 + t / (a + b + t * t).sqrt());
                reg_inc_beta(a, b, u).unwrap_or(f64::NAN)
            }
            CompetitorId::SAc => {
                let t = (x - self.p.mu) / self.p.sigma;
                let std = |s: f64| self.pdf(self.p.mu + self.p.sigma * s) * self.p.sigma;
                // Integrate over the standardised half-line through the change s = t − (1 − u)/u.
                let tail = |u: f64| if u <= 0.0 { 0.0 } else { std(t - (1.0 - u) / u) / (u * u) };
                adaptive_quad(tail, 0.0, 1.0, 1e-10).map(|r| r.value.clamp(0.0, 1.0)).unwrap_or(f64::NAN)
            }
        }
    }

    pub fn sample(&self, rng: &mut RngStream, n: usize) -> Vec<f64> {
        (0..n)
            .map(|_| {
                let t = match self.id {
                    CompetitorId::SJf => {
                        let (a, b) = (self.p.shape1, self.p.shape2);
                        let ga = rng.gamma(a);
                        let gb = rng.gamma(b);
                        let u = ga / (ga + gb);
                        (a + b).sqrt() * (2.0 * u - 1.0) / (2.0 * (u * (1.0 - u)).sqrt())
                    }
                    CompetitorId::SAc => {
                        // Skew-normal by the sign-flip construction, then a χ² mixing scale.
                        let nu = self.p.shape1;
                        let lambda = self.p.shape2;
                        let d = lambda / (1.0 + lambda * lambda).sqrt();
                        let (u0, u1) = (rng.normal(), rng.normal());
                        let z = d * u0.abs() + (1.0 - d * d).sqrt() * u1;
                        z / (2.0 * rng.gamma(0.5 * nu) / nu).sqrt()
                    }
                };
                self.p.mu + self.p.sigma * t
            })
            .collect()
    }
}

pub fn competitor_pdf(id: CompetitorId, params: CompetitorParams, x: f64) -> Result<f64> {
    Ok(Competitor::new(id, params)?.pdf(x))
}

fn competitor_log_lik(c: &Competitor, data: &[Observation]) -> f64 {
    data.iter()
        .map(|o| match *o {
            Observation::Point(x) => c.ln_pdf(x),
            Observation::Interval { lo, hi } => (c.cdf(hi) - c.cdf(lo)).max(0.0).ln(),
        })
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompetitorFit {
    pub id: CompetitorId,
    pub params: CompetitorParams,
    pub log_lik: f64,
    pub aic: f64,
    pub bic: f64,
    pub n_params: usize,
    pub converged: bool,
}

/// Multi-start simplex MLE over `(μ, ln σ, shape coordinates)`.
pub fn competitor_mle(data: &[Observation], id: CompetitorId, restarts: usize, seed: u64) -> Result<CompetitorFit> {
    if data.len() < 4 {
        return Err(Error::Input(format!("{id}: 4 parameters need at least 4 observations")));
    }
    let xs = representative_points(data);
    let med = stats::quantile(&xs, 0.5);
    let spread = ((stats::quantile(&xs, 0.75) - stats::quantile(&xs, 0.25)) / 1.349).max(1e-6);
    // Shape coordinates: ln a, ln b for s_jf; ln δ, λ for s_ac.
    let to_params = |z: &[f64]| {
        let s2 = if id == CompetitorId::SJf { z[3].exp() } else { z[3] };
        CompetitorParams::new(z[0], z[1].exp(), z[2].exp(), s2)
    };
    let neg_ll = |z: &[f64]| match Competitor::new(id, to_params(z)) {
        Ok(c) => -competitor_log_lik(&c, data),
        Err(_) => f64::INFINITY,
    };
    let starts: Vec<Vec<f64>> = (0..restarts.max(1))
        .map(|r| {
            let mut rng = RngStream::substream(seed, r as u64);
            let mu = med + spread * (rng.uniform() - 0.5);
            let ls = spread.ln() + 0.5 * (rng.uniform() - 0.5);
            let s1 = (0.5 + 3.0 * rng.uniform()).ln() + 0.5;
            let s2 = if id == CompetitorId::SJf { (0.5 + 3.0 * rng.uniform()).ln() + 0.5 } else { 2.0 * (rng.uniform() - 0.5) };
            vec![mu, ls, s1, s2]
        })
        .collect();
    let best = starts
        .par_iter()
        .map(|z0| nelder_mead_polished(neg_ll, z0, SimplexOptions::default()))
        .collect::<Vec<_>>()
        .into_iter()
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .expect("at least one start");
    if !best.value.is_finite() {
        return Err(Error::NonConvergence(format!("{id}: no start reached a finite log-likelihood")));
    }
    let log_lik = -best.value;
    Ok(CompetitorFit {
        id,
        params: to_params(&best.x),
        log_lik,
        aic: aic(log_lik, 4),
        bic: bic(log_lik, 4, data.len()),
        n_params: 4,
        converged: best.converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::adaptive_quad_with;
    use crate::numerics::QuadOptions;

    fn total_mass(c: &Competitor) -> f64 {
        // u ∈ (−1, 1) ↦ x = μ + σ u/(1 − u²).
        let p = c.params();
        let g = |u: f64| {
            let w = 1.0 - u * u;
            if w <= 0.0 {
                return 0.0;
            }
            c.pdf(p.mu + p.sigma * u / w) * p.sigma * (1.0 + u * u) / (w * w)
        };
        adaptive_quad_with(g, -1.0, 1.0, QuadOptions { abs_tol: 1e-12, rel_tol: 1e-12, max_intervals: 4000 }).unwrap().value
    }

    #[test]
    fn densities_integrate_to_one() {
        for (id, s1, s2) in [(CompetitorId::SJf, 2.0, 5.0), (CompetitorId::SJf, 0.7, 0.7), (CompetitorId::SAc, 3.0, 2.5), (CompetitorId::SAc, 1.0, -4.0)] {
            let c = Competitor::new(id, CompetitorParams::new(0.3, 1.7, s1, s2)).unwrap();
            assert!((total_mass(&c) - 1.0).abs() < 1e-6, "{id} {s1} {s2}");
        }
    }

    #[test]
    fn equal_tails_are_symmetric_and_zero_slant_is_student_t() {
        let jf = Competitor::new(CompetitorId::SJf, CompetitorParams::new(2.0, 1.5, 3.0, 3.0)).unwrap();
        let diff: f64 = jf.pdf(3.0) - jf.pdf(1.0);
        assert!(diff.abs() < 1e-12);
        let ac = Competitor::new(CompetitorId::SAc, CompetitorParams::new(0.0, 2.0, 4.0, 0.0)).unwrap();
        let t = SymmetricEval::new(FamilyId::StudentT, 4.0).unwrap();
        for &x in &[-3.0, 0.0, 1.2, 10.0] {
            assert!((ac.pdf(x) - t.pdf(x / 2.0) / 2.0).abs() < 1e-14);
        }
        assert!(competitor_pdf(CompetitorId::SJf, CompetitorParams::new(0.0, 1.0, -1.0, 1.0), 0.0).is_err());
    }

    #[test]
    fn cdfs_match_samplers() {
        let mut rng = RngStream::new(21);
        for (id, s1, s2) in [(CompetitorId::SJf, 1.5, 4.0), (CompetitorId::SAc, 5.0, 2.0)] {
            let c = Competitor::new(id, CompetitorParams::new(-1.0, 0.8, s1, s2)).unwrap();
            let xs = c.sample(&mut rng, 4000);
            let d = stats::ks_statistic(&xs, |x| c.cdf(x));
            assert!(d < stats::ks_critical_value(4000, 0.01), "{id}: {d}");
        }
    }

    #[test]
    fn mle_recovers_jones_faddy() {
        let truth = Competitor::new(CompetitorId::SJf, CompetitorParams::new(0.0, 1.0, 2.0, 6.0)).unwrap();
        let mut rng = RngStream::new(4);
        let data: Vec<Observation> = truth.sample(&mut rng, 3000).into_iter().map(|x| Observation::point(x).unwrap()).collect();
        let fit = competitor_mle(&data, CompetitorId::SJf, 4, 1).unwrap();
        let ll_truth = competitor_log_lik(&truth, &data);
        assert!(fit.log_lik >= ll_truth - 1e-6);
        assert!((fit.params.mu).abs() < 0.5 && fit.aic == aic(fit.log_lik, 4));
    }
}
