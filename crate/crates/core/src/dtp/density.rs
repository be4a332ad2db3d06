use serde::Serialize;

use super::{DtpParams, DtpParamsNatural, DtpParamsScaleRepar};
use crate::error::{domain, Error, Result};
use crate::family::{FamilyId, SymmetricEval};
use crate::numerics::quad::{adaptive_quad_with, QuadOptions};
use crate::numerics::RngStream;

/// DTP evaluator with both base halves and the continuity weight precomputed.
#[derive(Debug, Clone)]
pub struct Dtp {
    params: DtpParamsNatural,
    left: SymmetricEval,
    right: SymmetricEval,
    eps: f64,
    /// `1 − ε`, computed separately for accuracy when ε is near 1.
    eps_c: f64,
    ln_left: f64,
    ln_right: f64,
}

/// Outcome of a raw-moment evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", content = "value", rename_all = "snake_case")]
pub enum Moment {
    Finite(f64),
    /// The moment does not exist for these shape parameters.
    Divergent,
}

impl Moment {
    pub fn value(self) -> Option<f64> {
        match self {
            Moment::Finite(v) => Some(v),
            Moment::Divergent => None,
        }
    }
}

impl Dtp {
    pub fn new(params: impl Into<DtpParams>) -> Result<Self> {
        let params = params.into().to_natural()?;
        let left = SymmetricEval::new(params.family, params.delta1)?;
        let right = if params.delta2.to_bits() == params.delta1.to_bits() {
            left.clone()
        } else {
            SymmetricEval::new(params.family, params.delta2)?
        };
        // ε = 1 / (1 + exp(b − a)) with a = ln σ1 f(0;δ2), b = ln σ2 f(0;δ1)
        let a = params.sigma1.ln() + right.ln_height_at_mode();
        let b = params.sigma2.ln() + left.ln_height_at_mode();
        let eps = 1.0 / (1.0 + (b - a).exp());
        let eps_c = 1.0 / (1.0 + (a - b).exp());
        let ln_left = (2.0 * eps).ln() - params.sigma1.ln();
        let ln_right = (2.0 * eps_c).ln() - params.sigma2.ln();
        Ok(Self { params, left, right, eps, eps_c, ln_left, ln_right })
    }

    pub fn params(&self) -> &DtpParamsNatural {
        &self.params
    }

    /// Mass left of the mode.
    pub fn epsilon(&self) -> f64 {
        self.eps
    }

    pub fn left_base(&self) -> &SymmetricEval {
        &self.left
    }

    pub fn right_base(&self) -> &SymmetricEval {
        &self.right
    }

    pub fn ln_pdf(&self, x: f64) -> f64 {
        let p = &self.params;
        if x < p.mu {
            self.ln_left + self.left.ln_pdf((x - p.mu) / p.sigma1)
        } else {
            self.ln_right + self.right.ln_pdf((x - p.mu) / p.sigma2)
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.ln_pdf(x).exp()
    }

    /// Left- and right-hand limits of the density at the mode.
    pub fn mode_limits(&self) -> (f64, f64) {
        ((self.ln_left + self.left.ln_height_at_mode()).exp(), (self.ln_right + self.right.ln_height_at_mode()).exp())
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let p = &self.params;
        if x < p.mu {
            2.0 * self.eps * self.left.cdf((x - p.mu) / p.sigma1)
        } else {
            1.0 - 2.0 * self.eps_c * self.right.sf((x - p.mu) / p.sigma2)
        }
    }

    /// `1 − S(x)`, accurate in the right tail.
    pub fn sf(&self, x: f64) -> f64 {
        let p = &self.params;
        if x < p.mu {
            1.0 - 2.0 * self.eps * self.left.cdf((x - p.mu) / p.sigma1)
        } else {
            2.0 * self.eps_c * self.right.sf((x - p.mu) / p.sigma2)
        }
    }

    /// `P(lo < X < hi)` without cancellation in either tail.
    pub fn interval_prob(&self, lo: f64, hi: f64) -> f64 {
        let mu = self.params.mu;
        if hi <= mu {
            self.cdf(hi) - self.cdf(lo)
        } else if lo >= mu {
            self.sf(lo) - self.sf(hi)
        } else {
            (self.eps - self.cdf(lo)) + (self.eps_c - self.sf(hi))
        }
    }

    pub fn quantile(&self, q: f64) -> Result<f64> {
        if !(q > 0.0 && q < 1.0) {
            return domain(format!("quantile level {q} outside (0, 1)"));
        }
        let p = &self.params;
        if q < self.eps {
            Ok(p.mu + p.sigma1 * self.left.quantile(q / (2.0 * self.eps))?)
        } else if q == self.eps {
            Ok(p.mu)
        } else {
            let upper = (1.0 - q) / (2.0 * self.eps_c);
            Ok(p.mu + p.sigma2 * self.right.quantile(1.0 - upper)?)
        }
    }

    /// Composition sampler: left half with probability ε, else right half.
    pub fn sample(&self, rng: &mut RngStream, n: usize) -> Result<Vec<f64>> {
        let p = &self.params;
        (0..n)
            .map(|_| {
                let side = rng.uniform();
                let v = rng.uniform();
                if side < self.eps {
                    Ok(p.mu + p.sigma1 * self.left.quantile(0.5 * v)?)
                } else {
                    Ok(p.mu + p.sigma2 * self.right.quantile(0.5 * (1.0 + v))?)
                }
            })
            .collect()
    }

    /// Raw moment `E[X^r]`.
    ///
    /// Expands `X = μ + (X − μ)` binomially; each side contributes
    /// `(∓σ_i)^k · 2∫_0^∞ z^k f(z; δ_i) dz`, evaluated by quadrature.
    pub fn moment(&self, r: u32) -> Result<Moment> {
        if r == 0 {
            return domain("moment order must be at least 1");
        }
        let p = &self.params;
        if p.family == FamilyId::StudentT && (p.delta1 <= r as f64 || p.delta2 <= r as f64) {
            return Ok(Moment::Divergent);
        }
        let mut total = 0.0;
        let mut binom = 1.0;
        for k in 0..=r {
            if k > 0 {
                binom *= (r - k + 1) as f64 / k as f64;
            }
            let central = if k == 0 {
                1.0
            } else {
                let ml = half_moment(&self.left, k)?;
                let mr = if self.right == self.left { ml } else { half_moment(&self.right, k)? };
                self.eps * (-p.sigma1).powi(k as i32) * ml + self.eps_c * p.sigma2.powi(k as i32) * mr
            };
            total += binom * p.mu.powi((r - k) as i32) * central;
        }
        Ok(Moment::Finite(total))
    }
}

/// `2∫_0^∞ z^k f(z) dz`.
fn half_moment(base: &SymmetricEval, k: u32) -> Result<f64> {
    let r = adaptive_quad_with(
        |z: f64| {
            let f = base.pdf(z);
            if f == 0.0 {
                0.0
            } else {
                z.powi(k as i32) * f
            }
        },
        0.0,
        f64::INFINITY,
        QuadOptions { abs_tol: 1e-12, rel_tol: 1e-10, max_intervals: 4000 },
    )
    .map_err(|e| Error::NonConvergence(format!("moment integral of order {k} for {}: {e}", base.id())))?;
    Ok(2.0 * r.value)
}

/// ε: the mass left of the mode.
pub fn epsilon_weight(params: &DtpParamsNatural) -> Result<f64> {
    Ok(Dtp::new(*params)?.epsilon())
}

pub fn dtp_pdf(params: &DtpParamsNatural, x: f64) -> Result<f64> {
    Ok(Dtp::new(*params)?.pdf(x))
}

/// Density written directly in `(μ, σ, γ, δ1, δ2)` with `a = 1 − γ`, `b = 1 + γ`:
/// `2/(σc)·[f(0;δ2) f(z/b; δ1) I(x<μ) + f(0;δ1) f(z/a; δ2) I(x≥μ)]`,
/// `c = b f(0;δ2) + a f(0;δ1)`.
pub fn dtp_pdf_repar(params: &DtpParamsScaleRepar, x: f64) -> Result<f64> {
    let p = params;
    if !(p.gamma > -1.0 && p.gamma < 1.0 && p.sigma > 0.0) {
        return domain(format!("need σ > 0 and |γ| < 1, got σ = {}, γ = {}", p.sigma, p.gamma));
    }
    let f1 = SymmetricEval::new(p.family, p.delta1)?;
    let f2 = SymmetricEval::new(p.family, p.delta2)?;
    let (a, b) = (1.0 - p.gamma, 1.0 + p.gamma);
    let (h1, h2) = (f1.height_at_mode(), f2.height_at_mode());
    let c = b * h2 + a * h1;
    let z = (x - p.mu) / p.sigma;
    let body = if x < p.mu { h2 * f1.pdf(z / b) } else { h1 * f2.pdf(z / a) };
    Ok(2.0 / (p.sigma * c) * body)
}

pub fn dtp_cdf(params: &DtpParamsNatural, x: f64) -> Result<f64> {
    Ok(Dtp::new(*params)?.cdf(x))
}

pub fn dtp_quantile(params: &DtpParamsNatural, q: f64) -> Result<f64> {
    Dtp::new(*params)?.quantile(q)
}

pub fn dtp_sample(params: &DtpParamsNatural, rng: &mut RngStream, n: usize) -> Result<Vec<f64>> {
    Dtp::new(*params)?.sample(rng, n)
}

pub fn dtp_moment(params: &DtpParamsNatural, r: u32) -> Result<Moment> {
    Dtp::new(*params)?.moment(r)
}
