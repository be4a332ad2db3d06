use serde::{Deserialize, Serialize};

use super::{density::Dtp, DtpParams};
use crate::error::{Error, Result};

/// Minimum width of an interval observation.
pub const MIN_INTERVAL_WIDTH: f64 = 1e-12;

/// An exact value or a set (interval) observation; interval ends may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observation {
    Point(f64),
    Interval { lo: f64, hi: f64 },
}

impl Observation {
    pub fn point(x: f64) -> Result<Self> {
        if x.is_finite() {
            Ok(Observation::Point(x))
        } else {
            Err(Error::Input(format!("point observation {x} is not finite")))
        }
    }

    /// Rejects inverted and degenerate intervals.
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
            return Err(Error::Input(format!("invalid interval ({lo}, {hi})")));
        }
        if !(hi - lo >= MIN_INTERVAL_WIDTH) {
            return Err(Error::Input(format!("interval ({lo}, {hi}) is inverted or narrower than {MIN_INTERVAL_WIDTH}")));
        }
        Ok(Observation::Interval { lo, hi })
    }

    pub fn is_point(&self) -> bool {
        matches!(self, Observation::Point(_))
    }

    /// `(lo, hi)`; a point is the degenerate interval `(x, x)`.
    pub fn bounds(&self) -> (f64, f64) {
        match *self {
            Observation::Point(x) => (x, x),
            Observation::Interval { lo, hi } => (lo, hi),
        }
    }
}

/// `Σ ln s(x_j)` over points plus `Σ ln P(lo_j < X < hi_j)` over intervals.
///
/// Returns `-∞` when any term has zero density or probability.
pub fn log_likelihood(params: impl Into<DtpParams>, data: &[Observation]) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::Input("log-likelihood needs at least one observation".into()));
    }
    Ok(log_likelihood_with(&Dtp::new(params)?, data))
}

/// Log-likelihood for a prebuilt evaluator.
pub fn log_likelihood_with(dtp: &Dtp, data: &[Observation]) -> f64 {
    let mut total = 0.0;
    for obs in data {
        let term = match *obs {
            Observation::Point(x) => dtp.ln_pdf(x),
            Observation::Interval { lo, hi } => dtp.interval_prob(lo, hi).max(0.0).ln(),
        };
        if term == f64::NEG_INFINITY || term.is_nan() {
            return f64::NEG_INFINITY;
        }
        total += term;
    }
    total
}
