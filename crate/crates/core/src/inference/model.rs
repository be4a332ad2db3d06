//! Model specification, sampling transforms and the log-posterior.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dtp::{log_likelihood_with, Dtp, DtpParamsEpsSkew, ModelKind, Observation, ParamName, SHAPE_FREE_DELTA};
use crate::error::{Error, Result};
use crate::family::FamilyId;
use crate::priors::{log_prior, PriorSpec};

/// Base family plus asymmetry mechanism.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModelSpec {
    pub family: FamilyId,
    pub kind: ModelKind,
}

impl ModelSpec {
    pub fn new(family: FamilyId, kind: ModelKind) -> Self {
        Self { family, kind }
    }

    pub fn parameters(&self) -> Vec<ParamName> {
        self.kind.parameters(self.family)
    }

    /// Parameters `full` has and `self` lacks, when `self` is `full` with γ and/or ζ fixed at zero.
    pub fn restriction_of(&self, full: &ModelSpec) -> Option<Vec<ParamName>> {
        if self.family != full.family || !self.kind.nested_in(full.kind) {
            return None;
        }
        let mine = self.parameters();
        Some(full.parameters().into_iter().filter(|p| !mine.contains(p)).collect())
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.family, self.kind)
    }
}

impl FromStr for ModelSpec {
    type Err = Error;

    /// `family:kind`, e.g. `sas:dtp`.
    fn from_str(s: &str) -> Result<Self> {
        let (f, k) = s
            .split_once(':')
            .ok_or_else(|| Error::Input(format!("model `{s}` is not of the form family:kind")))?;
        Ok(ModelSpec { family: f.trim().parse()?, kind: k.trim().parse()? })
    }
}

/// Map from an unconstrained sampling coordinate `z` to a parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transform {
    Identity,
    /// `x = e^z`.
    Log,
    /// `x = tanh z`.
    Atanh,
}

impl Transform {
    pub fn for_param(p: ParamName) -> Self {
        match p {
            ParamName::Mu => Transform::Identity,
            ParamName::Sigma | ParamName::Delta => Transform::Log,
            ParamName::Gamma | ParamName::Zeta => Transform::Atanh,
        }
    }

    pub fn to_z(self, x: f64) -> f64 {
        match self {
            Transform::Identity => x,
            Transform::Log => x.ln(),
            Transform::Atanh => x.atanh(),
        }
    }

    pub fn to_x(self, z: f64) -> f64 {
        match self {
            Transform::Identity => z,
            Transform::Log => z.exp(),
            Transform::Atanh => z.tanh(),
        }
    }

    /// `ln |dx/dz|`.
    pub fn ln_jacobian(self, z: f64) -> f64 {
        match self {
            Transform::Identity => 0.0,
            Transform::Log => z,
            Transform::Atanh => {
                let a = z.abs();
                // ln sech² z without overflow.
                -2.0 * (a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2)
            }
        }
    }
}

/// Posterior of one model given point or interval data.
#[derive(Debug, Clone)]
pub struct Posterior {
    pub model: ModelSpec,
    pub prior: PriorSpec,
    pub data: Vec<Observation>,
    free: Vec<ParamName>,
    base: DtpParamsEpsSkew,
}

impl Posterior {
    /// Point-mass marginals fix their parameter; the other model parameters are free.
    pub fn new(data: Vec<Observation>, model: ModelSpec, prior: PriorSpec) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::Input("posterior needs at least one observation".into()));
        }
        prior.validate(model.family)?;
        let mut base = DtpParamsEpsSkew {
            mu: 0.0,
            sigma: 1.0,
            gamma: 0.0,
            delta: SHAPE_FREE_DELTA,
            zeta: 0.0,
            family: model.family,
        };
        let mut free = Vec::new();
        for p in model.parameters() {
            match prior.get(p) {
                crate::priors::Marginal::PointMass { value } => base.set(p, *value),
                _ => free.push(p),
            }
        }
        Ok(Posterior { model, prior, data, free, base })
    }

    pub fn free_params(&self) -> &[ParamName] {
        &self.free
    }

    pub fn names(&self) -> Vec<String> {
        self.free.iter().map(|p| p.name().to_string()).collect()
    }

    pub fn transforms(&self) -> Vec<Transform> {
        self.free.iter().map(|&p| Transform::for_param(p)).collect()
    }

    /// Fixed (point-mass) parameter values, by name.
    pub fn fixed(&self) -> Vec<(String, f64)> {
        self.model
            .parameters()
            .into_iter()
            .filter(|p| !self.free.contains(p))
            .map(|p| (p.name().to_string(), self.base.get(p)))
            .collect()
    }

    /// Full parameter set for a free-parameter vector.
    pub fn params(&self, theta: &[f64]) -> DtpParamsEpsSkew {
        let mut p = self.base;
        for (name, &v) in self.free.iter().zip(theta) {
            p.set(*name, v);
        }
        p
    }

    /// Free-parameter vector of a full parameter set.
    pub fn theta_of(&self, p: &DtpParamsEpsSkew) -> Vec<f64> {
        self.free.iter().map(|&n| p.get(n)).collect()
    }

    pub fn log_prior(&self, theta: &[f64]) -> f64 {
        log_prior(&self.prior, self.model.kind, &self.params(theta))
    }

    /// `−∞` for parameters outside the model's space.
    pub fn log_likelihood_on(&self, theta: &[f64], data: &[Observation]) -> f64 {
        match Dtp::new(self.params(theta)) {
            Ok(d) => log_likelihood_with(&d, data),
            Err(_) => f64::NEG_INFINITY,
        }
    }

    pub fn log_likelihood(&self, theta: &[f64]) -> f64 {
        self.log_likelihood_on(theta, &self.data)
    }

    /// Unnormalised log posterior in natural coordinates.
    pub fn log_posterior(&self, theta: &[f64]) -> f64 {
        let lp = self.log_prior(theta);
        if lp == f64::NEG_INFINITY {
            return lp;
        }
        lp + self.log_likelihood(theta)
    }
}
