//! The double two-piece construction.
//!
//! A DTP density glues the left half of `f(·; δ1)` scaled by `σ1` to the right
//! half of `f(·; δ2)` scaled by `σ2` at the mode `μ`, with the left mass `ε`
//! fixed by continuity. [`DtpParamsNatural`] is the canonical representation;
//! the ε-skew forms are bijections onto it.

mod density;
mod likelihood;

pub use density::{dtp_cdf, dtp_moment, dtp_pdf, dtp_pdf_repar, dtp_quantile, dtp_sample, epsilon_weight, Dtp, Moment};
pub use likelihood::{log_likelihood, log_likelihood_with, Observation};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::family::FamilyId;

/// Placeholder stored in δ slots of families without a shape parameter.
pub const SHAPE_FREE_DELTA: f64 = 1.0;

/// Which of the two asymmetry mechanisms are active.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    /// Free scales and shapes on each side.
    Dtp,
    /// Two-piece scale: `δ1 = δ2` (ζ = 0).
    Tpsc,
    /// Two-piece shape: `σ1 = σ2` (γ = 0).
    Tpsh,
    /// Both restrictions.
    Symmetric,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [ModelKind::Dtp, ModelKind::Tpsc, ModelKind::Tpsh, ModelKind::Symmetric];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Dtp => "dtp",
            ModelKind::Tpsc => "tpsc",
            ModelKind::Tpsh => "tpsh",
            ModelKind::Symmetric => "symmetric",
        }
    }

    pub fn gamma_free(self) -> bool {
        matches!(self, ModelKind::Dtp | ModelKind::Tpsc)
    }

    pub fn zeta_free(self) -> bool {
        matches!(self, ModelKind::Dtp | ModelKind::Tpsh)
    }

    /// Free parameters of the model for `family`, in canonical order.
    ///
    /// Shape-free families have neither δ nor ζ, so their TPSH and symmetric
    /// models coincide with the plain location-scale model.
    pub fn parameters(self, family: FamilyId) -> Vec<ParamName> {
        let shaped = family.has_shape_param();
        let mut out = vec![ParamName::Mu, ParamName::Sigma];
        if self.gamma_free() {
            out.push(ParamName::Gamma);
        }
        if shaped {
            out.push(ParamName::Delta);
            if self.zeta_free() {
                out.push(ParamName::Zeta);
            }
        }
        out
    }

    /// Whether `self` is obtained from `full` by fixing γ and/or ζ at zero.
    pub fn nested_in(self, full: ModelKind) -> bool {
        (!self.gamma_free() || full.gamma_free()) && (!self.zeta_free() || full.zeta_free())
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "dtp" => ModelKind::Dtp,
            "tpsc" => ModelKind::Tpsc,
            "tpsh" => ModelKind::Tpsh,
            "symmetric" | "sym" => ModelKind::Symmetric,
            _ => return Err(Error::Input(format!("unknown model kind '{s}'"))),
        })
    }
}

/// Names of the ε-skew parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamName {
    Mu,
    Sigma,
    Gamma,
    Delta,
    Zeta,
}

impl ParamName {
    pub const ALL: [ParamName; 5] = [ParamName::Mu, ParamName::Sigma, ParamName::Gamma, ParamName::Delta, ParamName::Zeta];

    pub fn name(self) -> &'static str {
        match self {
            ParamName::Mu => "mu",
            ParamName::Sigma => "sigma",
            ParamName::Gamma => "gamma",
            ParamName::Delta => "delta",
            ParamName::Zeta => "zeta",
        }
    }
}

impl fmt::Display for ParamName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for ParamName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "mu" | "μ" => ParamName::Mu,
            "sigma" | "σ" => ParamName::Sigma,
            "gamma" | "γ" => ParamName::Gamma,
            "delta" | "δ" => ParamName::Delta,
            "zeta" | "ζ" => ParamName::Zeta,
            _ => return Err(Error::Input(format!("unknown parameter '{s}'"))),
        })
    }
}

/// `(μ, σ1, σ2, δ1, δ2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DtpParamsNatural {
    pub mu: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub family: FamilyId,
}

/// `(μ, σ, γ, δ1, δ2)` with `σ1 = σ(1+γ)`, `σ2 = σ(1−γ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DtpParamsScaleRepar {
    pub mu: f64,
    pub sigma: f64,
    pub gamma: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub family: FamilyId,
}

/// `(μ, σ, γ, δ, ζ)` with additionally `δ1 = δ(1+ζ)`, `δ2 = δ(1−ζ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DtpParamsEpsSkew {
    pub mu: f64,
    pub sigma: f64,
    pub gamma: f64,
    pub delta: f64,
    pub zeta: f64,
    pub family: FamilyId,
}

/// Inverse-scale-factors form `σ1 = σ/γ`, `σ2 = σγ`, `γ > 0`. Read-only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InverseScaleFactors {
    pub mu: f64,
    pub sigma: f64,
    pub gamma: f64,
    pub delta1: f64,
    pub delta2: f64,
}

/// Any of the interchangeable parameterisations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "parameterisation", rename_all = "snake_case")]
pub enum DtpParams {
    Natural(DtpParamsNatural),
    ScaleRepar(DtpParamsScaleRepar),
    EpsSkew(DtpParamsEpsSkew),
}

/// Target tag for [`convert_params`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parameterisation {
    Natural,
    ScaleRepar,
    EpsSkew,
}

fn check_shape(family: FamilyId, delta: f64, what: &str) -> Result<()> {
    if family.descriptor().contains(delta) && (delta.is_finite() || !family.has_shape_param()) {
        Ok(())
    } else {
        Err(Error::Representation(format!("{what} = {delta} outside the shape domain of {family}")))
    }
}

fn check_unit(v: f64, what: &str) -> Result<()> {
    if v > -1.0 && v < 1.0 {
        Ok(())
    } else {
        domain(format!("{what} = {v} outside (-1, 1)"))
    }
}

impl DtpParamsNatural {
    pub fn new(mu: f64, sigma1: f64, sigma2: f64, delta1: f64, delta2: f64, family: FamilyId) -> Result<Self> {
        let p = Self { mu, sigma1, sigma2, delta1, delta2, family };
        p.validate()?;
        Ok(p)
    }

    /// TPSC shorthand: common shape δ.
    pub fn tpsc(mu: f64, sigma1: f64, sigma2: f64, delta: f64, family: FamilyId) -> Result<Self> {
        Self::new(mu, sigma1, sigma2, delta, delta, family)
    }

    /// TPSH shorthand: common scale σ.
    pub fn tpsh(mu: f64, sigma: f64, delta1: f64, delta2: f64, family: FamilyId) -> Result<Self> {
        Self::new(mu, sigma, sigma, delta1, delta2, family)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.mu.is_finite() {
            return domain(format!("location μ = {} is not finite", self.mu));
        }
        if !(self.sigma1 > 0.0 && self.sigma1.is_finite() && self.sigma2 > 0.0 && self.sigma2.is_finite()) {
            return domain(format!("scales must be positive, got σ1 = {}, σ2 = {}", self.sigma1, self.sigma2));
        }
        if self.family.has_shape_param() {
            if !(self.family.descriptor().contains(self.delta1) && self.delta1.is_finite()) {
                return domain(format!("δ1 = {} outside the shape domain of {}", self.delta1, self.family));
            }
            if !(self.family.descriptor().contains(self.delta2) && self.delta2.is_finite()) {
                return domain(format!("δ2 = {} outside the shape domain of {}", self.delta2, self.family));
            }
        }
        Ok(())
    }

    /// Mirror image about the mode: swaps the sides.
    pub fn reflected(&self) -> Self {
        Self { sigma1: self.sigma2, sigma2: self.sigma1, delta1: self.delta2, delta2: self.delta1, ..*self }
    }

    pub fn to_scale_repar(&self) -> DtpParamsScaleRepar {
        let s = self.sigma1 + self.sigma2;
        DtpParamsScaleRepar {
            mu: self.mu,
            sigma: 0.5 * s,
            gamma: (self.sigma1 - self.sigma2) / s,
            delta1: self.delta1,
            delta2: self.delta2,
            family: self.family,
        }
    }

    pub fn to_eps_skew(&self) -> DtpParamsEpsSkew {
        let r = self.to_scale_repar();
        let (delta, zeta) = if self.family.has_shape_param() {
            let s = self.delta1 + self.delta2;
            (0.5 * s, (self.delta1 - self.delta2) / s)
        } else {
            (SHAPE_FREE_DELTA, 0.0)
        };
        DtpParamsEpsSkew { mu: r.mu, sigma: r.sigma, gamma: r.gamma, delta, zeta, family: self.family }
    }

    pub fn to_inverse_scale_factors(&self) -> InverseScaleFactors {
        InverseScaleFactors {
            mu: self.mu,
            sigma: (self.sigma1 * self.sigma2).sqrt(),
            gamma: (self.sigma2 / self.sigma1).sqrt(),
            delta1: self.delta1,
            delta2: self.delta2,
        }
    }
}

impl DtpParamsScaleRepar {
    pub fn to_natural(&self) -> Result<DtpParamsNatural> {
        check_unit(self.gamma, "γ")?;
        if !(self.sigma > 0.0) {
            return domain(format!("scale σ = {} must be positive", self.sigma));
        }
        DtpParamsNatural::new(
            self.mu,
            self.sigma * (1.0 + self.gamma),
            self.sigma * (1.0 - self.gamma),
            self.delta1,
            self.delta2,
            self.family,
        )
    }
}

impl DtpParamsEpsSkew {
    pub fn new(mu: f64, sigma: f64, gamma: f64, delta: f64, zeta: f64, family: FamilyId) -> Result<Self> {
        let p = Self { mu, sigma, gamma, delta, zeta, family };
        p.to_natural()?;
        Ok(p)
    }

    /// `(δ1, δ2)` induced by `(δ, ζ)`.
    pub fn shapes(&self) -> (f64, f64) {
        if self.family.has_shape_param() {
            (self.delta * (1.0 + self.zeta), self.delta * (1.0 - self.zeta))
        } else {
            (SHAPE_FREE_DELTA, SHAPE_FREE_DELTA)
        }
    }

    pub fn to_scale_repar(&self) -> Result<DtpParamsScaleRepar> {
        if self.family.has_shape_param() && !(self.zeta > -1.0 && self.zeta < 1.0) {
            return Err(Error::Representation(format!("ζ = {} puts δ1 or δ2 outside (0, ∞)", self.zeta)));
        }
        let (delta1, delta2) = self.shapes();
        check_shape(self.family, delta1, "δ1")?;
        check_shape(self.family, delta2, "δ2")?;
        Ok(DtpParamsScaleRepar { mu: self.mu, sigma: self.sigma, gamma: self.gamma, delta1, delta2, family: self.family })
    }

    pub fn to_natural(&self) -> Result<DtpParamsNatural> {
        self.to_scale_repar()?.to_natural()
    }

    /// Value of one named parameter.
    pub fn get(&self, name: ParamName) -> f64 {
        match name {
            ParamName::Mu => self.mu,
            ParamName::Sigma => self.sigma,
            ParamName::Gamma => self.gamma,
            ParamName::Delta => self.delta,
            ParamName::Zeta => self.zeta,
        }
    }

    pub fn set(&mut self, name: ParamName, value: f64) {
        match name {
            ParamName::Mu => self.mu = value,
            ParamName::Sigma => self.sigma = value,
            ParamName::Gamma => self.gamma = value,
            ParamName::Delta => self.delta = value,
            ParamName::Zeta => self.zeta = value,
        }
    }
}

impl DtpParams {
    pub fn family(&self) -> FamilyId {
        match self {
            DtpParams::Natural(p) => p.family,
            DtpParams::ScaleRepar(p) => p.family,
            DtpParams::EpsSkew(p) => p.family,
        }
    }

    pub fn to_natural(&self) -> Result<DtpParamsNatural> {
        match self {
            DtpParams::Natural(p) => {
                p.validate()?;
                Ok(*p)
            }
            DtpParams::ScaleRepar(p) => p.to_natural(),
            DtpParams::EpsSkew(p) => p.to_natural(),
        }
    }
}

impl From<DtpParamsNatural> for DtpParams {
    fn from(p: DtpParamsNatural) -> Self {
        DtpParams::Natural(p)
    }
}
impl From<DtpParamsScaleRepar> for DtpParams {
    fn from(p: DtpParamsScaleRepar) -> Self {
        DtpParams::ScaleRepar(p)
    }
}
impl From<DtpParamsEpsSkew> for DtpParams {
    fn from(p: DtpParamsEpsSkew) -> Self {
        DtpParams::EpsSkew(p)
    }
}

/// Convert between parameterisations through the natural form.
pub fn convert_params(from: impl Into<DtpParams>, to: Parameterisation) -> Result<DtpParams> {
    let natural = from.into().to_natural()?;
    Ok(match to {
        Parameterisation::Natural => DtpParams::Natural(natural),
        Parameterisation::ScaleRepar => DtpParams::ScaleRepar(natural.to_scale_repar()),
        Parameterisation::EpsSkew => {
            let e = natural.to_eps_skew();
            e.to_natural()
                .map_err(|err| Error::Representation(format!("(δ, ζ) form not representable: {err}")))?;
            DtpParams::EpsSkew(e)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn documented_conversions() {
        let n = DtpParamsNatural::new(0.0, 2.0, 1.0, 3.0, 1.0, FamilyId::StudentT).unwrap();
        let e = n.to_eps_skew();
        assert!((e.sigma - 1.5).abs() < 1e-15 && (e.gamma - 1.0 / 3.0).abs() < 1e-15);
        assert!((e.delta - 2.0).abs() < 1e-15 && (e.zeta - 0.5).abs() < 1e-15);
        let back = e.to_natural().unwrap();
        for (a, b) in [(n.sigma1, back.sigma1), (n.sigma2, back.sigma2), (n.delta1, back.delta1), (n.delta2, back.delta2)] {
            assert!((a - b).abs() < 1e-12);
        }
        let isf = n.to_inverse_scale_factors();
        assert!((isf.sigma / isf.gamma - 2.0).abs() < 1e-12 && (isf.sigma * isf.gamma - 1.0).abs() < 1e-12);
    }

    #[test]
    fn out_of_domain_is_a_representation_error() {
        let e = DtpParamsEpsSkew { mu: 0.0, sigma: 1.0, gamma: 0.0, delta: 1.0, zeta: 1.0, family: FamilyId::StudentT };
        assert!(matches!(convert_params(e, Parameterisation::Natural), Err(Error::Representation(_))));
        assert!(DtpParamsScaleRepar { mu: 0.0, sigma: 1.0, gamma: 1.2, delta1: 1.0, delta2: 1.0, family: FamilyId::Normal }
            .to_natural()
            .is_err());
    }

    #[test]
    fn kinds_and_parameter_lists() {
        use ParamName::*;
        assert_eq!(ModelKind::Dtp.parameters(FamilyId::SasSymmetric), vec![Mu, Sigma, Gamma, Delta, Zeta]);
        assert_eq!(ModelKind::Tpsc.parameters(FamilyId::StudentT), vec![Mu, Sigma, Gamma, Delta]);
        assert_eq!(ModelKind::Tpsh.parameters(FamilyId::StudentT), vec![Mu, Sigma, Delta, Zeta]);
        assert_eq!(ModelKind::Symmetric.parameters(FamilyId::Normal), vec![Mu, Sigma]);
        assert!(ModelKind::Tpsc.nested_in(ModelKind::Dtp));
        assert!(!ModelKind::Tpsc.nested_in(ModelKind::Tpsh));
        for k in ModelKind::ALL {
            assert_eq!(k.name().parse::<ModelKind>().unwrap(), k);
        }
    }
}
