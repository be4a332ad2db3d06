//! Prior marginals, the κ-induced shape prior and full-model prior sets.
//!
//! Text form, one `key=marginal` entry per parameter separated by `;` or newlines:
//!
//! ```text
//! mu=uniform(0,25); sigma=half_cauchy(1); gamma=uniform(-1,1); delta=induced(2,inf); zeta=point(0)
//! ```
//!
//! Marginals: `uniform(a,b)`, `half_cauchy(s)`, `normal(m,s)`, `point(v)`,
//! `reciprocal` (improper `1/x` on `(0,∞)`), `flat(a,b)` (improper, one end infinite),
//! `induced` / `induced(lo,hi)` (κ-induced, optionally truncated) and
//! `tabulated(x1:l1 x2:l2 ...)` (log-density nodes).

mod propriety;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Serialize, Serializer};

use crate::dtp::{DtpParamsEpsSkew, ModelKind, ParamName};
use crate::error::{domain, Error, Result};
use crate::family::FamilyId;
use crate::measures::{kappa_grid, kappa_grid_offset, scan_injectivity};
use crate::numerics::{MonotoneCubic, RngStream};

pub use propriety::{
    max_tie_count, repeated_obs_threshold, set_obs_audit, thm1_audit, thm2_audit, ProprietyStatus, ProprietyVerdict,
};

/// Number of log-spaced δ nodes in an induced prior table.
pub const INDUCED_NODES: usize = 1024;

/// Abscissa transform used for tabulation.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Coord {
    Linear,
    /// `u = ln(x − offset)`.
    LogShift(f64),
}

impl Coord {
    fn to_u(self, x: f64) -> f64 {
        match self {
            Coord::Linear => x,
            Coord::LogShift(o) => (x - o).ln(),
        }
    }

    fn to_x(self, u: f64) -> f64 {
        match self {
            Coord::Linear => u,
            Coord::LogShift(o) => o + u.exp(),
        }
    }

    fn dx_du(self, x: f64) -> f64 {
        match self {
            Coord::Linear => 1.0,
            Coord::LogShift(o) => x - o,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum TableOrigin {
    Induced(FamilyId),
    Custom { grid: Vec<f64>, ln_density: Vec<f64> },
}

/// Proper density tabulated through a monotone cubic CDF, optionally truncated.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedDensity {
    origin: TableOrigin,
    coord: Coord,
    cdf_u: MonotoneCubic,
    lo: f64,
    hi: f64,
    f_lo: f64,
    f_hi: f64,
}

impl TabulatedDensity {
    fn from_cdf(origin: TableOrigin, coord: Coord, x: &[f64], cdf: Vec<f64>) -> Result<Self> {
        let u: Vec<f64> = x.iter().map(|&v| coord.to_u(v)).collect();
        let cdf_u = MonotoneCubic::new(u, cdf)?;
        let (lo, hi) = (x[0], x[x.len() - 1]);
        Ok(TabulatedDensity { origin, coord, cdf_u, lo, hi, f_lo: 0.0, f_hi: 1.0 })
    }

    /// Density from log-density values on an increasing grid (trapezoid CDF, then monotone cubic).
    pub fn from_log_density(grid: Vec<f64>, ln_density: Vec<f64>) -> Result<Self> {
        if grid.len() < 2 || grid.len() != ln_density.len() {
            return domain("tabulated prior needs at least two (x, log-density) nodes");
        }
        if ln_density.iter().any(|v| v.is_nan() || *v == f64::INFINITY) {
            return domain("tabulated log-densities must be < +∞");
        }
        let peak = ln_density.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if !peak.is_finite() {
            return domain("tabulated prior has no positive density");
        }
        let mut cdf = vec![0.0; grid.len()];
        for i in 1..grid.len() {
            let a = (ln_density[i - 1] - peak).exp();
            let b = (ln_density[i] - peak).exp();
            cdf[i] = cdf[i - 1] + 0.5 * (a + b) * (grid[i] - grid[i - 1]);
        }
        let total = cdf[grid.len() - 1];
        for c in cdf.iter_mut() {
            *c /= total;
        }
        let origin = TableOrigin::Custom { grid: grid.clone(), ln_density };
        Self::from_cdf(origin, Coord::Linear, &grid, cdf)
    }

    fn raw_cdf(&self, x: f64) -> f64 {
        let (a, b) = (self.cdf_u.x_range().0, self.cdf_u.x_range().1);
        if x <= self.coord.to_x(a) {
            return 0.0;
        }
        if x >= self.coord.to_x(b) {
            return 1.0;
        }
        self.cdf_u.eval(self.coord.to_u(x))
    }

    /// Restricted to `[lo, hi]` and renormalised.
    pub fn truncated(&self, lo: f64, hi: f64) -> Result<Self> {
        let lo = lo.max(self.lo);
        let hi = hi.min(self.hi);
        let f_lo = self.raw_cdf(lo);
        let f_hi = self.raw_cdf(hi);
        if !(hi > lo && f_hi > f_lo) {
            return domain(format!("truncation to [{lo}, {hi}] leaves no prior mass"));
        }
        Ok(TabulatedDensity { lo, hi, f_lo, f_hi, ..self.clone() })
    }

    pub fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn density(&self, x: f64) -> f64 {
        if !(x >= self.lo && x <= self.hi) {
            return 0.0;
        }
        let u = self.coord.to_u(x);
        self.cdf_u.derivative(u) / self.coord.dx_du(x) / (self.f_hi - self.f_lo)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        ((self.raw_cdf(x) - self.f_lo) / (self.f_hi - self.f_lo)).clamp(0.0, 1.0)
    }

    pub fn sample(&self, rng: &mut RngStream) -> f64 {
        let v = self.f_lo + rng.uniform() * (self.f_hi - self.f_lo);
        let u = self.cdf_u.inverse(v).unwrap_or(self.cdf_u.x_range().0);
        self.coord.to_x(u).clamp(self.lo, self.hi)
    }

    /// Family whose κ-uniform prior this table holds, if any.
    pub fn induced_family(&self) -> Option<FamilyId> {
        match self.origin {
            TableOrigin::Induced(id) => Some(id),
            TableOrigin::Custom { .. } => None,
        }
    }
}

/// One parameter's prior.
#[derive(Debug, Clone, PartialEq)]
pub enum Marginal {
    Uniform { lo: f64, hi: f64 },
    HalfCauchy { scale: f64 },
    Normal { mean: f64, sd: f64 },
    PointMass { value: f64 },
    /// Improper `1/x` on `(0, ∞)`.
    Reciprocal,
    /// Improper constant; at least one end infinite.
    Flat { lo: f64, hi: f64 },
    Tabulated(Arc<TabulatedDensity>),
}

impl Marginal {
    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return domain(format!("uniform({lo}, {hi}) needs finite lo < hi"));
        }
        Ok(Marginal::Uniform { lo, hi })
    }

    pub fn half_cauchy(scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return domain(format!("half-Cauchy scale {scale} must be positive"));
        }
        Ok(Marginal::HalfCauchy { scale })
    }

    pub fn normal(mean: f64, sd: f64) -> Result<Self> {
        if !(mean.is_finite() && sd > 0.0 && sd.is_finite()) {
            return domain(format!("normal({mean}, {sd}) needs finite mean and positive sd"));
        }
        Ok(Marginal::Normal { mean, sd })
    }

    pub fn point(value: f64) -> Result<Self> {
        if !value.is_finite() {
            return domain("point mass needs a finite value");
        }
        Ok(Marginal::PointMass { value })
    }

    pub fn flat(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || !(lo < hi) || (lo.is_finite() && hi.is_finite()) {
            return domain(format!("flat({lo}, {hi}) needs lo < hi with an infinite end; use uniform otherwise"));
        }
        Ok(Marginal::Flat { lo, hi })
    }

    pub fn is_proper(&self) -> bool {
        !matches!(self, Marginal::Reciprocal | Marginal::Flat { .. })
    }

    pub fn is_point_mass(&self) -> bool {
        matches!(self, Marginal::PointMass { .. })
    }

    /// Closed hull of the support.
    pub fn support(&self) -> (f64, f64) {
        match self {
            Marginal::Uniform { lo, hi } | Marginal::Flat { lo, hi } => (*lo, *hi),
            Marginal::HalfCauchy { .. } | Marginal::Reciprocal => (0.0, f64::INFINITY),
            Marginal::Normal { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            Marginal::PointMass { value } => (*value, *value),
            Marginal::Tabulated(t) => t.support(),
        }
    }

    /// Normalised log density for proper priors; unnormalised kernel for improper ones.
    pub fn ln_density(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NEG_INFINITY;
        }
        match self {
            Marginal::Uniform { lo, hi } => {
                if x >= *lo && x <= *hi {
                    -(hi - lo).ln()
                } else {
                    f64::NEG_INFINITY
                }
            }
            Marginal::HalfCauchy { scale } => {
                if x >= 0.0 {
                    let z = x / scale;
                    (2.0 / (std::f64::consts::PI * scale)).ln() - z.mul_add(z, 1.0).ln()
                } else {
                    f64::NEG_INFINITY
                }
            }
            Marginal::Normal { mean, sd } => {
                let z = (x - mean) / sd;
                -0.5 * z * z - sd.ln() - 0.5 * (2.0 * std::f64::consts::PI).ln()
            }
            Marginal::PointMass { value } => {
                if x == *value {
                    0.0
                } else {
                    f64::NEG_INFINITY
                }
            }
            Marginal::Reciprocal => {
                if x > 0.0 {
                    -x.ln()
                } else {
                    f64::NEG_INFINITY
                }
            }
            Marginal::Flat { lo, hi } => {
                if x >= *lo && x <= *hi {
                    0.0
                } else {
                    f64::NEG_INFINITY
                }
            }
            Marginal::Tabulated(t) => t.density(x).ln(),
        }
    }

    /// Draw from a proper prior.
    pub fn sample(&self, rng: &mut RngStream) -> Result<f64> {
        Ok(match self {
            Marginal::Uniform { lo, hi } => lo + (hi - lo) * rng.uniform(),
            Marginal::HalfCauchy { scale } => scale * (0.5 * std::f64::consts::PI * rng.uniform()).tan(),
            Marginal::Normal { mean, sd } => mean + sd * rng.normal(),
            Marginal::PointMass { value } => *value,
            Marginal::Tabulated(t) => t.sample(rng),
            Marginal::Reciprocal | Marginal::Flat { .. } => {
                return Err(Error::Input(format!("cannot sample from the improper prior {self}")))
            }
        })
    }

    /// Restricts a tabulated or uniform prior to `[lo, hi]`.
    pub fn truncated(&self, lo: f64, hi: f64) -> Result<Self> {
        match self {
            Marginal::Tabulated(t) => Ok(Marginal::Tabulated(Arc::new(t.truncated(lo, hi)?))),
            Marginal::Uniform { lo: a, hi: b } => Marginal::uniform(a.max(lo), b.min(hi)),
            _ => domain(format!("truncation is only supported for tabulated and uniform priors, not {self}")),
        }
    }

    /// Parses one marginal; `family` realises `induced`.
    pub fn parse(text: &str, family: FamilyId) -> Result<Self> {
        let text = text.trim();
        let (name, args) = match text.find('(') {
            Some(i) => {
                let inner = text[i + 1..]
                    .strip_suffix(')')
                    .ok_or_else(|| Error::Input(format!("unbalanced parentheses in prior `{text}`")))?;
                (text[..i].trim(), Some(inner))
            }
            None => (text, None),
        };
        let nums = |expected: usize| -> Result<Vec<f64>> {
            let raw = args.unwrap_or("");
            let vals = raw
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| s.trim().parse::<f64>().map_err(|_| Error::Input(format!("bad number `{s}` in prior `{text}`"))))
                .collect::<Result<Vec<_>>>()?;
            if vals.len() != expected {
                return Err(Error::Input(format!("prior `{text}` expects {expected} argument(s)")));
            }
            Ok(vals)
        };
        let m = match name {
            "uniform" => {
                let v = nums(2)?;
                Marginal::uniform(v[0], v[1])?
            }
            "half_cauchy" | "halfcauchy" => Marginal::half_cauchy(nums(1)?[0])?,
            "normal" => {
                let v = nums(2)?;
                Marginal::normal(v[0], v[1])?
            }
            "point" | "point_mass" => Marginal::point(nums(1)?[0])?,
            "reciprocal" | "benchmark" => {
                nums(0)?;
                Marginal::Reciprocal
            }
            "flat" => {
                let v = nums(2)?;
                Marginal::flat(v[0], v[1])?
            }
            "induced" | "induced_kappa" => {
                let base = induce_delta_prior(family)?;
                if args.map_or(true, |a| a.trim().is_empty()) {
                    base
                } else {
                    let v = nums(2)?;
                    base.truncated(v[0], v[1])?
                }
            }
            "tabulated" => {
                let mut grid = Vec::new();
                let mut ln_density = Vec::new();
                for pair in args.unwrap_or("").split_whitespace() {
                    let (x, l) = pair
                        .split_once(':')
                        .ok_or_else(|| Error::Input(format!("tabulated node `{pair}` is not x:logdensity")))?;
                    let parse = |s: &str| s.parse::<f64>().map_err(|_| Error::Input(format!("bad number `{s}`")));
                    grid.push(parse(x)?);
                    ln_density.push(parse(l)?);
                }
                Marginal::Tabulated(Arc::new(TabulatedDensity::from_log_density(grid, ln_density)?))
            }
            other => return Err(Error::Input(format!("unknown prior `{other}`"))),
        };
        Ok(m)
    }
}

fn fmt_num(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v}")
    }
}

impl fmt::Display for Marginal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Marginal::Uniform { lo, hi } => write!(f, "uniform({},{})", fmt_num(*lo), fmt_num(*hi)),
            Marginal::HalfCauchy { scale } => write!(f, "half_cauchy({})", fmt_num(*scale)),
            Marginal::Normal { mean, sd } => write!(f, "normal({},{})", fmt_num(*mean), fmt_num(*sd)),
            Marginal::PointMass { value } => write!(f, "point({})", fmt_num(*value)),
            Marginal::Reciprocal => write!(f, "reciprocal"),
            Marginal::Flat { lo, hi } => write!(f, "flat({},{})", fmt_num(*lo), fmt_num(*hi)),
            Marginal::Tabulated(t) => match &t.origin {
                TableOrigin::Induced(_) => write!(f, "induced({},{})", fmt_num(t.lo), fmt_num(t.hi)),
                TableOrigin::Custom { grid, ln_density } => {
                    let body: Vec<String> = grid.iter().zip(ln_density).map(|(x, l)| format!("{x}:{l}")).collect();
                    write!(f, "tabulated({})", body.join(" "))
                }
            },
        }
    }
}

impl Serialize for Marginal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Prior on δ induced by a uniform prior on κ over the attainable κ range.
///
/// Tabulated on [`INDUCED_NODES`] nodes log-spaced in `δ − offset`; the CDF is
/// `|κ(δ) − κ(δ_first)| / |κ(δ_last) − κ(δ_first)|` under monotone cubic interpolation.
pub fn induce_delta_prior(id: FamilyId) -> Result<Marginal> {
    Ok(Marginal::Tabulated(Arc::new(induced_table(id)?)))
}

fn induced_table(id: FamilyId) -> Result<TabulatedDensity> {
    let grid = kappa_grid(id, INDUCED_NODES)?;
    let profile = scan_injectivity(id, &grid)?;
    let n = grid.len();
    if profile.injective_on != Some((grid[0], grid[n - 1])) {
        return Err(Error::Injectivity(format!("κ is not monotone over the tabulated δ range of {id}")));
    }
    let k = &profile.kappa_values;
    let span = k[n - 1] - k[0];
    let mut cdf: Vec<f64> = k.iter().map(|v| ((v - k[0]) / span).clamp(0.0, 1.0)).collect();
    for i in 1..n {
        cdf[i] = cdf[i].max(cdf[i - 1]);
    }
    cdf[n - 1] = 1.0;
    TabulatedDensity::from_cdf(TableOrigin::Induced(id), Coord::LogShift(kappa_grid_offset(id)), &grid, cdf)
}

/// Product prior over the ε-skew parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PriorSpec {
    pub mu: Marginal,
    pub sigma: Marginal,
    pub gamma: Marginal,
    pub delta: Marginal,
    pub zeta: Marginal,
}

impl PriorSpec {
    /// Flat location, `1/σ` scale, uniform γ and ζ, κ-induced δ.
    pub fn benchmark(family: FamilyId) -> Result<Self> {
        Ok(PriorSpec {
            mu: Marginal::Flat { lo: f64::NEG_INFINITY, hi: f64::INFINITY },
            sigma: Marginal::Reciprocal,
            gamma: Marginal::Uniform { lo: -1.0, hi: 1.0 },
            delta: default_delta(family)?,
            zeta: Marginal::Uniform { lo: -1.0, hi: 1.0 },
        })
    }

    /// Uniform location on `[mu_lo, mu_hi]` and half-Cauchy(`s`) scale; shape priors as in [`PriorSpec::benchmark`].
    pub fn weakly_informative(family: FamilyId, mu_lo: f64, mu_hi: f64, s: f64) -> Result<Self> {
        Ok(PriorSpec {
            mu: Marginal::uniform(mu_lo, mu_hi)?,
            sigma: Marginal::half_cauchy(s)?,
            ..Self::benchmark(family)?
        })
    }

    pub fn get(&self, name: ParamName) -> &Marginal {
        match name {
            ParamName::Mu => &self.mu,
            ParamName::Sigma => &self.sigma,
            ParamName::Gamma => &self.gamma,
            ParamName::Delta => &self.delta,
            ParamName::Zeta => &self.zeta,
        }
    }

    pub fn set(&mut self, name: ParamName, m: Marginal) {
        match name {
            ParamName::Mu => self.mu = m,
            ParamName::Sigma => self.sigma = m,
            ParamName::Gamma => self.gamma = m,
            ParamName::Delta => self.delta = m,
            ParamName::Zeta => self.zeta = m,
        }
    }

    /// Benchmark defaults overridden by `key=marginal` entries.
    pub fn parse(text: &str, family: FamilyId) -> Result<Self> {
        let mut spec = Self::benchmark(family)?;
        for entry in text.split([';', '\n']).map(str::trim).filter(|e| !e.is_empty()) {
            let (key, value) =
                entry.split_once('=').ok_or_else(|| Error::Input(format!("prior entry `{entry}` is not key=marginal")))?;
            let name: ParamName = key.trim().parse()?;
            spec.set(name, Marginal::parse(value, family)?);
        }
        spec.validate(family)?;
        Ok(spec)
    }

    /// Support of each marginal must lie in its parameter's domain.
    pub fn validate(&self, family: FamilyId) -> Result<()> {
        let check = |name: ParamName, lo: f64, hi: f64| -> Result<()> {
            let (a, b) = self.get(name).support();
            if a < lo || b > hi {
                return Err(Error::Input(format!(
                    "prior {} for {name} has support [{a}, {b}] outside [{lo}, {hi}]",
                    self.get(name)
                )));
            }
            Ok(())
        };
        check(ParamName::Sigma, 0.0, f64::INFINITY)?;
        check(ParamName::Gamma, -1.0, 1.0)?;
        check(ParamName::Zeta, -1.0, 1.0)?;
        if family.has_shape_param() {
            let (lo, hi) = family.descriptor().delta_domain;
            check(ParamName::Delta, lo, hi)?;
        }
        Ok(())
    }

    /// Marginals of the parameters free under `kind`.
    pub fn free_marginals(&self, kind: ModelKind, family: FamilyId) -> Vec<(ParamName, &Marginal)> {
        kind.parameters(family).into_iter().map(|p| (p, self.get(p))).collect()
    }

    pub fn is_proper(&self, kind: ModelKind, family: FamilyId) -> bool {
        self.free_marginals(kind, family).iter().all(|(_, m)| m.is_proper())
    }
}

fn default_delta(family: FamilyId) -> Result<Marginal> {
    if !family.has_shape_param() {
        return Marginal::point(crate::dtp::SHAPE_FREE_DELTA);
    }
    match induce_delta_prior(family) {
        Ok(m) => Ok(m),
        // exp_power and others without a usable κ map fall back to a unit-scale half-Cauchy.
        Err(Error::Injectivity(_)) | Err(Error::Domain(_)) => Marginal::half_cauchy(1.0),
        Err(e) => Err(e),
    }
}

impl fmt::Display for PriorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "mu={}; sigma={}; gamma={}; delta={}; zeta={}",
            self.mu, self.sigma, self.gamma, self.delta, self.zeta
        )
    }
}

impl FromStr for Marginal {
    type Err = Error;

    /// Parses marginals that do not need a family (everything except `induced`).
    fn from_str(s: &str) -> Result<Self> {
        if s.trim().starts_with("induced") {
            return Err(Error::Input("`induced` priors need a family; use Marginal::parse".into()));
        }
        Marginal::parse(s, FamilyId::Normal)
    }
}

/// Sum of the free parameters' log marginals; `−∞` outside the parameter space.
///
/// A `reciprocal` scale marginal contributes `−ln σ`.
pub fn log_prior(spec: &PriorSpec, kind: ModelKind, params: &DtpParamsEpsSkew) -> f64 {
    let family = params.family;
    if !(params.sigma > 0.0) || !(params.gamma.abs() < 1.0) || params.mu.is_nan() {
        return f64::NEG_INFINITY;
    }
    if family.has_shape_param() && (!family.descriptor().contains(params.delta) || !(params.zeta.abs() < 1.0)) {
        return f64::NEG_INFINITY;
    }
    let mut total = 0.0;
    for (name, m) in spec.free_marginals(kind, family) {
        total += m.ln_density(params.get(name));
        if total == f64::NEG_INFINITY {
            break;
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{kappa_measure, kappa_range};
    use crate::numerics::stats::{ks_critical_value, ks_statistic};
    use crate::numerics::adaptive_quad;

    #[test]
    fn induced_prior_normalises_and_shapes() {
        for id in [FamilyId::StudentT, FamilyId::SasSymmetric, FamilyId::SmnBs] {
            let Marginal::Tabulated(t) = induce_delta_prior(id).unwrap() else { panic!() };
            let (lo, hi) = t.support();
            // Integrate in ln δ node by node; the density is a cubic derivative between nodes.
            let off = kappa_grid_offset(id);
            let (u, _) = t.cdf_u.nodes();
            assert_eq!((u[0], u[u.len() - 1]), ((lo - off).ln(), (hi - off).ln()));
            let mass: f64 = u
                .windows(2)
                .map(|w| {
                    let f = |v: f64| {
                        let x = off + v.exp();
                        t.density(x) * (x - off)
                    };
                    adaptive_quad(f, w[0], w[1], 1e-12).unwrap().value
                })
                .sum();
            assert!((mass - 1.0).abs() < 1e-6, "{id}: {mass}");
        }
        let t = induce_delta_prior(FamilyId::StudentT).unwrap();
        assert!(t.ln_density(50.0) < t.ln_density(5.0));
    }

    #[test]
    fn induced_pushforward_is_uniform() {
        let id = FamilyId::StudentT;
        let prior = induce_delta_prior(id).unwrap();
        let range = kappa_range(id).unwrap();
        let mut rng = RngStream::new(7);
        let n = 4000;
        let k: Vec<f64> = (0..n).map(|_| kappa_measure(id, prior.sample(&mut rng).unwrap()).unwrap()).collect();
        let d = ks_statistic(&k, |v| ((v - range.lo) / range.width()).clamp(0.0, 1.0));
        assert!(d < ks_critical_value(n, 0.01), "KS {d}");
    }

    #[test]
    fn truncation_renormalises() {
        let base = induce_delta_prior(FamilyId::StudentT).unwrap();
        let tr = base.truncated(2.0, f64::INFINITY).unwrap();
        assert_eq!(tr.support().0, 2.0);
        assert_eq!(tr.ln_density(1.5), f64::NEG_INFINITY);
        let Marginal::Tabulated(t) = &tr else { panic!() };
        assert!(t.cdf(2.0).abs() < 1e-15);
        let ratio = (tr.ln_density(5.0) - base.ln_density(5.0)).exp();
        let Marginal::Tabulated(b) = &base else { panic!() };
        assert!((ratio - 1.0 / (1.0 - b.cdf(2.0))).abs() < 1e-9);
        let mut rng = RngStream::new(3);
        assert!((0..500).all(|_| tr.sample(&mut rng).unwrap() >= 2.0));
    }

    #[test]
    fn marginal_densities() {
        let hc = Marginal::half_cauchy(1.0).unwrap();
        assert!((hc.ln_density(0.0) - (2.0 / std::f64::consts::PI).ln()).abs() < 1e-15);
        assert!((hc.ln_density(1e-300) - (2.0 / std::f64::consts::PI).ln()).abs() < 1e-15);
        assert_eq!(Marginal::Reciprocal.ln_density(2.0), -(2.0f64).ln());
        assert!(!Marginal::Reciprocal.is_proper());
        let tab = Marginal::parse("tabulated(0:0 1:0 2:0)", FamilyId::Normal).unwrap();
        assert!((tab.ln_density(0.7) + 2f64.ln()).abs() < 1e-12);
        let mut rng = RngStream::new(1);
        let draws: Vec<f64> = (0..20000).map(|_| hc.sample(&mut rng).unwrap()).collect();
        let d = ks_statistic(&draws, |x| 2.0 / std::f64::consts::PI * x.atan());
        assert!(d < ks_critical_value(draws.len(), 0.01));
    }

    #[test]
    fn spec_text_roundtrip_and_validation() {
        let spec = PriorSpec::parse("mu=uniform(0,25); sigma=half_cauchy(1)\nzeta=point(0)", FamilyId::StudentT).unwrap();
        assert_eq!(spec.mu, Marginal::Uniform { lo: 0.0, hi: 25.0 });
        assert_eq!(spec.zeta, Marginal::PointMass { value: 0.0 });
        let text = spec.to_string();
        assert!(text.contains("delta=induced(0.001,10000000)"), "{text}");
        assert_eq!(PriorSpec::parse(&text, FamilyId::StudentT).unwrap().to_string(), text);
        let tr = PriorSpec::parse("delta=induced(2,inf)", FamilyId::StudentT).unwrap();
        assert_eq!(tr.delta.support().0, 2.0);
        assert!(PriorSpec::parse("sigma=normal(0,1)", FamilyId::StudentT).is_err());
        assert!(PriorSpec::parse("gamma=uniform(-2,1)", FamilyId::StudentT).is_err());
        assert!(PriorSpec::parse("kappa=uniform(0,1)", FamilyId::StudentT).is_err());
        assert!(PriorSpec::parse("mu=beta(1,2)", FamilyId::StudentT).is_err());
    }

    #[test]
    fn log_prior_examples() {
        let mut spec = PriorSpec::benchmark(FamilyId::Normal).unwrap();
        spec.gamma = Marginal::flat(f64::NEG_INFINITY, f64::INFINITY).unwrap();
        let p = DtpParamsEpsSkew::new(0.0, 2.0, 0.3, 1.0, 0.0, FamilyId::Normal).unwrap();
        assert!((log_prior(&spec, ModelKind::Tpsc, &p) + 2f64.ln()).abs() < 1e-15);
        let bad = DtpParamsEpsSkew { gamma: 1.3, ..p };
        assert_eq!(log_prior(&spec, ModelKind::Tpsc, &bad), f64::NEG_INFINITY);
        let wi = PriorSpec::weakly_informative(FamilyId::StudentT, -5.0, 5.0, 1.0).unwrap();
        let q = DtpParamsEpsSkew::new(0.0, 1e-12, 0.0, 3.0, 0.2, FamilyId::StudentT).unwrap();
        let expected = -(10f64).ln() + (2.0 / std::f64::consts::PI).ln() - 2f64.ln() + wi.delta.ln_density(3.0) - 2f64.ln();
        assert!((log_prior(&wi, ModelKind::Dtp, &q) - expected).abs() < 1e-12);
    }
}
