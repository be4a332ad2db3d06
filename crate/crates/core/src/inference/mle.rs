//! Maximum likelihood with multi-start simplex search.

use rayon::prelude::*;
use serde::Serialize;

use super::model::{ModelSpec, Transform};
use super::optim::{nelder_mead_polished, SimplexOptions};
use crate::dtp::{log_likelihood_with, Dtp, DtpParams, DtpParamsEpsSkew, Observation, ParamName, SHAPE_FREE_DELTA};
use crate::error::{Error, Result};
use crate::family::FamilyId;
use crate::numerics::{stats, RngStream};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReportMle {
    pub model: ModelSpec,
    pub params_hat: DtpParams,
    pub log_lik: f64,
    pub aic: f64,
    pub bic: f64,
    pub n_params: usize,
    pub n_obs: usize,
    pub converged: bool,
    pub restarts_used: usize,
    pub evaluations: usize,
}

impl FitReportMle {
    pub fn eps_skew(&self) -> DtpParamsEpsSkew {
        match self.params_hat {
            DtpParams::EpsSkew(p) => p,
            _ => unreachable!("mle reports are ε-skew tagged"),
        }
    }
}

/// `2k − 2ℓ`.
pub fn aic(log_lik: f64, n_params: usize) -> f64 {
    2.0 * n_params as f64 - 2.0 * log_lik
}

/// `k ln n − 2ℓ`.
pub fn bic(log_lik: f64, n_params: usize, n_obs: usize) -> f64 {
    n_params as f64 * (n_obs as f64).ln() - 2.0 * log_lik
}

/// Box from which restart points are drawn, per free parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct MleBounds {
    pub entries: Vec<(ParamName, f64, f64)>,
}

impl MleBounds {
    /// Data-driven defaults: μ between the 10% and 90% points, σ around the spread, shapes over typical ranges.
    pub fn default_for(data: &[Observation], model: ModelSpec) -> Self {
        let xs = representative_points(data);
        let q10 = stats::quantile(&xs, 0.1);
        let q90 = stats::quantile(&xs, 0.9);
        let q25 = stats::quantile(&xs, 0.25);
        let q75 = stats::quantile(&xs, 0.75);
        let spread = ((q75 - q25) / 1.349).max(((stats::variance(&xs)).max(0.0)).sqrt() * 0.1).max(1e-6);
        let (dlo, dhi) = default_shape_box(model.family);
        let entries = model
            .parameters()
            .into_iter()
            .map(|p| match p {
                ParamName::Mu => (p, q10.min(q90 - 1e-9), q90),
                ParamName::Sigma => (p, 0.3 * spread, 3.0 * spread),
                ParamName::Gamma | ParamName::Zeta => (p, -0.8, 0.8),
                ParamName::Delta => (p, dlo, dhi),
            })
            .collect();
        MleBounds { entries }
    }

    pub fn get(&self, p: ParamName) -> Option<(f64, f64)> {
        self.entries.iter().find(|e| e.0 == p).map(|e| (e.1, e.2))
    }

    pub fn set(&mut self, p: ParamName, lo: f64, hi: f64) {
        if let Some(e) = self.entries.iter_mut().find(|e| e.0 == p) {
            e.1 = lo;
            e.2 = hi;
        } else {
            self.entries.push((p, lo, hi));
        }
    }
}

fn default_shape_box(id: FamilyId) -> (f64, f64) {
    match id {
        FamilyId::StudentT => (0.8, 20.0),
        FamilyId::SasSymmetric | FamilyId::JohnsonSuSymmetric => (0.4, 2.5),
        FamilyId::SmnBs => (0.2, 2.5),
        FamilyId::ExpPower => (0.8, 4.0),
        FamilyId::Normal | FamilyId::Laplace => (SHAPE_FREE_DELTA, SHAPE_FREE_DELTA),
    }
}

/// Points for summary statistics: interval midpoints, or the finite end of half-lines.
pub(crate) fn representative_points(data: &[Observation]) -> Vec<f64> {
    data.iter()
        .filter_map(|o| {
            let (lo, hi) = o.bounds();
            match (lo.is_finite(), hi.is_finite()) {
                (true, true) => Some(0.5 * (lo + hi)),
                (true, false) => Some(lo),
                (false, true) => Some(hi),
                (false, false) => None,
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MleOptions {
    pub restarts: usize,
    pub seed: u64,
    pub simplex: SimplexOptions,
}

impl Default for MleOptions {
    fn default() -> Self {
        Self { restarts: 10, seed: 1, simplex: SimplexOptions::default() }
    }
}

/// Maximises the log-likelihood over the model's free ε-skew parameters.
///
/// Restart `i` starts from stratum `i` of a Latin hypercube over `bounds` and
/// uses substream `i`; restarts run on the current rayon pool.
pub fn mle_fit(data: &[Observation], model: ModelSpec, bounds: Option<&MleBounds>, opts: MleOptions) -> Result<FitReportMle> {
    let names = model.parameters();
    if data.len() < names.len() {
        return Err(Error::Input(format!("{} observations cannot identify {} parameters", data.len(), names.len())));
    }
    if opts.restarts == 0 {
        return Err(Error::Input("mle_fit needs at least one restart".into()));
    }
    let default_bounds;
    let bounds = match bounds {
        Some(b) => b,
        None => {
            default_bounds = MleBounds::default_for(data, model);
            &default_bounds
        }
    };
    let transforms: Vec<Transform> = names.iter().map(|&p| Transform::for_param(p)).collect();
    let boxes: Vec<(f64, f64)> = names
        .iter()
        .zip(&transforms)
        .map(|(&p, t)| {
            let (lo, hi) = bounds.get(p).ok_or_else(|| Error::Input(format!("no MLE bounds for {p}")))?;
            let (a, b) = (t.to_z(lo), t.to_z(hi));
            if !(a.is_finite() && b.is_finite() && a <= b) {
                return Err(Error::Input(format!("MLE bounds [{lo}, {hi}] for {p} are outside its support")));
            }
            Ok((a, b))
        })
        .collect::<Result<_>>()?;

    let base = DtpParamsEpsSkew { mu: 0.0, sigma: 1.0, gamma: 0.0, delta: SHAPE_FREE_DELTA, zeta: 0.0, family: model.family };
    let params_of = |z: &[f64]| {
        let mut p = base;
        for ((name, t), &v) in names.iter().zip(&transforms).zip(z) {
            p.set(*name, t.to_x(v));
        }
        p
    };
    let neg_ll = |z: &[f64]| match Dtp::new(params_of(z)) {
        Ok(d) => -log_likelihood_with(&d, data),
        Err(_) => f64::INFINITY,
    };

    let d = names.len();
    let mut strata_rng = RngStream::substream(opts.seed, opts.restarts as u64);
    let perms: Vec<Vec<usize>> = (0..d)
        .map(|_| {
            let mut perm: Vec<usize> = (0..opts.restarts).collect();
            for i in (1..perm.len()).rev() {
                perm.swap(i, strata_rng.below(i + 1));
            }
            perm
        })
        .collect();
    let starts: Vec<Vec<f64>> = (0..opts.restarts)
        .map(|r| {
            let mut rng = RngStream::substream(opts.seed, r as u64);
            (0..d)
                .map(|j| {
                    let (a, b) = boxes[j];
                    let u = (perms[j][r] as f64 + rng.uniform()) / opts.restarts as f64;
                    a + (b - a) * u
                })
                .collect()
        })
        .collect();

    let results: Vec<_> = starts.par_iter().map(|z0| nelder_mead_polished(neg_ll, z0, opts.simplex)).collect();
    let evaluations = results.iter().map(|r| r.evaluations).sum();
    let best = results
        .into_iter()
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .expect("at least one restart");
    if !best.value.is_finite() {
        return Err(Error::NonConvergence(format!("{model}: no restart reached a finite log-likelihood")));
    }
    let log_lik = -best.value;
    let k = names.len();
    Ok(FitReportMle {
        model,
        params_hat: DtpParams::EpsSkew(params_of(&best.x)),
        log_lik,
        aic: aic(log_lik, k),
        bic: bic(log_lik, k, data.len()),
        n_params: k,
        n_obs: data.len(),
        converged: best.converged,
        restarts_used: opts.restarts,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dtp::ModelKind;

    fn draws(p: DtpParamsEpsSkew, n: usize, seed: u64) -> Vec<Observation> {
        let mut rng = RngStream::new(seed);
        Dtp::new(p).unwrap().sample(&mut rng, n).unwrap().into_iter().map(|x| Observation::point(x).unwrap()).collect()
    }

    #[test]
    fn criteria_identities() {
        assert_eq!(aic(-100.0, 5), 210.0);
        assert!((bic(-100.0, 5, 100) - (5.0 * 100f64.ln() + 200.0)).abs() < 1e-12);
    }

    #[test]
    fn recovers_normal_location_scale() {
        let truth = DtpParamsEpsSkew::new(3.0, 2.0, 0.0, 1.0, 0.0, FamilyId::Normal).unwrap();
        let data = draws(truth, 4000, 11);
        let fit = mle_fit(&data, ModelSpec::new(FamilyId::Normal, ModelKind::Symmetric), None, MleOptions { restarts: 3, ..Default::default() }).unwrap();
        let xs: Vec<f64> = data.iter().map(|o| o.bounds().0).collect();
        let m = stats::mean(&xs);
        let s = (stats::variance(&xs) * (xs.len() - 1) as f64 / xs.len() as f64).sqrt();
        let p = fit.eps_skew();
        assert!(fit.converged);
        assert!((p.mu - m).abs() < 1e-6 && (p.sigma - s).abs() < 1e-6, "{p:?} vs {m} {s}");
        assert_eq!(fit.aic, aic(fit.log_lik, 2));
    }

    #[test]
    fn nested_likelihoods_are_ordered() {
        let truth = DtpParamsEpsSkew::new(0.0, 1.0, 0.3, 3.0, 0.2, FamilyId::StudentT).unwrap();
        let data = draws(truth, 400, 5);
        let opts = MleOptions { restarts: 4, ..Default::default() };
        let ll = |k| mle_fit(&data, ModelSpec::new(FamilyId::StudentT, k), None, opts).unwrap().log_lik;
        let (dtp, tpsc, sym) = (ll(ModelKind::Dtp), ll(ModelKind::Tpsc), ll(ModelKind::Symmetric));
        assert!(dtp >= tpsc - 1e-6 && tpsc >= sym - 1e-6, "{dtp} {tpsc} {sym}");
    }

    #[test]
    fn rejects_underdetermined_fits() {
        let data = vec![Observation::point(1.0).unwrap()];
        assert!(mle_fit(&data, ModelSpec::new(FamilyId::Normal, ModelKind::Symmetric), None, MleOptions::default()).is_err());
    }
}
