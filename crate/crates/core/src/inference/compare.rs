//! Model comparison by information criteria and Bayes factors.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use super::competitors::{competitor_mle, CompetitorFit, CompetitorId};
use super::evidence::{posterior_evidence, savage_dickey_bf, EvidenceEstimate, IsConfig};
use super::mcmc::{fit_bayes, Chain, McmcConfig};
use super::mle::{mle_fit, FitReportMle, MleOptions};
use super::model::{ModelSpec, Posterior};
use crate::dtp::{Observation, ParamName};
use crate::error::{Error, Result};
use crate::priors::PriorSpec;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareConfig {
    pub mcmc: McmcConfig,
    pub mle: MleOptions,
    pub importance: IsConfig,
    /// One prior per model; benchmark priors when absent.
    #[serde(skip)]
    pub priors: Option<Vec<PriorSpec>>,
    pub competitors: Vec<CompetitorId>,
}

impl Default for CompareConfig {
    fn default() -> Self {
        Self {
            mcmc: McmcConfig::default(),
            mle: MleOptions::default(),
            importance: IsConfig::default(),
            priors: None,
            competitors: vec![],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BfMethod {
    Reference,
    Identical,
    SavageDickey,
    ImportanceSampling,
    Unavailable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub model: ModelSpec,
    pub mle: FitReportMle,
    /// Bayes factor of this model against the reference (first) model.
    pub bf: Option<f64>,
    pub bf_se: Option<f64>,
    pub method: BfMethod,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evidence: Option<EvidenceEstimate>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub reference: ModelSpec,
    pub rows: Vec<ComparisonRow>,
    pub competitors: Vec<CompetitorFit>,
}

impl ComparisonReport {
    /// Models ordered by increasing AIC (best first).
    pub fn aic_order(&self) -> Vec<ModelSpec> {
        let mut rows: Vec<&ComparisonRow> = self.rows.iter().collect();
        rows.sort_by(|a, b| a.mle.aic.total_cmp(&b.mle.aic));
        rows.into_iter().map(|r| r.model).collect()
    }
}

fn shared_prior_agrees(a: &PriorSpec, b: &PriorSpec, params: &[ParamName]) -> bool {
    params.iter().all(|&p| a.get(p) == b.get(p))
}

/// Lazily computed per-model Bayesian artefacts.
struct Bayes<'a> {
    data: &'a [Observation],
    models: &'a [ModelSpec],
    priors: &'a [PriorSpec],
    config: &'a CompareConfig,
    chains: HashMap<usize, Result<Chain>>,
    evidence: HashMap<usize, Result<EvidenceEstimate>>,
}

impl<'a> Bayes<'a> {
    fn mcmc_config(&self, i: usize) -> McmcConfig {
        McmcConfig { seed: self.config.mcmc.seed.wrapping_add(i as u64), ..self.config.mcmc.clone() }
    }

    fn chain(&mut self, i: usize) -> Result<&Chain> {
        if !self.chains.contains_key(&i) {
            let c = fit_bayes(self.data, self.models[i], &self.priors[i], &self.mcmc_config(i));
            self.chains.insert(i, c);
        }
        self.chains[&i].as_ref().map_err(Clone::clone)
    }

    fn log_evidence(&mut self, i: usize) -> Result<EvidenceEstimate> {
        if !self.evidence.contains_key(&i) {
            let e = (|| {
                let post = Posterior::new(self.data.to_vec(), self.models[i], self.priors[i].clone())?;
                let chain = self.chain(i)?.clone();
                let is = IsConfig { seed: self.config.importance.seed.wrapping_add(i as u64), ..self.config.importance };
                posterior_evidence(&post, &chain, &is)
            })();
            self.evidence.insert(i, e);
        }
        self.evidence[&i].clone()
    }

    /// `BF(restricted vs full)` by Savage–Dickey, when `small` restricts `big` at zero with a shared prior.
    fn savage_dickey(&mut self, small: usize, big: usize) -> Option<Result<(f64, f64, Option<String>)>> {
        let removed = self.models[small].restriction_of(&self.models[big])?;
        let shared = self.models[small].parameters();
        if !shared_prior_agrees(&self.priors[small], &self.priors[big], &shared) {
            return None;
        }
        if removed.is_empty() {
            return Some(Ok((1.0, 0.0, None)));
        }
        let prior = self.priors[big].clone();
        Some(self.chain(big).and_then(|c| {
            let zeros = vec![0.0; removed.len()];
            savage_dickey_bf(c, &prior, &removed, &zeros).map(|sd| (sd.bf, sd.se, sd.warning))
        }))
    }
}

/// AIC/BIC for every model and Bayes factors against `models[0]`.
///
/// Nested pairs use Savage–Dickey on the larger model's chain, either
/// directly or through a common larger model in the list; other pairs use
/// importance-sampled evidence, which needs proper priors.
pub fn compare_models(data: &[Observation], models: &[ModelSpec], config: &CompareConfig) -> Result<ComparisonReport> {
    if models.len() < 2 {
        return Err(Error::Input("comparison needs at least two models".into()));
    }
    let priors: Vec<PriorSpec> = match &config.priors {
        Some(p) if p.len() == models.len() => p.clone(),
        Some(p) => return Err(Error::Input(format!("{} priors for {} models", p.len(), models.len()))),
        None => models.iter().map(|m| PriorSpec::benchmark(m.family)).collect::<Result<_>>()?,
    };
    let fits: Vec<FitReportMle> = models
        .par_iter()
        .map(|&m| mle_fit(data, m, None, config.mle))
        .collect::<Result<_>>()?;
    let competitors = config
        .competitors
        .par_iter()
        .map(|&id| competitor_mle(data, id, config.mle.restarts, config.mle.seed))
        .collect::<Result<Vec<_>>>()?;

    let mut bayes = Bayes { data, models, priors: &priors, config, chains: HashMap::new(), evidence: HashMap::new() };
    let mut rows = Vec::with_capacity(models.len());
    for (i, fit) in fits.into_iter().enumerate() {
        let mut row = ComparisonRow { model: models[i], mle: fit, bf: None, bf_se: None, method: BfMethod::Unavailable, note: None, evidence: None };
        if i == 0 {
            row.bf = Some(1.0);
            row.bf_se = Some(0.0);
            row.method = BfMethod::Reference;
        } else if models[i] == models[0] && priors[i] == priors[0] {
            row.bf = Some(1.0);
            row.bf_se = Some(0.0);
            row.method = BfMethod::Identical;
        } else {
            bayes_factor(&mut bayes, i, &mut row);
        }
        rows.push(row);
    }
    Ok(ComparisonReport { reference: models[0], rows, competitors })
}

fn bayes_factor(bayes: &mut Bayes<'_>, i: usize, row: &mut ComparisonRow) {
    let mut sd_note = None;
    // i ⊂ 0, 0 ⊂ i, or both inside some k.
    let route = match bayes.savage_dickey(i, 0) {
        Some(r) => Some(r),
        None => match bayes.savage_dickey(0, i) {
            Some(r) => Some(r.map(|(bf, se, w)| (1.0 / bf, se / (bf * bf), w))),
            None => (0..bayes.models.len()).filter(|&k| k != i && k != 0).find_map(|k| {
                let a = bayes.savage_dickey(i, k)?;
                let b = bayes.savage_dickey(0, k)?;
                Some(a.and_then(|(ba, sa, wa)| {
                    b.map(|(bb, sb, wb)| {
                        let bf = ba / bb;
                        let rel = ((sa / ba).powi(2) + (sb / bb).powi(2)).sqrt();
                        (bf, bf * rel, wa.or(wb))
                    })
                }))
            }),
        },
    };
    match route {
        Some(Ok((bf, se, warning))) => {
            row.bf = Some(bf);
            row.bf_se = Some(se);
            row.method = BfMethod::SavageDickey;
            row.note = warning;
            return;
        }
        Some(Err(e)) => sd_note = Some(format!("Savage–Dickey failed: {e}")),
        None => {}
    }
    let proper = |k: usize| bayes.priors[k].is_proper(bayes.models[k].kind, bayes.models[k].family);
    if !(proper(i) && proper(0)) {
        row.note = Some(sd_note.unwrap_or_else(|| {
            "not nested with the reference and a prior is improper, so the evidence ratio is undefined".into()
        }));
        return;
    }
    match (bayes.log_evidence(i), bayes.log_evidence(0)) {
        (Ok(ei), Ok(e0)) => {
            let bf = (ei.log_evidence - e0.log_evidence).exp();
            row.bf = Some(bf);
            row.bf_se = Some(bf * (ei.se_log_evidence.powi(2) + e0.se_log_evidence.powi(2)).sqrt());
            row.method = BfMethod::ImportanceSampling;
            row.evidence = Some(ei);
            row.note = sd_note;
        }
        (Err(e), _) | (_, Err(e)) => row.note = Some(format!("importance sampling failed: {e}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dtp::{Dtp, DtpParamsEpsSkew, ModelKind};
    use crate::family::FamilyId;
    use crate::numerics::RngStream;
    use crate::priors::Marginal;

    fn data(p: DtpParamsEpsSkew, n: usize, seed: u64) -> Vec<Observation> {
        let mut rng = RngStream::new(seed);
        Dtp::new(p).unwrap().sample(&mut rng, n).unwrap().into_iter().map(|x| Observation::point(x).unwrap()).collect()
    }

    fn quick() -> CompareConfig {
        CompareConfig {
            mcmc: McmcConfig::new(8_000, 2_000, 2, 3),
            mle: MleOptions { restarts: 3, ..Default::default() },
            importance: IsConfig { draws: 20_000, ..Default::default() },
            ..Default::default()
        }
    }

    #[test]
    fn identical_and_nested_rows() {
        let y = data(DtpParamsEpsSkew::new(0.0, 1.0, 0.0, 1.0, 0.0, FamilyId::Normal).unwrap(), 150, 2);
        let tpsc = ModelSpec::new(FamilyId::Normal, ModelKind::Tpsc);
        let sym = ModelSpec::new(FamilyId::Normal, ModelKind::Symmetric);
        let report = compare_models(&y, &[tpsc, tpsc, sym], &quick()).unwrap();
        assert_eq!(report.rows[1].method, BfMethod::Identical);
        assert_eq!(report.rows[1].bf, Some(1.0));
        let row = &report.rows[2];
        assert_eq!(row.method, BfMethod::SavageDickey);
        assert!(row.bf.unwrap() > 1.0 && row.bf_se.unwrap() > 0.0, "{row:?}");
        for r in &report.rows {
            assert_eq!(r.mle.aic, 2.0 * r.mle.n_params as f64 - 2.0 * r.mle.log_lik);
        }
        let order = report.aic_order();
        assert!(report.rows.iter().find(|r| r.model == order[0]).unwrap().mle.aic <= report.rows[2].mle.aic);
    }

    #[test]
    fn savage_dickey_agrees_with_importance_sampling() {
        let y = data(DtpParamsEpsSkew::new(0.5, 1.0, 0.1, 1.0, 0.0, FamilyId::Normal).unwrap(), 120, 5);
        let tpsc = ModelSpec::new(FamilyId::Normal, ModelKind::Tpsc);
        let sym = ModelSpec::new(FamilyId::Normal, ModelKind::Symmetric);
        let proper = PriorSpec { mu: Marginal::normal(0.0, 5.0).unwrap(), sigma: Marginal::half_cauchy(2.0).unwrap(), ..PriorSpec::benchmark(FamilyId::Normal).unwrap() };
        let cfg = CompareConfig { priors: Some(vec![proper.clone(), proper]), mcmc: McmcConfig::new(40_000, 4_000, 2, 9), ..quick() };
        let sd = compare_models(&y, &[tpsc, sym], &cfg).unwrap().rows[1].clone();
        assert_eq!(sd.method, BfMethod::SavageDickey);
        let mut bayes = Bayes { data: &y, models: &[tpsc, sym], priors: cfg.priors.as_ref().unwrap(), config: &cfg, chains: HashMap::new(), evidence: HashMap::new() };
        let (e0, e1) = (bayes.log_evidence(0).unwrap(), bayes.log_evidence(1).unwrap());
        let is_bf = (e1.log_evidence - e0.log_evidence).exp();
        let is_se = is_bf * (e0.se_log_evidence.powi(2) + e1.se_log_evidence.powi(2)).sqrt();
        let combined = (is_se.powi(2) + sd.bf_se.unwrap().powi(2)).sqrt();
        assert!((is_bf - sd.bf.unwrap()).abs() < 3.0 * combined, "IS {is_bf} ± {is_se}, SD {:?} ± {:?}", sd.bf, sd.bf_se);
    }

    #[test]
    fn non_nested_with_improper_prior_is_unavailable() {
        let y = data(DtpParamsEpsSkew::new(0.0, 1.0, 0.0, 5.0, 0.0, FamilyId::StudentT).unwrap(), 80, 3);
        let t = ModelSpec::new(FamilyId::StudentT, ModelKind::Tpsc);
        let n = ModelSpec::new(FamilyId::Normal, ModelKind::Tpsc);
        let report = compare_models(&y, &[t, n], &quick()).unwrap();
        assert_eq!(report.rows[1].method, BfMethod::Unavailable);
        assert!(report.rows[1].note.is_some());
        assert!(compare_models(&y, &[t], &quick()).is_err());
    }
}
