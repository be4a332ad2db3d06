//! Likelihood and Bayesian inference for DTP models.

pub mod compare;
pub mod competitors;
pub mod evidence;
pub mod hier;
pub mod kde;
pub mod mcmc;
pub mod mle;
pub mod model;
pub mod optim;
pub mod predictive;

pub use compare::{compare_models, BfMethod, CompareConfig, ComparisonReport, ComparisonRow};
pub use competitors::{competitor_mle, competitor_pdf, Competitor, CompetitorFit, CompetitorId, CompetitorParams};
pub use evidence::{marginal_lik_is, posterior_evidence, savage_dickey_bf, EvidenceEstimate, IsConfig, SavageDickey};
pub use hier::{hier_fit, hier_predictive, theta_draws, EffectsLaw, HierData};
pub use kde::{dpi_bandwidth, ProductKde};
pub use mcmc::{fit_bayes, mcmc_sample, Chain, McmcConfig, ParamSummary};
pub use mle::{aic, bic, mle_fit, FitReportMle, MleBounds, MleOptions};
pub use model::{ModelSpec, Posterior, Transform};
pub use optim::{nelder_mead, nelder_mead_polished, SimplexOptions, SimplexResult};
pub use predictive::{chain_params, posterior_predictive};
