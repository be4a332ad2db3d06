//! Posterior predictive densities.

use rayon::prelude::*;

use super::mcmc::Chain;
use super::model::ModelSpec;
use crate::dtp::{Dtp, DtpParamsEpsSkew, ParamName, SHAPE_FREE_DELTA};
use crate::error::{Error, Result};

/// Base parameters of `model` filled in from draw `i` and the chain's fixed values.
///
/// Entries whose names are not DTP parameters (e.g. `theta[3]`) are ignored.
pub fn chain_params(chain: &Chain, model: ModelSpec, i: usize) -> DtpParamsEpsSkew {
    let mut p = DtpParamsEpsSkew { mu: 0.0, sigma: 1.0, gamma: 0.0, delta: SHAPE_FREE_DELTA, zeta: 0.0, family: model.family };
    let named = chain.param_names.iter().zip(&chain.draws[i]).map(|(n, &v)| (n.as_str(), v));
    for (name, v) in chain.fixed.iter().map(|(n, v)| (n.as_str(), *v)).chain(named) {
        if let Ok(pn) = name.parse::<ParamName>() {
            p.set(pn, v);
        }
    }
    p
}

/// Draw-average of the DTP density on `grid`.
pub fn posterior_predictive(chain: &Chain, model: ModelSpec, grid: &[f64]) -> Result<Vec<f64>> {
    if chain.is_empty() {
        return Err(Error::Input("posterior predictive needs a nonempty chain".into()));
    }
    let laws = (0..chain.len()).map(|i| Dtp::new(chain_params(chain, model, i))).collect::<Result<Vec<Dtp>>>()?;
    let n = laws.len() as f64;
    Ok(grid.par_iter().map(|&x| laws.iter().map(|d| d.pdf(x)).sum::<f64>() / n).collect())
}
