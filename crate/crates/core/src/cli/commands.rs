//! Verb implementations.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::Serialize;
use serde_json::{json, Map, Value};

use super::input::{parse_config_file, parse_hier_csv, parse_observations_csv, read_text};
use super::report::{csv_document, json_document, num, write_atomic, write_output, Envelope};
use super::{Cli, CliError, Command, Format, GlobalArgs, ParamArgs, EXIT_NON_CONVERGENCE, EXIT_OK, EXIT_PROPRIETY};
use crate::dtp::{Dtp, DtpParams, DtpParamsNatural, ModelKind, Observation, ParamName, SHAPE_FREE_DELTA};
use crate::family::FamilyId;
use crate::inference::{
    compare_models, fit_bayes, hier_fit, hier_predictive, mle_fit, BfMethod, Chain, CompareConfig, CompetitorId,
    EffectsLaw, HierData, IsConfig, McmcConfig, MleOptions, ModelSpec, ParamSummary,
};
use crate::measures::{ag_measure, cj_curve, kappa_grid_offset, kappa_measure, kappa_range};
use crate::numerics::{stats, RngStream};
use crate::priors::{
    induce_delta_prior, max_tie_count, repeated_obs_threshold, thm2_audit, Marginal, PriorSpec, ProprietyStatus,
    ProprietyVerdict,
};

/// Settings after merging flags, config file and defaults.
#[derive(Debug, Clone, Serialize)]
struct Settings {
    family: FamilyId,
    kind: ModelKind,
    input: Option<PathBuf>,
    output: Option<PathBuf>,
    seed: u64,
    iterations: usize,
    burn_in: usize,
    thin: usize,
    restarts: usize,
    threads: Option<usize>,
    format: Format,
    /// Prior overrides in application order (config file first).
    #[serde(skip)]
    prior_entries: Vec<String>,
}

impl Settings {
    fn resolve(flags: &GlobalArgs) -> Result<Self, CliError> {
        let file = match &flags.config {
            Some(p) => parse_config_file(&read_text(p)?)?,
            None => BTreeMap::new(),
        };
        let mut prior_entries = Vec::new();
        for (k, v) in &file {
            if let Some(param) = k.strip_prefix("prior.") {
                prior_entries.push(format!("{param}={v}"));
            } else if !CONFIG_KEYS.contains(&k.as_str()) {
                return Err(CliError::input(format!("unknown config key `{k}`")));
            }
        }
        prior_entries.extend(flags.prior.iter().cloned());
        let file_value = |key: &str| file.get(key).map(String::as_str);
        fn pick<T: std::str::FromStr>(flag: Option<T>, file: Option<&str>, key: &str, default: T) -> Result<T, CliError> {
            match (flag, file) {
                (Some(v), _) => Ok(v),
                (None, Some(s)) => s.parse().map_err(|_| CliError::input(format!("config value `{s}` for `{key}` is invalid"))),
                (None, None) => Ok(default),
            }
        }
        let family: FamilyId = match (&flags.family, file_value("family")) {
            (Some(s), _) => s.parse()?,
            (None, Some(s)) => s.parse()?,
            (None, None) => FamilyId::StudentT,
        };
        let kind: ModelKind = match (&flags.kind, file_value("kind")) {
            (Some(s), _) => s.parse()?,
            (None, Some(s)) => s.parse()?,
            (None, None) => ModelKind::Dtp,
        };
        let format = match (flags.format, file_value("format")) {
            (Some(f), _) => f,
            (None, Some("json")) => Format::Json,
            (None, Some("csv")) => Format::Csv,
            (None, Some(s)) => return Err(CliError::input(format!("unknown format `{s}`"))),
            (None, None) => Format::Json,
        };
        let threads = match (flags.threads, file_value("threads")) {
            (Some(t), _) => Some(t),
            (None, Some(s)) => Some(s.parse().map_err(|_| CliError::input(format!("invalid thread count `{s}`")))?),
            (None, None) => None,
        };
        Ok(Settings {
            family,
            kind,
            input: flags.input.clone().or_else(|| file_value("input").map(PathBuf::from)),
            output: flags.output.clone().or_else(|| file_value("output").map(PathBuf::from)),
            seed: pick(flags.seed, file_value("seed"), "seed", 1)?,
            iterations: pick(flags.iterations, file_value("iterations"), "iterations", 50_000)?,
            burn_in: pick(flags.burn_in, file_value("burn-in"), "burn-in", 10_000)?,
            thin: pick(flags.thin, file_value("thin"), "thin", 5)?,
            restarts: pick(flags.restarts, file_value("restarts"), "restarts", 10)?,
            threads,
            format,
            prior_entries,
        })
    }

    fn mcmc(&self) -> McmcConfig {
        McmcConfig::new(self.iterations, self.burn_in, self.thin, self.seed)
    }

    fn mle(&self) -> MleOptions {
        MleOptions { restarts: self.restarts, seed: self.seed, ..Default::default() }
    }

    fn observations(&self) -> Result<Vec<Observation>, CliError> {
        let path = self.input.as_ref().ok_or_else(|| CliError::input("--input is required"))?;
        parse_observations_csv(&read_text(path)?).map_err(|e| CliError::input(format!("{}: {}", path.display(), e.message)))
    }

    /// `base` with the prior overrides applied.
    fn prior(&self, base: PriorSpec, family: FamilyId) -> Result<PriorSpec, CliError> {
        let mut spec = base;
        for entry in &self.prior_entries {
            let (key, value) =
                entry.split_once('=').ok_or_else(|| CliError::input(format!("prior `{entry}` is not key=marginal")))?;
            let name: ParamName = key.trim().parse()?;
            spec.set(name, Marginal::parse(value, family)?);
        }
        spec.validate(family)?;
        Ok(spec)
    }
}

const CONFIG_KEYS: [&str; 11] =
    ["family", "kind", "input", "output", "seed", "iterations", "burn-in", "thin", "restarts", "threads", "format"];

/// Finished report plus the exit code to return after writing it.
struct Outcome {
    result: Value,
    csv: (Vec<(String, String)>, Vec<&'static str>, Vec<Vec<String>>),
    warnings: Vec<String>,
    code: i32,
    family: Option<String>,
    kind: Option<String>,
    prior: Option<String>,
    options: Value,
}

impl Outcome {
    fn new(result: Value) -> Self {
        Outcome {
            result,
            csv: (vec![], vec![], vec![]),
            warnings: vec![],
            code: EXIT_OK,
            family: None,
            kind: None,
            prior: None,
            options: Value::Null,
        }
    }
}

pub fn execute(cli: Cli) -> Result<i32, CliError> {
    let settings = Settings::resolve(&cli.global)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(settings.threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::input(format!("cannot start thread pool: {e}")))?;
    let verb = cli.command.verb();
    let outcome = pool.install(|| dispatch(&cli.command, &settings))?;

    let mut config = serde_json::to_value(&settings).expect("settings serialize");
    config["command"] = json!(verb);
    if let Some(p) = &outcome.prior {
        config["prior"] = json!(p);
    }
    if !outcome.options.is_null() {
        config["options"] = outcome.options.clone();
    }
    let family = outcome.family.clone().unwrap_or_else(|| settings.family.to_string());
    let kind = outcome.kind.clone().unwrap_or_else(|| settings.kind.to_string());
    let env = Envelope::new(verb, settings.seed, family, kind, config);
    let mut text = match settings.format {
        Format::Json => json_document(&env, outcome.result, &outcome.warnings),
        Format::Csv => {
            let (mut extra, header, rows) = outcome.csv;
            extra.extend(outcome.warnings.iter().map(|w| ("warning".to_string(), w.clone())));
            csv_document(&env, &extra, &header, &rows)
        }
    };
    if text.is_empty() {
        text.push('\n');
    }
    write_output(settings.output.as_deref(), &text)?;
    for w in &outcome.warnings {
        eprintln!("dtp: warning: {w}");
    }
    Ok(outcome.code)
}

fn dispatch(command: &Command, s: &Settings) -> Result<Outcome, CliError> {
    match command {
        Command::FitMle => cmd_fit_mle(s),
        Command::FitBayes { draws } => cmd_fit_bayes(s, draws.as_ref()),
        Command::Measures { params } => cmd_measures(s, params),
        Command::PriorInduce { nodes } => cmd_prior_induce(s, *nodes),
        Command::Propriety => cmd_propriety(s),
        Command::Compare { models, competitors, is_draws } => cmd_compare(s, models, competitors, *is_draws),
        Command::Hier { law, grid_points, grid_lo, grid_hi } => cmd_hier(s, law, *grid_points, *grid_lo, *grid_hi),
        Command::Sample { params, n } => cmd_sample(s, params, *n),
    }
}

fn key_value_csv(map: &Map<String, Value>) -> Vec<Vec<String>> {
    map.iter()
        .map(|(k, v)| {
            let text = match v {
                Value::String(s) => s.clone(),
                Value::Null => String::new(),
                other => other.to_string(),
            };
            vec![k.clone(), text]
        })
        .collect()
}

fn natural_of(p: DtpParams) -> Result<DtpParamsNatural, CliError> {
    Ok(*Dtp::new(p)?.params())
}

fn cmd_fit_mle(s: &Settings) -> Result<Outcome, CliError> {
    let data = s.observations()?;
    let model = ModelSpec::new(s.family, s.kind);
    let fit = mle_fit(&data, model, None, s.mle())?;
    let nat = natural_of(fit.params_hat)?;
    let eps = fit.eps_skew();
    let epsilon = Dtp::new(nat)?.epsilon();
    let mut flat = Map::new();
    for (k, v) in [
        ("mu", nat.mu),
        ("sigma1", nat.sigma1),
        ("sigma2", nat.sigma2),
        ("delta1", nat.delta1),
        ("delta2", nat.delta2),
        ("sigma", eps.sigma),
        ("gamma", eps.gamma),
        ("delta", eps.delta),
        ("zeta", eps.zeta),
        ("epsilon", epsilon),
        ("log_lik", fit.log_lik),
        ("aic", fit.aic),
        ("bic", fit.bic),
    ] {
        flat.insert(k.into(), json!(v));
    }
    flat.insert("model".into(), json!(model.to_string()));
    flat.insert("n_params".into(), json!(fit.n_params));
    flat.insert("n_obs".into(), json!(fit.n_obs));
    flat.insert("converged".into(), json!(fit.converged));
    flat.insert("restarts_used".into(), json!(fit.restarts_used));
    flat.insert("evaluations".into(), json!(fit.evaluations));
    let mut out = Outcome::new(Value::Object(flat.clone()));
    out.csv = (vec![], vec!["key", "value"], key_value_csv(&flat));
    out.options = json!({ "mle": s.mle() });
    if !fit.converged {
        out.warnings.push("optimizer did not converge".into());
        out.code = EXIT_NON_CONVERGENCE;
    }
    Ok(out)
}

/// Improper prior with a verdict that rules out propriety.
fn hard_failure(verdict: &ProprietyVerdict, prior: &PriorSpec, kind: ModelKind, family: FamilyId) -> bool {
    verdict.status <= ProprietyStatus::NecessaryConditionViolated && !prior.is_proper(kind, family)
}

fn summary_rows(summary: &[ParamSummary]) -> Vec<Vec<String>> {
    summary
        .iter()
        .map(|p| {
            vec![p.name.clone(), num(p.mean), num(p.sd), num(p.median), num(p.q025), num(p.q975), num(p.acceptance)]
        })
        .collect()
}

const SUMMARY_HEADER: [&str; 7] = ["param", "mean", "sd", "median", "q025", "q975", "acceptance"];

fn draws_csv(chain: &Chain) -> String {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    w.write_record(&chain.param_names).expect("in-memory CSV write");
    for row in &chain.draws {
        w.write_record(row.iter().map(|v| num(*v))).expect("in-memory CSV write");
    }
    String::from_utf8(w.into_inner().expect("in-memory CSV flush")).expect("CSV output is UTF-8")
}

fn cmd_fit_bayes(s: &Settings, draws: Option<&PathBuf>) -> Result<Outcome, CliError> {
    let data = s.observations()?;
    let model = ModelSpec::new(s.family, s.kind);
    let prior = s.prior(PriorSpec::benchmark(s.family)?, s.family)?;
    let verdict = thm2_audit(s.family, s.kind, &prior, &data);
    if hard_failure(&verdict, &prior, s.kind, s.family) {
        return Err(CliError {
            code: EXIT_PROPRIETY,
            message: format!("posterior is not proper: {:?}; {}", verdict.status, verdict.conditions.join("; ")),
        });
    }
    let chain = fit_bayes(&data, model, &prior, &s.mcmc())?;
    if let Some(path) = draws {
        write_atomic(path, &draws_csv(&chain))?;
    }
    let summary = chain.summary();
    let mut out = Outcome::new(json!({
        "model": model.to_string(),
        "draws_kept": chain.len(),
        "summary": summary,
        "fixed": chain.fixed.iter().map(|(k, v)| (k.clone(), json!(v))).collect::<Map<_, _>>(),
        "propriety": verdict,
    }));
    if verdict.status == ProprietyStatus::Inconclusive {
        out.warnings.push(format!("propriety audit inconclusive: {}", verdict.conditions.join("; ")));
    }
    out.csv = (
        vec![("propriety".into(), format!("{:?}", verdict.status)), ("draws_kept".into(), chain.len().to_string())],
        SUMMARY_HEADER.to_vec(),
        summary_rows(&summary),
    );
    out.prior = Some(prior.to_string());
    out.options = json!({ "mcmc": s.mcmc(), "draws": draws });
    Ok(out)
}

/// Natural parameters from flags, checked against the model kind.
fn params_from(s: &Settings, a: &ParamArgs) -> Result<DtpParamsNatural, CliError> {
    let (d1, d2) = if s.family.has_shape_param() {
        (a.delta1, a.delta2.unwrap_or(a.delta1))
    } else {
        (SHAPE_FREE_DELTA, SHAPE_FREE_DELTA)
    };
    let s2 = a.sigma2.unwrap_or(a.sigma1);
    let equal_scales = a.sigma1 == s2;
    let equal_shapes = d1 == d2;
    let ok = match s.kind {
        ModelKind::Dtp => true,
        ModelKind::Tpsc => equal_shapes,
        ModelKind::Tpsh => equal_scales,
        ModelKind::Symmetric => equal_scales && equal_shapes,
    };
    if !ok {
        return Err(CliError::input(format!(
            "parameters (σ1={}, σ2={s2}, δ1={d1}, δ2={d2}) violate the {} restriction",
            a.sigma1, s.kind
        )));
    }
    Ok(DtpParamsNatural::new(a.mu, a.sigma1, s2, d1, d2, s.family)?)
}

fn cmd_measures(s: &Settings, a: &ParamArgs) -> Result<Outcome, CliError> {
    let p = params_from(s, a)?;
    let ag = ag_measure(p)?;
    let grid: Vec<f64> = (1..=99).map(|i| i as f64 / 100.0).collect();
    let curve = cj_curve(p, &grid)?;
    let mut warnings = vec![];
    let mut kappa = |delta: f64| match kappa_measure(s.family, delta) {
        Ok(k) => Some(k),
        Err(e) => {
            warnings.push(format!("κ unavailable at δ = {delta}: {e}"));
            None
        }
    };
    let (k1, k2) = (kappa(p.delta1), kappa(p.delta2));
    let epsilon = Dtp::new(p)?.epsilon();
    let text = |k: Option<f64>| k.map_or_else(String::new, num);
    let mut out = Outcome::new(json!({
        "params": p,
        "epsilon": epsilon,
        "ag": ag,
        "kappa_left": k1,
        "kappa_right": k2,
        "cj": curve,
    }));
    out.csv = (
        vec![
            ("ag".into(), num(ag)),
            ("epsilon".into(), num(epsilon)),
            ("kappa_left".into(), text(k1)),
            ("kappa_right".into(), text(k2)),
        ],
        vec!["p", "cj"],
        curve.p_grid.iter().zip(&curve.cj_values).map(|(p, c)| vec![num(*p), num(*c)]).collect(),
    );
    out.warnings = warnings;
    out.options = json!({ "params": a });
    Ok(out)
}

fn cmd_prior_induce(s: &Settings, nodes: usize) -> Result<Outcome, CliError> {
    if nodes < 2 {
        return Err(CliError::input("--nodes must be at least 2"));
    }
    let prior = induce_delta_prior(s.family)?;
    let range = kappa_range(s.family)?;
    let (lo, hi) = prior.support();
    // Log-spaced in δ − offset, matching the tabulation coordinate.
    let off = kappa_grid_offset(s.family);
    let (a, b) = ((lo - off).ln(), (hi - off).ln());
    let delta: Vec<f64> = (0..nodes)
        .map(|i| match i {
            0 => lo,
            _ if i == nodes - 1 => hi,
            _ => off + (a + (b - a) * i as f64 / (nodes - 1) as f64).exp(),
        })
        .collect();
    let density: Vec<f64> = delta.iter().map(|&d| prior.ln_density(d).exp()).collect();
    let mass = stats::trapezoid(&delta, &density);
    let mut out = Outcome::new(json!({
        "kappa_range": { "lo": range.lo, "hi": range.hi },
        "support": [lo, hi],
        "trapezoid_mass": mass,
        "delta": delta,
        "density": density,
    }));
    out.csv = (
        vec![
            ("kappa_range".into(), format!("({},{})", num(range.lo), num(range.hi))),
            ("support".into(), format!("({},{})", num(lo), num(hi))),
        ],
        vec!["delta", "density"],
        delta.iter().zip(&density).map(|(d, f)| vec![num(*d), num(*f)]).collect(),
    );
    out.kind = Some("-".into());
    out.options = json!({ "nodes": nodes });
    Ok(out)
}

fn cmd_propriety(s: &Settings) -> Result<Outcome, CliError> {
    let data = s.observations()?;
    let prior = s.prior(PriorSpec::benchmark(s.family)?, s.family)?;
    let verdict = thm2_audit(s.family, s.kind, &prior, &data);
    let points: Vec<f64> = data.iter().filter(|o| o.is_point()).map(|o| o.bounds().0).collect();
    let k = max_tie_count(&points);
    let threshold = repeated_obs_threshold(data.len(), k).ok();
    let mut out = Outcome::new(json!({
        "verdict": verdict,
        "n": data.len(),
        "max_ties": k,
        "threshold": threshold,
        "prior_proper": prior.is_proper(s.kind, s.family),
    }));
    let mut rows = vec![
        vec!["status".to_string(), serde_json::to_value(verdict.status).unwrap().as_str().unwrap_or("").to_string()],
        vec!["numerical".into(), verdict.numerical.to_string()],
        vec!["n".into(), data.len().to_string()],
        vec!["max_ties".into(), k.to_string()],
        vec!["threshold".into(), threshold.map_or_else(String::new, num)],
    ];
    rows.extend(verdict.theorem_trail.iter().map(|t| vec!["trail".to_string(), t.clone()]));
    rows.extend(verdict.conditions.iter().map(|c| vec!["condition".to_string(), c.clone()]));
    out.csv = (vec![], vec!["key", "value"], rows);
    out.prior = Some(prior.to_string());
    if hard_failure(&verdict, &prior, s.kind, s.family) {
        out.code = EXIT_PROPRIETY;
    }
    Ok(out)
}

fn cmd_compare(s: &Settings, models: &[String], competitors: &[String], is_draws: usize) -> Result<Outcome, CliError> {
    let data = s.observations()?;
    let models: Vec<ModelSpec> = if models.is_empty() {
        [ModelKind::Dtp, ModelKind::Tpsc, ModelKind::Tpsh].iter().map(|&k| ModelSpec::new(s.family, k)).collect()
    } else {
        models.iter().map(|m| m.parse()).collect::<crate::Result<_>>()?
    };
    let competitors: Vec<CompetitorId> = competitors.iter().map(|c| c.parse()).collect::<crate::Result<_>>()?;
    let priors = if s.prior_entries.is_empty() {
        None
    } else {
        Some(models.iter().map(|m| s.prior(PriorSpec::benchmark(m.family)?, m.family)).collect::<Result<Vec<_>, _>>()?)
    };
    let config = CompareConfig {
        mcmc: s.mcmc(),
        mle: s.mle(),
        importance: IsConfig { draws: is_draws, seed: s.seed, ..Default::default() },
        priors: priors.clone(),
        competitors,
    };
    let report = compare_models(&data, &models, &config)?;
    let method_name = |m: BfMethod| serde_json::to_value(m).unwrap().as_str().unwrap_or("").to_string();
    let opt = |v: Option<f64>| v.map_or_else(String::new, num);
    let mut rows: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r| {
            vec![
                r.model.to_string(),
                num(r.mle.log_lik),
                num(r.mle.aic),
                num(r.mle.bic),
                opt(r.bf),
                opt(r.bf_se),
                method_name(r.method),
            ]
        })
        .collect();
    rows.extend(report.competitors.iter().map(|c| {
        vec![c.id.to_string(), num(c.log_lik), num(c.aic), num(c.bic), String::new(), String::new(), "mle_only".into()]
    }));
    let notes: Vec<String> = report.rows.iter().filter_map(|r| r.note.as_ref().map(|n| format!("{}: {n}", r.model))).collect();
    let mut out = Outcome::new(json!({
        "report": report,
        "aic_order": report.aic_order().iter().map(|m| m.to_string()).collect::<Vec<_>>(),
    }));
    out.csv = (vec![], vec!["model", "log_lik", "aic", "bic", "bf", "bf_se", "method"], rows);
    out.warnings = notes;
    out.family = Some(models.iter().map(|m| m.family.to_string()).collect::<Vec<_>>().join(","));
    out.kind = Some(models.iter().map(|m| m.kind.to_string()).collect::<Vec<_>>().join(","));
    out.prior = priors.map(|p| p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" | "));
    out.options = json!({
        "models": models.iter().map(|m| m.to_string()).collect::<Vec<_>>(),
        "mcmc": config.mcmc,
        "mle": config.mle,
        "importance": config.importance,
        "competitors": config.competitors.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
    });
    Ok(out)
}

fn cmd_hier(
    s: &Settings,
    law: &str,
    grid_points: usize,
    grid_lo: Option<f64>,
    grid_hi: Option<f64>,
) -> Result<Outcome, CliError> {
    let law: EffectsLaw = law.parse()?;
    let path = s.input.as_ref().ok_or_else(|| CliError::input("--input is required"))?;
    let (y, sigma) =
        parse_hier_csv(&read_text(path)?).map_err(|e| CliError::input(format!("{}: {}", path.display(), e.message)))?;
    let family = law.model().family;
    let prior = s.prior(PriorSpec::weakly_informative(family, -10.0, 10.0, 1.0)?, family)?;
    let spread = stats::variance(&y).sqrt().max(stats::quantile(&sigma, 0.5));
    let (ymin, ymax) = y.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let lo = grid_lo.unwrap_or(ymin - 8.0 * spread);
    let hi = grid_hi.unwrap_or(ymax + 8.0 * spread);
    if !(grid_points >= 2 && lo < hi) {
        return Err(CliError::input("predictive grid needs at least two points and grid-lo < grid-hi"));
    }
    let data = HierData::new(y, sigma)?;
    let chain = hier_fit(&data, law, &prior, &s.mcmc())?;
    let grid: Vec<f64> = (0..grid_points).map(|i| lo + (hi - lo) * i as f64 / (grid_points - 1) as f64).collect();
    let density = hier_predictive(&chain, law, &grid)?;
    let mass = stats::trapezoid(&grid, &density);
    let summary = chain.summary();
    let (effects, hyper): (Vec<ParamSummary>, Vec<ParamSummary>) =
        summary.into_iter().partition(|p| p.name.starts_with("theta["));
    let mut out = Outcome::new(json!({
        "law": law.name(),
        "hyper": hyper,
        "effects": effects,
        "grid_mass": mass,
        "grid": { "x": grid, "density": density },
    }));
    let mut extra: Vec<(String, String)> = hyper
        .iter()
        .map(|p| (format!("hyper.{}", p.name), format!("mean={} q025={} q975={}", num(p.mean), num(p.q025), num(p.q975))))
        .collect();
    extra.push(("grid_mass".into(), num(mass)));
    out.csv = (extra, vec!["x", "density"], grid.iter().zip(&density).map(|(x, d)| vec![num(*x), num(*d)]).collect());
    out.family = Some(family.to_string());
    out.kind = Some(law.model().kind.to_string());
    out.prior = Some(prior.to_string());
    out.options = json!({ "law": law.name(), "grid": [lo, hi, grid_points], "mcmc": s.mcmc() });
    if (mass - 1.0).abs() > 0.01 {
        out.warnings.push(format!("predictive grid holds mass {mass:.4}; widen --grid-lo/--grid-hi"));
    }
    Ok(out)
}

fn cmd_sample(s: &Settings, a: &ParamArgs, n: usize) -> Result<Outcome, CliError> {
    let p = params_from(s, a)?;
    let mut rng = RngStream::new(s.seed);
    let xs = Dtp::new(p)?.sample(&mut rng, n)?;
    let mut out = Outcome::new(json!({ "params": p, "draws": xs }));
    out.csv = (vec![], vec!["x"], xs.iter().map(|x| vec![num(*x)]).collect());
    out.options = json!({ "params": a, "n": n });
    Ok(out)
}
