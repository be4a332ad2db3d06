//! End-to-end runs of the `dtp` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::Instant;

use dtp::dtp::{Dtp, DtpParamsEpsSkew};
use dtp::family::FamilyId;
use dtp::numerics::{stats, RngStream};
use serde_json::Value;

fn dtp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dtp")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn json(out: &Output) -> Value {
    assert_eq!(code(out), 0, "stderr: {}", stderr(out));
    serde_json::from_slice(&out.stdout).expect("JSON report")
}

/// Data rows of a CSV report (comments and header dropped).
fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().filter(|l| !l.starts_with('#')).skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn comment<'a>(text: &'a str, key: &str) -> Option<&'a str> {
    text.lines().find_map(|l| l.strip_prefix(&format!("# {key}=")))
}

fn write(dir: &Path, name: &str, content: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, content).unwrap();
    p
}

fn draws_csv(p: DtpParamsEpsSkew, n: usize, seed: u64) -> String {
    let mut rng = RngStream::new(seed);
    let xs = Dtp::new(p).unwrap().sample(&mut rng, n).unwrap();
    let mut s = String::from("x\n");
    for x in xs {
        s.push_str(&format!("{x}\n"));
    }
    s
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn fit_mle_recovers_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let truth = DtpParamsEpsSkew::new(0.0, 1.0, 0.5, 1.0, -0.3, FamilyId::SasSymmetric).unwrap();
    let input = write(dir.path(), "sas.csv", &draws_csv(truth, 2000, 100));
    let out = dtp(&["fit-mle", "--family", "sas_symmetric", "--kind", "dtp", "--input", s(&input), "--restarts", "4"]);
    let report = json(&out);
    let r = &report["result"];
    let f = |k: &str| r[k].as_f64().unwrap();
    assert!(f("mu").abs() <= 0.1 && (f("sigma") - 1.0).abs() <= 0.15, "{r}");
    assert!((f("gamma") - 0.5).abs() <= 0.1 && (f("zeta") + 0.3).abs() <= 0.15, "{r}");
    assert_eq!(r["converged"], Value::Bool(true));
    for key in ["version", "seed", "family", "kind", "config_hash", "config"] {
        assert!(!report[key].is_null(), "report lacks {key}");
    }
    assert_eq!(report["config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn fit_mle_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let empty = write(dir.path(), "empty.csv", "");
    let out = dtp(&["fit-mle", "--input", s(&empty)]);
    assert_eq!(code(&out), 1);
    let bad = write(dir.path(), "bad.csv", "x\r\n1.0\r\n2.0\r\nseven\r\n");
    let out = dtp(&["fit-mle", "--input", s(&bad)]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("line 4"), "{}", stderr(&out));
    let missing = dir.path().join("nope.csv");
    assert_eq!(code(&dtp(&["fit-mle", "--input", s(&missing)])), 1);
    assert_eq!(code(&dtp(&["fit-mle", "--family", "cauchy", "--input", s(&bad)])), 1);
    assert_eq!(code(&dtp(&["no-such-verb"])), 1);
}

#[test]
fn fit_mle_csv_is_key_value() {
    let dir = tempfile::tempdir().unwrap();
    let truth = DtpParamsEpsSkew::new(1.0, 2.0, 0.0, 1.0, 0.0, FamilyId::Normal).unwrap();
    let input = write(dir.path(), "n.csv", &draws_csv(truth, 300, 3));
    let output = dir.path().join("fit.csv");
    let out = dtp(&[
        "fit-mle", "--family", "normal", "--kind", "tpsc", "--input", s(&input), "--output", s(&output), "--format", "csv",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = std::fs::read_to_string(&output).unwrap();
    assert_eq!(comment(&text, "family"), Some("normal"));
    assert_eq!(comment(&text, "kind"), Some("tpsc"));
    let rows = csv_rows(&text);
    let get = |k: &str| rows.iter().find(|r| r[0] == k).map(|r| r[1].clone()).unwrap();
    assert!((get("mu").parse::<f64>().unwrap() - 1.0).abs() < 0.5);
    assert_eq!(get("n_obs"), "300");
}

#[test]
fn fit_bayes_is_deterministic_and_covers_zero() {
    let dir = tempfile::tempdir().unwrap();
    let truth = DtpParamsEpsSkew::new(0.0, 1.0, 0.0, 5.0, 0.0, FamilyId::StudentT).unwrap();
    let input = write(dir.path(), "t.csv", &draws_csv(truth, 300, 11));
    let run = |draws: &Path, threads: &str| {
        dtp(&[
            "fit-bayes", "--family", "student_t", "--kind", "tpsc", "--input", s(&input), "--iterations", "6000",
            "--burn-in", "2000", "--thin", "2", "--seed", "21", "--threads", threads, "--draws", s(draws),
        ])
    };
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    let report = json(&run(&a, "1"));
    json(&run(&b, "3"));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let gamma = report["result"]["summary"].as_array().unwrap().iter().find(|p| p["name"] == "gamma").unwrap().clone();
    assert!(gamma["q025"].as_f64().unwrap() < 0.0 && gamma["q975"].as_f64().unwrap() > 0.0, "{gamma}");
    assert_eq!(report["result"]["draws_kept"].as_u64(), Some(2000));
    assert_eq!(report["result"]["propriety"]["status"], "proper");
}

#[test]
fn fit_bayes_rejects_bad_priors() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "x.csv", "0.1\n0.5\n-0.3\n1.2\n0.8\n");
    let out = dtp(&["fit-bayes", "--family", "normal", "--input", s(&input), "--prior", "gamma=uniform(-2,1)"]);
    assert_eq!(code(&out), 1);
    assert_eq!(code(&dtp(&["fit-bayes", "--family", "normal", "--input", s(&input), "--prior", "gamma"])), 1);
    // Every value tied under improper scale and location priors.
    let tied = write(dir.path(), "tied.csv", "2\n2\n2\n2\n");
    let out = dtp(&["fit-bayes", "--family", "student_t", "--kind", "tpsc", "--input", s(&tied), "--iterations", "200", "--burn-in", "100", "--thin", "1"]);
    assert_eq!(code(&out), 3, "{}", stderr(&out));
}

#[test]
fn measures_verb() {
    let out = dtp(&["measures", "--family", "sas", "--kind", "tpsh", "--delta1", "5", "--delta2", "1", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let ag: f64 = comment(&text, "ag").unwrap().parse().unwrap();
    assert!((ag - 2.0 / 3.0).abs() < 5e-5);
    assert_eq!(csv_rows(&text).len(), 99);

    let sym = json(&dtp(&["measures", "--family", "t", "--kind", "symmetric", "--delta1", "3", "--sigma1", "2"]));
    let cj = sym["result"]["cj"]["cj_values"].as_array().unwrap();
    assert_eq!(cj.len(), 99);
    assert!(cj.iter().all(|v| v.as_f64().unwrap().abs() <= 1e-10));

    let tpsc = json(&dtp(&["measures", "--family", "smn_bs", "--kind", "tpsc", "--sigma1", "0.5", "--sigma2", "2", "--delta1", "1.3"]));
    let ag = tpsc["result"]["ag"].as_f64().unwrap();
    let cj = tpsc["result"]["cj"]["cj_values"].as_array().unwrap();
    assert!(cj.iter().all(|v| (v.as_f64().unwrap() - ag).abs() <= 1e-8), "AG {ag}");

    assert_eq!(code(&dtp(&["measures", "--family", "t", "--kind", "tpsc", "--delta1", "2", "--delta2", "3"])), 1);
    assert_eq!(code(&dtp(&["measures", "--family", "t", "--sigma1", "-1"])), 1);
}

#[test]
fn prior_induce_verb() {
    let out = dtp(&["prior-induce", "--family", "student_t", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let range = comment(&text, "kappa_range").unwrap();
    let (lo, hi) = range.trim_matches(|c| c == '(' || c == ')').split_once(',').unwrap();
    assert!((lo.parse::<f64>().unwrap() - 0.213).abs() <= 0.005 && (hi.parse::<f64>().unwrap() - 0.633).abs() <= 0.005);
    let rows = csv_rows(&text);
    let x: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    let f: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert!((stats::trapezoid(&x, &f) - 1.0).abs() <= 1e-4);

    let bs = json(&dtp(&["prior-induce", "--family", "smn_bs"]));
    let deltas = bs["result"]["delta"].as_array().unwrap();
    assert!(deltas.iter().all(|d| {
        let d = d.as_f64().unwrap();
        d > 0.0 && d <= 2.65
    }));
    assert_eq!(code(&dtp(&["prior-induce", "--family", "normal"])), 1);
}

#[test]
fn propriety_verb() {
    let dir = tempfile::tempdir().unwrap();
    let mut text = String::new();
    for i in 0..1793 {
        text.push_str(&format!("{}\n", i as f64 * 0.001));
    }
    text.push_str(&"5.5\n".repeat(30));
    let ties = write(dir.path(), "ties.csv", &text);
    let args = ["propriety", "--family", "student_t", "--input", s(&ties), "--prior", "delta=induced(2,inf)", "--prior", "zeta=uniform(-0.99,0.99)"];
    let r = json(&dtp(&args));
    assert_eq!(r["result"]["verdict"]["status"], "proper");
    assert_eq!(r["result"]["max_ties"], 30);
    assert!((r["result"]["threshold"].as_f64().unwrap() - 29.0 / 1793.0).abs() < 1e-15);
    let out = dtp(&["propriety", "--family", "student_t", "--input", s(&ties)]);
    assert_eq!(code(&out), 3);

    let distinct = write(dir.path(), "d.csv", "0.3\n-1.2\n2.5\n0.9\n");
    let r = json(&dtp(&["propriety", "--family", "student_t", "--kind", "tpsc", "--input", s(&distinct)]));
    assert_eq!(r["result"]["verdict"]["status"], "proper");

    let sets = write(dir.path(), "sets.csv", "lo,hi\n0,1\n2,3\n");
    let r = json(&dtp(&["propriety", "--family", "student_t", "--input", s(&sets)]));
    assert_eq!(r["result"]["verdict"]["status"], "proper");
    assert!(r["result"]["verdict"]["theorem_trail"][0].as_str().unwrap().contains("set observations"));
}

#[test]
fn compare_verb() {
    let dir = tempfile::tempdir().unwrap();
    let truth = DtpParamsEpsSkew::new(0.0, 1.0, 0.4, 4.0, 0.0, FamilyId::StudentT).unwrap();
    let input = write(dir.path(), "t.csv", &draws_csv(truth, 300, 5));
    let out = dtp(&[
        "compare", "--family", "student_t", "--input", s(&input), "--iterations", "6000", "--burn-in", "2000", "--thin",
        "2", "--restarts", "3", "--competitors", "s_jf,s_ac", "--format", "csv",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header, "model,log_lik,aic,bic,bf,bf_se,method");
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 5);
    for r in &rows {
        for v in &r[1..4] {
            assert!(v.parse::<f64>().unwrap().is_finite(), "{r:?}");
        }
        if r[6] != "mle_only" {
            assert!(r[4].parse::<f64>().unwrap() > 0.0 && r[5].parse::<f64>().unwrap() >= 0.0, "{r:?}");
        }
    }
    assert_eq!(rows[0][6], "reference");

    let out = dtp(&["compare", "--input", s(&input), "--models", "student_t:tpsc"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn compare_aic_prefers_true_tpsc() {
    // AIC picks the true TPSC model over its DTP superset unless the likelihood-ratio statistic exceeds 2.
    let dir = tempfile::tempdir().unwrap();
    let truth = DtpParamsEpsSkew::new(0.0, 1.0, 0.4, 4.0, 0.0, FamilyId::StudentT).unwrap();
    let mut best = 0;
    for rep in 0..20u64 {
        let input = write(dir.path(), "t.csv", &draws_csv(truth, 400, 700 + rep));
        let out = dtp(&[
            "compare", "--family", "student_t", "--input", s(&input), "--iterations", "2000", "--burn-in", "1000",
            "--thin", "1", "--restarts", "4", "--seed", &rep.to_string(),
        ]);
        let r = json(&out);
        best += usize::from(r["result"]["aic_order"][0] == "student_t:tpsc");
    }
    assert!(best >= 16, "TPSC best by AIC in {best}/20");
}

fn fluoride_like(n: usize, seed: u64) -> String {
    let effects = Dtp::new(DtpParamsEpsSkew::new(0.3, 0.08, 0.5, 1.0, 0.0, FamilyId::Normal).unwrap()).unwrap();
    let mut rng = RngStream::new(seed);
    let theta = effects.sample(&mut rng, n).unwrap();
    let mut s = String::from("y,sigma\n");
    for t in theta {
        let sd = 0.03 + 0.07 * rng.uniform();
        s.push_str(&format!("{},{sd}\n", t + sd * rng.normal()));
    }
    s
}

#[test]
fn hier_verb_default_config() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "fl.csv", &fluoride_like(70, 8));
    let start = Instant::now();
    let r = json(&dtp(&["hier", "--input", s(&input)]));
    assert!(start.elapsed().as_secs() < 300);
    let res = &r["result"];
    assert!((res["grid_mass"].as_f64().unwrap() - 1.0).abs() <= 0.01);
    let x = res["grid"]["x"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect::<Vec<_>>();
    let f = res["grid"]["density"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect::<Vec<_>>();
    assert!((stats::trapezoid(&x, &f) - 1.0).abs() <= 0.01);
    assert_eq!(res["effects"].as_array().unwrap().len(), 70);
    assert_eq!(r["family"], "sas_symmetric");
    assert_eq!(r["kind"], "tpsc");
}

#[test]
fn hier_rejects_bad_rows() {
    let dir = tempfile::tempdir().unwrap();
    let zero = write(dir.path(), "z.csv", "y,sigma\n0.2,0.05\n0.3,0\n");
    let out = dtp(&["hier", "--input", s(&zero)]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("line 3"), "{}", stderr(&out));
    let short = write(dir.path(), "s.csv", "0.2,0.05\n0.3\n");
    assert_eq!(code(&dtp(&["hier", "--input", s(&short)])), 1);
    assert_eq!(code(&dtp(&["hier", "--input", s(&zero), "--law", "cauchy"])), 1);
}

#[test]
fn sample_and_config_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.cfg", "# defaults\nfamily = laplace\nseed = 5\nformat = csv\n");
    let a = dtp(&["sample", "--config", s(&cfg), "--n", "50"]);
    assert_eq!(code(&a), 0, "{}", stderr(&a));
    let text = String::from_utf8(a.stdout).unwrap();
    assert_eq!(comment(&text, "family"), Some("laplace"));
    assert_eq!(comment(&text, "seed"), Some("5"));
    assert_eq!(csv_rows(&text).len(), 50);
    let b = dtp(&["sample", "--config", s(&cfg), "--n", "50", "--seed", "6"]);
    let text_b = String::from_utf8(b.stdout).unwrap();
    assert_eq!(comment(&text_b, "seed"), Some("6"));
    assert_ne!(comment(&text, "config_hash"), comment(&text_b, "config_hash"));
    let bad = write(dir.path(), "bad.cfg", "colour = blue\n");
    assert_eq!(code(&dtp(&["sample", "--config", s(&bad)])), 1);
}
