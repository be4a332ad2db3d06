//! Report envelopes and atomic output.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use super::CliError;

/// Config keys that do not affect results and are left out of the hash.
const UNHASHED_KEYS: [&str; 3] = ["output", "threads", "format"];

#[derive(Debug, Clone, Serialize)]
pub struct Envelope {
    pub artifact: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seed: u64,
    pub family: String,
    pub kind: String,
    pub config_hash: String,
    pub config: Value,
}

impl Envelope {
    pub fn new(command: &str, seed: u64, family: String, kind: String, config: Value) -> Self {
        let mut hashed = config.clone();
        if let Some(map) = hashed.as_object_mut() {
            for k in UNHASHED_KEYS {
                map.remove(k);
            }
        }
        let digest = Sha256::digest(hashed.to_string().as_bytes());
        Envelope {
            artifact: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            seed,
            family,
            kind,
            config_hash: hex::encode(digest),
            config,
        }
    }

    fn comment_lines(&self) -> Vec<String> {
        vec![
            format!("# artifact={} version={}", self.artifact, self.version),
            format!("# command={}", self.command),
            format!("# seed={}", self.seed),
            format!("# family={}", self.family),
            format!("# kind={}", self.kind),
            format!("# config_hash={}", self.config_hash),
            format!("# config={}", self.config),
        ]
    }
}

pub fn json_document(env: &Envelope, result: Value, warnings: &[String]) -> String {
    let mut doc = json!({
        "artifact": env.artifact,
        "version": env.version,
        "command": env.command,
        "seed": env.seed,
        "family": env.family,
        "kind": env.kind,
        "config_hash": env.config_hash,
        "config": env.config,
        "result": result,
    });
    if !warnings.is_empty() {
        doc["warnings"] = json!(warnings);
    }
    let mut s = serde_json::to_string_pretty(&doc).expect("JSON values always serialize");
    s.push('\n');
    s
}

/// Table with the envelope and `extra` as `# key=value` comments.
pub fn csv_document(env: &Envelope, extra: &[(String, String)], header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    for line in env.comment_lines() {
        out.push_str(&line);
        out.push('\n');
    }
    for (k, v) in extra {
        out.push_str(&format!("# {k}={v}\n"));
    }
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    w.write_record(header).expect("in-memory CSV write");
    for r in rows {
        w.write_record(r).expect("in-memory CSV write");
    }
    out.push_str(&String::from_utf8(w.into_inner().expect("in-memory CSV flush")).expect("CSV output is UTF-8"));
    out
}

/// Shortest round-trip text; `inf`, `-inf` and `nan` for non-finite values.
pub fn num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v}")
    }
}

/// Writes via a sibling temporary file and rename; standard output when `path` is absent.
pub fn write_output(path: Option<&Path>, content: &str) -> Result<(), CliError> {
    match path {
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(content.as_bytes())?;
            out.flush()?;
            Ok(())
        }
        Some(p) => write_atomic(p, content),
    }
}

pub fn write_atomic(path: &Path, content: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let fail = |e: std::io::Error| CliError::input(format!("cannot write {}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(fail)?;
    tmp.write_all(content.as_bytes()).map_err(fail)?;
    tmp.as_file().sync_all().map_err(fail)?;
    tmp.persist(path).map_err(|e| fail(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_ignores_output_and_threads() {
        let a = Envelope::new("x", 1, "normal".into(), "dtp".into(), json!({"seed": 1, "output": "a", "threads": 2}));
        let b = Envelope::new("x", 1, "normal".into(), "dtp".into(), json!({"seed": 1, "output": "b", "threads": 8}));
        let c = Envelope::new("x", 1, "normal".into(), "dtp".into(), json!({"seed": 2, "output": "a"}));
        assert_eq!(a.config_hash, b.config_hash);
        assert_ne!(a.config_hash, c.config_hash);
        assert_eq!(a.config_hash.len(), 64);
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.txt");
        write_atomic(&p, "one").unwrap();
        write_atomic(&p, "two").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn csv_has_envelope_comments() {
        let env = Envelope::new("measures", 3, "sas_symmetric".into(), "tpsh".into(), json!({}));
        let doc = csv_document(&env, &[("ag".into(), "0.5".into())], &["p", "cj"], &[vec![num(0.5), num(f64::INFINITY)]]);
        assert!(doc.contains("# seed=3\n"));
        assert!(doc.contains("# ag=0.5\n"));
        assert!(doc.ends_with("p,cj\n0.5,inf\n"));
    }
}
