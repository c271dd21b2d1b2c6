use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use pseudoarc::report::Check;
use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// One pipeline invocation: its output directory, hashed artifacts and verdicts.
pub struct Run {
    out: PathBuf,
    command: String,
    config: Value,
    artifacts: BTreeMap<String, String>,
    checks: Vec<Check>,
    summary: Map<String, Value>,
    started: Instant,
}

pub enum Outcome {
    Success,
    Negative,
}

impl Run {
    pub fn new(out: &Path, command: &str, config: Value) -> Result<Self> {
        fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
        Ok(Run {
            out: out.to_path_buf(),
            command: command.into(),
            config,
            artifacts: BTreeMap::new(),
            checks: Vec::new(),
            summary: Map::new(),
            started: Instant::now(),
        })
    }

    pub fn out(&self) -> &Path {
        &self.out
    }

    pub fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let p = self.out.join(name);
        if let Some(d) = p.parent() {
            fs::create_dir_all(d)?;
        }
        fs::write(&p, bytes).with_context(|| format!("writing {}", p.display()))?;
        self.artifacts.insert(name.into(), sha256_hex(bytes));
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, v: &T) -> Result<()> {
        let mut s = serde_json::to_string_pretty(v)?;
        s.push('\n');
        self.write_bytes(name, s.as_bytes())
    }

    pub fn write_table(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header)?;
        for r in rows {
            w.write_record(r)?;
        }
        let bytes = w.into_inner().map_err(|e| anyhow::anyhow!("{e}"))?;
        self.write_bytes(name, &bytes)
    }

    /// Hash a file some library routine already wrote under the output directory.
    pub fn adopt(&mut self, rel: &str) -> Result<()> {
        let p = self.out.join(rel);
        if p.is_dir() {
            let mut entries: Vec<PathBuf> = walk(&p)?;
            entries.sort();
            for e in entries {
                let r = e.strip_prefix(&self.out)?.to_string_lossy().replace('\\', "/");
                self.artifacts.insert(r, sha256_hex(&fs::read(&e)?));
            }
        } else {
            self.artifacts.insert(rel.into(), sha256_hex(&fs::read(&p)?));
        }
        Ok(())
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn checks(&mut self, cs: impl IntoIterator<Item = Check>) {
        self.checks.extend(cs);
    }

    pub fn note(&mut self, key: &str, v: impl Serialize) {
        self.summary.insert(key.into(), serde_json::to_value(v).unwrap_or(Value::Null));
    }

    fn manifest(&self, status: &str, error: Option<String>) -> Value {
        let config_bytes = serde_json::to_vec(&self.config).unwrap_or_default();
        let failed: Vec<&str> = self.checks.iter().filter(|c| !c.ok).map(|c| c.name.as_str()).collect();
        let mut m = json!({
            "command": self.command,
            "version": VERSION,
            "config": self.config,
            "config_hash": sha256_hex(&config_bytes),
            "status": status,
            "artifacts": self.artifacts,
            "verdicts": {
                "total": self.checks.len(),
                "failed": failed,
                "checks": self.checks,
            },
            "summary": self.summary,
        });
        if let Some(e) = error {
            m["error"] = json!(e);
        }
        m
    }

    fn write_manifest(&self, m: &Value) -> Result<()> {
        let mut s = serde_json::to_string_pretty(m)?;
        s.push('\n');
        fs::write(self.out.join("manifest.json"), s)?;
        let t = json!({"command": self.command, "seconds": self.started.elapsed().as_secs_f64()});
        fs::write(self.out.join("timing.json"), serde_json::to_string_pretty(&t)? + "\n")?;
        Ok(())
    }

    pub fn finish(self, as_json: bool) -> Result<Outcome> {
        let ok = self.checks.iter().all(|c| c.ok);
        let m = self.manifest(if ok { "ok" } else { "failed" }, None);
        self.write_manifest(&m)?;
        if as_json {
            println!("{}", serde_json::to_string_pretty(&json!({"status": m["status"], "summary": m["summary"], "failed": m["verdicts"]["failed"]}))?);
        } else {
            for c in &self.checks {
                let mark = if c.ok { "ok  " } else { "FAIL" };
                if c.detail.is_empty() {
                    println!("{mark} {}", c.name);
                } else {
                    println!("{mark} {}: {}", c.name, truncate(&c.detail, 160));
                }
            }
            for (k, v) in &self.summary {
                println!("{k} = {v}");
            }
            println!("{} {} -> {}", self.command, m["status"].as_str().unwrap_or(""), self.out.join("manifest.json").display());
        }
        Ok(if ok { Outcome::Success } else { Outcome::Negative })
    }

    /// Record a failed run; whatever artifacts exist are marked stale.
    pub fn abandon(self, err: &anyhow::Error) {
        let m = self.manifest("stale", Some(format!("{err:#}")));
        let _ = self.write_manifest(&m);
    }
}

fn truncate(s: &str, n: usize) -> String {
    if s.chars().count() <= n {
        s.to_string()
    } else {
        s.chars().take(n).collect::<String>() + "..."
    }
}

fn walk(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for e in fs::read_dir(dir)? {
        let p = e?.path();
        if p.is_dir() {
            out.extend(walk(&p)?);
        } else {
            out.push(p);
        }
    }
    Ok(out)
}
