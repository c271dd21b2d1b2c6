use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Subcommand, ValueEnum};
use pseudoarc::crookedness::certify_map_crooked;
use pseudoarc::report::Check;
use pseudoarc::tower_limit::{build_tower, load_tower, save_tower, verify_tower, TowerSpec, TowerStrategy};
use serde_json::{json, Value};

use crate::parse;
use crate::run::Run;

#[derive(Subcommand, Debug)]
pub enum TowerCmd {
    /// Build a tower and save it under OUT/tower.
    Build(Build),
    /// Re-check a saved tower.
    Verify(Verify),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Strategy {
    Perturb,
    Pattern,
}

#[derive(Args, Debug)]
pub struct Build {
    /// Decreasing eps schedule, comma separated rationals.
    #[arg(long, default_value = "1/4,1/16,1/64")]
    pub eps: String,
    /// A TowerSpec JSON file; overrides --eps and --strategy.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Strategy::Perturb)]
    pub strategy: Strategy,
    /// Record crookedness verdicts instead of aborting on the first failure.
    #[arg(long)]
    pub lenient: bool,
    #[arg(long)]
    pub retry: Option<u32>,
}

#[derive(Args, Debug)]
pub struct Verify {
    /// Tower directory written by `tower build`.
    pub dir: PathBuf,
    /// Re-run certify_map_crooked on every stored map.
    #[arg(long)]
    pub recertify: bool,
}

impl TowerCmd {
    pub fn name(&self) -> &'static str {
        match self {
            TowerCmd::Build(_) => "build",
            TowerCmd::Verify(_) => "verify",
        }
    }

    pub fn config(&self) -> Value {
        match self {
            TowerCmd::Build(b) => json!({
                "eps": b.eps,
                "spec": b.spec.as_ref().map(|p| p.display().to_string()),
                "strategy": format!("{:?}", b.strategy).to_lowercase(),
                "lenient": b.lenient,
                "retry": b.retry,
            }),
            TowerCmd::Verify(v) => json!({"dir": v.dir.display().to_string(), "recertify": v.recertify}),
        }
    }

    pub fn run(&self, run: &mut Run) -> Result<()> {
        match self {
            TowerCmd::Build(b) => build(b, run),
            TowerCmd::Verify(v) => {
                let t = load_tower(&v.dir).with_context(|| format!("loading {}", v.dir.display()))?;
                run.note("stages", t.stages());
                run.checks(verify_tower(&t, v.recertify)?);
                Ok(())
            }
        }
    }
}

fn build(b: &Build, run: &mut Run) -> Result<()> {
    let mut spec = match &b.spec {
        Some(p) => serde_json::from_str::<TowerSpec>(&std::fs::read_to_string(p)?).context("tower spec")?,
        None => {
            let mut s = TowerSpec::new(parse::rats(&b.eps)?);
            s.strategy = match b.strategy {
                Strategy::Perturb => TowerStrategy::Perturb,
                Strategy::Pattern => TowerStrategy::Pattern,
            };
            s
        }
    };
    if b.lenient {
        spec.strict = false;
    }
    if let Some(r) = b.retry {
        spec.retry_budget = r;
    }
    spec.validate()?;
    run.write_json("spec.json", &spec)?;
    let t = build_tower(&spec)?;
    let dir = run.out().join("tower");
    save_tower(&t, &dir)?;
    run.adopt("tower")?;
    run.note("stages", t.stages());
    run.note("eps", t.eps.iter().map(|e| e.to_string()).collect::<Vec<_>>());
    run.checks(verify_tower(&t, false)?);
    Ok(())
}

#[derive(Args, Debug)]
pub struct CheckCrooked {
    /// Map JSON file, or one of tent, n, golden.
    #[arg(long)]
    pub map: String,
    #[arg(long)]
    pub eps: String,
}

impl CheckCrooked {
    pub fn config(&self) -> Value {
        json!({"map": self.map, "eps": self.eps})
    }

    pub fn run(&self, run: &mut Run) -> Result<()> {
        let f = parse::map(&self.map)?;
        let eps = parse::rat(&self.eps)?;
        let v = certify_map_crooked(&f, &eps)?;
        run.write_json("verdict.json", &v.to_json())?;
        run.note("status", v.status.as_str());
        run.check(Check::new(format!("crooked at {eps}"), v.is_crooked(), v.status.as_str()));
        Ok(())
    }
}
