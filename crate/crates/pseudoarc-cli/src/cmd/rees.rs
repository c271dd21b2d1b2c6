use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Subcommand};
use num::BigUint;
use pseudoarc::odometer_measure::{build_k, KConstruction};
use pseudoarc::rees_scaffold::{compatible, family_at, q_iterable_verdict, verify_families, OrbitFamily, RectangleFamily, CROSS_CHECK};
use pseudoarc::report::Check;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::parse;
use crate::run::Run;

#[derive(Subcommand, Debug)]
pub enum ReesCmd {
    /// Generate the families and check the A-conditions.
    Generate(Generate),
    /// Re-verify families saved by `rees generate`.
    Check(CheckDir),
}

#[derive(Args, Debug)]
pub struct Generate {
    #[arg(long, default_value = "3,9,516")]
    pub kseq: String,
    #[arg(long, default_value_t = 2)]
    pub depth: usize,
}

#[derive(Args, Debug)]
pub struct CheckDir {
    pub dir: PathBuf,
}

#[derive(Serialize, Deserialize)]
pub struct Saved {
    pub k_seq: Vec<u32>,
    pub depth: usize,
    pub families: Vec<OrbitFamily>,
}

impl ReesCmd {
    pub fn name(&self) -> &'static str {
        match self {
            ReesCmd::Generate(_) => "generate",
            ReesCmd::Check(_) => "check",
        }
    }

    pub fn config(&self) -> Value {
        match self {
            ReesCmd::Generate(g) => json!({"kseq": g.kseq, "depth": g.depth}),
            ReesCmd::Check(c) => json!({"dir": c.dir.display().to_string()}),
        }
    }

    pub fn run(&self, run: &mut Run) -> Result<()> {
        match self {
            ReesCmd::Generate(g) => {
                let ks = parse::kseq(&g.kseq)?;
                let kc = build_k(&ks, ks.len() - 1)?;
                generate(&kc, g.depth, run).map(|_| ())
            }
            ReesCmd::Check(c) => check(c, run),
        }
    }
}

/// Families at depths `0..=depth`, saved with their explicit form when small.
pub fn generate(kc: &KConstruction, depth: usize, run: &mut Run) -> Result<Vec<OrbitFamily>> {
    if let Some(d) = &kc.degenerate {
        bail!("degenerate construction: {d}");
    }
    if depth > kc.depth {
        bail!("construction has depth {}, asked for {depth}", kc.depth);
    }
    let fams = (0..=depth).map(|j| family_at(kc, j)).collect::<pseudoarc::Result<Vec<_>>>()?;
    let saved = Saved { k_seq: kc.k_seq.clone(), depth, families: fams.clone() };
    run.write_json("families.json", &saved)?;
    for (j, f) in fams.iter().enumerate() {
        if f.len()? <= BigUint::from(CROSS_CHECK) {
            run.write_json(&format!("rectangles/E_{j}.json"), &f.expand()?)?;
        }
        run.note(&format!("size E_{j}"), f.len()?.to_string());
    }
    let checks = verify_families(kc, &fams)?;
    run.write_json("report.json", &checks)?;
    run.checks(checks);
    Ok(fams)
}

fn check(c: &CheckDir, run: &mut Run) -> Result<()> {
    let p = c.dir.join("families.json");
    let saved: Saved = serde_json::from_str(&std::fs::read_to_string(&p).with_context(|| p.display().to_string())?)?;
    let kc = build_k(&saved.k_seq, saved.k_seq.len() - 1)?;
    run.note("k_seq", &saved.k_seq);
    run.checks(verify_families(&kc, &saved.families)?);
    let mut explicit: Vec<Option<RectangleFamily>> = Vec::new();
    for (j, f) in saved.families.iter().enumerate() {
        let rp = c.dir.join(format!("rectangles/E_{j}.json"));
        if !rp.exists() {
            explicit.push(None);
            continue;
        }
        let e: RectangleFamily = serde_json::from_str(&std::fs::read_to_string(&rp)?)?;
        run.check(Check::new(format!("rectangles E_{j} match family"), f.expand()? == e, rp.display().to_string()));
        let v = q_iterable_verdict(&e, j + 1)?;
        run.check(Check::new(format!("explicit {}-iterable E_{j}", j + 1), v.ok, v.detail));
        explicit.push(Some(e));
    }
    for j in 1..explicit.len() {
        if let (Some(f), Some(e)) = (&explicit[j], &explicit[j - 1]) {
            let cmp = compatible(f, e, j)?;
            let detail = match cmp.failing_item() {
                Some(i) => format!("item ({i}): {}", cmp.items[i - 1].detail),
                None => "all four items".into(),
            };
            run.check(Check::new(format!("explicit compatibility n={j}"), cmp.ok(), detail));
        }
    }
    Ok(())
}
