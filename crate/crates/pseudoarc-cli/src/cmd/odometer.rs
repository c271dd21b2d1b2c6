use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Subcommand};
use pseudoarc::odometer_measure::{build_k, check_lemma51, direct_filter_measure, inclusion_exclusion_measure, measure_lower_bound, KConstruction};
use pseudoarc::report::Check;
use serde_json::{json, Value};

use crate::parse;
use crate::run::Run;

#[derive(Subcommand, Debug)]
pub enum OdometerCmd {
    /// Build the truncated K and check its lemma properties.
    BuildK(BuildK),
    /// Rebuild K from a saved k.json and compare.
    Verify(VerifyK),
}

#[derive(Args, Debug)]
pub struct BuildK {
    #[arg(long, default_value = "3,9,516")]
    pub kseq: String,
    #[arg(long)]
    pub depth: Option<usize>,
}

#[derive(Args, Debug)]
pub struct VerifyK {
    /// Directory holding k.json.
    pub dir: PathBuf,
}

impl OdometerCmd {
    pub fn name(&self) -> &'static str {
        match self {
            OdometerCmd::BuildK(_) => "build-k",
            OdometerCmd::Verify(_) => "verify",
        }
    }

    pub fn config(&self) -> Value {
        match self {
            OdometerCmd::BuildK(b) => json!({"kseq": b.kseq, "depth": b.depth}),
            OdometerCmd::Verify(v) => json!({"dir": v.dir.display().to_string()}),
        }
    }

    pub fn run(&self, run: &mut Run) -> Result<()> {
        match self {
            OdometerCmd::BuildK(b) => {
                let ks = parse::kseq(&b.kseq)?;
                let depth = b.depth.unwrap_or(ks.len().saturating_sub(1));
                let kc = build_k(&ks, depth)?;
                run.write_json("k.json", &kc)?;
                report(&kc, run)
            }
            OdometerCmd::Verify(v) => {
                let p = v.dir.join("k.json");
                let kc: KConstruction = serde_json::from_str(&std::fs::read_to_string(&p).with_context(|| p.display().to_string())?)?;
                let fresh = build_k(&kc.k_seq, kc.depth)?;
                run.check(Check::new("stored K matches rebuild", fresh == kc, "k.json against build_k(k_seq, depth)"));
                report(&kc, run)
            }
        }
    }
}

/// Lemma checks plus the two independent measure routines.
pub fn report(kc: &KConstruction, run: &mut Run) -> Result<()> {
    run.note("k_seq", &kc.k_seq);
    run.note("measure", kc.measure.to_string());
    run.note("s_seq", kc.s_seq.iter().map(|s| s.to_string()).collect::<Vec<_>>());
    if let Some(d) = &kc.degenerate {
        run.note("degenerate", d);
    }
    let r = check_lemma51(kc)?;
    let direct = direct_filter_measure(&kc.k_seq, kc.depth);
    let ie = inclusion_exclusion_measure(&kc.k_seq, kc.depth)?;
    match direct {
        Ok(d) => run.check(Check::new("measure routines agree", d == ie && ie == kc.measure, format!("direct {d}, inclusion-exclusion {ie}"))),
        Err(e) => run.check(Check::new("measure routines agree", ie == kc.measure, format!("inclusion-exclusion {ie}; direct filter skipped: {e}"))),
    }
    let b = measure_lower_bound(&kc.k_seq, kc.depth)?;
    run.note("displayed_bound", b.bound.to_string());
    run.write_json("lemma.json", &r)?;
    run.checks(r.checks);
    Ok(())
}
