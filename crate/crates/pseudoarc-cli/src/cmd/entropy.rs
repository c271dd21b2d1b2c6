use anyhow::{bail, Result};
use clap::{Args, Subcommand};
use pseudoarc::entropy_lab::{
    lap_data, ln_big, product_entropy_check, sft_with_entropy_budget, word_count, EntropyInterval, ProductReport, RealizedSft,
    STATE_BUDGET,
};
use pseudoarc::odometer_measure::build_k;
use pseudoarc::rees_scaffold::SkewModel;
use pseudoarc::report::Check;
use serde::Serialize;
use serde_json::{json, Value};

use crate::parse;
use crate::run::Run;

/// Certified width asked of every realized SFT bracket.
pub const WIDTH: f64 = 1e-6;

#[derive(Subcommand, Debug)]
pub enum EntropyCmd {
    /// Lap-count entropy of a PL interval map.
    Pl(Pl),
    /// Clocked SFT realizing a target entropy.
    Sft(SftArgs),
    /// Word-count entropy of the skew-product model.
    Model(Model),
}

#[derive(Args, Debug)]
pub struct Pl {
    /// Map JSON file, or one of tent, n, golden.
    #[arg(long)]
    pub map: String,
    #[arg(long, default_value_t = 16)]
    pub nmax: u32,
}

#[derive(Args, Debug)]
pub struct SftArgs {
    #[arg(long)]
    pub rate: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
    #[arg(long, default_value_t = STATE_BUDGET)]
    pub budget: usize,
}

#[derive(Args, Debug)]
pub struct Model {
    #[arg(long, default_value = "3,9,516")]
    pub kseq: String,
    #[arg(long)]
    pub rate: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
    /// Longest word length; counts are taken at powers of two up to it.
    #[arg(long, default_value_t = 4096)]
    pub nmax: usize,
}

#[derive(Serialize)]
pub struct Row {
    pub n: usize,
    pub count: String,
    pub estimate: f64,
}

#[derive(Serialize)]
pub struct Table {
    pub rows: Vec<Row>,
    pub bracket: EntropyInterval,
}

pub fn csv_rows(rows: &[Row]) -> Vec<Vec<String>> {
    rows.iter().map(|r| vec![r.n.to_string(), r.count.clone(), format!("{:.9}", r.estimate)]).collect()
}

pub fn lengths(nmax: usize) -> Vec<usize> {
    let mut ns: Vec<usize> = std::iter::successors(Some(1usize), |n| Some(n * 2)).take_while(|&n| n <= nmax).collect();
    if ns.last() != Some(&nmax) {
        ns.push(nmax);
    }
    ns
}

impl EntropyCmd {
    pub fn name(&self) -> &'static str {
        match self {
            EntropyCmd::Pl(_) => "pl",
            EntropyCmd::Sft(_) => "sft",
            EntropyCmd::Model(_) => "model",
        }
    }

    pub fn config(&self) -> Value {
        match self {
            EntropyCmd::Pl(p) => json!({"map": p.map, "nmax": p.nmax}),
            EntropyCmd::Sft(s) => json!({"rate": s.rate, "tol": s.tol, "budget": s.budget}),
            EntropyCmd::Model(m) => json!({"kseq": m.kseq, "rate": m.rate, "tol": m.tol, "nmax": m.nmax}),
        }
    }

    pub fn run(&self, run: &mut Run) -> Result<()> {
        match self {
            EntropyCmd::Pl(p) => {
                let f = parse::map(&p.map)?;
                let d = lap_data(&f, p.nmax)?;
                let bracket = pseudoarc::entropy_lab::entropy_lap(&f, p.nmax)?;
                let rows: Vec<Row> = d
                    .counts
                    .iter()
                    .enumerate()
                    .map(|(k, c)| Row { n: k + 1, count: c.to_string(), estimate: ln_big(c) / (k + 1) as f64 })
                    .collect();
                run.write_table("laps.csv", &["n", "count", "estimate"], &csv_rows(&rows))?;
                run.note("bracket", [bracket.lo(), bracket.hi()]);
                run.note("flags", &bracket.flags);
                run.check(Check::new("bracket ordered", bracket.lower <= bracket.upper, format!("width {:.3e}", bracket.width())));
                run.write_json("table.json", &Table { rows, bracket })?;
                Ok(())
            }
            EntropyCmd::Sft(s) => {
                let r = realize(s.rate, s.tol, s.budget, run)?;
                let rows = lengths(4096)
                    .into_iter()
                    .map(|n| {
                        let c = word_count(&r.sft, n)?;
                        Ok(Row { n, estimate: ln_big(&c) / n as f64, count: c.to_string() })
                    })
                    .collect::<pseudoarc::Result<Vec<_>>>()?;
                run.write_table("words.csv", &["n", "count", "estimate"], &csv_rows(&rows))?;
                run.write_json("table.json", &Table { rows, bracket: r.bracket.clone() })?;
                Ok(())
            }
            EntropyCmd::Model(m) => {
                let ks = parse::kseq(&m.kseq)?;
                let kc = build_k(&ks, ks.len() - 1)?;
                let r = realize(m.rate, m.tol, STATE_BUDGET, run)?;
                let model = pseudoarc::rees_scaffold::model_system(&kc, &r.sft)?;
                product(&model, m.rate, m.nmax, run)?;
                Ok(())
            }
        }
    }
}

/// `sft_with_entropy` plus its certificate checks.
pub fn realize(rate: f64, tol: f64, budget: usize, run: &mut Run) -> Result<RealizedSft> {
    if !(tol > 0.0) {
        bail!("tolerance must be positive");
    }
    let r = sft_with_entropy_budget(rate, tol, budget)?;
    run.write_json("sft.json", &r)?;
    run.note("sft", json!({"m": r.m, "n": r.n, "states": r.states, "achieved": r.achieved}));
    run.note("sft_bracket", [r.bracket.lo(), r.bracket.hi()]);
    run.check(Check::new("sft rate", (r.achieved - rate).abs() <= tol, format!("ln({})/{} = {:.9} for r = {rate}", r.m, r.n, r.achieved)));
    run.check(Check::new(
        "sft bracket",
        r.bracket.distance(rate) <= tol && r.bracket.width() <= WIDTH,
        format!("[{:.12}, {:.12}], width {:.2e}", r.bracket.lo(), r.bracket.hi(), r.bracket.width()),
    ));
    Ok(r)
}

/// Product entropy check over word lengths up to `nmax`, with the final
/// estimate compared against `rate`.
pub fn product(model: &SkewModel, rate: f64, nmax: usize, run: &mut Run) -> Result<ProductReport> {
    let rep = product_entropy_check(model, &lengths(nmax), 0.02)?;
    let rows: Vec<Row> =
        rep.rows.iter().map(|r| Row { n: r.n, count: r.product_words.to_string(), estimate: r.product_estimate }).collect();
    run.write_table("product.csv", &["n", "count", "estimate"], &csv_rows(&rows))?;
    run.write_json("product.json", &rep)?;
    let last = rep.last();
    run.note("estimate", last.product_estimate);
    run.note("fiber_bracket", [rep.fiber_entropy.lo(), rep.fiber_entropy.hi()]);
    run.checks(rep.checks.iter().cloned());
    run.check(Check::new(
        "final estimate",
        (last.product_estimate - rate).abs() <= 0.05,
        format!("{:.6} at n = {} against r = {rate}", last.product_estimate, last.n),
    ));
    Ok(rep)
}
