use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Subcommand};
use pseudoarc::report::Check;
use pseudoarc::tower_limit::{chain_cover_arc, load_tower, ChainCover};
use serde_json::{json, Value};

use crate::parse::{self, fixed6};
use crate::run::Run;

#[derive(Subcommand, Debug)]
pub enum ExportCmd {
    /// Nested chain covers of the arc, one row per eps.
    Svg(Svg),
    /// An entropy table (JSON with rows of n, count, estimate) as CSV.
    Csv(Csv),
}

#[derive(Args, Debug)]
pub struct Svg {
    /// Comma separated eps values.
    #[arg(long, conflicts_with = "tower")]
    pub eps: Option<String>,
    /// Tower directory; its schedule gives the eps values.
    #[arg(long)]
    pub tower: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct Csv {
    /// Table artifact written by an entropy command.
    pub artifact: PathBuf,
}

impl ExportCmd {
    pub fn name(&self) -> &'static str {
        match self {
            ExportCmd::Svg(_) => "svg",
            ExportCmd::Csv(_) => "csv",
        }
    }

    pub fn config(&self) -> Value {
        match self {
            ExportCmd::Svg(s) => json!({"eps": s.eps, "tower": s.tower.as_ref().map(|p| p.display().to_string())}),
            ExportCmd::Csv(c) => json!({"artifact": c.artifact.display().to_string()}),
        }
    }

    pub fn run(&self, run: &mut Run) -> Result<()> {
        match self {
            ExportCmd::Svg(s) => {
                let eps = match (&s.eps, &s.tower) {
                    (Some(e), None) => parse::rats(e)?,
                    (None, Some(t)) => load_tower(t)?.eps,
                    _ => bail!("give --eps or --tower"),
                };
                let covers = eps.iter().map(chain_cover_arc).collect::<pseudoarc::Result<Vec<_>>>()?;
                let svg = render(&covers);
                run.write_bytes("chains.svg", svg.as_bytes())?;
                for (e, c) in eps.iter().zip(&covers) {
                    run.check(Check::new(format!("chain at {e}"), c.is_chain() && c.mesh <= *e, format!("{} links, mesh {}", c.links.len(), c.mesh)));
                }
                run.note("links", covers.iter().map(|c| c.links.len()).collect::<Vec<_>>());
                Ok(())
            }
            ExportCmd::Csv(c) => {
                let text = std::fs::read_to_string(&c.artifact).with_context(|| c.artifact.display().to_string())?;
                if text.trim().is_empty() {
                    bail!("{} is empty", c.artifact.display());
                }
                let v: Value = serde_json::from_str(&text).context("table artifact is not JSON")?;
                let rows = v["rows"].as_array().filter(|r| !r.is_empty()).ok_or_else(|| anyhow::anyhow!("artifact has no rows"))?;
                let mut out = Vec::new();
                for r in rows {
                    let n = r["n"].as_u64().ok_or_else(|| anyhow::anyhow!("row without n"))?;
                    let count = r["count"].as_str().map(str::to_string).or_else(|| r["count"].as_u64().map(|c| c.to_string()));
                    let count = count.ok_or_else(|| anyhow::anyhow!("row without count"))?;
                    let e = r["estimate"].as_f64().ok_or_else(|| anyhow::anyhow!("row without estimate"))?;
                    out.push(vec![n.to_string(), count, format!("{e:.9}")]);
                }
                run.note("rows", out.len());
                run.write_table("table.csv", &["n", "count", "estimate"], &out)?;
                Ok(())
            }
        }
    }
}

const ROW: i64 = 12;

/// Links drawn in signed arc coordinates scaled by 100, alternate links offset.
fn render(covers: &[ChainCover]) -> String {
    let scale = pseudoarc::Q::from_integer(100.into());
    let h = ROW * covers.len() as i64 + 4;
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"-110 -2 220 {h}\" width=\"880\" height=\"{}\">\n",
        4 * h
    );
    for (row, c) in covers.iter().enumerate() {
        s += &format!("  <g class=\"chain\" data-mesh=\"{}\">\n", c.mesh);
        for (i, l) in c.links.iter().enumerate() {
            let y = ROW * row as i64 + if i % 2 == 0 { 0 } else { 3 };
            let x = fixed6(&(l.lo.clone() * scale.clone()));
            let w = fixed6(&((l.hi.clone() - l.lo.clone()) * scale.clone()));
            let fill = if i % 2 == 0 { "#4a78b5" } else { "#b5584a" };
            s += &format!("    <rect class=\"link\" x=\"{x}\" y=\"{y}\" width=\"{w}\" height=\"6\" fill=\"{fill}\" fill-opacity=\"0.5\"/>\n");
        }
        s += "  </g>\n";
    }
    s += "</svg>\n";
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quarter_has_seventeen_links() {
        let c = chain_cover_arc(&parse::rat("1/4").unwrap()).unwrap();
        let svg = render(&[c]);
        assert_eq!(svg.matches("class=\"link\"").count(), 17);
    }

    #[test]
    fn fixed_precision() {
        assert_eq!(fixed6(&parse::rat("1/3").unwrap()), "0.333333");
        assert_eq!(fixed6(&parse::rat("-2/3").unwrap()), "-0.666667");
        assert_eq!(fixed6(&parse::rat("5").unwrap()), "5.000000");
    }
}
