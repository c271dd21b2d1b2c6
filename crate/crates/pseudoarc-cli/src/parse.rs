use std::path::Path;

use anyhow::{bail, Context, Result};
use pseudoarc::pl_tree::{map_from_str, n_map, tent};
use pseudoarc::{QMap, Q};

pub fn rat(s: &str) -> Result<Q> {
    s.trim().parse::<Q>().map_err(|e| anyhow::anyhow!("bad rational {s:?}: {e}"))
}

pub fn rats(s: &str) -> Result<Vec<Q>> {
    s.split(',').map(rat).collect()
}

pub fn kseq(s: &str) -> Result<Vec<u32>> {
    s.split(',').map(|t| t.trim().parse::<u32>().with_context(|| format!("bad k_seq entry {t:?}"))).collect()
}

/// A map file in the JSON schema, or one of the built-in names.
pub fn map(spec: &str) -> Result<QMap> {
    let p = Path::new(spec);
    if p.exists() {
        let s = std::fs::read_to_string(p)?;
        return map_from_str(&s).with_context(|| format!("reading map {spec}"));
    }
    match spec {
        "tent" => Ok(tent::<Q>()),
        "n" => Ok(n_map::<Q>()),
        "golden" => Ok(pseudoarc::entropy_lab::golden_markov_map()),
        _ => bail!("{spec}: no such file and not a built-in map (tent, n, golden)"),
    }
}

/// Exact rational rounded to six decimals.
pub fn fixed6(x: &Q) -> String {
    let scaled = (x.clone() * Q::from_integer(1_000_000.into())).round().to_integer();
    let neg = scaled < 0.into();
    let a = if neg { -scaled } else { scaled };
    let (i, f) = (a.clone() / 1_000_000, a % 1_000_000);
    format!("{}{i}.{f:06}", if neg { "-" } else { "" })
}
