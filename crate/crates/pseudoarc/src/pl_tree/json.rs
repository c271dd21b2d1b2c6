use num::rational::BigRational;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::json::{rat_from_json, rat_to_json};
use crate::pl_tree::map::PLMap;
use crate::pl_tree::tree::{Tree, TreePoint};

/// `{"arms": m, "breakpoints": [[[t, [arm, r]], ...] per arm]}`; the codomain
/// arm count is written only when it differs from the domain.
pub fn map_to_json(f: &PLMap<BigRational>) -> Value {
    let bps: Vec<Value> = f
        .arm_lists()
        .iter()
        .map(|l| {
            Value::Array(
                l.iter()
                    .map(|(t, p)| json!([rat_to_json(t), [p.arm, rat_to_json(&p.radius)]]))
                    .collect(),
            )
        })
        .collect();
    let mut v = json!({"arms": f.dom().arms(), "breakpoints": bps});
    if f.cod() != f.dom() {
        v["codomain_arms"] = json!(f.cod().arms());
    }
    v
}

pub fn map_from_json(v: &Value) -> Result<PLMap<BigRational>> {
    let arms = v["arms"].as_u64().ok_or_else(|| Error::Parse("missing \"arms\"".into()))? as usize;
    let cod_arms = v.get("codomain_arms").and_then(Value::as_u64).map(|x| x as usize).unwrap_or(arms);
    let lists = v["breakpoints"].as_array().ok_or_else(|| Error::Parse("missing \"breakpoints\"".into()))?;
    let mut out = Vec::with_capacity(lists.len());
    for l in lists {
        let l = l.as_array().ok_or_else(|| Error::Parse("breakpoint list must be an array".into()))?;
        let mut pts = Vec::with_capacity(l.len());
        for e in l {
            let bad = || Error::Parse(format!("bad breakpoint {e}"));
            let e = e.as_array().filter(|a| a.len() == 2).ok_or_else(bad)?;
            let img = e[1].as_array().filter(|a| a.len() == 2).ok_or_else(bad)?;
            let arm = img[0].as_u64().ok_or_else(bad)? as usize;
            pts.push((rat_from_json(&e[0])?, TreePoint::new(arm, rat_from_json(&img[1])?)));
        }
        out.push(pts);
    }
    PLMap::new(Tree::new(arms)?, Tree::new(cod_arms)?, out)
}

pub fn map_to_string(f: &PLMap<BigRational>) -> String {
    serde_json::to_string_pretty(&map_to_json(f)).expect("json")
}

pub fn map_from_str(s: &str) -> Result<PLMap<BigRational>> {
    let v: Value = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    map_from_json(&v)
}
