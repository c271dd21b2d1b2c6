use std::fs;
use std::path::Path;

use serde_json::json;

use crate::crookedness::certify_map_crooked;
use crate::error::{Error, Result};
use crate::json::rat_from_json;
use crate::pl_tree::{map_from_str, map_to_string, PLMap};
use crate::{QMap, Q};

use super::build::{schedule_check, StageCertificate, Tower, TowerSpec};

pub use crate::report::Check;

fn check(out: &mut Vec<Check>, name: String, ok: bool, detail: impl Into<String>) {
    out.push(Check { name, ok, detail: detail.into() });
}

/// Every stored invariant; crookedness is re-certified when `recertify`.
pub fn verify_tower(t: &Tower, recertify: bool) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let decreasing = t.eps.windows(2).all(|w| w[1] < w[0]) && t.eps.iter().all(|e| *e > Q::from_integer(0.into()));
    check(&mut out, "schedule decreasing".into(), decreasing, format!("{:?}", t.eps.iter().map(|e| e.to_string()).collect::<Vec<_>>()));
    for k in 0..t.stages() {
        for n in 1..=t.levels() {
            let f = t.map(k, n);
            check(&mut out, format!("equivariance f_{k}_{n}"), f.equivariance_check(), "");
            check(&mut out, format!("equivariance fhat_{k}_{n}"), t.base(k, n).equivariance_check(), "");
            check(&mut out, format!("equivariance g_{k}_{n}"), t.g(k, n).equivariance_check(), "");
            let fac = t.base(k, n).compose(t.g(k, n))? == *f;
            check(&mut out, format!("factorization f_{k}_{n}"), fac, "");
            if n < t.levels() {
                let up = t.map(k, n + 1);
                let p = PLMap::<Q>::cover_project(up.dom())?;
                let ok = p.compose(up)? == f.compose(&p)?;
                check(&mut out, format!("commutation f_{k}_{n}"), ok, "");
            }
            if recertify {
                let detail;
                let ok = match certify_map_crooked(f, &t.eps[k]) {
                    Ok(v) => {
                        detail = v.status.as_str().to_string();
                        v.is_crooked()
                    }
                    Err(e) => {
                        detail = e.to_string();
                        false
                    }
                };
                check(&mut out, format!("crooked f_{k}_{n} at {}", t.eps[k]), ok, detail);
            }
        }
        for e in &t.certificates[k].estimates {
            let ok = e.slope.clone() * t.gamma[k].clone() < t.eps[k];
            check(&mut out, format!("{} stage {k} from {}", e.kind, e.from), ok, format!("slope {}", e.slope));
        }
    }
    for s in schedule_check(t) {
        check(&mut out, format!("schedule m={}", s.m), s.ok, format!("eps {} < bound {}", s.eps, s.bound));
    }
    Ok(out)
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// `spec.json`, `maps/{f,fhat,g,h}_{k}_{n}.json` and `certificates.json`.
pub fn save_tower(t: &Tower, dir: &Path) -> Result<()> {
    let maps = dir.join("maps");
    fs::create_dir_all(&maps).map_err(|e| Error::Parse(format!("{}: {e}", maps.display())))?;
    let spec = serde_json::to_string_pretty(&t.spec).map_err(|e| Error::Parse(e.to_string()))?;
    write(&dir.join("spec.json"), &spec)?;
    for k in 0..t.stages() {
        for n in 0..t.levels() as usize {
            let name = |p: &str| maps.join(format!("{p}_{k}_{}.json", n + 1));
            write(&name("f"), &map_to_string(&t.maps[k][n]))?;
            write(&name("fhat"), &map_to_string(&t.base_maps[k][n]))?;
            write(&name("g"), &map_to_string(&t.g_maps[k][n]))?;
            write(&name("h"), &map_to_string(&t.h_maps[k][n]))?;
        }
    }
    let certs = json!({
        "eps": t.eps.iter().map(crate::json::rat_to_json).collect::<Vec<_>>(),
        "gamma": t.gamma.iter().map(crate::json::rat_to_json).collect::<Vec<_>>(),
        "stages": t.certificates,
    });
    let certs = serde_json::to_string_pretty(&certs).map_err(|e| Error::Parse(e.to_string()))?;
    write(&dir.join("certificates.json"), &certs)
}

pub fn load_tower(dir: &Path) -> Result<Tower> {
    let spec: TowerSpec = serde_json::from_str(&read(&dir.join("spec.json"))?).map_err(|e| Error::Parse(e.to_string()))?;
    let certs: serde_json::Value =
        serde_json::from_str(&read(&dir.join("certificates.json"))?).map_err(|e| Error::Parse(e.to_string()))?;
    let rats = |key: &str| -> Result<Vec<Q>> {
        certs[key].as_array().ok_or_else(|| Error::Parse(format!("certificates.json lacks {key}")))?.iter().map(rat_from_json).collect()
    };
    let eps = rats("eps")?;
    let gamma = rats("gamma")?;
    let certificates: Vec<StageCertificate> =
        serde_json::from_value(certs["stages"].clone()).map_err(|e| Error::Parse(e.to_string()))?;
    let stages = eps.len();
    let load = |p: &str| -> Result<Vec<Vec<QMap>>> {
        (0..stages)
            .map(|k| {
                (1..=spec.depth).map(|n| map_from_str(&read(&dir.join("maps").join(format!("{p}_{k}_{n}.json")))?)).collect()
            })
            .collect()
    };
    Ok(Tower {
        maps: load("f")?,
        base_maps: load("fhat")?,
        g_maps: load("g")?,
        h_maps: load("h")?,
        spec,
        eps,
        gamma,
        certificates,
    })
}
