use num::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::crookedness::pattern::{pattern_map, predicted_laps};
use crate::crookedness::{
    certify_map_crooked, crooked_perturb_with, exactness_certificate, fold_expand, PerturbOptions,
};
use crate::error::{Error, Result};
use crate::pl_tree::{n_map, PLMap, Tree};
use crate::scalar::{dyadic, q};
use crate::{QMap, Q};

use super::base::build_base_map;

/// How each stage turns the base map into a crooked map.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TowerStrategy {
    /// `fold_expand` followed by `crooked_perturb`, stage map `F^j`.
    #[default]
    Perturb,
    /// Recursive crooked zigzag `P = f̂ ∘ (-P/3)`.
    Pattern,
}

fn default_retry() -> u32 {
    8
}

fn default_strict() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TowerSpec {
    pub depth: usize,
    #[serde(with = "crate::json::vec_rat")]
    pub eps_schedule: Vec<Q>,
    #[serde(default = "default_retry")]
    pub retry_budget: u32,
    #[serde(default)]
    pub strategy: TowerStrategy,
    /// Abort on a stage map that is not certified crooked; otherwise the
    /// verdict is only recorded.
    #[serde(default = "default_strict")]
    pub strict: bool,
}

impl TowerSpec {
    pub fn new(eps_schedule: Vec<Q>) -> Self {
        TowerSpec { depth: eps_schedule.len(), eps_schedule, retry_budget: default_retry(), strategy: TowerStrategy::Perturb, strict: true }
    }

    pub fn validate(&self) -> Result<()> {
        if self.depth == 0 || self.depth > 8 {
            return Err(Error::Domain("depth must lie in 1..=8".into()));
        }
        if self.eps_schedule.len() < self.depth {
            return Err(Error::Domain(format!("{} schedule entries for depth {}", self.eps_schedule.len(), self.depth)));
        }
        let e = &self.eps_schedule;
        if e.iter().any(|x| *x <= Q::zero() || *x >= Q::one()) {
            return Err(Error::Domain("schedule entries must lie in (0, 1)".into()));
        }
        if e.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::Domain("schedule must strictly decrease".into()));
        }
        Ok(())
    }
}

/// One `(estpart)` requirement: `slope * gamma < eps` for a composed map.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub kind: String,
    pub from: usize,
    #[serde(with = "crate::json::rat")]
    pub slope: Q,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageCertificate {
    pub stage: usize,
    #[serde(with = "crate::json::rat")]
    pub requested_eps: Q,
    #[serde(with = "crate::json::rat")]
    pub eps: Q,
    #[serde(with = "crate::json::rat")]
    pub gamma: Q,
    /// Exactness iterate of the base map on whole arms.
    pub s: u32,
    /// Iterate of the perturbed map taken as the stage map.
    pub j: u32,
    pub detail: String,
    pub estimates: Vec<Estimate>,
    /// Base-map same-flattening deviation per level.
    #[serde(with = "crate::json::vec_rat")]
    pub base_deviation: Vec<Q>,
    /// Crookedness verdict of `f_{k,n}` at `eps`, per level.
    pub crooked: Vec<Value>,
    /// Exactness certificate of `f_{k,n}` at grid 1/16, per level.
    pub exact_n: Vec<Option<u32>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Tower {
    pub spec: TowerSpec,
    /// Schedule after tightening.
    pub eps: Vec<Q>,
    pub gamma: Vec<Q>,
    /// `maps[k][n - 1] = f_{k,n}`.
    pub maps: Vec<Vec<QMap>>,
    pub base_maps: Vec<Vec<QMap>>,
    pub g_maps: Vec<Vec<QMap>>,
    pub h_maps: Vec<Vec<QMap>>,
    pub certificates: Vec<StageCertificate>,
}

impl Tower {
    pub fn stages(&self) -> usize {
        self.maps.len()
    }

    pub fn levels(&self) -> u32 {
        self.spec.depth as u32
    }

    pub fn map(&self, k: usize, level: u32) -> &QMap {
        &self.maps[k][level as usize - 1]
    }

    pub fn base(&self, k: usize, level: u32) -> &QMap {
        &self.base_maps[k][level as usize - 1]
    }

    pub fn g(&self, k: usize, level: u32) -> &QMap {
        &self.g_maps[k][level as usize - 1]
    }

    /// `f̂_0, g_0, f̂_1, g_1, ...` at one level.
    pub fn refined_bonds(&self, level: u32) -> Vec<&QMap> {
        (0..self.stages()).flat_map(|k| [self.base(k, level), self.g(k, level)]).collect()
    }
}

/// Data of one stage on the level where it is constructed.
struct Seed {
    base: QMap,
    g: QMap,
    h: QMap,
    map: QMap,
    s: u32,
    j: u32,
    detail: String,
}

const COMPOSE_BUDGET: usize = 200_000;

/// Max slope of `maps[0] ∘ ... ∘ maps[last]`, from the exact composition when
/// it fits the budget and from the product of slopes otherwise.
fn composed_slope(maps: &[&QMap]) -> Q {
    let mut acc = (*maps.last().unwrap()).clone();
    for f in maps.iter().rev().skip(1) {
        if acc.compose_piece_estimate(f) > COMPOSE_BUDGET || f.compose_piece_estimate(&acc) > COMPOSE_BUDGET {
            return maps.iter().fold(Q::one(), |p, m| p * m.max_slope());
        }
        acc = match f.compose(&acc) {
            Ok(m) => m,
            Err(_) => return maps.iter().fold(Q::one(), |p, m| p * m.max_slope()),
        };
    }
    acc.max_slope()
}

/// `min_{i < m-1} L(2^{-m} diam, f_i ∘ ... ∘ f_{m-1})` at level 1.
pub fn schedule_bound(maps: &[&QMap], m: usize) -> Option<Q> {
    if m < 2 || maps.len() < m {
        return None;
    }
    let eps = q(2, 1) * dyadic::<Q>(m as u32);
    (0..m - 1)
        .map(|i| {
            let lam = composed_slope(&maps[i..m]);
            if lam.is_zero() {
                q(2, 1)
            } else {
                eps.clone() / lam
            }
        })
        .reduce(|a, b| if b < a { b } else { a })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScheduleEntry {
    pub m: usize,
    pub eps: Q,
    pub bound: Q,
    pub ok: bool,
}

/// Post-hoc check of the schedule inequality for every `m >= 2`.
pub fn schedule_check(tower: &Tower) -> Vec<ScheduleEntry> {
    let maps: Vec<&QMap> = (0..tower.stages()).map(|k| tower.map(k, 1)).collect();
    (2..tower.stages())
        .filter_map(|m| {
            schedule_bound(&maps, m).map(|bound| ScheduleEntry {
                m,
                eps: tower.eps[m].clone(),
                ok: tower.eps[m] < bound,
                bound,
            })
        })
        .collect()
}

/// Composed maps of `(estpart1)` and `(estpart2)` for stage `k`.
fn estimates(f: &[&QMap], g: &[&QMap], k: usize) -> Vec<(String, usize, Q)> {
    let mut out = Vec::new();
    for j in 0..k {
        out.push(("estpart1".to_string(), j, composed_slope(&f[j..k])));
        let mut chain: Vec<&QMap> = vec![g[j]];
        chain.extend_from_slice(&f[j + 1..k]);
        out.push(("estpart2".to_string(), j, composed_slope(&chain)));
    }
    out
}

fn perturb_stage(base: &QMap, s: u32, eps: &Q, retry_budget: u32) -> Result<Seed> {
    let fs = base.power(s, Some(COMPOSE_BUDGET))?;
    let fold = fold_expand(&fs, eps)?;
    let opts = PerturbOptions { beta_hint: Some(fold.expansion_beta.clone()), retry_budget, ..PerturbOptions::default() };
    let cp = crooked_perturb_with(&fold.map, eps, &opts)?;
    let j = cp.n;
    let prefix = base.power(s - 1, Some(COMPOSE_BUDGET))?;
    let tail = cp.map.power(j - 1, Some(COMPOSE_BUDGET))?;
    let g = prefix.compose(&fold.h)?.compose(&cp.g)?.compose(&tail)?;
    let map = cp.map.power(j, Some(COMPOSE_BUDGET))?;
    Ok(Seed {
        base: base.clone(),
        g,
        h: fold.h,
        map,
        s,
        j,
        detail: format!("fold eta {:?}, zigzag zeta {:?}, F^{j}", fold.eta, cp.zeta),
    })
}

/// Largest number of pattern laps tried per stage.
pub const PATTERN_LAP_BUDGET: f64 = 5_000.0;

fn pattern_stage(eps: &Q, retry_budget: u32) -> Result<Seed> {
    let mut m = q(4, 5) * eps.clone();
    let mut last = String::new();
    for _ in 0..retry_budget {
        let laps = predicted_laps(&m);
        if laps > PATTERN_LAP_BUDGET {
            return Err(Error::Budget(format!(
                "pattern with turn-back {m} needs {laps:.0} laps (budget {PATTERN_LAP_BUDGET}){last}"
            )));
        }
        let p = pattern_map(&m)?;
        match certify_map_crooked(&p, eps) {
            Ok(v) if v.is_crooked() => {
                let graph: Vec<(Q, Q)> =
                    p.signed_graph()?.into_iter().map(|(u, v)| (u, -v / q(3, 1))).collect();
                let g = PLMap::from_signed_graph(&graph)?;
                let base = n_map::<Q>();
                let map = base.compose(&g)?;
                if map != p {
                    return Err(Error::Verification("pattern factorization through the N-map fails".into()));
                }
                return Ok(Seed {
                    base,
                    g,
                    h: PLMap::identity(Tree::new(2)?),
                    map,
                    s: 1,
                    j: 1,
                    detail: format!("pattern turn-back {m}, {} laps", predicted_laps(&m)),
                });
            }
            Ok(_) => last = format!("; turn-back {m} not crooked"),
            Err(e) => last = format!("; turn-back {m}: {e}"),
        }
        m = m * q(9, 10);
    }
    Err(Error::Budget(format!("pattern strategy: retry budget exhausted{last}")))
}

/// Copies of the level-`from` map `f` on levels `1..=levels`: lifts above,
/// projections below.
fn spread(f: &QMap, from: u32, levels: u32) -> Result<Vec<QMap>> {
    let mut below = vec![f.clone()];
    for _ in 1..from {
        let next = below.last().unwrap().project_through_cover()?;
        below.push(next);
    }
    below.reverse();
    for _ in from..levels {
        let next = below.last().unwrap().lift_through_cover()?;
        below.push(next);
    }
    Ok(below)
}

/// Diagonal tower: stage `k` is crooked at `eps_k` on every level.
pub fn build_tower(spec: &TowerSpec) -> Result<Tower> {
    spec.validate()?;
    let depth = spec.depth;
    let levels = depth as u32;
    let mut tower = Tower {
        spec: spec.clone(),
        eps: Vec::new(),
        gamma: Vec::new(),
        maps: Vec::new(),
        base_maps: Vec::new(),
        g_maps: Vec::new(),
        h_maps: Vec::new(),
        certificates: Vec::new(),
    };
    for k in 0..depth {
        let requested = spec.eps_schedule[k].clone();
        let mut eps = requested.clone();
        if let Some(prev) = tower.eps.last() {
            if eps >= *prev {
                eps = prev.clone() / q(2, 1);
            }
        }
        let f1: Vec<&QMap> = (0..k).map(|i| tower.map(i, 1)).collect();
        let g1: Vec<&QMap> = (0..k).map(|i| tower.g(i, 1)).collect();
        if let Some(bound) = schedule_bound(&f1, k) {
            if eps >= bound {
                eps = bound / q(2, 1);
            }
        }
        let est = estimates(&f1, &g1, k);
        let gamma = match est.iter().map(|e| e.2.clone()).reduce(|a, b| if b > a { b } else { a }) {
            None => eps.clone(),
            Some(lam) if lam.is_zero() => eps.clone() / q(2, 1),
            Some(lam) => {
                let g = eps.clone() / (q(2, 1) * lam);
                if g < eps {
                    g
                } else {
                    eps.clone() / q(2, 1)
                }
            }
        };
        let estimates: Vec<Estimate> = est
            .into_iter()
            .map(|(kind, from, slope)| Estimate { ok: slope.clone() * gamma.clone() < eps, kind, from, slope })
            .collect();
        if let Some(bad) = estimates.iter().find(|e| !e.ok) {
            return Err(Error::Verification(format!("stage {k}: {} from {} fails for gamma {gamma}", bad.kind, bad.from)));
        }
        let mut contracts = Vec::new();
        for n in 1..=levels {
            contracts.push(build_base_map(&gamma, n)?);
        }
        let base_deviation = contracts.iter().map(|c| c.deviation.clone()).collect();
        let (seed, seed_level) = match spec.strategy {
            TowerStrategy::Perturb => {
                let top = contracts.last().unwrap();
                (perturb_stage(&top.map, top.exact_n, &eps, spec.retry_budget), levels)
            }
            TowerStrategy::Pattern => (pattern_stage(&eps, spec.retry_budget), 1),
        };
        let seed = seed.map_err(|e| stage_error(k, &eps, e))?;
        if seed.map != seed.base.compose(&seed.g)? {
            return Err(Error::Verification(format!("stage {k}: f != f_hat o g at level {seed_level}")));
        }
        let bases = spread(&seed.base, seed_level, levels)?;
        let gs = spread(&seed.g, seed_level, levels)?;
        let hs = spread(&seed.h, seed_level, levels)?;
        let mut maps = Vec::new();
        for n in 0..levels as usize {
            if n + 1 == seed_level as usize {
                maps.push(seed.map.clone());
            } else {
                maps.push(bases[n].compose(&gs[n])?);
            }
        }
        let mut crooked = Vec::new();
        let mut exact_n = Vec::new();
        for (n, f) in maps.iter().enumerate() {
            let v = match certify_map_crooked(f, &eps) {
                Ok(v) if v.is_crooked() => v.to_json(),
                Ok(v) if !spec.strict => v.to_json(),
                Err(e) if !spec.strict => serde_json::json!({ "status": "ERROR", "error": e.to_string() }),
                Ok(_) => return Err(Error::Verification(format!("stage {k}: f_{{{k},{}}} is not crooked at {eps}", n + 1))),
                Err(e) => return Err(stage_error(k, &eps, e)),
            };
            crooked.push(v);
            exact_n.push(exactness_certificate(f, 64, &q(1, 16)));
        }
        tower.certificates.push(StageCertificate {
            stage: k,
            requested_eps: requested,
            eps: eps.clone(),
            gamma: gamma.clone(),
            s: seed.s,
            j: seed.j,
            detail: seed.detail,
            estimates,
            base_deviation,
            crooked,
            exact_n,
        });
        tower.eps.push(eps);
        tower.gamma.push(gamma);
        tower.maps.push(maps);
        tower.base_maps.push(bases);
        tower.g_maps.push(gs);
        tower.h_maps.push(hs);
    }
    Ok(tower)
}

fn stage_error(k: usize, eps: &Q, e: Error) -> Error {
    let msg = format!("stage {k} at eps {eps}: {e}");
    match e {
        Error::Budget(_) => Error::Budget(msg),
        Error::Undecided(_) => Error::Undecided(msg),
        Error::Precondition(_) => Error::Precondition(msg),
        _ => Error::Verification(msg),
    }
}
