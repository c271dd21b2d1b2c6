use num::{BigUint, One, ToPrimitive};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};

use crate::Q;

/// Certified bracket, natural log unit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyInterval {
    #[serde(with = "crate::json::rat")]
    pub lower: Q,
    #[serde(with = "crate::json::rat")]
    pub upper: Q,
    pub flags: Vec<String>,
}

impl EntropyInterval {
    pub fn new(lower: f64, upper: f64) -> Self {
        assert!(lower <= upper, "bracket [{lower}, {upper}]");
        EntropyInterval { lower: to_q(lower), upper: to_q(upper), flags: Vec::new() }
    }

    pub fn lo(&self) -> f64 {
        self.lower.to_f64().unwrap()
    }

    pub fn hi(&self) -> f64 {
        self.upper.to_f64().unwrap()
    }

    pub fn width(&self) -> f64 {
        (self.upper.clone() - self.lower.clone()).to_f64().unwrap()
    }

    pub fn contains(&self, x: f64) -> bool {
        let x = to_q(x);
        self.lower <= x && x <= self.upper
    }

    /// Distance from `x` to the bracket, zero inside.
    pub fn distance(&self, x: f64) -> f64 {
        if x < self.lo() {
            self.lo() - x
        } else if x > self.hi() {
            x - self.hi()
        } else {
            0.0
        }
    }

    pub fn midpoint(&self) -> f64 {
        ((self.lower.clone() + self.upper.clone()) / Q::from_integer(2.into())).to_f64().unwrap()
    }
}

fn to_q(x: f64) -> Q {
    Q::from_float(x).expect("finite bound")
}

/// Round-down and round-up natural logs, two ulps of slack around libm.
pub fn ln_down(x: f64) -> f64 {
    x.ln().next_down().next_down()
}

pub fn ln_up(x: f64) -> f64 {
    x.ln().next_up().next_up()
}

/// `ln x` for big integers.
pub fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    (x >> shift as usize).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

/// Upper bound on `ln x`; exactly 0 at 1.
pub fn ln_big_up(x: &BigUint) -> f64 {
    if x.is_one() {
        return 0.0;
    }
    let l = ln_big(x);
    l + 1e-12 * l.max(1.0)
}

/// `w / v` rounded outward to `f64`.
fn ratio_bounds(w: &BigUint, v: &BigUint) -> (f64, f64) {
    let q = (w << 64usize) / v;
    let scale = 2f64.powi(64);
    let lo = q.to_f64().unwrap().next_down() / scale;
    let hi = (q + 1u32).to_f64().unwrap().next_up() / scale;
    (lo, hi)
}

/// Weighted adjacency rows `i -> [(j, w_ij)]`.
pub type Rows = Vec<Vec<(usize, u64)>>;

/// Collatz–Wielandt bracket on the Perron root of an irreducible block,
/// iterating on `A + I` so that periodic blocks converge.
pub fn perron_bracket(rows: &Rows, log_width: f64, max_iter: usize) -> (f64, f64) {
    let n = rows.len();
    let mut v = vec![BigUint::one(); n];
    let mut best = (0.0f64, f64::INFINITY);
    for _ in 0..max_iter {
        let w: Vec<BigUint> = (0..n)
            .map(|i| rows[i].iter().fold(v[i].clone(), |s, &(j, c)| s + &v[j] * c))
            .collect();
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for i in 0..n {
            let (a, b) = ratio_bounds(&w[i], &v[i]);
            lo = lo.min(a);
            hi = hi.max(b);
        }
        best.0 = best.0.max((lo - 1.0).next_down());
        best.1 = best.1.min((hi - 1.0).next_up());
        if best.0 > 0.0 && ln_up(best.1) - ln_down(best.0) <= log_width {
            break;
        }
        let top = w.iter().map(|x| x.bits()).max().unwrap_or(0);
        v = if top > 512 {
            let s = (top - 256) as usize;
            w.into_iter().map(|x| (x >> s) + 1u32).collect()
        } else {
            w
        };
    }
    best
}

/// Strongly connected blocks carrying a cycle.
pub fn recurrent_blocks(rows: &Rows) -> Vec<Vec<usize>> {
    let mut g = DiGraph::<(), ()>::new();
    let nodes: Vec<_> = (0..rows.len()).map(|_| g.add_node(())).collect();
    for (i, r) in rows.iter().enumerate() {
        for &(j, c) in r {
            if c > 0 {
                g.add_edge(nodes[i], nodes[j], ());
            }
        }
    }
    let mut blocks: Vec<Vec<usize>> = tarjan_scc(&g)
        .into_iter()
        .map(|c| {
            let mut b: Vec<usize> = c.into_iter().map(|x| x.index()).collect();
            b.sort();
            b
        })
        .filter(|b| b.len() > 1 || rows[b[0]].iter().any(|&(j, c)| j == b[0] && c > 0))
        .collect();
    blocks.sort();
    blocks
}

/// Bracket on `ln λ(A)`; reducible matrices are bracketed on their
/// recurrent blocks and flagged.
pub fn log_spectral_bracket(rows: &Rows, log_width: f64, max_iter: usize) -> EntropyInterval {
    let blocks = recurrent_blocks(rows);
    let mut flags = Vec::new();
    let covered: usize = blocks.iter().map(|b| b.len()).sum();
    if blocks.len() != 1 || covered != rows.len() {
        flags.push(format!("reducible: {} recurrent blocks covering {covered} of {} states", blocks.len(), rows.len()));
    }
    if blocks.is_empty() {
        flags.push("no cycle: entropy 0".into());
        let mut e = EntropyInterval::new(0.0, 0.0);
        e.flags = flags;
        return e;
    }
    let (mut lo, mut hi) = (0.0f64, 0.0f64);
    for b in &blocks {
        let pos: std::collections::HashMap<usize, usize> = b.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let sub: Rows = b
            .iter()
            .map(|&i| rows[i].iter().filter_map(|&(j, c)| pos.get(&j).map(|&k| (k, c))).collect())
            .collect();
        let (a, z) = perron_bracket(&sub, log_width, max_iter);
        lo = lo.max(a);
        hi = hi.max(z);
    }
    // a recurrent block has Perron root at least 1
    let lower = if lo > 1.0 { ln_down(lo).max(0.0) } else { 0.0 };
    let upper = ln_up(hi).max(lower);
    let mut e = EntropyInterval::new(lower, upper);
    e.flags = flags;
    e
}
