use std::collections::BTreeSet;

use num::bigint::BigInt;
use num::BigUint;
use petgraph::algo::toposort;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::odometer_measure::residue::reduce;

use super::rect::{Rectangle, RectangleFamily};

/// Decision with the reason it went the way it did.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub ok: bool,
    pub detail: String,
}

impl Verdict {
    fn yes(detail: impl Into<String>) -> Self {
        Verdict { ok: true, detail: detail.into() }
    }

    fn no(detail: impl Into<String>) -> Self {
        Verdict { ok: false, detail: detail.into() }
    }
}

/// Witness pair for the first failure of `q`-iterability, if any.
pub fn q_iterable_verdict(e: &RectangleFamily, q: usize) -> Result<Verdict> {
    let mut its: Vec<(usize, i64, Rectangle)> = Vec::new();
    for (i, x) in e.rectangles.iter().enumerate() {
        for k in -(q as i64)..=q as i64 {
            its.push((i, k, x.iterate(k)?));
        }
    }
    for a in 0..its.len() {
        for b in a + 1..its.len() {
            let (x, y) = (&its[a].2, &its[b].2);
            if x.meets(y)? && !x.same(y)? {
                return Ok(Verdict::no(format!(
                    "R^{}(X_{}) and R^{}(X_{}) meet without being equal",
                    its[a].1, its[a].0, its[b].1, its[b].0
                )));
            }
        }
    }
    Ok(Verdict::yes(format!("{} iterates pairwise equal or disjoint", its.len())))
}

pub fn q_iterable(e: &RectangleFamily, q: usize) -> Result<bool> {
    Ok(q_iterable_verdict(e, q)?.ok)
}

/// `𝒢(ℰ^n)`: vertices `ℰ^n`, an edge `X -> Y` iff `R(X) = Y`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterationGraph {
    pub vertices: Vec<Rectangle>,
    pub edges: Vec<(usize, usize)>,
    pub acyclic: bool,
    /// Vertices in topological order when acyclic.
    pub order: Vec<usize>,
}

impl IterationGraph {
    pub fn out_degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.0 == v).count()
    }
}

pub fn build_graph(e: &RectangleFamily, n: usize) -> Result<IterationGraph> {
    let v = q_iterable_verdict(e, n.max(1))?;
    if !v.ok {
        return Err(Error::Precondition(format!("family is not {}-iterable: {}", n.max(1), v.detail)));
    }
    let vertices = e.iterates(n)?.rectangles;
    let mut edges = Vec::new();
    for (i, x) in vertices.iter().enumerate() {
        let y = x.iterate(1)?;
        for (j, z) in vertices.iter().enumerate() {
            if z.same(&y)? {
                edges.push((i, j));
                break;
            }
        }
    }
    let mut g = DiGraph::<(), ()>::new();
    let nodes: Vec<_> = vertices.iter().map(|_| g.add_node(())).collect();
    for &(a, b) in &edges {
        g.add_edge(nodes[a], nodes[b], ());
    }
    let (acyclic, order) = match toposort(&g, None) {
        Ok(o) => (true, o.into_iter().map(|x| x.index()).collect()),
        Err(_) => (false, Vec::new()),
    };
    Ok(IterationGraph { vertices, edges, acyclic, order })
}

/// `ℱ` refines `ℰ`, both items decided with the first failing pair reported.
pub fn refines_verdict(f: &RectangleFamily, e: &RectangleFamily) -> Result<Verdict> {
    for (i, x) in e.rectangles.iter().enumerate() {
        let mut found = false;
        for y in &f.rectangles {
            if y.inside(x)? {
                found = true;
                break;
            }
        }
        if !found {
            return Ok(Verdict::no(format!("(1) element {i} of E ({}) contains no element of F", x.cube.id())));
        }
    }
    for (i, x) in e.rectangles.iter().enumerate() {
        for (j, y) in f.rectangles.iter().enumerate() {
            if y.meets(x)? && !y.inside(x)? {
                return Ok(Verdict::no(format!("(2) F_{j} ({}) meets E_{i} ({}) without lying inside", y.cube.id(), x.cube.id())));
            }
        }
    }
    Ok(Verdict::yes(format!("{} x {} pairs", e.len(), f.len())))
}

pub fn refines(f: &RectangleFamily, e: &RectangleFamily) -> Result<bool> {
    Ok(refines_verdict(f, e)?.ok)
}

/// Items of "ℱ is compatible with ℰ for q iterates".
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Compatibility {
    pub q: usize,
    pub items: Vec<Verdict>,
}

impl Compatibility {
    pub fn ok(&self) -> bool {
        self.items.iter().all(|v| v.ok)
    }

    /// First failing item, numbered from 1.
    pub fn failing_item(&self) -> Option<usize> {
        self.items.iter().position(|v| !v.ok).map(|i| i + 1)
    }
}

pub fn compatible(f: &RectangleFamily, e: &RectangleFamily, q: usize) -> Result<Compatibility> {
    let mut items = vec![q_iterable_verdict(e, q)?, q_iterable_verdict(f, q + 1)?];
    let bits = f.max_bits().max(e.max_bits());
    let (sf, se) = (f.realization(bits)?, e.realization(bits)?);
    let fq = f.iterates(q + 1)?;
    let eq = e.iterates(q)?;
    items.push(if !sf.is_subset(&se) {
        Verdict::no("realization of F is not inside that of E")
    } else {
        let r = refines_verdict(&fq, &eq)?;
        Verdict { ok: r.ok, detail: format!("F^{} refines E^{q}: {}", q + 1, r.detail) }
    });
    let sfq = fq.realization(bits)?;
    let shift = |s: &BTreeSet<BigUint>, k: i64| -> BTreeSet<BigUint> {
        s.iter().map(|x| reduce(&(BigInt::from(x.clone()) + k), bits)).collect()
    };
    let mut v4 = Verdict::yes(format!("|k| <= {q}"));
    for k in -(q as i64)..=q as i64 {
        let lhs: BTreeSet<_> = sfq.intersection(&shift(&se, k)).cloned().collect();
        if lhs != shift(&sf, k) {
            v4 = Verdict::no(format!("k = {k}: s(F^{}) ∩ R^k(s(E)) differs from R^k(s(F))", q + 1));
            break;
        }
    }
    items.push(v4);
    Ok(Compatibility { q, items })
}
