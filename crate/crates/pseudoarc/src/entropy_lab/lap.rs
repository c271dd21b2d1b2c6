use std::collections::HashMap;

use num::{BigUint, One, Signed};

use crate::error::{Error, Result};
use crate::scalar::q;
use crate::{QMap, Q};

use super::bracket::{ln_big_up, log_spectral_bracket, EntropyInterval, Rows};
use super::sft::{BRACKET_WIDTH, MAX_ITER};

/// Distinct lap images tracked before giving up.
pub const INTERVAL_BUDGET: usize = 4096;

type Interval = (Q, Q);

/// Arc map in signed coordinates with its turning points.
struct ArcGraph {
    graph: Vec<(Q, Q)>,
    turns: Vec<Q>,
}

impl ArcGraph {
    fn new(f: &QMap) -> Result<Self> {
        let graph = f.signed_graph().map_err(|_| Error::Domain("lap counting is defined on the arc (2-arm tree)".into()))?;
        // direction of each segment; flat segments keep the previous direction
        let mut turns = Vec::new();
        let mut dir = 0i8;
        for w in graph.windows(2) {
            let d = (w[1].1.clone() - w[0].1.clone()).signum();
            let s = if d.is_positive() { 1 } else if d.is_negative() { -1 } else { 0 };
            if s != 0 {
                if dir != 0 && s != dir {
                    turns.push(w[0].0.clone());
                }
                dir = s;
            }
        }
        Ok(ArcGraph { graph, turns })
    }

    fn eval(&self, u: &Q) -> Q {
        let k = self.graph.partition_point(|(x, _)| x < u);
        if k < self.graph.len() && self.graph[k].0 == *u {
            return self.graph[k].1.clone();
        }
        let (u0, v0) = &self.graph[k - 1];
        let (u1, v1) = &self.graph[k];
        v0.clone() + (v1.clone() - v0.clone()) * (u.clone() - u0.clone()) / (u1.clone() - u0.clone())
    }

    /// Images of the monotone pieces of `f` on `[a, b]`.
    fn pieces(&self, (a, b): &Interval) -> Vec<Interval> {
        let mut cuts = vec![a.clone()];
        cuts.extend(self.turns.iter().filter(|t| *t > a && *t < b).cloned());
        cuts.push(b.clone());
        if a == b {
            cuts.truncate(1);
            let v = self.eval(a);
            return vec![(v.clone(), v)];
        }
        cuts.windows(2)
            .map(|w| {
                let (x, y) = (self.eval(&w[0]), self.eval(&w[1]));
                if x <= y { (x, y) } else { (y, x) }
            })
            .collect()
    }
}

/// Lap numbers of `f, f^2, ..., f^n` and the lap-image transfer structure.
#[derive(Clone, Debug)]
pub struct LapData {
    pub counts: Vec<BigUint>,
    pub intervals: Vec<(Q, Q)>,
    pub rows: Rows,
    /// Every tracked image has its pieces tracked too.
    pub closed: bool,
}

pub fn lap_data(f: &QMap, n: u32) -> Result<LapData> {
    if n == 0 {
        return Err(Error::Domain("lap count needs n >= 1".into()));
    }
    let g = ArcGraph::new(f)?;
    let mut index: HashMap<Interval, usize> = HashMap::new();
    let mut intervals: Vec<Interval> = Vec::new();
    let mut rows: Vec<Option<Vec<(usize, u64)>>> = Vec::new();
    let mut intern = |iv: Interval, intervals: &mut Vec<Interval>, rows: &mut Vec<Option<Vec<(usize, u64)>>>| -> Result<usize> {
        if let Some(&i) = index.get(&iv) {
            return Ok(i);
        }
        if intervals.len() >= INTERVAL_BUDGET {
            return Err(Error::Budget(format!("more than {INTERVAL_BUDGET} distinct lap images")));
        }
        index.insert(iv.clone(), intervals.len());
        intervals.push(iv);
        rows.push(None);
        Ok(intervals.len() - 1)
    };
    let start = intern((-Q::one(), Q::one()), &mut intervals, &mut rows)?;
    let mut c: HashMap<usize, BigUint> = HashMap::from([(start, BigUint::one())]);
    let mut counts = Vec::new();
    for _ in 0..n {
        let mut next: HashMap<usize, BigUint> = HashMap::new();
        let mut keys: Vec<usize> = c.keys().copied().collect();
        keys.sort();
        for i in keys {
            if rows[i].is_none() {
                let mut row: Vec<(usize, u64)> = Vec::new();
                for p in g.pieces(&intervals[i].clone()) {
                    let j = intern(p, &mut intervals, &mut rows)?;
                    match row.iter_mut().find(|(k, _)| *k == j) {
                        Some(e) => e.1 += 1,
                        None => row.push((j, 1)),
                    }
                }
                rows[i] = Some(row);
            }
            for &(j, w) in rows[i].as_ref().unwrap() {
                *next.entry(j).or_default() += &c[&i] * w;
            }
        }
        counts.push(next.values().sum());
        c = next;
    }
    let closed = rows.iter().all(|r| r.is_some());
    let rows = rows.into_iter().map(|r| r.unwrap_or_default()).collect();
    Ok(LapData { counts, intervals, rows, closed })
}

/// Maximal monotone pieces of `f^n`.
pub fn lap_count(f: &QMap, n: u32) -> Result<BigUint> {
    Ok(lap_data(f, n)?.counts.pop().unwrap())
}

/// Upper bound `min_k ln(lap(f^k)) / k`; the lower bound is the
/// Collatz–Wielandt bound of the lap-image transfer matrix when the images
/// close up, and 0 otherwise.
pub fn entropy_lap(f: &QMap, n_max: u32) -> Result<EntropyInterval> {
    if n_max < 4 {
        return Err(Error::Domain("entropy_lap needs n_max >= 4".into()));
    }
    let d = lap_data(f, n_max)?;
    let upper = d
        .counts
        .iter()
        .enumerate()
        .map(|(k, l)| {
            let v = ln_big_up(l) / (k + 1) as f64;
            if v > 0.0 {
                v.next_up()
            } else {
                v
            }
        })
        .fold(f64::INFINITY, f64::min);
    let mut flags = Vec::new();
    let (lower, upper) = if d.closed {
        let t = log_spectral_bracket(&d.rows, BRACKET_WIDTH, MAX_ITER);
        flags.extend(t.flags.iter().cloned());
        (t.lo().min(upper), upper.min(t.hi()))
    } else {
        flags.push(format!("{} lap images not closed under f: lower bound 0", d.intervals.len()));
        (0.0, upper)
    };
    let mut e = EntropyInterval::new(lower, upper);
    e.flags = flags;
    Ok(e)
}

/// `x -> 1/2 + x` on `[0, 1/2]`, `x -> 2 - 2x` on `[1/2, 1]`: a rational
/// Markov map whose partition `{[0,1/2], [1/2,1]}` has transitions `[[0,1],[1,1]]`.
pub fn golden_markov_map() -> QMap {
    crate::pl_tree::PLMap::from_signed_graph(&[(q(-1, 1), q(0, 1)), (q(0, 1), q(1, 1)), (q(1, 1), q(-1, 1))])
        .expect("golden map")
}
