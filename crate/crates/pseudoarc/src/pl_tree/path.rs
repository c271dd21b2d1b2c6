//! Breakpoint lists `(t, image)` shared by map arms and parametrized paths.
//!
//! A list is canonical when parameters strictly increase, every segment stays
//! on one closed arm of the target, and no two adjacent segments are
//! collinear.

use crate::error::{Error, Result};
use crate::pl_tree::subtree::Subtree;
use crate::pl_tree::tree::TreePoint;
use crate::scalar::Scalar;

pub type Breaks<S> = Vec<(S, TreePoint<S>)>;

/// Arm carrying the segment from `p` to `q`.
pub fn seg_arm<S: Scalar>(p: &TreePoint<S>, q: &TreePoint<S>) -> usize {
    if !p.is_branch() {
        p.arm
    } else {
        q.arm
    }
}

fn lerp<S: Scalar>(t0: &S, r0: &S, t1: &S, r1: &S, t: &S) -> S {
    r0.clone() + (r1.clone() - r0.clone()) * (t.clone() - t0.clone()) / (t1.clone() - t0.clone())
}

/// Point on the canonical segment `(t0, p0) -- (t1, p1)` at parameter `t`.
pub fn interp<S: Scalar>(t0: &S, p0: &TreePoint<S>, t1: &S, p1: &TreePoint<S>, t: &S) -> TreePoint<S> {
    if t == t0 {
        return p0.clone();
    }
    if t == t1 {
        return p1.clone();
    }
    TreePoint::new(seg_arm(p0, p1), lerp(t0, &p0.radius, t1, &p1.radius, t))
}

/// Index `i` with `pts[i].0 <= t <= pts[i+1].0`.
pub fn locate<S: Scalar>(pts: &[(S, TreePoint<S>)], t: &S) -> usize {
    let k = pts.partition_point(|(s, _)| s <= t);
    k.saturating_sub(1).min(pts.len() - 2)
}

pub fn eval_path<S: Scalar>(pts: &[(S, TreePoint<S>)], t: &S) -> TreePoint<S> {
    let i = locate(pts, t);
    interp(&pts[i].0, &pts[i].1, &pts[i + 1].0, &pts[i + 1].1, t)
}

fn collinear<S: Scalar>(a: &(S, TreePoint<S>), b: &(S, TreePoint<S>), c: &(S, TreePoint<S>)) -> bool {
    if seg_arm(&a.1, &b.1) != seg_arm(&b.1, &c.1) {
        return false;
    }
    let lhs = (b.1.radius.clone() - a.1.radius.clone()) * (c.0.clone() - b.0.clone());
    let rhs = (c.1.radius.clone() - b.1.radius.clone()) * (b.0.clone() - a.0.clone());
    lhs == rhs
}

/// Split branch crossings, drop repeated parameters and merge collinear runs.
pub fn canonicalize<S: Scalar>(pts: Breaks<S>) -> Result<Breaks<S>> {
    if pts.len() < 2 {
        return Err(Error::Domain("breakpoint list needs two entries".into()));
    }
    let mut split: Breaks<S> = Vec::with_capacity(pts.len() + 4);
    for (t, p) in pts {
        let p = TreePoint::new(p.arm, p.radius);
        if let Some((t0, p0)) = split.last() {
            if t < *t0 {
                return Err(Error::Domain("breakpoint parameters decrease".into()));
            }
            if t == *t0 {
                if p != *p0 {
                    return Err(Error::Domain("discontinuous breakpoint list".into()));
                }
                continue;
            }
            if !p0.is_branch() && !p.is_branch() && p0.arm != p.arm {
                let r0 = p0.radius.clone();
                let tc = t0.clone() + (t.clone() - t0.clone()) * r0.clone() / (r0 + p.radius.clone());
                split.push((tc, TreePoint::branch()));
            }
        }
        split.push((t, p));
    }
    if split.len() < 2 {
        return Err(Error::Domain("degenerate parameter range".into()));
    }
    let mut out: Breaks<S> = Vec::with_capacity(split.len());
    for c in split {
        while out.len() >= 2 && collinear(&out[out.len() - 2], &out[out.len() - 1], &c) {
            out.pop();
        }
        out.push(c);
    }
    Ok(out)
}

/// Radial speed on each segment.
pub fn speeds<S: Scalar>(pts: &[(S, TreePoint<S>)]) -> impl Iterator<Item = S> + '_ {
    pts.windows(2).map(|w| {
        ((w[1].1.radius.clone() - w[0].1.radius.clone()) / (w[1].0.clone() - w[0].0.clone())).abs()
    })
}

/// Subtree `path([t0, t1])`.
pub fn image_between<S: Scalar>(pts: &[(S, TreePoint<S>)], t0: &S, t1: &S) -> Subtree<S> {
    let (lo, hi) = if t0 <= t1 { (t0, t1) } else { (t1, t0) };
    let mut sub = Subtree::point(&eval_path(pts, lo));
    let first = locate(pts, lo);
    for w in pts[first..].windows(2) {
        let (a, b) = (&w[0].0, &w[1].0);
        if a >= hi {
            break;
        }
        if b <= lo {
            continue;
        }
        let s = if a < lo { lo } else { a };
        let e = if b > hi { hi } else { b };
        let p = interp(&w[0].0, &w[0].1, &w[1].0, &w[1].1, s);
        let q = interp(&w[0].0, &w[0].1, &w[1].0, &w[1].1, e);
        sub.insert_segment(&p, &q);
    }
    sub
}

pub fn image<S: Scalar>(pts: &[(S, TreePoint<S>)]) -> Subtree<S> {
    let mut sub = Subtree::point(&pts[0].1);
    for w in pts.windows(2) {
        sub.insert_segment(&w[0].1, &w[1].1);
    }
    sub
}
