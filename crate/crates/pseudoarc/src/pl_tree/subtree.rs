use crate::pl_tree::tree::{metric_dist, TreePoint};
use crate::scalar::{smax, smin, Scalar};

/// Connected subtree of a 2^n-od.
///
/// `Star` contains the branch point and reaches radius `h[j]` along arm `j`;
/// `Seg` is a radial interval `[lo, hi]` with `lo > 0`.
#[derive(Clone, Debug, PartialEq)]
pub enum Subtree<S> {
    Star(Vec<S>),
    Seg { arm: usize, lo: S, hi: S },
}

impl<S: Scalar> Subtree<S> {
    pub fn point(p: &TreePoint<S>) -> Self {
        if p.is_branch() {
            Subtree::Star(Vec::new())
        } else {
            Subtree::Seg { arm: p.arm, lo: p.radius.clone(), hi: p.radius.clone() }
        }
    }

    pub fn whole(arms: usize) -> Self {
        Subtree::Star(vec![S::one(); arms])
    }

    pub fn reach(&self, arm: usize) -> S {
        match self {
            Subtree::Star(h) => h.get(arm).cloned().unwrap_or_else(S::zero),
            Subtree::Seg { arm: a, hi, .. } if *a == arm => hi.clone(),
            _ => S::zero(),
        }
    }

    fn raise(h: &mut Vec<S>, arm: usize, r: S) {
        if h.len() <= arm {
            h.resize(arm + 1, S::zero());
        }
        if r > h[arm] {
            h[arm] = r;
        }
    }

    /// Add the radial interval `[lo, hi]` on `arm` and take the convex hull.
    pub fn insert_radial(&mut self, arm: usize, lo: S, hi: S) {
        let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        match self {
            Subtree::Star(h) => Self::raise(h, arm, hi),
            Subtree::Seg { arm: a, lo: l, hi: u } => {
                if *a == arm || hi.is_zero() {
                    let nl = smin(l.clone(), lo);
                    let nu = smax(u.clone(), hi);
                    if nl.is_zero() {
                        let mut h = Vec::new();
                        Self::raise(&mut h, *a, nu);
                        *self = Subtree::Star(h);
                    } else {
                        *l = nl;
                        *u = nu;
                    }
                } else {
                    let mut h = Vec::new();
                    Self::raise(&mut h, *a, u.clone());
                    Self::raise(&mut h, arm, hi);
                    *self = Subtree::Star(h);
                }
            }
        }
    }

    /// Add the geodesic from `p` to `q`.
    pub fn insert_segment(&mut self, p: &TreePoint<S>, q: &TreePoint<S>) {
        if p.is_branch() || q.is_branch() || p.arm == q.arm {
            let arm = if p.is_branch() { q.arm } else { p.arm };
            self.insert_radial(arm, p.radius.clone(), q.radius.clone());
        } else {
            self.insert_radial(p.arm, S::zero(), p.radius.clone());
            self.insert_radial(q.arm, S::zero(), q.radius.clone());
        }
    }

    pub fn union(&mut self, other: &Subtree<S>) {
        match other {
            Subtree::Star(h) => {
                self.insert_radial(0, S::zero(), S::zero());
                for (j, r) in h.iter().enumerate() {
                    self.insert_radial(j, S::zero(), r.clone());
                }
            }
            Subtree::Seg { arm, lo, hi } => self.insert_radial(*arm, lo.clone(), hi.clone()),
        }
    }

    pub fn contains(&self, p: &TreePoint<S>) -> bool {
        self.dist(p).is_zero()
    }

    pub fn dist(&self, p: &TreePoint<S>) -> S {
        match self {
            Subtree::Star(_) => {
                let h = self.reach(p.arm);
                smax(p.radius.clone() - h, S::zero())
            }
            Subtree::Seg { arm, lo, hi } => {
                if p.is_branch() {
                    lo.clone()
                } else if p.arm == *arm {
                    if p.radius < *lo {
                        lo.clone() - p.radius.clone()
                    } else if p.radius > *hi {
                        p.radius.clone() - hi.clone()
                    } else {
                        S::zero()
                    }
                } else {
                    p.radius.clone() + lo.clone()
                }
            }
        }
    }

    /// Extreme points; the diameter and eccentricities are attained there.
    pub fn leaves(&self) -> Vec<TreePoint<S>> {
        match self {
            Subtree::Star(h) => {
                let mut out: Vec<TreePoint<S>> = h
                    .iter()
                    .enumerate()
                    .filter(|(_, r)| !r.is_zero())
                    .map(|(j, r)| TreePoint::new(j, r.clone()))
                    .collect();
                if out.len() < 2 {
                    out.push(TreePoint::branch());
                }
                out
            }
            Subtree::Seg { arm, lo, hi } => {
                vec![TreePoint::new(*arm, lo.clone()), TreePoint::new(*arm, hi.clone())]
            }
        }
    }

    pub fn diam(&self) -> S {
        match self {
            Subtree::Star(h) => {
                let mut top = [S::zero(), S::zero()];
                for r in h {
                    if *r > top[0] {
                        top[1] = top[0].clone();
                        top[0] = r.clone();
                    } else if *r > top[1] {
                        top[1] = r.clone();
                    }
                }
                top[0].clone() + top[1].clone()
            }
            Subtree::Seg { lo, hi, .. } => hi.clone() - lo.clone(),
        }
    }

    pub fn eccentricity(&self, p: &TreePoint<S>) -> S {
        self.leaves()
            .iter()
            .map(|l| metric_dist(p, l))
            .fold(S::zero(), smax)
    }

    pub fn is_whole(&self, arms: usize) -> bool {
        match self {
            Subtree::Star(h) => h.len() >= arms && h.iter().take(arms).all(|r| r.is_one()),
            Subtree::Seg { .. } => false,
        }
    }
}
