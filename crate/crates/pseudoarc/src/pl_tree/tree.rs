use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// The 2^n-od: `arms` unit segments glued at a branch point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Tree {
    arms: usize,
}

impl Tree {
    pub fn new(arms: usize) -> Result<Self> {
        if arms < 2 || !arms.is_power_of_two() {
            return Err(Error::Domain(format!("arm count {arms} is not a power of two >= 2")));
        }
        Ok(Tree { arms })
    }

    /// Tree with `2^level` arms.
    pub fn level(level: u32) -> Self {
        Tree { arms: 1usize << level.max(1) }
    }

    pub fn arms(&self) -> usize {
        self.arms
    }

    pub fn diameter<S: Scalar>(&self) -> S {
        S::two()
    }

    pub fn contains<S: Scalar>(&self, p: &TreePoint<S>) -> bool {
        p.arm < self.arms && p.radius >= S::zero() && p.radius <= S::one()
    }

    pub fn check<S: Scalar>(&self, p: &TreePoint<S>) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::Domain(format!("point {p:?} not in tree with {} arms", self.arms)))
        }
    }
}

/// Point `(arm, radius)`; radius zero is the branch point and is stored on arm 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreePoint<S> {
    pub arm: usize,
    pub radius: S,
}

impl<S: Scalar> TreePoint<S> {
    pub fn new(arm: usize, radius: S) -> Self {
        if radius.is_zero() {
            TreePoint { arm: 0, radius }
        } else {
            TreePoint { arm, radius }
        }
    }

    pub fn branch() -> Self {
        TreePoint { arm: 0, radius: S::zero() }
    }

    pub fn is_branch(&self) -> bool {
        self.radius.is_zero()
    }

    /// Signed coordinate on the 2-arm tree: `+r` on arm 0, `-r` on arm 1.
    pub fn signed(&self) -> S {
        if self.arm == 0 {
            self.radius.clone()
        } else {
            -self.radius.clone()
        }
    }

    pub fn from_signed(u: S) -> Self {
        if u < S::zero() {
            TreePoint::new(1, -u)
        } else {
            TreePoint::new(0, u)
        }
    }

    /// Interval coordinate `x in [0,1]` on the 2-arm tree (`u = 2x - 1`).
    pub fn from_interval(x: S) -> Self {
        Self::from_signed(S::two() * x - S::one())
    }

    pub fn interval(&self) -> S {
        (self.signed() + S::one()) / S::two()
    }

    pub fn rotate(&self, shift: usize, arms: usize) -> Self {
        if self.is_branch() {
            self.clone()
        } else {
            TreePoint { arm: (self.arm + shift) % arms, radius: self.radius.clone() }
        }
    }

    pub fn convert<T: Scalar>(&self) -> TreePoint<T> {
        TreePoint::new(self.arm, T::from_ratio(&self.radius.to_ratio()))
    }
}

/// Arc-length metric.
pub fn metric_dist<S: Scalar>(p: &TreePoint<S>, q: &TreePoint<S>) -> S {
    if p.arm == q.arm || p.is_branch() || q.is_branch() {
        (p.radius.clone() - q.radius.clone()).abs()
    } else {
        p.radius.clone() + q.radius.clone()
    }
}

/// Checked variant of [`metric_dist`] for points that must lie on `tree`.
pub fn metric_dist_on<S: Scalar>(tree: &Tree, p: &TreePoint<S>, q: &TreePoint<S>) -> Result<S> {
    tree.check(p)?;
    tree.check(q)?;
    Ok(metric_dist(p, q))
}

/// Injective polyline in a tree, parametrized by normalized arc length.
#[derive(Clone, Debug, PartialEq)]
pub struct Arc<S> {
    points: Vec<TreePoint<S>>,
}

impl<S: Scalar> Arc<S> {
    pub fn new(points: Vec<TreePoint<S>>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Domain("arc needs at least two points".into()));
        }
        for w in points.windows(2) {
            if w[0] == w[1] {
                return Err(Error::Domain("consecutive arc points coincide".into()));
            }
        }
        let arc = Arc { points };
        let total = arc.length();
        let chord = metric_dist(arc.start(), arc.end());
        if total != chord {
            return Err(Error::Domain("polyline is not injective".into()));
        }
        Ok(arc)
    }

    /// The arc `[a, b]`.
    pub fn between(a: TreePoint<S>, b: TreePoint<S>) -> Result<Self> {
        Arc::new(vec![a, b])
    }

    pub fn points(&self) -> &[TreePoint<S>] {
        &self.points
    }

    pub fn start(&self) -> &TreePoint<S> {
        &self.points[0]
    }

    pub fn end(&self) -> &TreePoint<S> {
        self.points.last().unwrap()
    }

    pub fn length(&self) -> S {
        self.points
            .windows(2)
            .fold(S::zero(), |acc, w| acc + metric_dist(&w[0], &w[1]))
    }

    /// Breakpoint list `(t, point)` on `[0, 1]` with a vertex wherever the arc
    /// passes through the branch point.
    pub fn parametrize(&self) -> Vec<(S, TreePoint<S>)> {
        let mut verts = vec![self.points[0].clone()];
        for w in self.points.windows(2) {
            let (p, q) = (&w[0], &w[1]);
            if !p.is_branch() && !q.is_branch() && p.arm != q.arm {
                verts.push(TreePoint::branch());
            }
            verts.push(q.clone());
        }
        let total = self.length();
        let mut acc = S::zero();
        let mut out = vec![(S::zero(), verts[0].clone())];
        for w in verts.windows(2) {
            acc = acc + metric_dist(&w[0], &w[1]);
            let t = if w[1] == *self.end() { S::one() } else { acc.clone() / total.clone() };
            out.push((t, w[1].clone()));
        }
        out.dedup_by(|b, a| a.0 == b.0);
        out
    }

    /// Point at normalized parameter `t`.
    pub fn at(&self, t: &S) -> TreePoint<S> {
        crate::pl_tree::path::eval_path(&self.parametrize(), t)
    }
}
