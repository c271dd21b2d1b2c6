use crate::error::{Error, Result};
use crate::pl_tree::path::{self, canonicalize, interp, locate, seg_arm, Breaks};
use crate::pl_tree::subtree::Subtree;
use crate::pl_tree::tree::{metric_dist, Tree, TreePoint};
use crate::scalar::{smax, smin, Scalar};

/// Continuous piecewise-linear map between 2^n-ods, kept in canonical form.
#[derive(Clone, Debug, PartialEq)]
pub struct PLMap<S> {
    dom: Tree,
    cod: Tree,
    arms: Vec<Breaks<S>>,
}

impl<S: Scalar> PLMap<S> {
    pub fn new(dom: Tree, cod: Tree, arms: Vec<Breaks<S>>) -> Result<Self> {
        if arms.len() != dom.arms() {
            return Err(Error::Domain(format!(
                "{} breakpoint lists for a tree with {} arms",
                arms.len(),
                dom.arms()
            )));
        }
        let mut canon = Vec::with_capacity(arms.len());
        for list in arms {
            if list.is_empty() || !list[0].0.is_zero() || !list.last().unwrap().0.is_one() {
                return Err(Error::Domain("breakpoints must start at 0 and end at 1".into()));
            }
            for (_, p) in &list {
                cod.check(p)?;
            }
            canon.push(canonicalize(list)?);
        }
        let centre = canon[0][0].1.clone();
        if canon.iter().any(|l| l[0].1 != centre) {
            return Err(Error::Domain("arms disagree at the branch point".into()));
        }
        Ok(PLMap { dom, cod, arms: canon })
    }

    /// Self-map with the same breakpoint list on every arm, rotated per arm.
    /// `arm0` describes arm 0; arm `i` uses images rotated by `i`.
    pub fn equivariant(tree: Tree, arm0: Breaks<S>) -> Result<Self> {
        let m = tree.arms();
        let arms = (0..m)
            .map(|i| arm0.iter().map(|(t, p)| (t.clone(), p.rotate(i, m))).collect())
            .collect();
        PLMap::new(tree, tree, arms)
    }

    pub fn identity(tree: Tree) -> Self {
        let arms = (0..tree.arms())
            .map(|i| vec![(S::zero(), TreePoint::branch()), (S::one(), TreePoint::new(i, S::one()))])
            .collect();
        PLMap { dom: tree, cod: tree, arms }
    }

    pub fn constant(dom: Tree, cod: Tree, p: TreePoint<S>) -> Self {
        let arms = (0..dom.arms()).map(|_| vec![(S::zero(), p.clone()), (S::one(), p.clone())]).collect();
        PLMap { dom, cod, arms }
    }

    /// `(arm i, r) -> (arm i+1 mod m, r)`.
    pub fn rotation(tree: Tree) -> Self {
        Self::rotation_by(tree, 1)
    }

    pub fn rotation_by(tree: Tree, k: usize) -> Self {
        let m = tree.arms();
        let arms = (0..m)
            .map(|i| {
                vec![(S::zero(), TreePoint::branch()), (S::one(), TreePoint::new((i + k) % m, S::one()))]
            })
            .collect();
        PLMap { dom: tree, cod: tree, arms }
    }

    /// Branched cover `Tree(2m) -> Tree(m)`, `(arm i, r) -> (arm i mod m, r)`.
    pub fn cover_project(big: Tree) -> Result<Self> {
        if big.arms() < 4 {
            return Err(Error::Domain("cover needs at least 4 arms upstairs".into()));
        }
        let m = big.arms() / 2;
        let small = Tree::new(m)?;
        let arms = (0..big.arms())
            .map(|i| vec![(S::zero(), TreePoint::branch()), (S::one(), TreePoint::new(i % m, S::one()))])
            .collect();
        Ok(PLMap { dom: big, cod: small, arms })
    }

    /// Map of the 2-arm tree from its graph in signed coordinates
    /// `(u, f(u))`, `u` increasing from -1 to 1.
    pub fn from_signed_graph(graph: &[(S, S)]) -> Result<Self> {
        if graph.len() < 2 {
            return Err(Error::Domain("graph needs two vertices".into()));
        }
        let mut g: Vec<(S, S)> = graph.to_vec();
        if !(g[0].0 == -S::one()) || !g.last().unwrap().0.is_one() {
            return Err(Error::Domain("graph must run from -1 to 1".into()));
        }
        if !g.iter().any(|(u, _)| u.is_zero()) {
            let k = g.partition_point(|(u, _)| *u < S::zero());
            let (u0, v0) = g[k - 1].clone();
            let (u1, v1) = g[k].clone();
            let v = v0.clone() + (v1 - v0) * (-u0.clone()) / (u1 - u0);
            g.insert(k, (S::zero(), v));
        }
        let pt = |v: &S| TreePoint::from_signed(v.clone());
        let pos: Breaks<S> = g.iter().filter(|(u, _)| *u >= S::zero()).map(|(u, v)| (u.clone(), pt(v))).collect();
        let neg: Breaks<S> =
            g.iter().rev().filter(|(u, _)| *u <= S::zero()).map(|(u, v)| (-u.clone(), pt(v))).collect();
        let t = Tree::new(2)?;
        PLMap::new(t, t, vec![pos, neg])
    }

    /// Graph vertices in signed coordinates (2-arm trees only).
    pub fn signed_graph(&self) -> Result<Vec<(S, S)>> {
        if self.dom.arms() != 2 || self.cod.arms() != 2 {
            return Err(Error::Domain("signed graph needs 2-arm trees".into()));
        }
        let mut out: Vec<(S, S)> = self.arms[1].iter().rev().map(|(t, p)| (-t.clone(), p.signed())).collect();
        out.pop();
        out.extend(self.arms[0].iter().map(|(t, p)| (t.clone(), p.signed())));
        Ok(out)
    }

    pub fn dom(&self) -> Tree {
        self.dom
    }

    pub fn cod(&self) -> Tree {
        self.cod
    }

    pub fn arm(&self, i: usize) -> &[(S, TreePoint<S>)] {
        &self.arms[i]
    }

    pub fn arm_lists(&self) -> &[Breaks<S>] {
        &self.arms
    }

    pub fn piece_count(&self) -> usize {
        self.arms.iter().map(|l| l.len() - 1).sum()
    }

    /// Pieces of `self o g` before collinear runs are merged.
    pub fn compose_piece_estimate(&self, g: &PLMap<S>) -> usize {
        g.arms
            .iter()
            .flat_map(|l| l.windows(2))
            .map(|w| {
                let (r0, r1) = (&w[0].1.radius, &w[1].1.radius);
                let (lo, hi) = if r0 <= r1 { (r0, r1) } else { (r1, r0) };
                let list = &self.arms[seg_arm(&w[0].1, &w[1].1)];
                let start = list.partition_point(|(s, _)| s <= lo);
                let end = list.partition_point(|(s, _)| s < hi);
                1 + end.saturating_sub(start)
            })
            .sum()
    }

    pub fn eval(&self, p: &TreePoint<S>) -> Result<TreePoint<S>> {
        self.dom.check(p)?;
        Ok(self.eval_unchecked(p))
    }

    pub(crate) fn eval_unchecked(&self, p: &TreePoint<S>) -> TreePoint<S> {
        let list = &self.arms[p.arm];
        let i = locate(list, &p.radius);
        interp(&list[i].0, &list[i].1, &list[i + 1].0, &list[i + 1].1, &p.radius)
    }

    /// Points mapped to `y`: one per non-constant piece whose image contains
    /// `y`, and both ends of every constant piece at `y`.
    pub fn preimages(&self, y: &TreePoint<S>) -> Vec<TreePoint<S>> {
        let mut out = Vec::new();
        for (arm, list) in self.arms.iter().enumerate() {
            for w in list.windows(2) {
                let (t0, p0) = (&w[0].0, &w[0].1);
                let (t1, p1) = (&w[1].0, &w[1].1);
                if p0 == p1 {
                    if p0 == y {
                        out.push(TreePoint::new(arm, t0.clone()));
                        out.push(TreePoint::new(arm, t1.clone()));
                    }
                    continue;
                }
                if !y.is_branch() && y.arm != seg_arm(p0, p1) {
                    continue;
                }
                let (r0, r1) = (&p0.radius, &p1.radius);
                let (lo, hi) = if r0 <= r1 { (r0, r1) } else { (r1, r0) };
                if y.radius < *lo || y.radius > *hi {
                    continue;
                }
                let t = t0.clone() + (t1.clone() - t0.clone()) * (y.radius.clone() - r0.clone()) / (r1.clone() - r0.clone());
                out.push(TreePoint::new(arm, t));
            }
        }
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out.dedup();
        out
    }

    /// `self o path`, for a canonical breakpoint list into the domain tree.
    pub fn compose_path(&self, pts: &[(S, TreePoint<S>)]) -> Result<Breaks<S>> {
        let mut ts: Vec<(S, TreePoint<S>)> = Vec::with_capacity(pts.len() * 2);
        for w in pts.windows(2) {
            let (t0, p0) = (&w[0].0, &w[0].1);
            let (t1, p1) = (&w[1].0, &w[1].1);
            ts.push((t0.clone(), p0.clone()));
            let a = seg_arm(p0, p1);
            let (r0, r1) = (&p0.radius, &p1.radius);
            if r0 == r1 {
                continue;
            }
            let (lo, hi) = (smin(r0.clone(), r1.clone()), smax(r0.clone(), r1.clone()));
            let list = &self.arms[a];
            let start = list.partition_point(|(s, _)| *s <= lo);
            let end = list.partition_point(|(s, _)| *s < hi);
            let mut mids: Vec<(S, TreePoint<S>)> = list[start..end]
                .iter()
                .map(|(rho, _)| {
                    let t = t0.clone()
                        + (rho.clone() - r0.clone()) * (t1.clone() - t0.clone()) / (r1.clone() - r0.clone());
                    (t, TreePoint::new(a, rho.clone()))
                })
                .collect();
            if r1 < r0 {
                mids.reverse();
            }
            ts.extend(mids);
        }
        ts.push(pts.last().unwrap().clone());
        let imgs = ts.into_iter().map(|(t, p)| (t, self.eval_unchecked(&p))).collect();
        canonicalize(imgs)
    }

    /// `self o g`.
    pub fn compose(&self, g: &PLMap<S>) -> Result<PLMap<S>> {
        if g.cod != self.dom {
            return Err(Error::TreeMismatch(g.cod.arms(), self.dom.arms()));
        }
        let arms = g.arms.iter().map(|l| self.compose_path(l)).collect::<Result<Vec<_>>>()?;
        Ok(PLMap { dom: g.dom, cod: self.cod, arms })
    }

    /// `self^n`, failing when more than `budget` pieces would be stored.
    pub fn power(&self, n: u32, budget: Option<usize>) -> Result<PLMap<S>> {
        if self.dom != self.cod {
            return Err(Error::TreeMismatch(self.dom.arms(), self.cod.arms()));
        }
        let mut acc = PLMap::identity(self.dom);
        for k in 0..n {
            acc = self.compose(&acc)?;
            if let Some(b) = budget {
                if acc.piece_count() > b {
                    return Err(Error::Budget(format!(
                        "iterate {} has {} pieces (budget {b})",
                        k + 1,
                        acc.piece_count()
                    )));
                }
            }
        }
        Ok(acc)
    }

    /// Merged breakpoint parameters of two maps on one arm.
    fn merged(&self, other: &PLMap<S>, arm: usize) -> Vec<S> {
        let mut ts: Vec<S> = self.arms[arm].iter().chain(other.arms[arm].iter()).map(|(t, _)| t.clone()).collect();
        ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ts.dedup();
        ts
    }

    /// Exact `sup_x d(f(x), g(x))`, attained on the merged breakpoints.
    pub fn sup_distance(&self, other: &PLMap<S>) -> Result<S> {
        if self.dom != other.dom || self.cod != other.cod {
            return Err(Error::TreeMismatch(self.dom.arms(), other.dom.arms()));
        }
        let mut best = S::zero();
        for arm in 0..self.dom.arms() {
            for t in self.merged(other, arm) {
                let p = TreePoint::new(arm, t);
                best = smax(best, metric_dist(&self.eval_unchecked(&p), &other.eval_unchecked(&p)));
            }
        }
        Ok(best)
    }

    /// Maximal absolute slope `Λ_f`.
    pub fn max_slope(&self) -> S {
        self.arms.iter().flat_map(|l| path::speeds(l)).fold(S::zero(), smax)
    }

    /// Minimal absolute slope over all pieces.
    pub fn min_slope(&self) -> S {
        self.arms
            .iter()
            .flat_map(|l| path::speeds(l))
            .reduce(smin)
            .unwrap_or_else(S::zero)
    }

    /// `L(eps, f) = eps / Λ_f`; `None` stands for `+∞` (constant maps).
    pub fn continuity_modulus(&self, eps: &S) -> Result<Option<S>> {
        if *eps <= S::zero() {
            return Err(Error::Domain("eps must be positive".into()));
        }
        let lam = self.max_slope();
        if lam.is_zero() {
            Ok(None)
        } else {
            Ok(Some(eps.clone() / lam))
        }
    }

    pub fn equivariance_check(&self) -> bool {
        if self.dom != self.cod {
            return false;
        }
        let rot = PLMap::rotation(self.dom);
        match (self.compose(&rot), rot.compose(self)) {
            (Ok(a), Ok(b)) => a == b,
            _ => false,
        }
    }

    /// Lift through the branched cover `Tree(2m) -> Tree(m)`.
    pub fn lift_through_cover(&self) -> Result<PLMap<S>> {
        if self.dom != self.cod {
            return Err(Error::TreeMismatch(self.dom.arms(), self.cod.arms()));
        }
        if !self.equivariance_check() {
            return Err(Error::NotEquivariant);
        }
        let big = Tree::new(self.dom.arms() * 2)?;
        PLMap::equivariant(big, self.arms[0].clone())
    }

    /// Map `F'` on `Tree(m)` with `p∘F = F'∘p` for the cover `p: Tree(m) <- Tree(2m)`.
    pub fn project_through_cover(&self) -> Result<PLMap<S>> {
        if !self.equivariance_check() {
            return Err(Error::NotEquivariant);
        }
        let m = self.dom.arms() / 2;
        let small = Tree::new(m)?;
        let arm0 = self.arms[0].iter().map(|(t, p)| (t.clone(), TreePoint::new(p.arm % m, p.radius.clone()))).collect();
        PLMap::equivariant(small, arm0)
    }

    /// Image of the radial interval `[lo, hi]` on `arm`.
    pub fn image_radial(&self, arm: usize, lo: &S, hi: &S) -> Subtree<S> {
        path::image_between(&self.arms[arm], lo, hi)
    }

    pub fn image_subtree(&self, a: &Subtree<S>) -> Subtree<S> {
        match a {
            Subtree::Star(h) => {
                let mut out = Subtree::point(&self.arms[0][0].1);
                for (j, r) in h.iter().enumerate() {
                    if !r.is_zero() {
                        out.union(&self.image_radial(j, &S::zero(), r));
                    }
                }
                out
            }
            Subtree::Seg { arm, lo, hi } => self.image_radial(*arm, lo, hi),
        }
    }

    pub fn convert<T: Scalar>(&self) -> PLMap<T> {
        let arms = self
            .arms
            .iter()
            .map(|l| l.iter().map(|(t, p)| (T::from_ratio(&t.to_ratio()), p.convert())).collect())
            .collect();
        PLMap { dom: self.dom, cod: self.cod, arms }
    }
}
