use num::rational::BigRational;
use num::ToPrimitive;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::pl_tree::path::{interp, seg_arm};
use crate::pl_tree::{Arc, PLMap, Subtree, TreePoint};
use crate::scalar::{dyadic, Scalar};

use super::arc_check::sublevel_params;
use super::{arc_is_crooked, CrookStatus, CrookednessVerdict, PATH_CLASS};

#[derive(Clone, Debug)]
pub struct CertifyOptions {
    /// Net halvings tried after the initial resolution.
    pub refinements: u32,
    /// Largest net (points per arm) the checker will sweep.
    pub max_net_per_arm: usize,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions { refinements: 6, max_net_per_arm: 1 << 18 }
    }
}

struct Net<S> {
    delta: S,
    per_arm: usize,
    arms: usize,
}

impl<S: Scalar> Net<S> {
    fn len(&self) -> usize {
        1 + self.arms * self.per_arm
    }

    fn point(&self, idx: usize) -> TreePoint<S> {
        if idx == 0 {
            return TreePoint::branch();
        }
        let arm = (idx - 1) / self.per_arm;
        let k = (idx - 1) % self.per_arm + 1;
        TreePoint::new(arm, self.delta.clone() * S::from_usize(k).unwrap())
    }
}

/// Walk state along a ray leaving the net point `a`.
#[derive(Clone)]
struct Walk<S> {
    ka: TreePoint<S>,
    eps: S,
    /// Image of the walked prefix.
    seen: Subtree<S>,
    /// Image of the prefix up to the last visit of the eps-ball around κ(a).
    frozen: Subtree<S>,
}

/// Radius interval where `p(σ)` is farther than eps from `frozen`, as open
/// rays `r < lo` and `r > hi`.
fn far_rays<S: Scalar>(frozen: &Subtree<S>, arm: usize, eps: &S) -> (Option<S>, Option<S>) {
    match frozen {
        Subtree::Star(_) => (None, Some(frozen.reach(arm) + eps.clone())),
        Subtree::Seg { arm: k, lo, hi } => {
            if *k == arm {
                (Some(lo.clone() - eps.clone()), Some(hi.clone() + eps.clone()))
            } else {
                (None, Some(eps.clone() - lo.clone()))
            }
        }
    }
}

fn floor_ratio(x: &BigRational) -> i64 {
    x.floor().to_integer().to_i64().unwrap_or(i64::MAX)
}

struct Leg<'a, S> {
    kappa: &'a PLMap<S>,
    arm: usize,
    from: S,
    to: S,
    check: bool,
    delta: &'a S,
    per_arm: usize,
}

impl<S: Scalar> Walk<S> {
    fn new(ka: TreePoint<S>, eps: S) -> Self {
        let seen = Subtree::point(&ka);
        Walk { ka, eps, frozen: seen.clone(), seen }
    }

    /// Smallest `k >= 1` with `lo < kδ` and `kδ < hi` (or `<=` when closed).
    fn first_net_radius(leg: &Leg<S>, lo: &S, hi: &S, hi_open: bool) -> Option<usize> {
        let d = leg.delta.to_ratio();
        let l = lo.to_ratio() / d.clone();
        let h = hi.to_ratio() / d;
        let k = (floor_ratio(&l) + 1).max(1);
        let kk = BigRational::from_integer(k.into());
        let ok = if hi_open { kk < h } else { kk <= h };
        (ok && (k as usize) <= leg.per_arm).then_some(k as usize)
    }

    /// Violating net radii on a checked (outward) leg, for a sub-piece whose
    /// image runs linearly from `p` at leg offset `x0` to `q` at `x1`.
    /// `x0` is excluded, `x1` included iff `x1_closed`.
    fn scan(&self, leg: &Leg<S>, x0: &S, p: &TreePoint<S>, x1: &S, q: &TreePoint<S>, x1_closed: bool) -> Option<usize> {
        if !leg.check || x0 >= x1 {
            return None;
        }
        let arm = seg_arm(p, q);
        let (below, above) = far_rays(&self.frozen, arm, &self.eps);
        let (r0, r1) = (&p.radius, &q.radius);
        let to_x = |rho: &S| x0.clone() + (rho.clone() - r0.clone()) * (x1.clone() - x0.clone()) / (r1.clone() - r0.clone());
        let mut best: Option<usize> = None;
        for (thr, is_above) in [(below, false), (above, true)] {
            let Some(thr) = thr else { continue };
            let far = |r: &S| if is_above { *r > thr } else { *r < thr };
            let (a, b) = match (far(r0), far(r1)) {
                (true, true) => (x0.clone(), x1.clone()),
                (true, false) => (x0.clone(), to_x(&thr)),
                (false, true) => (to_x(&thr), x1.clone()),
                (false, false) => continue,
            };
            let hi_open = !(x1_closed && b == *x1);
            let lo = leg.from.clone() + a;
            let hi = leg.from.clone() + b;
            if let Some(k) = Self::first_net_radius(leg, &lo, &hi, hi_open) {
                best = min_opt(best, Some(k));
            }
        }
        best
    }

    /// Walk one radial leg; returns the smallest violating net radius index.
    fn leg(&mut self, leg: &Leg<S>) -> Option<usize> {
        if leg.from == leg.to {
            return None;
        }
        let forward = leg.from < leg.to;
        let list = leg.kappa.arm(leg.arm);
        let (lo, hi) = if forward { (&leg.from, &leg.to) } else { (&leg.to, &leg.from) };
        let start = list.partition_point(|(s, _)| s <= lo);
        let end = list.partition_point(|(s, _)| s < hi);
        let off = |x: &S| if forward { x.clone() - leg.from.clone() } else { leg.from.clone() - x.clone() };
        let eval = |x: &S| leg.kappa.eval_unchecked(&TreePoint::new(leg.arm, x.clone()));
        let mut verts: Vec<(S, TreePoint<S>)> = Vec::with_capacity(end.saturating_sub(start) + 2);
        verts.push((S::zero(), eval(&leg.from)));
        let inner = list[start..end].iter().map(|(x, p)| (off(x), p.clone()));
        if forward {
            verts.extend(inner);
        } else {
            verts.extend(inner.rev());
        }
        verts.push((off(&leg.to), eval(&leg.to)));
        let mut found: Option<usize> = None;
        for w in verts.windows(2) {
            let (s0, s1) = (&w[0], &w[1]);
            let ((x0, p), (x1, q)) = (s0, s1);
            match sublevel_params((s0, s1), &self.ka, &self.eps) {
                None => {
                    found = min_opt(found, self.scan(leg, x0, p, x1, q, true));
                    self.seen.insert_segment(p, q);
                }
                Some((bs, be)) => {
                    let ps = interp(x0, p, x1, q, &bs);
                    let pe = interp(x0, p, x1, q, &be);
                    found = min_opt(found, self.scan(leg, x0, p, &bs, &ps, false));
                    self.seen.insert_segment(p, &ps);
                    self.seen.insert_segment(&ps, &pe);
                    self.frozen = self.seen.clone();
                    found = min_opt(found, self.scan(leg, &be, &pe, x1, q, true));
                    self.seen.insert_segment(&pe, q);
                }
            }
            if found.is_some() {
                return found;
            }
        }
        found
    }
}

fn min_opt(a: Option<usize>, b: Option<usize>) -> Option<usize> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Smallest net index `b > ia` such that the arc `[a, b]` fails the closed
/// crookedness test at `eps`.
fn violation_from<S: Scalar>(kappa: &PLMap<S>, net: &Net<S>, ia: usize, eps: &S) -> Option<usize> {
    let a = net.point(ia);
    let ka = kappa.eval_unchecked(&a);
    let base = Walk::new(ka, eps.clone());
    let mk = |arm, from: S, to: S, check| Leg {
        kappa,
        arm,
        from,
        to,
        check,
        delta: &net.delta,
        per_arm: net.per_arm,
    };
    let index = |arm: usize, k: usize| 1 + arm * net.per_arm + (k - 1);
    if a.is_branch() {
        for j in 0..net.arms {
            let mut w = base.clone();
            if let Some(k) = w.leg(&mk(j, S::zero(), S::one(), true)) {
                return Some(index(j, k));
            }
        }
        return None;
    }
    let i = a.arm;
    let mut out = base.clone();
    if let Some(k) = out.leg(&mk(i, a.radius.clone(), S::one(), true)) {
        return Some(index(i, k));
    }
    if i + 1 >= net.arms {
        return None;
    }
    let mut inward = base;
    inward.leg(&mk(i, a.radius.clone(), S::zero(), false));
    for j in (i + 1)..net.arms {
        let mut w = inward.clone();
        if let Some(k) = w.leg(&mk(j, S::zero(), S::one(), true)) {
            return Some(index(j, k));
        }
    }
    None
}

fn net_violation<S: Scalar>(kappa: &PLMap<S>, net: &Net<S>, eps: &S) -> Option<(usize, usize)> {
    (0..net.len())
        .into_par_iter()
        .find_map_first(|ia| violation_from(kappa, net, ia, eps).map(|ib| (ia, ib)))
}

pub fn certify_map_crooked<S: Scalar>(kappa: &PLMap<S>, eps: &S) -> Result<CrookednessVerdict<S>> {
    certify_with(kappa, eps, &CertifyOptions::default())
}

/// Net-based certificate for ε-crookedness of every arc.
pub fn certify_with<S: Scalar>(kappa: &PLMap<S>, eps: &S, opts: &CertifyOptions) -> Result<CrookednessVerdict<S>> {
    if *eps <= S::zero() {
        return Err(Error::Domain("eps must be positive".into()));
    }
    let lam = kappa.max_slope();
    let crooked = |delta: Option<S>, internal: Option<S>| CrookednessVerdict {
        status: CrookStatus::Crooked,
        witness: None,
        params: None,
        requested_eps: eps.clone(),
        certified_eps: eps.clone(),
        delta_net: delta,
        eps_internal: internal,
        path_class: PATH_CLASS,
    };
    if lam.is_zero() {
        return Ok(crooked(None, None));
    }
    let target = eps.clone() / (S::from_i64(4).unwrap() * lam.clone());
    let mut j0 = 0u32;
    while dyadic::<S>(j0) > target {
        j0 += 1;
    }
    for j in j0..=j0 + opts.refinements {
        let per_arm = 1usize
            .checked_shl(j)
            .filter(|&n| n <= opts.max_net_per_arm)
            .ok_or_else(|| Error::Undecided(format!("net 2^-{j} exceeds the sweep limit")))?;
        let net = Net { delta: dyadic::<S>(j), per_arm, arms: kappa.dom().arms() };
        let inflation = S::two() * lam.clone() * net.delta.clone();
        let internal = eps.clone() - inflation.clone();
        if net_violation(kappa, &net, &internal).is_none() {
            let mut v = crooked(Some(net.delta.clone()), Some(internal.clone()));
            v.certified_eps = internal + inflation;
            return Ok(v);
        }
        if let Some((ia, ib)) = net_violation(kappa, &net, eps) {
            let arc = Arc::between(net.point(ia), net.point(ib))?;
            let re = arc_is_crooked(kappa, &arc, eps)?;
            if re.is_crooked() {
                return Err(Error::Verification(format!(
                    "sweep witness {:?} is crooked under direct evaluation",
                    arc.points()
                )));
            }
            return Ok(CrookednessVerdict {
                status: CrookStatus::NotCrooked,
                witness: Some(arc),
                params: None,
                requested_eps: eps.clone(),
                certified_eps: eps.clone(),
                delta_net: Some(net.delta),
                eps_internal: None,
                path_class: PATH_CLASS,
            });
        }
    }
    Err(Error::Undecided(format!(
        "no net violation at eps and internal check still failing after {} refinements",
        opts.refinements
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crookedness::pattern::pattern_map;
    use crate::pl_tree::{tent, Tree};
    use crate::scalar::q;
    use crate::Q;

    #[test]
    fn identity_is_not_crooked() {
        let id: PLMap<Q> = PLMap::identity(Tree::new(2).unwrap());
        let v = certify_map_crooked(&id, &q(1, 4)).unwrap();
        assert_eq!(v.status, CrookStatus::NotCrooked);
        let w = v.witness.unwrap();
        assert!(!arc_is_crooked(&id, &w, &q(1, 4)).unwrap().is_crooked());
    }

    #[test]
    fn tent_is_not_crooked() {
        let v = certify_map_crooked(&tent::<Q>(), &q(1, 4)).unwrap();
        assert_eq!(v.status, CrookStatus::NotCrooked);
    }

    #[test]
    fn constant_is_crooked() {
        let t = Tree::new(4).unwrap();
        let c: PLMap<Q> = PLMap::constant(t, t, TreePoint::new(1, q(1, 3)));
        assert!(certify_map_crooked(&c, &q(1, 100)).unwrap().is_crooked());
    }

    #[test]
    fn pattern_threshold() {
        let p = pattern_map(&q(2, 5)).unwrap();
        let v = certify_map_crooked(&p, &q(1, 2)).unwrap();
        assert!(v.is_crooked(), "{:?}", v.status);
        assert!(v.eps_internal.clone().unwrap() >= q(2, 5));
        let v = certify_map_crooked(&p, &q(3, 10)).unwrap();
        assert_eq!(v.status, CrookStatus::NotCrooked);
    }

    #[test]
    fn float_agrees() {
        let p = pattern_map(&0.4f64).unwrap();
        assert!(certify_map_crooked(&p, &0.5).unwrap().is_crooked());
        assert!(!certify_map_crooked(&p, &0.3).unwrap().is_crooked());
    }
}
