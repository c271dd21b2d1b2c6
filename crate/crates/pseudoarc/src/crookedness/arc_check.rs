use crate::error::{Error, Result};
use crate::pl_tree::path::seg_arm;
use crate::pl_tree::{Arc, PLMap, TreePoint};
use crate::scalar::{smax, smin, Scalar};

use super::{CrookStatus, CrookednessVerdict, PATH_CLASS};

/// `{t in [t0, t1] : d(c, γ(t)) <= eps}` for one canonical segment of `γ`.
pub fn sublevel_params<S: Scalar>(
    seg: (&(S, TreePoint<S>), &(S, TreePoint<S>)),
    c: &TreePoint<S>,
    eps: &S,
) -> Option<(S, S)> {
    let ((t0, p0), (t1, p1)) = (seg.0, seg.1);
    let arm = seg_arm(p0, p1);
    let (lo, hi) = if c.is_branch() || c.arm == arm {
        (Some(c.radius.clone() - eps.clone()), c.radius.clone() + eps.clone())
    } else {
        (None, eps.clone() - c.radius.clone())
    };
    let (r0, r1) = (&p0.radius, &p1.radius);
    let inside = |r: &S| lo.as_ref().map_or(true, |l| r >= l) && r <= &hi;
    if r0 == r1 {
        return if inside(r0) { Some((t0.clone(), t1.clone())) } else { None };
    }
    let at = |rho: &S| t0.clone() + (rho.clone() - r0.clone()) * (t1.clone() - t0.clone()) / (r1.clone() - r0.clone());
    let a = at(&hi);
    let b = match &lo {
        Some(l) => at(l),
        None => {
            if r1 > r0 {
                t0.clone() - S::one()
            } else {
                t1.clone() + S::one()
            }
        }
    };
    let (s, e) = (smax(smin(a.clone(), b.clone()), t0.clone()), smin(smax(a, b), t1.clone()));
    if s <= e {
        Some((s, e))
    } else {
        None
    }
}

/// Exact (κ, eps)-crookedness of one arc.
pub fn arc_is_crooked<S: Scalar>(kappa: &PLMap<S>, alpha: &Arc<S>, eps: &S) -> Result<CrookednessVerdict<S>> {
    if *eps <= S::zero() {
        return Err(Error::Domain("eps must be positive".into()));
    }
    if alpha.length().is_zero() {
        return Err(Error::Domain("degenerate arc".into()));
    }
    for p in alpha.points() {
        kappa.dom().check(p)?;
    }
    let gamma = kappa.compose_path(&alpha.parametrize())?;
    let c0 = gamma[0].1.clone();
    let c1 = gamma.last().unwrap().1.clone();
    let mut t_max: Option<S> = None;
    let mut s_min: Option<S> = None;
    for w in gamma.windows(2) {
        if let Some((_, e)) = sublevel_params((&w[0], &w[1]), &c0, eps) {
            t_max = Some(e);
        }
        if s_min.is_none() {
            if let Some((s, _)) = sublevel_params((&w[0], &w[1]), &c1, eps) {
                s_min = Some(s);
            }
        }
    }
    let (s, t) = (s_min.expect("endpoint in its own sublevel"), t_max.expect("endpoint in its own sublevel"));
    let crooked = s < t;
    Ok(CrookednessVerdict {
        status: if crooked { CrookStatus::Crooked } else { CrookStatus::NotCrooked },
        witness: if crooked { None } else { Some(alpha.clone()) },
        params: if crooked { Some((s, t)) } else { None },
        requested_eps: eps.clone(),
        certified_eps: eps.clone(),
        delta_net: None,
        eps_internal: None,
        path_class: PATH_CLASS,
    })
}
