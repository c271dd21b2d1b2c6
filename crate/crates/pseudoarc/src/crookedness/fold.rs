use crate::error::{Error, Result};
use crate::pl_tree::{PLMap, Tree, TreePoint};
use crate::scalar::{dyadic, Scalar};

use super::{exactness_certificate, expansion_check};

#[derive(Clone, Debug)]
pub struct FoldResult<S> {
    /// `f∘h`.
    pub map: PLMap<S>,
    pub h: PLMap<S>,
    pub xi: S,
    pub delta_used: S,
    /// Window length of the sawtooth.
    pub eta: S,
    /// Teeth per window (odd).
    pub teeth: usize,
    pub exact_n: u32,
    /// Scale at which doubling was verified; `xi / 5`.
    pub expansion_beta: S,
}

/// Rotation-equivariant radial sawtooth: each window `[kη, (k+1)η]` is cut
/// into `teeth` pieces alternating between `kη` and `(k+1)η`.
pub fn sawtooth<S: Scalar>(tree: Tree, eta: &S, teeth: usize) -> Result<PLMap<S>> {
    if teeth % 2 == 0 || *eta <= S::zero() || *eta > S::one() {
        return Err(Error::Domain("sawtooth needs odd teeth and 0 < eta <= 1".into()));
    }
    let windows = (S::one() / eta.clone())
        .to_usize()
        .filter(|&k| S::from_usize(k).unwrap() * eta.clone() == S::one())
        .ok_or_else(|| Error::Domain("eta must divide 1".into()))?;
    let p = S::from_usize(teeth).unwrap();
    let mut arm0 = Vec::with_capacity(windows * teeth + 1);
    arm0.push((S::zero(), TreePoint::branch()));
    for k in 0..windows {
        let base = eta.clone() * S::from_usize(k).unwrap();
        for l in 1..=teeth {
            let t = base.clone() + eta.clone() * S::from_usize(l).unwrap() / p.clone();
            let r = if l % 2 == 0 { base.clone() } else { base.clone() + eta.clone() };
            arm0.push((t, TreePoint::new(0, r)));
        }
    }
    PLMap::equivariant(tree, arm0)
}

fn breakpoint_gap<S: Scalar>(f: &PLMap<S>) -> S {
    let mut gap = S::one();
    for list in f.arm_lists() {
        for w in list.windows(2) {
            let d = w[1].0.clone() - w[0].0.clone();
            if d < gap {
                gap = d;
            }
        }
    }
    gap
}

/// Fold `f` into a locally doubling map `f∘h` within `delta` of `f`.
pub fn fold_expand<S: Scalar>(f: &PLMap<S>, delta: &S) -> Result<FoldResult<S>> {
    if *delta <= S::zero() || *delta >= S::one() {
        return Err(Error::Domain("delta must lie in (0, 1)".into()));
    }
    if f.dom() != f.cod() {
        return Err(Error::TreeMismatch(f.dom().arms(), f.cod().arms()));
    }
    if exactness_certificate(f, 64, &S::ratio(1, 16)).is_none() {
        return Err(Error::NotExact("no certificate at grid 1/16 within 64 iterates".into()));
    }
    let equivariant = f.equivariance_check();
    let lam_min = f.min_slope();
    let lam = f.max_slope();
    let eight = S::from_i64(8).unwrap();
    let mut teeth = 3usize;
    while S::from_usize(teeth).unwrap() * lam_min.clone() < eight {
        teeth += 2;
    }
    let gap = breakpoint_gap(f);
    let mut j = 0u32;
    while !(S::two() * lam.clone() * dyadic::<S>(j) < *delta && dyadic::<S>(j) < gap) {
        j += 1;
    }
    let mut last = String::new();
    for jj in j..j + 8 {
        let eta = dyadic::<S>(jj);
        let h = sawtooth(f.dom(), &eta, teeth)?;
        let map = f.compose(&h)?;
        let beta = eta.clone() / (S::two() * S::from_usize(teeth).unwrap());
        let xi = S::from_i64(5).unwrap() * beta.clone();
        let dist = map.sup_distance(f)?;
        if !(dist < *delta) || !(xi < *delta) {
            last = format!("eta 2^-{jj}: sup distance {:?}", dist.to_f64());
            continue;
        }
        if !expansion_check(&map, &beta)? {
            last = format!("eta 2^-{jj}: doubling fails below {:?}", beta.to_f64());
            continue;
        }
        let Some(exact_n) = exactness_certificate(&map, 64, &beta) else {
            last = format!("eta 2^-{jj}: no exactness certificate");
            continue;
        };
        if equivariant && !map.equivariance_check() {
            last = format!("eta 2^-{jj}: equivariance lost");
            continue;
        }
        return Ok(FoldResult {
            map,
            h,
            xi,
            delta_used: delta.clone(),
            eta,
            teeth,
            exact_n,
            expansion_beta: beta,
        });
    }
    Err(Error::Verification(format!("fold_expand: refinement schedule exhausted ({last})")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pl_tree::{n_map, tent};
    use crate::scalar::q;
    use crate::Q;

    #[test]
    fn tent_fold() {
        let f = tent::<Q>();
        let r = fold_expand(&f, &q(1, 10)).unwrap();
        assert!(r.map.sup_distance(&f).unwrap() < q(1, 10));
        assert!(r.xi < q(1, 10));
        assert_eq!(r.map, f.compose(&r.h).unwrap());
        assert!(expansion_check(&r.map, &(r.xi.clone() / q(5, 1))).unwrap());
        assert!(r.h.equivariance_check());
        assert_eq!(r.teeth, 5);
        assert_eq!(r.eta, q(1, 64));
    }

    #[test]
    fn n_map_fold_is_equivariant() {
        let r = fold_expand(&n_map::<Q>(), &q(1, 4)).unwrap();
        assert!(r.map.equivariance_check());
    }

    #[test]
    fn identity_rejected() {
        let id = PLMap::<Q>::identity(Tree::new(2).unwrap());
        assert!(matches!(fold_expand(&id, &q(1, 10)), Err(Error::NotExact(_))));
    }

    #[test]
    fn sawtooth_endpoints() {
        let h = sawtooth::<Q>(Tree::new(4).unwrap(), &q(1, 4), 3).unwrap();
        assert_eq!(h.eval(&TreePoint::new(2, q(1, 1))).unwrap(), TreePoint::new(2, q(1, 1)));
        assert_eq!(h.eval(&TreePoint::new(1, q(1, 12))).unwrap(), TreePoint::new(1, q(1, 4)));
        assert!(sawtooth::<Q>(Tree::new(2).unwrap(), &q(1, 4), 4).is_err());
    }
}
