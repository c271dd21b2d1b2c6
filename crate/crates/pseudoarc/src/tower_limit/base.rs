use num::Zero;

use crate::crookedness::exactness_certificate;
use crate::error::{Error, Result};
use crate::pl_tree::{metric_dist, n_map, PLMap, TreePoint};
use crate::scalar::q;
use crate::Q;

/// Flattening `q: T_n -> [0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flattening {
    /// Interval coordinate of the 2-arm tree.
    Interval,
    /// Radius from the branch point.
    Radius,
}

impl Flattening {
    pub fn apply(&self, p: &TreePoint<Q>) -> Q {
        match self {
            Flattening::Interval => p.interval(),
            Flattening::Radius => p.radius.clone(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct BaseMapContract {
    pub gamma: Q,
    pub level: u32,
    pub map: PLMap<Q>,
    pub flattening: Flattening,
    /// Least `s` with `f^s(arm) = T` for every arm.
    pub exact_n: u32,
    /// Largest `d(f(x), f(y))` over net pairs with `q(x) = q(y)`.
    pub deviation: Q,
    pub contract_holds: bool,
}

/// Level-`n` lift of the odd N-map.
pub fn base_map(level: u32) -> Result<PLMap<Q>> {
    if level == 0 {
        return Err(Error::Domain("levels start at 1".into()));
    }
    let mut f = n_map::<Q>();
    for _ in 1..level {
        f = f.lift_through_cover()?;
    }
    Ok(f)
}

/// Same-flattening deviation of `f` on a net of spacing at most `gamma/(4Λ)`.
pub fn flattening_deviation(f: &PLMap<Q>, flat: Flattening, gamma: &Q) -> Q {
    let lam = f.max_slope();
    let arms = f.dom().arms();
    if flat == Flattening::Interval || lam.is_zero() {
        return Q::zero();
    }
    let step = gamma.clone() / (q(4, 1) * lam);
    let k = crate::scalar::ceil_int(&(Q::from_integer(1.into()) / step));
    let k: usize = num::ToPrimitive::to_usize(&k).unwrap_or(usize::MAX).min(1 << 16);
    let mut worst = Q::zero();
    for i in 0..=k {
        let r = q(i as i64, k as i64);
        let imgs: Vec<TreePoint<Q>> = (0..arms).map(|a| f.eval(&TreePoint::new(a, r.clone())).unwrap()).collect();
        for a in 0..arms {
            for b in a + 1..arms {
                let d = metric_dist(&imgs[a], &imgs[b]);
                if d > worst {
                    worst = d;
                }
            }
        }
    }
    worst
}

/// Base map `f̂_{γ,n}` with its flattening and certificates.
pub fn build_base_map(gamma: &Q, level: u32) -> Result<BaseMapContract> {
    if *gamma <= Q::zero() || *gamma > q(1, 1) {
        return Err(Error::Domain("gamma must lie in (0, 1]".into()));
    }
    let map = base_map(level)?;
    if !map.equivariance_check() {
        return Err(Error::Verification("base map lost equivariance".into()));
    }
    if level >= 2 {
        let p = PLMap::<Q>::cover_project(map.dom())?;
        let below = base_map(level - 1)?;
        if p.compose(&map)? != below.compose(&p)? {
            return Err(Error::Verification(format!("base map semiconjugacy fails at level {level}")));
        }
    }
    let exact_n = exactness_certificate(&map, 64, &q(1, 1))
        .ok_or_else(|| Error::Verification("base map arms never cover the tree".into()))?;
    let flattening = if level == 1 { Flattening::Interval } else { Flattening::Radius };
    let deviation = flattening_deviation(&map, flattening, gamma);
    let contract_holds = deviation < *gamma;
    Ok(BaseMapContract { gamma: gamma.clone(), level, map, flattening, exact_n, deviation, contract_holds })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_one_contract() {
        let b = build_base_map(&q(1, 1), 1).unwrap();
        assert!(b.contract_holds);
        assert_eq!(b.exact_n, 1);
        assert_eq!(b.map, n_map::<Q>());
    }

    #[test]
    fn higher_levels_commute() {
        let b = build_base_map(&q(1, 4), 3).unwrap();
        assert_eq!(b.map.dom().arms(), 8);
        assert!(!b.contract_holds);
        assert!(build_base_map(&q(0, 1), 1).is_err());
    }
}
