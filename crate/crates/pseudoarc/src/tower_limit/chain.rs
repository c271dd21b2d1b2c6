use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pl_tree::Subtree;
use crate::scalar::{ceil_int, q};
use crate::Q;

/// Sets with an exact diameter.
pub trait Diam {
    fn diam(&self) -> Q;
}

impl Diam for (Q, Q) {
    fn diam(&self) -> Q {
        (self.1.clone() - self.0.clone()).abs()
    }
}

impl Diam for Subtree<Q> {
    fn diam(&self) -> Q {
        Subtree::diam(self)
    }
}

/// `max diam` over a nonempty family.
pub fn mesh<T: Diam>(sets: &[T]) -> Result<Q> {
    sets.iter()
        .map(Diam::diam)
        .reduce(|a, b| if b > a { b } else { a })
        .ok_or_else(|| Error::Domain("mesh of an empty family".into()))
}

/// Chain of closed intervals in the signed coordinate of the arc.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainCover {
    pub links: Vec<Link>,
    #[serde(with = "crate::json::rat")]
    pub mesh: Q,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Link {
    #[serde(with = "crate::json::rat")]
    pub lo: Q,
    #[serde(with = "crate::json::rat")]
    pub hi: Q,
}

impl Diam for Link {
    fn diam(&self) -> Q {
        self.hi.clone() - self.lo.clone()
    }
}

impl ChainCover {
    /// Consecutive links meet, others are disjoint.
    pub fn is_chain(&self) -> bool {
        let l = &self.links;
        for i in 0..l.len() {
            if l[i].lo > l[i].hi {
                return false;
            }
            for j in i + 1..l.len() {
                let meet = l[i].lo <= l[j].hi && l[j].lo <= l[i].hi;
                if meet != (j == i + 1) {
                    return false;
                }
            }
        }
        true
    }

    /// The union contains `[lo, hi]`.
    pub fn covers(&self, lo: &Q, hi: &Q) -> bool {
        let mut ivs: Vec<(&Q, &Q)> = self.links.iter().map(|k| (&k.lo, &k.hi)).collect();
        ivs.sort();
        let mut reach = lo.clone();
        for (a, b) in ivs {
            if *a > reach {
                break;
            }
            if *b > reach {
                reach = b.clone();
            }
        }
        reach >= *hi && self.links.iter().any(|k| k.lo <= *lo)
    }
}

/// Links `D_i = [-1 + (2i - 1)/(j - 1), -1 + (2i + 1)/(j - 1)]`, `i = 0..=j`, with
/// `j = ceil(4/eps)`.
pub fn chain_cover_arc(eps: &Q) -> Result<ChainCover> {
    if *eps <= Q::zero() {
        return Err(Error::Domain("eps must be positive".into()));
    }
    let j = ceil_int(&(q(4, 1) / eps.clone()));
    let j: i64 = num::ToPrimitive::to_i64(&j).filter(|&j| j <= 1 << 24).ok_or_else(|| Error::Domain("eps too small".into()))?;
    let j = j.max(3);
    let w = q(1, j - 1);
    let links: Vec<Link> = (0..=j)
        .map(|i| {
            let c = -Q::one() + q(2 * i, j - 1);
            Link { lo: c.clone() - w.clone(), hi: c + w.clone() }
        })
        .collect();
    let mesh = mesh(&links)?;
    Ok(ChainCover { links, mesh })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_link_for_five() {
        let c = chain_cover_arc(&q(4, 5)).unwrap();
        assert_eq!(c.links.len(), 6);
        assert_eq!(c.links[0], Link { lo: q(-5, 4), hi: q(-3, 4) });
        assert_eq!(c.links[0].hi, c.links[1].lo);
        assert!(c.is_chain());
        assert!(c.covers(&q(-1, 1), &q(1, 1)));
    }

    #[test]
    fn mesh_examples() {
        assert_eq!(mesh(&[(q(0, 1), q(1, 3))]).unwrap(), q(1, 3));
        assert!(mesh::<Link>(&[]).is_err());
        let c = chain_cover_arc(&q(1, 4)).unwrap();
        assert!(c.mesh <= q(1, 4));
        assert_eq!(c.links.len(), 17);
    }
}
