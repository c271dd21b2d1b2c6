use crate::pl_tree::{PLMap, Subtree, Tree};
use crate::scalar::Scalar;

/// Radial segments `[kg, (k+1)g]` on every arm; the last one is `[1-g, 1]`.
pub fn grid_segments<S: Scalar>(tree: &Tree, grid: &S) -> Vec<Subtree<S>> {
    let mut out = Vec::new();
    for arm in 0..tree.arms() {
        let mut lo = S::zero();
        loop {
            let hi = lo.clone() + grid.clone();
            if hi >= S::one() {
                let lo = S::one() - grid.clone();
                out.push(radial(arm, lo, S::one()));
                break;
            }
            out.push(radial(arm, lo, hi.clone()));
            lo = hi;
        }
    }
    out
}

fn radial<S: Scalar>(arm: usize, lo: S, hi: S) -> Subtree<S> {
    if lo.is_zero() {
        let mut h = vec![S::zero(); arm + 1];
        h[arm] = hi;
        Subtree::Star(h)
    } else {
        Subtree::Seg { arm, lo, hi }
    }
}

/// Smallest `N <= n_max` with `f^N(A)` the whole tree for every grid segment.
pub fn exactness_certificate<S: Scalar>(f: &PLMap<S>, n_max: u32, grid: &S) -> Option<u32> {
    if *grid <= S::zero() || *grid > S::one() || f.dom() != f.cod() {
        return None;
    }
    let arms = f.dom().arms();
    let mut images = grid_segments(&f.dom(), grid);
    for n in 1..=n_max {
        images = images.iter().map(|a| f.image_subtree(a)).collect();
        if images.iter().all(|a| a.is_whole(arms)) {
            return Some(n);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pl_tree::{n_map, tent};
    use crate::scalar::q;
    use crate::Q;

    #[test]
    fn tent_quarter_grid() {
        assert_eq!(exactness_certificate(&tent::<Q>(), 64, &q(1, 4)), Some(3));
        assert_eq!(exactness_certificate(&tent::<f64>(), 64, &0.25), Some(3));
    }

    #[test]
    fn isometries_never_certify() {
        let t = Tree::new(4).unwrap();
        assert_eq!(exactness_certificate(&PLMap::<Q>::identity(t), 64, &q(1, 4)), None);
        assert_eq!(exactness_certificate(&PLMap::<Q>::rotation(t), 64, &q(1, 4)), None);
    }

    #[test]
    fn n_map_certifies() {
        assert!(exactness_certificate(&n_map::<Q>(), 64, &q(1, 16)).is_some());
    }

    #[test]
    fn segments_cover_arms() {
        let segs = grid_segments(&Tree::new(2).unwrap(), &q(1, 3));
        assert_eq!(segs.len(), 6);
        let segs = grid_segments(&Tree::new(2).unwrap(), &q(2, 5));
        assert_eq!(segs.len(), 6);
        assert_eq!(segs[2], Subtree::Seg { arm: 0, lo: q(3, 5), hi: q(1, 1) });
    }
}
