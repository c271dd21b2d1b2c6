//! Recursive crooked zig-zag on the 2-arm tree.
//!
//! `pattern(x, y, m)` walks from `x` to `y`, turning back by `m` at each
//! level: `x -> y - m -> x + m -> y`, recursively, until steps are at most
//! `2m`.

use crate::error::Result;
use crate::pl_tree::PLMap;
use crate::scalar::Scalar;

/// Turning values of the pattern from `x` to `y` with turn-back `m`.
pub fn pattern<S: Scalar>(x: &S, y: &S, m: &S) -> Vec<S> {
    let base = S::two() * m.clone();
    let mut out = vec![x.clone()];
    walk(x, y, m, &base, &mut out);
    out
}

fn walk<S: Scalar>(x: &S, y: &S, m: &S, base: &S, out: &mut Vec<S>) {
    if (y.clone() - x.clone()).abs() <= *base {
        out.push(y.clone());
        return;
    }
    let sm = if y > x { m.clone() } else { -m.clone() };
    let back = y.clone() - sm.clone();
    let fwd = x.clone() + sm;
    walk(x, &back, m, base, out);
    walk(&back, &fwd, m, base, out);
    walk(&fwd, y, m, base, out);
}

/// Number of monotone pieces of `pattern(-1, 1, m)`.
pub fn lap_count<S: Scalar>(m: &S) -> usize {
    pattern(&-S::one(), &S::one(), m).len() - 1
}

/// `lap_count` from the length recursion `N(L) = 2 N(L - m) + N(L - 2m)`,
/// without building the pattern.
pub fn predicted_laps<S: Scalar>(m: &S) -> f64 {
    let base = S::two() * m.clone();
    let mut lens = Vec::new();
    let mut l = S::two();
    while l > base {
        lens.push(l.clone());
        l = l - m.clone();
    }
    let k = lens.len();
    let mut n = vec![1.0f64; k + 2];
    for i in (0..k).rev() {
        n[i] = 2.0 * n[i + 1] + n[i + 2];
    }
    n[0]
}

/// The pattern from `-1` to `1` as an odd map of `[-1, 1]`, with uniform
/// domain spacing.
pub fn pattern_map<S: Scalar>(m: &S) -> Result<PLMap<S>> {
    let vals = pattern(&-S::one(), &S::one(), m);
    let n = S::from_usize(vals.len() - 1).unwrap();
    let graph: Vec<(S, S)> = vals
        .into_iter()
        .enumerate()
        .map(|(i, v)| (S::two() * S::from_usize(i).unwrap() / n.clone() - S::one(), v))
        .collect();
    PLMap::from_signed_graph(&graph)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;
    use num::rational::BigRational;

    #[test]
    fn lap_counts() {
        assert_eq!(lap_count(&q(1, 2)), 7);
        assert_eq!(lap_count(&q(2, 5)), 17);
        assert_eq!(lap_count(&q(3, 10)), 99);
        assert_eq!(lap_count(&q(1, 4)), 239);
        for m in [q(1, 2), q(2, 5), q(3, 10), q(1, 4), q(2, 7)] {
            assert_eq!(predicted_laps(&m), lap_count(&m) as f64);
        }
    }

    #[test]
    fn odd_and_onto() {
        let m = q(2, 5);
        let v: Vec<BigRational> = pattern(&-q(1, 1), &q(1, 1), &m);
        let n = v.len();
        for i in 0..n {
            assert_eq!(v[i], -v[n - 1 - i].clone());
        }
        let f = pattern_map(&m).unwrap();
        assert!(f.equivariance_check());
        assert!(f.image_subtree(&crate::pl_tree::Subtree::whole(2)).is_whole(2));
    }
}
