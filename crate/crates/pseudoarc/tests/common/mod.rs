#![allow(dead_code)]

use num::rational::BigRational;
use proptest::prelude::*;
use pseudoarc::pl_tree::{PLMap, Tree, TreePoint};
use pseudoarc::scalar::q;
use pseudoarc::Q;

pub fn point(arms: usize, den: i64) -> impl Strategy<Value = TreePoint<Q>> {
    (0..arms, 0..=den).prop_map(move |(a, n)| TreePoint::new(a, q(n, den)))
}

/// Breakpoint parameters `0 = t0 < ... < tk = 1` with denominator `den`.
pub fn params(den: i64, max_inner: usize) -> impl Strategy<Value = Vec<Q>> {
    proptest::collection::btree_set(1..den, 0..=max_inner).prop_map(move |s| {
        let mut v = vec![q(0, 1)];
        v.extend(s.into_iter().map(|n| q(n, den)));
        v.push(q(1, 1));
        v
    })
}

/// Arbitrary PL self-map of `Tree(arms)`.
pub fn map_on(arms: usize, max_inner: usize) -> impl Strategy<Value = PLMap<Q>> {
    let arm_lists = proptest::collection::vec(
        (params(32, max_inner), proptest::collection::vec(point(arms, 16), max_inner + 2)),
        arms,
    );
    (point(arms, 16), arm_lists).prop_map(move |(centre, lists)| {
        let lists = lists
            .into_iter()
            .map(|(ts, imgs)| {
                let n = ts.len();
                ts.into_iter()
                    .zip(std::iter::once(centre.clone()).chain(imgs.into_iter()))
                    .take(n)
                    .collect()
            })
            .collect();
        let t = Tree::new(arms).unwrap();
        PLMap::new(t, t, lists).unwrap()
    })
}

pub fn any_map() -> impl Strategy<Value = PLMap<Q>> {
    prop_oneof![map_on(2, 4), map_on(4, 3)]
}

/// Rotation-equivariant self-map of `Tree(arms)` fixing the branch point.
pub fn equivariant_on(arms: usize, max_inner: usize) -> impl Strategy<Value = PLMap<Q>> {
    (params(32, max_inner), proptest::collection::vec(point(arms, 16), max_inner + 1)).prop_map(move |(ts, imgs)| {
        let n = ts.len();
        let arm0 = ts
            .into_iter()
            .zip(std::iter::once(TreePoint::branch()).chain(imgs.into_iter()))
            .take(n)
            .collect();
        PLMap::equivariant(Tree::new(arms).unwrap(), arm0).unwrap()
    })
}

/// Odd map of the 2-arm tree given by its graph in the signed coordinate.
pub fn odd_signed(max_inner: usize) -> impl Strategy<Value = PLMap<Q>> {
    (params(32, max_inner), proptest::collection::vec(-16i64..=16, max_inner + 1)).prop_map(|(ts, vals)| {
        let n = ts.len();
        let half: Vec<(Q, Q)> = ts
            .into_iter()
            .zip(std::iter::once(0).chain(vals))
            .take(n)
            .map(|(t, v)| (t, q(v, 16)))
            .collect();
        let mut full: Vec<(Q, Q)> = half.iter().rev().map(|(u, v)| (-u.clone(), -v.clone())).collect();
        full.extend(half.into_iter().skip(1));
        PLMap::from_signed_graph(&full).unwrap()
    })
}

pub fn rat(max_den: i64) -> impl Strategy<Value = BigRational> {
    (0..=max_den, 1..=max_den).prop_map(|(n, d)| q(n.min(d), d))
}
