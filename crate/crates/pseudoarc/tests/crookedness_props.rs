mod common;

use common::*;
use proptest::prelude::*;
use proptest::strategy::ValueTree;
use pseudoarc::crookedness::pattern::pattern_map;
use pseudoarc::crookedness::{
    arc_is_crooked, certify_map_crooked, exactness_certificate, expansion_check, expansion_witness, fold_expand,
    grid_segments, CrookStatus,
};
use pseudoarc::pl_tree::{metric_dist, n_map, tent, Arc, PLMap, Subtree, Tree, TreePoint};
use pseudoarc::scalar::q;
use pseudoarc::{Error, Q};

/// Grid search for `s < t` with both endpoint conditions, in floating point.
fn grid_crooked(kappa: &PLMap<Q>, alpha: &Arc<Q>, eps: f64, n: usize) -> bool {
    let kf = kappa.convert::<f64>();
    let af = Arc::new(alpha.points().iter().map(|p| p.convert::<f64>()).collect()).unwrap();
    let g: Vec<TreePoint<f64>> = (0..=n).map(|k| kf.eval(&af.at(&(k as f64 / n as f64))).unwrap()).collect();
    let (c0, c1) = (&g[0], &g[n]);
    let first_s = (0..=n).find(|&k| metric_dist(&g[k], c1) <= eps);
    let last_t = (0..=n).rev().find(|&k| metric_dist(c0, &g[k]) <= eps);
    matches!((first_s, last_t), (Some(s), Some(t)) if s < t)
}

fn random_arc(arms: usize) -> impl Strategy<Value = Arc<Q>> {
    (point(arms, 97), point(arms, 89))
        .prop_filter("distinct", |(a, b)| a != b)
        .prop_map(|(a, b)| Arc::between(a, b).unwrap())
}

#[test]
fn single_arc_examples() {
    let id = PLMap::<Q>::identity(Tree::new(2).unwrap());
    let unit = Arc::between(TreePoint::new(1, q(1, 1)), TreePoint::new(0, q(1, 1))).unwrap();
    let v = arc_is_crooked(&id, &unit, &q(2, 5)).unwrap();
    assert_eq!(v.status, CrookStatus::NotCrooked);
    assert_eq!(v.witness.as_ref(), Some(&unit));
    let v = arc_is_crooked(&tent::<Q>(), &unit, &q(1, 100)).unwrap();
    assert_eq!(v.params, Some((q(0, 1), q(1, 1))));
    let degenerate = Arc::new(vec![TreePoint::new(0, q(1, 2)), TreePoint::new(1, q(1, 2))]).unwrap();
    assert!(arc_is_crooked(&id, &degenerate, &q(0, 1)).is_err());
}

#[test]
fn rotation_is_not_crooked() {
    let r = PLMap::<Q>::rotation(Tree::new(4).unwrap());
    let v = certify_map_crooked(&r, &q(1, 4)).unwrap();
    assert_eq!(v.status, CrookStatus::NotCrooked);
    let w = v.witness.unwrap();
    assert!(!arc_is_crooked(&r, &w, &q(1, 4)).unwrap().is_crooked());
    assert!(certify_map_crooked(&r, &q(0, 1)).is_err());
}

#[test]
fn zigzag_grid_arcs_are_crooked() {
    let m = q(2, 5);
    let p = pattern_map(&m).unwrap();
    let slack = p.max_slope().to_f64_lossy() * 2.0 / 4000.0 + 1e-9;
    let pts: Vec<TreePoint<Q>> = (-16..=16).map(|k| TreePoint::from_signed(q(k, 16))).collect();
    for a in &pts {
        for b in &pts {
            if a < b {
                let arc = Arc::between(a.clone(), b.clone()).unwrap();
                assert!(arc_is_crooked(&p, &arc, &m).unwrap().is_crooked(), "{a:?} {b:?}");
                assert!(grid_crooked(&p, &arc, 0.4 + slack, 4000));
            }
        }
    }
}

#[test]
fn crooked_verdict_holds_off_net() {
    let p = pattern_map(&q(2, 5)).unwrap();
    let v = certify_map_crooked(&p, &q(1, 2)).unwrap();
    assert!(v.is_crooked());
    assert!(v.certified_eps >= v.requested_eps);
    assert!(v.delta_net.is_some());
    let mut runner = proptest::test_runner::TestRunner::deterministic();
    let strat = random_arc(2);
    for _ in 0..1000 {
        let arc = strat.new_tree(&mut runner).unwrap().current();
        assert!(arc_is_crooked(&p, &arc, &v.certified_eps).unwrap().is_crooked(), "{arc:?}");
    }
}

#[test]
fn verdict_independent_of_thread_count() {
    let p = pattern_map(&q(1, 2)).unwrap();
    let run = |n| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .unwrap()
            .install(|| certify_map_crooked(&p, &q(2, 5)).unwrap())
    };
    let a = run(1);
    assert_eq!(a, run(3));
    assert_eq!(a.status, CrookStatus::NotCrooked);
}

#[test]
fn verdict_json_shape() {
    let v = certify_map_crooked(&tent::<Q>(), &q(1, 4)).unwrap();
    let j = v.to_json();
    assert_eq!(j["status"], "NOT_CROOKED");
    assert_eq!(j["path_class"], "injective arcs");
    assert!(j["witness"].is_array());
}

#[test]
fn expansion_examples() {
    let g: Vec<(Q, Q)> = [(-2, 1), (-1, -1), (0, 1), (1, -1), (2, 1)].iter().map(|&(u, v)| (q(u, 2), q(v, 1))).collect();
    let w = PLMap::from_signed_graph(&g).unwrap();
    assert!(expansion_check(&w, &q(1, 8)).unwrap());
    assert!(!expansion_check(&PLMap::<Q>::identity(Tree::new(2).unwrap()), &q(1, 8)).unwrap());
}

#[test]
fn exactness_examples() {
    assert_eq!(exactness_certificate(&tent::<Q>(), 64, &q(1, 4)), Some(3));
    assert_eq!(exactness_certificate(&PLMap::<Q>::identity(Tree::new(2).unwrap()), 64, &q(1, 4)), None);
    assert_eq!(exactness_certificate(&PLMap::<Q>::rotation(Tree::new(8).unwrap()), 64, &q(1, 4)), None);
}

#[test]
fn fold_postconditions() {
    for (f, delta) in [(tent::<Q>(), q(1, 10)), (n_map::<Q>(), q(1, 8))] {
        let r = fold_expand(&f, &delta).unwrap();
        assert!(r.xi < r.delta_used);
        assert!(r.map.sup_distance(&f).unwrap() < delta);
        assert_eq!(r.map, f.compose(&r.h).unwrap());
        assert!(expansion_check(&r.map, &(r.xi.clone() / q(5, 1))).unwrap());
        assert!(exactness_certificate(&r.map, 64, &r.expansion_beta).is_some());
        assert!(r.h.equivariance_check());
        assert_eq!(r.map.equivariance_check(), f.equivariance_check());
    }
    let id = PLMap::<Q>::identity(Tree::new(2).unwrap());
    assert!(matches!(fold_expand(&id, &q(1, 10)), Err(Error::NotExact(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn single_arc_against_grid(f in any_map(), arc in random_arc(2), e in 1i64..12) {
        let arms = f.dom().arms();
        let pts: Vec<_> = arc.points().iter().map(|p| TreePoint::new(p.arm % arms, p.radius.clone())).collect();
        prop_assume!(pts[0] != *pts.last().unwrap());
        let arc = Arc::between(pts[0].clone(), pts.last().unwrap().clone()).unwrap();
        let eps = q(e, 12);
        let ef = e as f64 / 12.0;
        let exact = arc_is_crooked(&f, &arc, &eps).unwrap().is_crooked();
        let slack = f.max_slope().to_f64_lossy() * 2.0 / 4000.0 + 1e-9;
        if exact {
            prop_assert!(grid_crooked(&f, &arc, ef + slack, 4000));
        } else {
            prop_assert!(!grid_crooked(&f, &arc, ef - 1e-9, 4000));
        }
    }

    #[test]
    fn certify_sound_and_monotone(f in prop_oneof![odd_signed(3), map_on(2, 3)], e in 2i64..10, arcs in proptest::collection::vec(random_arc(2), 40)) {
        let eps = q(e, 10);
        let v = match certify_map_crooked(&f, &eps) {
            Err(Error::Undecided(_)) => return Ok(()),
            v => v.unwrap(),
        };
        match v.status {
            CrookStatus::NotCrooked => {
                let w = v.witness.clone().unwrap();
                prop_assert!(!arc_is_crooked(&f, &w, &eps).unwrap().is_crooked());
                prop_assert!(!grid_crooked(&f, &w, e as f64 / 10.0 - 1e-9, 4000));
            }
            CrookStatus::Crooked => {
                for a in &arcs {
                    prop_assert!(arc_is_crooked(&f, a, &v.certified_eps).unwrap().is_crooked());
                }
                for bigger in [q(e + 1, 10), q(e + 5, 10)] {
                    match certify_map_crooked(&f, &bigger) {
                        Err(Error::Undecided(_)) => {}
                        v => prop_assert!(v.unwrap().is_crooked()),
                    }
                }
            }
        }
    }

    #[test]
    fn expansion_against_brute_force(f in prop_oneof![odd_signed(3), map_on(2, 4)], b in 1i64..8) {
        let beta = q(b, 16);
        let pts: Vec<Q> = (-64..=64).map(|k| q(k, 64)).collect();
        let to_pt = |u: &Q| TreePoint::from_signed(u.clone());
        let mut brute_violation = false;
        for (i, x) in pts.iter().enumerate() {
            for y in &pts[i + 1..] {
                let len = y.clone() - x.clone();
                if len > beta { break; }
                let param: Vec<(Q, TreePoint<Q>)> = vec![(q(0, 1), to_pt(x)), (q(1, 1), to_pt(y))];
                let mut pieces = param;
                if x < &q(0, 1) && y > &q(0, 1) {
                    pieces.insert(1, (-x.clone() / len.clone(), TreePoint::branch()));
                }
                let img = pseudoarc::pl_tree::path::image(&f.compose_path(&pieces).unwrap());
                if img.diam() < q(2, 1) * len.clone() {
                    brute_violation = true;
                }
            }
        }
        let w = expansion_witness(&f, &beta).unwrap();
        if brute_violation {
            prop_assert!(w.is_some());
        }
        if let Some(w) = w {
            prop_assert!(w.length <= beta);
            prop_assert!(w.image_diam < q(2, 1) * w.length.clone());
            let img = pseudoarc::pl_tree::path::image(&f.compose_path(&w.arc.parametrize()).unwrap());
            prop_assert_eq!(img.diam(), w.image_diam);
        }
    }

    #[test]
    fn exactness_against_power(f in prop_oneof![odd_signed(3), map_on(2, 3)], g in 2i64..8) {
        let grid = q(1, g);
        let cert = exactness_certificate(&f, 6, &grid);
        let arms = f.dom().arms();
        let whole_at = |n: u32| {
            let p = f.power(n, Some(200_000)).unwrap();
            grid_segments(&f.dom(), &grid).iter().all(|a| p.image_subtree(a).is_whole(arms))
        };
        match cert {
            Some(n) => {
                prop_assert!(whole_at(n));
                for k in 1..n { prop_assert!(!whole_at(k)); }
            }
            None => {
                for k in 1..=3 { prop_assert!(!whole_at(k)); }
            }
        }
        let _ = Subtree::<Q>::whole(arms);
    }
}

trait Lossy {
    fn to_f64_lossy(&self) -> f64;
}

impl Lossy for Q {
    fn to_f64_lossy(&self) -> f64 {
        num::ToPrimitive::to_f64(self).unwrap()
    }
}
