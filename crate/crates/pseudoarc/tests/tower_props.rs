mod common;

use std::sync::OnceLock;

use proptest::prelude::*;
use pseudoarc::crookedness::arc_is_crooked;
use pseudoarc::json::rat_from_json;
use pseudoarc::pl_tree::{metric_dist, n_map, tent, Arc, PLMap, TreePoint};
use pseudoarc::scalar::q;
use pseudoarc::tower_limit::*;
use pseudoarc::{Error, Q};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pattern_tower() -> &'static Tower {
    static T: OnceLock<Tower> = OnceLock::new();
    T.get_or_init(|| {
        let mut spec = TowerSpec::new(vec![q(1, 2), q(2, 5)]);
        spec.strategy = TowerStrategy::Pattern;
        spec.strict = false;
        build_tower(&spec).unwrap()
    })
}

#[test]
fn base_map_contract() {
    let b = build_base_map(&q(1, 1), 1).unwrap();
    assert!(b.contract_holds);
    assert_eq!(b.flattening, Flattening::Interval);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 2..=3u32 {
        let b = build_base_map(&q(1, 4), n).unwrap();
        let arms = 1usize << n;
        let lam = b.map.max_slope();
        let mut sampled = q(0, 1);
        for _ in 0..10_000 {
            let r = q(rng.gen_range(0..=4096), 4096);
            let (i, j) = (rng.gen_range(0..arms), rng.gen_range(0..arms));
            let d = metric_dist(&b.map.eval(&TreePoint::new(i, r.clone())).unwrap(), &b.map.eval(&TreePoint::new(j, r)).unwrap());
            if d > sampled {
                sampled = d;
            }
        }
        // the net misses at most a Lipschitz step
        let step = q(1, 4) / (q(4, 1) * lam);
        assert!(sampled <= b.deviation.clone() + q(2, 1) * step.clone() * b.map.max_slope());
        assert!(b.deviation <= sampled + q(2, 1) * step * b.map.max_slope());
        let p = PLMap::<Q>::cover_project(b.map.dom()).unwrap();
        let below = base_map(n - 1).unwrap();
        assert_eq!(p.compose(&b.map).unwrap(), below.compose(&p).unwrap());
    }
}

#[test]
fn spec_validation() {
    assert!(TowerSpec::new(vec![q(1, 4), q(1, 4)]).validate().is_err());
    assert!(TowerSpec::new(vec![]).validate().is_err());
    assert!(TowerSpec::new(vec![q(3, 2)]).validate().is_err());
    let mut s = TowerSpec::new(vec![q(1, 4)]);
    s.depth = 2;
    assert!(s.validate().is_err());
}

#[test]
fn perturb_stage_reports_budget() {
    let mut spec = TowerSpec::new(vec![q(1, 4)]);
    spec.retry_budget = 1;
    match build_tower(&spec) {
        Err(Error::Budget(msg)) => assert!(msg.contains("stage 0"), "{msg}"),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn pattern_tower_squares() {
    let t = pattern_tower();
    assert_eq!(t.stages(), 2);
    let checks = verify_tower(t, false).unwrap();
    assert!(checks.iter().all(|c| c.ok), "{checks:?}");
    let names: Vec<&str> = checks.iter().map(|c| c.name.as_str()).collect();
    assert!(names.contains(&"commutation f_1_1"));
    assert!(names.contains(&"factorization f_0_2"));
    for k in 0..2 {
        for n in 1..=2 {
            assert!(t.map(k, n).equivariance_check());
        }
    }
}

#[test]
fn pattern_tower_certificates() {
    let t = pattern_tower();
    for (k, c) in t.certificates.iter().enumerate() {
        assert_eq!(c.crooked[0]["status"], "CROOKED");
        // lifted levels are not crooked; the stored witness says why
        assert_eq!(c.crooked[1]["status"], "NOT_CROOKED");
        let pts: Vec<TreePoint<Q>> = c.crooked[1]["witness"]
            .as_array()
            .unwrap()
            .iter()
            .map(|p| TreePoint::new(p[0].as_u64().unwrap() as usize, rat_from_json(&p[1]).unwrap()))
            .collect();
        let arc = Arc::new(pts).unwrap();
        assert!(!arc_is_crooked(t.map(k, 2), &arc, &t.eps[k]).unwrap().is_crooked());
        assert!(c.estimates.iter().all(|e| e.ok));
    }
    assert_eq!(t.gamma[0], t.eps[0]);
    assert!(t.gamma[1] < t.eps[1]);
}

#[test]
fn tower_roundtrip() {
    let t = pattern_tower();
    let dir = std::env::temp_dir().join(format!("tower-roundtrip-{}", std::process::id()));
    save_tower(t, &dir).unwrap();
    assert!(dir.join("maps").join("f_1_2.json").exists());
    let back = load_tower(&dir).unwrap();
    assert_eq!(&back, t);
    let checks = verify_tower(&back, true).unwrap();
    let bad: Vec<&Check> = checks.iter().filter(|c| !c.ok).collect();
    assert_eq!(bad.len(), 2, "{bad:?}");
    assert!(bad.iter().all(|c| c.name.starts_with("crooked") && c.name.contains("_2 at")));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn schedule_tightening_and_budget() {
    let mut spec = TowerSpec::new(vec![q(1, 2), q(2, 5), q(1, 3)]);
    spec.strategy = TowerStrategy::Pattern;
    spec.strict = false;
    match build_tower(&spec) {
        Err(Error::Budget(msg)) => assert!(msg.contains("stage 2"), "{msg}"),
        other => panic!("unexpected {other:?}"),
    }
    let t = pattern_tower();
    let maps: Vec<&PLMap<Q>> = (0..2).map(|k| t.map(k, 1)).collect();
    let b = schedule_bound(&maps, 2).unwrap();
    let lam = maps[0].compose(maps[1]).unwrap().max_slope();
    assert_eq!(b, q(1, 2) / lam);
    assert!(schedule_check(t).is_empty());
}

#[test]
fn eps_map_bound_examples() {
    assert_eq!(eps_map_formula(&q(1, 16), 1), q(5, 8));
    let sched = [q(1, 4), q(1, 16), q(1, 64), q(1, 256)];
    for k in 1..4 {
        assert!(eps_map_formula(&sched[k], k) < eps_map_formula(&sched[k - 1], k - 1));
    }
    let t = pattern_tower();
    assert!(eps_map_bound(t, 2).is_err());
    for k in 0..2 {
        let r = eps_map_check(t, k, 1000, 5 + k as u64).unwrap();
        assert!(r.holds, "{r:?}");
        assert_eq!(r.pairs, 1000);
    }
}

#[test]
fn rotation_structure() {
    let t = pattern_tower();
    for n in 1..=2 {
        assert!(rotation_orbit_check(t, n, 200, 9).unwrap());
    }
}

#[test]
fn shift_examples() {
    let f = n_map::<Q>();
    let fixed = LimitPoint::constant(1, TreePoint::branch(), 5);
    assert_eq!(shift_on_truncation(&fixed, &f).unwrap(), fixed);
    let deep = TreePoint::new(0, q(2, 7));
    let p = LimitPoint::from_deep(1, &vec![&f; 4], deep).unwrap();
    let back = shift_on_truncation(&unshift_on_truncation(&p, &f).unwrap(), &f).unwrap();
    assert_eq!(back.coords[..4], p.coords[..4]);
    let bad = LimitPoint { level: 1, coords: vec![TreePoint::new(0, q(1, 3)), TreePoint::new(0, q(1, 3))] };
    assert!(shift_on_truncation(&bad, &f).is_err());
}

#[test]
fn chain_cover_examples() {
    let c = chain_cover_arc(&q(4, 5)).unwrap();
    assert_eq!((c.links[0].lo.clone(), c.links[0].hi.clone()), (q(-5, 4), q(-3, 4)));
    assert_eq!(mesh(&[(q(0, 1), q(1, 3))]).unwrap(), q(1, 3));
    assert!(mesh::<Link>(&[]).is_err());
    let t = pattern_tower();
    let covers: Vec<ChainCover> = t.eps.iter().map(|e| chain_cover_arc(e).unwrap()).collect();
    assert!(covers.windows(2).all(|w| w[1].mesh <= w[0].mesh));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn shift_keeps_coherence(f in prop_oneof![Just(tent::<Q>()), Just(n_map::<Q>()), common::odd_signed(3)], a in 0usize..2, r in 0i64..=997, depth in 1usize..6) {
        let bonds = vec![&f; depth - 1];
        let p = LimitPoint::from_deep(1, &bonds, TreePoint::new(a, q(r, 997))).unwrap();
        let s = shift_on_truncation(&p, &f).unwrap();
        prop_assert_eq!(s.depth(), depth);
        s.check_coherent(&bonds).unwrap();
        if let Ok(u) = unshift_on_truncation(&p, &f) {
            u.check_coherent(&bonds).unwrap();
            prop_assert_eq!(&u.coords[..depth - 1], &p.coords[1..]);
        }
    }

    #[test]
    fn chain_cover_invariants(n in 1i64..200, d in 1i64..200) {
        let eps = q(n, d);
        let c = chain_cover_arc(&eps).unwrap();
        prop_assert!(c.mesh <= eps);
        prop_assert!(c.is_chain());
        prop_assert!(c.covers(&q(-1, 1), &q(1, 1)));
        prop_assert_eq!(mesh(&c.links).unwrap(), c.mesh.clone());
    }
}
