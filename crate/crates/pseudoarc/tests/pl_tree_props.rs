mod common;

use common::*;
use proptest::prelude::*;
use pseudoarc::pl_tree::{
    map_from_str, map_to_string, metric_dist, n_map, tent, Arc, PLMap, Subtree, Tree, TreePoint,
};
use pseudoarc::scalar::q;
use pseudoarc::{QPoint, Q};

fn ix(x: Q) -> QPoint {
    TreePoint::from_interval(x)
}

#[test]
fn metric_examples() {
    let a = TreePoint::new(0, q(3, 10));
    assert_eq!(metric_dist(&a, &a), q(0, 1));
    assert_eq!(metric_dist(&a, &TreePoint::new(1, q(2, 5))), q(7, 10));
    assert_eq!(Tree::new(8).unwrap().diameter::<Q>(), q(2, 1));
    assert!(Tree::new(6).is_err());
    assert!(Tree::new(1).is_err());
}

#[test]
fn eval_examples() {
    let id = PLMap::<Q>::identity(Tree::new(2).unwrap());
    let p = TreePoint::new(0, q(1, 2));
    assert_eq!(id.eval(&p).unwrap(), p);
    let t = tent::<Q>();
    assert_eq!(t.eval(&ix(q(1, 4))).unwrap(), ix(q(1, 2)));
    assert_eq!(t.compose(&t).unwrap().eval(&ix(q(1, 8))).unwrap(), ix(q(1, 2)));
    assert!(t.eval(&TreePoint::new(0, q(3, 2))).is_err());
    for (s, img) in t.arm(0) {
        assert_eq!(&t.eval(&TreePoint::new(0, s.clone())).unwrap(), img);
    }
}

#[test]
fn n_map_vertices() {
    let f = n_map::<Q>();
    let s = |u: Q| TreePoint::from_signed(u);
    assert_eq!(f.eval(&s(-q(1, 3))).unwrap(), s(q(1, 1)));
    assert_eq!(f.eval(&s(q(1, 3))).unwrap(), s(-q(1, 1)));
    assert_eq!(f.eval(&s(q(2, 3))).unwrap(), s(q(0, 1)));
    assert!(f.equivariance_check());
    assert!(!tent::<Q>().equivariance_check());
}

#[test]
fn sup_distance_offset() {
    let t = Tree::new(4).unwrap();
    let id = PLMap::<Q>::identity(t);
    let mut arms: Vec<_> = id.arm_lists().to_vec();
    arms[2] = vec![
        (q(0, 1), TreePoint::branch()),
        (q(1, 4), TreePoint::new(2, q(1, 4))),
        (q(3, 8), TreePoint::new(2, q(19, 40))),
        (q(5, 8), TreePoint::new(2, q(29, 40))),
        (q(3, 4), TreePoint::new(2, q(3, 4))),
        (q(1, 1), TreePoint::new(2, q(1, 1))),
    ];
    let shifted = PLMap::new(t, t, arms).unwrap();
    assert_eq!(id.sup_distance(&shifted).unwrap(), q(1, 10));
    assert_eq!(id.sup_distance(&id).unwrap(), q(0, 1));
}

#[test]
fn modulus_examples() {
    let t = tent::<Q>();
    assert_eq!(t.continuity_modulus(&q(1, 2)).unwrap(), Some(q(1, 4)));
    let id = PLMap::<Q>::identity(Tree::new(4).unwrap());
    assert_eq!(id.continuity_modulus(&q(1, 3)).unwrap(), Some(q(1, 3)));
    assert!(id.continuity_modulus(&q(0, 1)).is_err());
}

#[test]
fn rotation_examples() {
    let t = Tree::new(4).unwrap();
    let r = PLMap::<Q>::rotation(t);
    assert_eq!(r.eval(&TreePoint::new(3, q(1, 2))).unwrap(), TreePoint::new(0, q(1, 2)));
    assert_eq!(r.power(4, None).unwrap(), PLMap::identity(t));
    assert_ne!(r.power(2, None).unwrap(), PLMap::identity(t));
    assert!(r.equivariance_check());
    let mut arms: Vec<_> = PLMap::<Q>::identity(t).arm_lists().to_vec();
    arms[0] = vec![(q(0, 1), TreePoint::branch()), (q(1, 1), TreePoint::new(0, q(1, 2)))];
    assert!(!PLMap::new(t, t, arms).unwrap().equivariance_check());
}

#[test]
fn lift_examples() {
    let t2 = Tree::new(2).unwrap();
    let t4 = Tree::new(4).unwrap();
    assert_eq!(PLMap::<Q>::identity(t2).lift_through_cover().unwrap(), PLMap::identity(t4));
    let rot = PLMap::<Q>::rotation(t2);
    let lift = rot.lift_through_cover().unwrap();
    let p = PLMap::<Q>::cover_project(t4).unwrap();
    assert_eq!(p.compose(&lift).unwrap(), rot.compose(&p).unwrap());
    assert!(lift == PLMap::rotation(t4) || lift == PLMap::rotation_by(t4, 3));
    assert!(tent::<Q>().lift_through_cover().is_err());
}

#[test]
fn arc_parametrization() {
    let a = Arc::between(TreePoint::new(1, q(1, 2)), TreePoint::new(3, q(1, 4))).unwrap();
    assert_eq!(a.length(), q(3, 4));
    assert_eq!(a.at(&q(2, 3)), TreePoint::branch());
    assert_eq!(a.at(&q(1, 1)), TreePoint::new(3, q(1, 4)));
    assert!(Arc::new(vec![TreePoint::new(0, q(1, 2)), TreePoint::new(0, q(1, 2))]).is_err());
}

#[test]
fn json_rejects_garbage() {
    assert!(map_from_str("{\"arms\": 2}").is_err());
    assert!(map_from_str("{\"arms\": 3, \"breakpoints\": []}").is_err());
    assert!(map_from_str("not json").is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn triangle_inequality(a in point(8, 64), b in point(8, 64), c in point(8, 64)) {
        prop_assert!(metric_dist(&a, &c) <= metric_dist(&a, &b) + metric_dist(&b, &c));
        prop_assert_eq!(metric_dist(&a, &b), metric_dist(&b, &a));
    }

    #[test]
    fn compose_matches_nested_eval(f in map_on(4, 3), g in map_on(4, 3), h in map_on(4, 3), xs in proptest::collection::vec(point(4, 97), 40)) {
        let fg = f.compose(&g).unwrap();
        let fgh = fg.compose(&h).unwrap();
        let f_gh = f.compose(&g.compose(&h).unwrap()).unwrap();
        prop_assert_eq!(&fgh, &f_gh);
        for x in &xs {
            prop_assert_eq!(fg.eval(x).unwrap(), f.eval(&g.eval(x).unwrap()).unwrap());
        }
    }

    #[test]
    fn compose_with_identity(f in any_map()) {
        let id = PLMap::identity(f.dom());
        prop_assert_eq!(&id.compose(&f).unwrap(), &f);
        prop_assert_eq!(&f.compose(&id).unwrap(), &f);
    }

    #[test]
    fn sup_distance_is_a_metric(f in map_on(2, 4), g in map_on(2, 4), h in map_on(2, 4)) {
        let d = |a: &PLMap<Q>, b: &PLMap<Q>| a.sup_distance(b).unwrap();
        prop_assert_eq!(d(&f, &f), q(0, 1));
        prop_assert_eq!(d(&f, &g), d(&g, &f));
        prop_assert!(d(&f, &h) <= d(&f, &g) + d(&g, &h));
        if f != g {
            prop_assert!(d(&f, &g) > q(0, 1));
        }
    }

    #[test]
    fn sup_distance_against_grid(f in map_on(4, 3), g in map_on(4, 3)) {
        let sup = f.sup_distance(&g).unwrap();
        let n = 256i64;
        let mut grid = q(0, 1);
        for arm in 0..4 {
            for k in 0..=n {
                let p = TreePoint::new(arm, q(k, n));
                let d = metric_dist(&f.eval(&p).unwrap(), &g.eval(&p).unwrap());
                if d > grid { grid = d; }
            }
        }
        let lip = f.max_slope() + g.max_slope();
        prop_assert!(sup >= grid);
        prop_assert!(sup <= grid + lip / q(2 * n, 1));
    }

    #[test]
    fn modulus_contract(f in any_map(), pairs in proptest::collection::vec((point(4, 128), point(4, 128)), 30), e in rat(16)) {
        prop_assume!(e > q(0, 1));
        let arms = f.dom().arms();
        if let Some(l) = f.continuity_modulus(&e).unwrap() {
            for (x, y) in pairs {
                let (x, y) = (TreePoint::new(x.arm % arms, x.radius), TreePoint::new(y.arm % arms, y.radius));
                if metric_dist(&x, &y) < l {
                    prop_assert!(metric_dist(&f.eval(&x).unwrap(), &f.eval(&y).unwrap()) < e.clone());
                }
            }
        }
    }

    #[test]
    fn rotation_isometry(a in point(8, 64), b in point(8, 64), k in 0usize..8) {
        let r = PLMap::<Q>::rotation_by(Tree::new(8).unwrap(), k);
        let (ra, rb) = (r.eval(&a).unwrap(), r.eval(&b).unwrap());
        prop_assert_eq!(metric_dist(&ra, &rb), metric_dist(&a, &b));
    }

    #[test]
    fn lift_semiconjugacy(f in prop_oneof![equivariant_on(2, 4), equivariant_on(4, 3)]) {
        prop_assert!(f.equivariance_check());
        let lift = f.lift_through_cover().unwrap();
        prop_assert!(lift.equivariance_check());
        let p = PLMap::cover_project(lift.dom()).unwrap();
        prop_assert_eq!(p.compose(&lift).unwrap(), f.compose(&p).unwrap());
    }

    #[test]
    fn json_roundtrip(f in any_map()) {
        prop_assert_eq!(map_from_str(&map_to_string(&f)).unwrap(), f);
    }

    #[test]
    fn image_contains_samples(f in any_map(), xs in proptest::collection::vec(point(4, 61), 20), lo in rat(8), hi in rat(8)) {
        let arms = f.dom().arms();
        let img = f.image_subtree(&Subtree::whole(arms));
        let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        let part = f.image_radial(0, &lo, &hi);
        for x in xs {
            let x = TreePoint::new(x.arm % arms, x.radius);
            prop_assert!(img.contains(&f.eval(&x).unwrap()));
            if x.radius >= lo && x.radius <= hi {
                prop_assert!(part.contains(&f.eval(&TreePoint::new(0, x.radius.clone())).unwrap()));
            }
        }
    }

    #[test]
    fn float_agrees_with_exact(f in any_map(), xs in proptest::collection::vec(point(4, 61), 20)) {
        let ff = f.convert::<f64>();
        let arms = f.dom().arms();
        for x in xs {
            let x = TreePoint::new(x.arm % arms, x.radius);
            let e = f.eval(&x).unwrap();
            let a = ff.eval(&x.convert()).unwrap();
            let d = metric_dist(&e.convert::<f64>(), &a);
            prop_assert!(d < 1e-12);
        }
    }
}
