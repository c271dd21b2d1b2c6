use std::collections::HashSet;

use num::bigint::BigInt;
use num::{BigUint, One, ToPrimitive, Zero};
use proptest::prelude::*;
use pseudoarc::odometer_measure::*;
use pseudoarc::scalar::q;
use pseudoarc::Q;

fn u(x: u64) -> BigUint {
    BigUint::from(x)
}

/// Literal membership in the depth-1 truncation for `(2, 8)`.
fn in_k_2_8(x: u64) -> bool {
    x % 4 == 0 && !(96..=160).contains(&x)
}

#[test]
fn two_eight_three_ways() {
    let kc = build_k(&[2, 8], 1).unwrap();
    let oracle: Vec<BigUint> = (0..256).filter(|&x| in_k_2_8(x)).map(u).collect();
    assert_eq!(oracle.len(), 47);
    assert_eq!(kc.k.elements(1000).unwrap(), oracle);
    assert_eq!(kc.measure, q(47, 256));
    assert_eq!(direct_filter_measure(&[2, 8], 1).unwrap(), q(47, 256));
    assert_eq!(inclusion_exclusion_measure(&[2, 8], 1).unwrap(), q(47, 256));
    let b = measure_lower_bound(&[2, 8], 1).unwrap();
    assert_eq!((b.bound, b.exact, b.degenerate), (q(7, 8), q(47, 256), false));
    assert_eq!(kc.lambda_sets[1].window, Some(("96".into(), "160".into())));
}

#[test]
fn bound_examples() {
    assert_eq!(displayed_bound(&[2], 0), q(1, 1));
    let ks = [3, 9, 516];
    assert!(displayed_bound(&ks, 2) < displayed_bound(&ks, 1));
    assert!(displayed_bound(&ks, 1) < displayed_bound(&ks, 0));
}

#[test]
fn slow_and_invalid_sequences() {
    let kc = build_k(&[2, 5], 1).unwrap();
    assert_eq!(kc.measure, Q::zero());
    assert!(kc.degenerate.as_ref().unwrap().contains("sequence grows too slowly"));
    assert_eq!(direct_filter_measure(&[2, 5], 1).unwrap(), Q::zero());
    let r = check_lemma51(&kc).unwrap();
    assert!(!r.get("nonempty").unwrap().ok);
    assert!(!r.get("growth").unwrap().ok);
    assert!(build_k(&[2, 4], 1).is_err());
    assert!(build_k(&[2], 1).is_err());
    assert!(build_k(&[0], 0).is_err());
}

#[test]
fn disjoint_from_successor() {
    let kc = build_k(&[2, 8], 1).unwrap();
    let xs = kc.k.elements(1000).unwrap();
    let ys: HashSet<BigUint> = xs.iter().map(|x| (x + 1u32) % 256u32).collect();
    assert!(xs.iter().all(|x| !ys.contains(x)));
}

#[test]
fn report_two_eight() {
    let kc = build_k(&[2, 8], 1).unwrap();
    let r = check_lemma51(&kc).unwrap();
    for name in ["nonempty", "(1)", "(2)", "(3)", "(4)", "A1.c helper"] {
        let c = r.get(name).unwrap();
        assert!(c.ok, "{name}: {}", c.detail);
    }
    assert!(r.get("(2)").unwrap().detail.contains("s_0 = 0"));
    assert_eq!(r.extensions.len(), 1);
    assert_eq!(r.extensions[0].count, u(47));
}

#[test]
fn report_single_level() {
    let kc = build_k(&[3], 0).unwrap();
    assert_eq!(kc.measure, q(1, 8));
    let r = check_lemma51(&kc).unwrap();
    assert!(r.get("(3)").unwrap().detail.contains("vacuous"));
    assert!(r.get("(1)").unwrap().ok);
}

#[test]
fn report_default_depth_two() {
    let kc = build_k(&[3, 9, 516], 2).unwrap();
    assert!(kc.degenerate.is_none());
    assert!(kc.measure > Q::zero());
    let r = check_lemma51(&kc).unwrap();
    assert!(r.all_ok(), "{:?}", r.checks);
    let b = measure_lower_bound(&[3, 9, 516], 2).unwrap();
    assert_eq!(b.exact, inclusion_exclusion_measure(&[3, 9, 516], 2).unwrap());
}

#[test]
fn helper_fails_literally_with_k0_two() {
    // Λ_0 = {x_2 != 0} sits one step from K, so the literal statement fails for n = 1
    let kc = build_k(&[2, 8, 261], 2).unwrap();
    let c = a1c_helper(&kc).unwrap();
    assert!(!c.ok, "{}", c.detail);
}

/// Orbit enumeration version of the helper on `(2, 8)`.
#[test]
fn helper_brute_force() {
    let kc = build_k(&[2, 8], 1).unwrap();
    // n = 0: Λ_1, reach 1
    for x in 0..256u64 {
        let in_lambda1 = (96..=160).contains(&x) && x % 4 == 0;
        if in_lambda1 {
            for r in -1i64..=1 {
                let y = (x as i64 + r).rem_euclid(256) as u64;
                assert!(!in_k_2_8(y));
            }
        }
    }
    assert!(a1c_helper(&kc).unwrap().ok);
}

#[test]
fn add_one_examples() {
    let z = OdometerPoint::new(vec![1, 2, 3], vec![u(0), u(0), u(0)]).unwrap();
    assert_eq!(add_one(&z).unwrap().residues, vec![u(1), u(1), u(1)]);
    let m = OdometerPoint::new(vec![1, 2, 3], vec![u(1), u(3), u(7)]).unwrap();
    assert_eq!(add_one(&m).unwrap().residues, vec![u(0), u(0), u(0)]);
    assert!(OdometerPoint::new(vec![1, 2], vec![u(1), u(2)]).is_err());
}

#[test]
fn marker_words_grow_slowly() {
    let kc = build_k(&[3, 9, 516], 2).unwrap();
    let mut last = 0;
    let mut rate = 0.0;
    for n in [64usize, 512, 4096] {
        let c = marker_word_count(&kc.k, n).unwrap();
        assert!(c >= last);
        // words inside the long run, the zero word, and two boundaries
        assert!(c <= 512 + 1 + 2 * (n - 1), "n = {n}: {c}");
        last = c;
        rate = growth_rate(c, n);
    }
    assert!(rate <= 0.02, "rate {rate}");
}

#[test]
fn marker_words_match_scan() {
    let kc = build_k(&[2, 8], 1).unwrap();
    let bits: Vec<bool> = (0..256).map(|x| in_k_2_8(x)).collect();
    for n in [1usize, 3, 17, 100] {
        let scan: HashSet<Vec<bool>> = (0..256).map(|x| (0..n).map(|i| bits[(x + i) % 256]).collect()).collect();
        assert_eq!(marker_word_count(&kc.k, n).unwrap(), scan.len());
    }
}

#[test]
fn json_roundtrip() {
    let kc = build_k(&[3, 9, 516], 2).unwrap();
    let s = serde_json::to_string(&kc).unwrap();
    let back: KConstruction = serde_json::from_str(&s).unwrap();
    assert_eq!(back, kc);
}

fn small_set() -> impl Strategy<Value = ResidueSet> {
    (1u32..4, 5u32..10, 0u64..64, 0u64..64).prop_map(|(b0, b1, a, len)| {
        let m = 1u64 << b1;
        let lo = a % m;
        let hi = (lo + len).min(m - 1);
        ResidueSet::full(b1)
            .with(Constraint::residue(b0, &u(a % (1 << b0))).unwrap())
            .unwrap()
            .with(Constraint::new(b1, vec![(u(lo), u(hi))]).unwrap().complement())
            .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn add_one_is_a_cyclic_bijection(levels in proptest::collection::btree_set(1u32..7, 1..4), top in 0u64..64) {
        let levels: Vec<u32> = levels.into_iter().collect();
        let t = *levels.last().unwrap();
        let period = 1u64 << t;
        let start = OdometerPoint::from_top(levels.clone(), &u(top % period)).unwrap();
        let mut x = start.clone();
        let mut seen = HashSet::new();
        for _ in 0..period {
            prop_assert!(x.check().is_ok());
            prop_assert!(seen.insert(x.top().clone()));
            x = add_one(&x).unwrap();
        }
        prop_assert_eq!(x, start);
    }

    #[test]
    fn add_matches_repeated_add_one(top in 0u64..256, r in -300i64..300) {
        let x = OdometerPoint::from_top(vec![2, 5, 8], &u(top)).unwrap();
        let mut y = x.clone();
        for _ in 0..r.rem_euclid(256) {
            y = add_one(&y).unwrap();
        }
        prop_assert_eq!(add(&x, &BigInt::from(r)).unwrap(), y);
    }

    #[test]
    fn measure_is_count_over_modulus(s in small_set()) {
        let n = s.elements(1 << 12).unwrap().len();
        prop_assert_eq!(s.measure(), q(n as i64, 1i64 << s.bits));
    }

    #[test]
    fn measure_is_additive(s in small_set(), t in small_set()) {
        let bits = s.bits.max(t.bits);
        let (s, t) = (s.lift(bits).unwrap(), t.lift(bits).unwrap());
        let both = s.intersect(&t).unwrap();
        // |S| = |S ∩ T| + |S \ T|
        let minus = ResidueUnion::from_set(s.clone()).intersect(&t.complement()).unwrap();
        prop_assert_eq!(s.measure(), both.measure() + Q::new(BigInt::from(minus.count().unwrap()), BigInt::one() << bits as usize));
        prop_assert_eq!(minus.count().unwrap().to_u64().unwrap() as usize, s.elements(1 << 12).unwrap().iter().filter(|x| !t.contains(x)).count());
    }
}
