use num::complex::Complex64;
use num::BigUint;
use proptest::prelude::*;
use pseudoarc::entropy_lab::*;
use pseudoarc::odometer_measure::build_k;
use pseudoarc::pl_tree::{tent, PLMap, Tree};
use pseudoarc::rees_scaffold::{fiber_words, model_system};
use pseudoarc::Q;

const GOLDEN: f64 = 0.481_211_825_059_603_4;

/// Characteristic polynomial by Faddeev–LeVerrier, leading coefficient first.
fn char_poly(a: &[Vec<u8>]) -> Vec<f64> {
    let n = a.len();
    let a: Vec<Vec<f64>> = a.iter().map(|r| r.iter().map(|&x| x as f64).collect()).collect();
    let mul = |x: &Vec<Vec<f64>>, y: &Vec<Vec<f64>>| -> Vec<Vec<f64>> {
        (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| x[i][k] * y[k][j]).sum()).collect()).collect()
    };
    let mut coeffs = vec![1.0];
    let mut m = vec![vec![0.0; n]; n];
    let mut c = 1.0;
    for k in 1..=n {
        for (i, row) in m.iter_mut().enumerate() {
            row[i] += c;
        }
        let am = mul(&a, &m);
        c = -(0..n).map(|i| am[i][i]).sum::<f64>() / k as f64;
        coeffs.push(c);
        m = am;
    }
    coeffs
}

/// Roots of a monic polynomial by Durand–Kerner.
fn roots(p: &[f64]) -> Vec<Complex64> {
    let d = p.len() - 1;
    let eval = |z: Complex64| p.iter().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c);
    let mut z: Vec<Complex64> = (0..d).map(|k| Complex64::new(0.4, 0.9).powu(k as u32)).collect();
    for _ in 0..2000 {
        for i in 0..d {
            let den = (0..d).filter(|&j| j != i).fold(Complex64::new(1.0, 0.0), |acc, j| acc * (z[i] - z[j]));
            let step = eval(z[i]) / den;
            z[i] -= step;
        }
    }
    z
}

fn log_radius(a: &[Vec<u8>]) -> f64 {
    let r = roots(&char_poly(a)).into_iter().map(|z| z.norm()).fold(0.0, f64::max);
    if r < 1e-6 {
        f64::NEG_INFINITY
    } else {
        r.ln()
    }
}

#[test]
fn tent_laps_double() {
    let f = tent::<Q>();
    let d = lap_data(&f, 20).unwrap();
    for (k, c) in d.counts.iter().enumerate() {
        assert_eq!(*c, BigUint::from(1u64) << (k + 1));
    }
    assert!(d.closed);
    let e = entropy_lap(&f, 20).unwrap();
    assert!(e.contains(std::f64::consts::LN_2), "{e:?}");
    assert!(e.width() < 1e-6);
}

#[test]
fn identity_has_no_entropy() {
    let id = PLMap::<Q>::identity(Tree::new(2).unwrap());
    assert_eq!(lap_count(&id, 10).unwrap(), BigUint::from(1u32));
    let e = entropy_lap(&id, 8).unwrap();
    assert_eq!(e.hi(), 0.0);
    assert_eq!(e.lo(), 0.0);
}

#[test]
fn golden_map_laps_are_fibonacci() {
    let f = golden_markov_map();
    let d = lap_data(&f, 16).unwrap();
    let (mut a, mut b) = (1u64, 2u64);
    for c in &d.counts {
        assert_eq!(*c, BigUint::from(b));
        (a, b) = (b, a + b);
    }
    let e = entropy_lap(&f, 16).unwrap();
    assert!(e.contains(GOLDEN), "{e:?}");
    assert!(e.distance(GOLDEN) <= 1e-6);
    assert!(e.width() <= 1e-6, "{e:?}");
}

#[test]
fn lap_argument_checks() {
    assert!(entropy_lap(&tent::<Q>(), 3).is_err());
    assert!(lap_data(&tent::<Q>(), 0).is_err());
}

#[test]
fn sft_examples() {
    let full = sft_entropy(&Sft::full(3));
    assert!(full.contains(3f64.ln()) && full.width() <= 2e-7, "{full:?}");
    let g = sft_entropy(&Sft::golden_mean());
    assert!(g.contains(GOLDEN), "{g:?}");
    let p = sft_entropy(&Sft::one_point());
    assert!(p.lo() == 0.0 && p.hi() < 1e-12);
    assert_eq!(word_count(&Sft::golden_mean(), 10).unwrap(), BigUint::from(144u32));
    assert!(Sft::new(vec![vec![1], vec![]]).unwrap().check().is_err());
    let u = sft_entropy(&Sft::unbounded(5));
    assert!(u.contains(7f64.ln()));
}

#[test]
fn reducible_matrix_is_flagged() {
    let s = Sft::from_matrix(&[vec![1, 1], vec![0, 1]]).unwrap();
    let e = sft_entropy(&s);
    assert!(e.contains(0.0));
    assert!(!e.flags.is_empty());
}

#[test]
fn clocked_counts() {
    let s = Sft::clocked(3, 2).unwrap();
    s.check().unwrap();
    assert_eq!(word_count(&s, 4).unwrap(), BigUint::from(36u32));
    assert_eq!(word_count_matrix(&s, 4).unwrap(), BigUint::from(36u32));
    for (m, n) in [(2, 3), (5, 1), (3, 4)] {
        let s = Sft::clocked(m, n).unwrap();
        for len in 1..12 {
            assert_eq!(word_count(&s, len).unwrap(), word_count_matrix(&s, len).unwrap(), "({m}, {n}) at {len}");
        }
        assert!(sft_entropy(&s).contains((m as f64).ln() / n as f64));
    }
    let mut bad = Sft::clocked(2, 2).unwrap();
    bad.succ[0] = vec![1, 3];
    assert!(bad.check().is_err());
}

#[test]
fn realized_entropies() {
    for (r, m, n) in [(1.0, 148, 5), (1.75, 190, 3), (std::f64::consts::LN_2, 2, 1)] {
        let s = sft_with_entropy(r, 1e-3).unwrap();
        assert_eq!((s.m, s.n), (m, n), "r = {r}");
        assert!((s.achieved - r).abs() <= 1e-3);
        assert!(s.bracket.contains(s.achieved));
    }
    let z = sft_with_entropy(0.0, 1e-3).unwrap();
    assert_eq!(z.states, 1);
    assert!(sft_with_entropy(f64::INFINITY, 1e-3).is_err());
    assert!(sft_with_entropy(-1.0, 1e-3).is_err());
    assert!(matches!(sft_with_entropy(1.0, 1e-12), Err(pseudoarc::Error::Budget(_))));
}

#[test]
fn product_with_clocked_fibre() {
    let kc = build_k(&[3, 9, 516], 2).unwrap();
    let fibre = sft_with_entropy(1.0, 1e-3).unwrap().sft;
    let model = model_system(&kc, &fibre).unwrap();
    let r = product_entropy_check(&model, &[64, 512, 4096], 1e-2).unwrap();
    assert!(r.all_ok(), "{:?}", r.checks);
    assert!((r.last().product_estimate - 1.0).abs() < 2e-2);
    assert!(product_entropy_check(&model, &[], 1e-2).is_err());
}

#[test]
fn product_words_factor() {
    let kc = build_k(&[2, 8], 1).unwrap();
    let model = model_system(&kc, &Sft::golden_mean()).unwrap();
    for n in [1, 3, 6] {
        let words = model.product_words(n, 1 << 12).unwrap();
        assert_eq!(BigUint::from(words.len()), model.product_word_count(n).unwrap(), "n = {n}");
        let fibres: std::collections::HashSet<_> = words.iter().map(|w| w.1.clone()).collect();
        assert_eq!(fibres.len(), fiber_words(&model.fiber, n, 1 << 12).unwrap().len());
        let marks: std::collections::HashSet<_> = words.iter().map(|w| w.0.clone()).collect();
        assert_eq!(marks.len(), model.odometer_word_count(n).unwrap());
    }
}

fn matrix(max: usize) -> impl Strategy<Value = Vec<Vec<u8>>> {
    (1..=max).prop_flat_map(|n| proptest::collection::vec(proptest::collection::vec(0u8..=1, n), n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bracket_matches_char_poly(a in matrix(3)) {
        let s = Sft::from_matrix(&a).unwrap();
        let e = sft_entropy(&s);
        let h = log_radius(&a);
        if h.is_finite() && h > 1e-9 {
            prop_assert!(e.distance(h) <= 1e-6, "{:?} vs {}", e, h);
        } else {
            prop_assert!(e.lo() <= 1e-9);
        }
    }

    #[test]
    fn word_counts_submultiplicative(a in matrix(5), m in 1usize..8, n in 1usize..8) {
        let s = Sft::from_matrix(&a).unwrap();
        let w = |k| word_count(&s, k).unwrap();
        prop_assert!(w(m + n) <= w(m) * w(n));
        let e = sft_entropy(&s);
        let wn = w(n);
        if wn > BigUint::from(0u32) {
            prop_assert!(e.lo() <= ln_big_up(&wn) / n as f64 + 1e-9);
        }
    }

    #[test]
    fn realized_within_tolerance(r in 0.05f64..2.0, t in 1e-3f64..1e-1) {
        let s = sft_with_entropy(r, t).unwrap();
        prop_assert!((s.achieved - r).abs() <= t);
        prop_assert!(s.states <= STATE_BUDGET);
        prop_assert_eq!(s.sft.states(), s.m * s.n);
        prop_assert!(s.bracket.distance(s.achieved) <= 1e-9);
    }
}

#[test]
fn spec_word_counts() {
    assert_eq!(word_count(&Sft::full(2), 10).unwrap(), BigUint::from(1024u32));
    assert_eq!(word_count(&Sft::golden_mean(), 5).unwrap(), BigUint::from(13u32));
    for n in 1..=40 {
        assert_eq!(word_count(&Sft::full(2), n).unwrap(), BigUint::from(1u32) << n);
    }
    assert_eq!(lap_count(&tent::<Q>(), 5).unwrap(), BigUint::from(32u32));
    assert!(lap_count(&PLMap::<Q>::identity(Tree::new(4).unwrap()), 2).is_err());
    let e = entropy_lap(&tent::<Q>(), 16).unwrap();
    assert!(e.width() <= 0.01);
    let s = sft_with_entropy(std::f64::consts::LN_2, 1e-9).unwrap();
    assert_eq!((s.m, s.n), (2, 1));
    let c = sft_entropy(&Sft::clocked(3, 2).unwrap());
    assert!(c.distance(0.549_306_144_334_054_8) <= 1e-6 && c.width() <= 1e-6);
}

#[test]
fn product_examples() {
    let kc = build_k(&[3, 9, 516], 2).unwrap();
    for (fibre, h, tol) in [(Sft::full(2), std::f64::consts::LN_2, 0.05), (Sft::one_point(), 0.0, 0.05), (Sft::clocked(3, 2).unwrap(), 0.5493, 0.05)] {
        let model = model_system(&kc, &fibre).unwrap();
        let r = product_entropy_check(&model, &[64, 4096], 2e-2).unwrap();
        assert!(r.all_ok(), "{:?}", r.checks);
        assert!((r.last().product_estimate - h).abs() <= tol, "{:?}", r.last());
    }
}
