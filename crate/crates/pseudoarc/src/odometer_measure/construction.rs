use num::bigint::BigInt;
use num::{BigUint, One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::Check;
use crate::Q;

use super::residue::{modulus, Constraint, ResidueSet, ResidueUnion};

/// Largest level the construction accepts.
pub const MAX_BITS: u32 = 4096;
/// Residue lists longer than this are handled symbolically.
pub const ENUM_BUDGET: usize = 1 << 16;

const SLOW: &str = "sequence grows too slowly (the construction asks for a sufficiently fast increasing sequence)";

/// Removed set `Λ_n` as stored data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaLevel {
    pub n: usize,
    pub bits: u32,
    /// `[lo, hi]` for `n >= 1`; `None` for `Λ_0 = {x_{k_0} != 0}`.
    pub window: Option<(String, String)>,
    pub description: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KConstruction {
    pub k_seq: Vec<u32>,
    pub depth: usize,
    #[serde(with = "crate::json::uint_vec")]
    pub s_seq: Vec<BigUint>,
    pub lambda_sets: Vec<LambdaLevel>,
    /// Depth-`D` truncation of `K` in `Z_{2^{k_D}}`.
    pub k: ResidueSet,
    /// Lexicographic minimum of the truncation.
    #[serde(with = "crate::json::uint")]
    pub p: BigUint,
    #[serde(with = "crate::json::rat")]
    pub measure: Q,
    pub degenerate: Option<String>,
}

/// `2^{k_n - 1} ∓ 4(n + 1) 2^{k_{n-1}}`.
pub fn window_bounds(k_seq: &[u32], n: usize) -> (BigInt, BigInt) {
    let c = BigInt::one() << (k_seq[n] - 1) as usize;
    let w = BigInt::from(4 * (n as u64 + 1)) << k_seq[n - 1] as usize;
    (&c - &w, c + w)
}

/// `k_{n+1} > 2^{k_n} + 3n` for every consecutive pair.
pub fn validate_kseq(k_seq: &[u32], depth: usize) -> Result<()> {
    if k_seq.len() < depth + 1 {
        return Err(Error::Domain(format!("depth {depth} needs {} levels, got {}", depth + 1, k_seq.len())));
    }
    let ks = &k_seq[..=depth];
    if ks[0] == 0 {
        return Err(Error::Domain("k_0 must be positive".into()));
    }
    if ks[depth] > MAX_BITS {
        return Err(Error::Budget(format!("level {} above {MAX_BITS} bits", ks[depth])));
    }
    for n in 0..depth {
        let need = (BigUint::one() << ks[n] as usize) + BigUint::from(3 * n as u64);
        if BigUint::from(ks[n + 1]) <= need {
            return Err(Error::Precondition(format!("k_{} = {} must exceed 2^k_{n} + 3n = {need}", n + 1, ks[n + 1])));
        }
    }
    Ok(())
}

/// The window of `Λ_n` as a constraint, plus whether it overflowed `Z_{2^{k_n}}`.
fn window_constraint(k_seq: &[u32], n: usize) -> (Constraint, bool) {
    let (lo, hi) = window_bounds(k_seq, n);
    let m = BigInt::from(modulus(k_seq[n]));
    if lo.is_negative() || hi >= m {
        return (Constraint::full(k_seq[n]), true);
    }
    let c = Constraint::new(k_seq[n], vec![(lo.to_biguint().unwrap(), hi.to_biguint().unwrap())]).expect("window in range");
    (c, false)
}

pub fn build_k(k_seq: &[u32], depth: usize) -> Result<KConstruction> {
    validate_kseq(k_seq, depth)?;
    let ks = k_seq[..=depth].to_vec();
    let top = ks[depth];
    let mut k = ResidueSet::full(top).with(Constraint::residue(ks[0], &BigUint::zero())?)?;
    let mut lambda_sets = vec![LambdaLevel {
        n: 0,
        bits: ks[0],
        window: None,
        description: format!("x_{} != 0", ks[0]),
    }];
    let mut degenerate = None;
    for n in 1..=depth {
        let (lo, hi) = window_bounds(&ks, n);
        let (w, overflow) = window_constraint(&ks, n);
        if overflow && degenerate.is_none() {
            degenerate = Some(format!("{SLOW}: window [{lo}, {hi}] of level {n} exceeds Z_2^{}", ks[n]));
        }
        k = k.with(w.complement())?;
        lambda_sets.push(LambdaLevel {
            n,
            bits: ks[n],
            window: Some((lo.to_string(), hi.to_string())),
            description: format!("{lo} <= x_{} <= {hi}, outside Λ_{}", ks[n], n - 1),
        });
    }
    let p = k.lex_min().unwrap_or_default();
    let s_seq = ks
        .iter()
        .map(|&b| {
            let pn = BigInt::from(&p % modulus(b));
            k.truncate(b).shift(&-pn).max().unwrap_or_default()
        })
        .collect();
    let measure = k.measure();
    Ok(KConstruction { k_seq: ks, depth, s_seq, lambda_sets, k, p, measure, degenerate })
}

impl KConstruction {
    pub fn top_bits(&self) -> u32 {
        self.k_seq[self.depth]
    }

    /// Conditions of levels `0..=n`, read in `Z_{2^{k_n}}`.
    pub fn level(&self, n: usize) -> ResidueSet {
        self.k.truncate(self.k_seq[n])
    }

    /// `p_{k_n}`.
    pub fn p_at(&self, n: usize) -> BigUint {
        &self.p % modulus(self.k_seq[n])
    }

    /// `Λ_i` in `Z_{2^{k_D}}`.
    pub fn lambda(&self, i: usize) -> Result<ResidueUnion> {
        let top = self.top_bits();
        let c0 = Constraint::residue(self.k_seq[0], &BigUint::zero())?.complement();
        let mut acc = ResidueUnion::from_set(ResidueSet::full(top).with(c0)?);
        for n in 1..=i {
            let w = ResidueSet::full(top).with(window_constraint(&self.k_seq, n).0)?;
            acc = acc.complement()?.intersect_set(&w)?;
        }
        Ok(acc)
    }

    /// Number of `y in K_{n+1}` reducing to `x` mod `2^{k_n}`.
    pub fn extensions(&self, n: usize, x: &BigUint) -> Result<BigUint> {
        let up = self.level(n + 1).with(Constraint::residue(self.k_seq[n], x)?)?;
        Ok(up.count())
    }
}

/// Displayed lower bound and the exact truncated measure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureComparison {
    #[serde(with = "crate::json::rat")]
    pub bound: Q,
    #[serde(with = "crate::json::rat")]
    pub exact: Q,
    pub degenerate: bool,
}

/// `1 - sum_{n=1}^{D} 4(n+1) 2^{k_{n-1}} / 2^{k_n}`.
pub fn displayed_bound(k_seq: &[u32], depth: usize) -> Q {
    (1..=depth).fold(Q::one(), |acc, n| {
        let num = BigInt::from(4 * (n as u64 + 1)) << k_seq[n - 1] as usize;
        acc - Q::new(num, BigInt::one() << k_seq[n] as usize)
    })
}

pub fn measure_lower_bound(k_seq: &[u32], depth: usize) -> Result<MeasureComparison> {
    let kc = build_k(k_seq, depth)?;
    Ok(MeasureComparison { bound: displayed_bound(k_seq, depth), exact: kc.measure, degenerate: kc.degenerate.is_some() })
}

/// `μ(K)` by testing every residue of `Z_{2^{k_D}}` against the definition.
pub fn direct_filter_measure(k_seq: &[u32], depth: usize) -> Result<Q> {
    validate_kseq(k_seq, depth)?;
    let top = k_seq[depth];
    if top > 24 {
        return Err(Error::Budget(format!("2^{top} residues are too many to filter")));
    }
    let windows: Vec<(i64, i64)> = (1..=depth)
        .map(|n| {
            let c = 1i64 << (k_seq[n] - 1);
            let w = 4 * (n as i64 + 1) << k_seq[n - 1];
            (c - w, c + w)
        })
        .collect();
    let in_lambda = |x: u64| -> bool {
        let mut prev = x % (1u64 << k_seq[0]) != 0;
        let mut any = prev;
        for n in 1..=depth {
            let r = (x % (1u64 << k_seq[n])) as i64;
            let (lo, hi) = windows[n - 1];
            prev = !prev && lo <= r && r <= hi;
            any |= prev;
        }
        any
    };
    let count = (0..1u64 << top).filter(|&x| !in_lambda(x)).count();
    Ok(Q::new(BigInt::from(count), BigInt::one() << top as usize))
}

/// `μ(K)` as an alternating sum over intersections of the removed windows.
pub fn inclusion_exclusion_measure(k_seq: &[u32], depth: usize) -> Result<Q> {
    validate_kseq(k_seq, depth)?;
    let top = k_seq[depth];
    let mut sets = vec![Constraint::residue(k_seq[0], &BigUint::zero())?.complement()];
    sets.extend((1..=depth).map(|n| window_constraint(k_seq, n).0));
    let mut total = BigInt::zero();
    for mask in 0u32..1 << sets.len() {
        let mut s = ResidueSet::full(top);
        for (i, c) in sets.iter().enumerate() {
            if mask >> i & 1 == 1 {
                s = s.with(c.clone())?;
            }
        }
        let c = BigInt::from(s.count());
        if mask.count_ones() % 2 == 0 {
            total += c;
        } else {
            total -= c;
        }
    }
    Ok(Q::new(total, BigInt::one() << top as usize))
}

/// Extension count of one point of `K_n` into `K_{n+1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointExtensions {
    pub n: usize,
    #[serde(with = "crate::json::uint")]
    pub x: BigUint,
    #[serde(with = "crate::json::uint")]
    pub count: BigUint,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma51Report {
    pub checks: Vec<Check>,
    pub extensions: Vec<PointExtensions>,
}

impl Lemma51Report {
    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn all_ok(&self) -> bool {
        crate::report::all_ok(&self.checks)
    }
}

/// Two-pointer intersection of sorted lists.
pub fn sorted_intersection(a: &[BigUint], b: &[BigUint]) -> Vec<BigUint> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i].clone());
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// `x in ⋃_{i >= n+1} Λ_i` implies `x + r notin K` for `|r| <= 4n + 1`, for
/// every `n < D`, decided on the truncation.
pub fn a1c_helper(kc: &KConstruction) -> Result<Check> {
    let mut bad = Vec::new();
    let mut cases = 0usize;
    for n in 0..kc.depth {
        let reach = 4 * n as i64 + 1;
        for i in n + 1..=kc.depth {
            let lam = kc.lambda(i)?;
            for r in -reach..=reach {
                cases += 1;
                let hit = lam.intersect_set(&kc.k.shift(&BigInt::from(-r)))?;
                if !hit.is_empty() {
                    let w = hit.terms.iter().find_map(|t| t.min()).unwrap_or_default();
                    bad.push(format!("n={n} Λ_{i} r={r} x={w}"));
                }
            }
        }
    }
    let detail = if bad.is_empty() {
        format!("{cases} (n, i, r) cases empty")
    } else {
        format!("{} of {cases} cases meet K: {}", bad.len(), bad.join("; "))
    };
    Ok(Check::new("A1.c helper", bad.is_empty(), detail))
}

pub fn check_lemma51(kc: &KConstruction) -> Result<Lemma51Report> {
    let mut checks = Vec::new();
    let d = kc.depth;
    let top = kc.top_bits();

    checks.push(Check::new("nonempty", !kc.k.is_empty(), format!("μ = {}", kc.measure)));
    if let Some(msg) = &kc.degenerate {
        checks.push(Check::new("growth", false, msg.clone()));
    }

    let shifted = kc.k.shift(&BigInt::one());
    let meet = kc.k.intersect(&shifted)?.count();
    let mut detail = format!("|K ∩ R(K)| = {meet}");
    let mut ok = meet.is_zero();
    if kc.k.count() <= BigUint::from(ENUM_BUDGET) {
        let a = kc.k.elements(ENUM_BUDGET)?;
        let m = modulus(top);
        let mut b: Vec<BigUint> = a.iter().map(|x| (x + 1u32) % &m).collect();
        b.sort();
        let common = sorted_intersection(&a, &b).len();
        ok &= common == 0;
        detail += &format!("; sorted intersection {common}");
    }
    checks.push(Check::new("(1)", ok, detail));

    let mut ok2 = true;
    let mut parts = Vec::new();
    for n in 0..=d {
        let b = kc.k_seq[n];
        let shifted = kc.level(n).shift(&-BigInt::from(kc.p_at(n)));
        let window = Constraint::new(b, vec![(BigUint::zero(), kc.s_seq[n].clone())])?;
        let inside = shifted.clone().with(window)?.count();
        ok2 &= inside == shifted.count();
        parts.push(format!("s_{n} = {}", kc.s_seq[n]));
    }
    checks.push(Check::new("(2)", ok2, parts.join(", ")));

    let mut ok3 = true;
    let mut parts = Vec::new();
    for n in 0..d {
        let grow = BigUint::from(kc.k_seq[n + 1]) > (BigUint::one() << kc.k_seq[n] as usize) + BigUint::from(3 * n as u64);
        let room = &kc.s_seq[n] + BigUint::from(2 * n as u64 + 2) < modulus(kc.k_seq[n]);
        ok3 &= grow && room;
        parts.push(format!("n={n}: growth {grow}, s_n + 2n + 2 < 2^k_n {room}"));
    }
    if parts.is_empty() {
        parts.push("vacuous".into());
    }
    checks.push(Check::new("(3)", ok3, parts.join("; ")));

    let mut extensions = Vec::new();
    let mut ok4 = true;
    let mut detail4 = Vec::new();
    for n in 0..d {
        let base = kc.level(n);
        match base.elements(ENUM_BUDGET) {
            Ok(xs) => {
                for x in xs {
                    let count = kc.extensions(n, &x)?;
                    let ok = count >= BigUint::from(2u32);
                    ok4 &= ok;
                    extensions.push(PointExtensions { n, x, count, ok });
                }
            }
            Err(Error::Budget(_)) => {
                // a run of L residues outside the window holds floor(L / 2^{k_n}) lifts of each class
                let (w, _) = window_constraint(&kc.k_seq, n + 1);
                let run = w.complement().size();
                let lifts = run >> kc.k_seq[n] as usize;
                let ok = lifts >= BigUint::from(2u32);
                ok4 &= ok;
                detail4.push(format!("n={n}: every class has at least {lifts} lifts"));
            }
            Err(e) => return Err(e),
        }
    }
    let per_point = extensions.len();
    let failing = extensions.iter().filter(|e| !e.ok).count();
    detail4.insert(0, format!("{per_point} points checked, {failing} with fewer than two extensions"));
    checks.push(Check::new("(4)", ok4, detail4.join("; ")));

    checks.push(a1c_helper(kc)?);
    Ok(Lemma51Report { checks, extensions })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_eight() {
        let kc = build_k(&[2, 8], 1).unwrap();
        assert_eq!(kc.measure, Q::new(47.into(), 256.into()));
        assert_eq!(kc.p, BigUint::zero());
        assert_eq!(kc.s_seq, vec![BigUint::zero(), BigUint::from(252u32)]);
        assert!(kc.degenerate.is_none());
        assert_eq!(displayed_bound(&[2, 8], 1), Q::new(7.into(), 8.into()));
    }

    #[test]
    fn slow_sequence_is_degenerate() {
        let kc = build_k(&[2, 5], 1).unwrap();
        assert!(kc.measure.is_zero());
        assert!(kc.degenerate.as_deref().unwrap().contains("grows too slowly"));
        assert!(build_k(&[2, 4], 1).is_err());
    }
}
