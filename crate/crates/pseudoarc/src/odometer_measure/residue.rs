//! Residue sets of `Z_{2^k}` cut out by interval conditions on `x mod 2^b`.
//!
//! A [`ResidueSet`] is a conjunction of [`Constraint`]s, so intersections and
//! shifts stay in the class and counts are computed without enumeration.
//! Unions and complements are carried by [`ResidueUnion`].

use num::bigint::BigInt;
use num::{BigUint, One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Q;

pub fn modulus(bits: u32) -> BigUint {
    BigUint::one() << bits as usize
}

/// `r mod 2^bits` for a signed shift.
pub fn reduce(r: &BigInt, bits: u32) -> BigUint {
    let m = BigInt::from(modulus(bits));
    let x = ((r % &m) + &m) % &m;
    x.to_biguint().expect("nonnegative")
}

/// `x mod 2^bits` lies in one of the closed intervals.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Constraint {
    pub bits: u32,
    #[serde(with = "crate::json::uint_pairs")]
    pub intervals: Vec<(BigUint, BigUint)>,
}

impl Constraint {
    /// Sorts and merges; intervals must satisfy `lo <= hi < 2^bits`.
    pub fn new(bits: u32, mut intervals: Vec<(BigUint, BigUint)>) -> Result<Self> {
        let m = modulus(bits);
        if intervals.iter().any(|(lo, hi)| lo > hi || *hi >= m) {
            return Err(Error::Domain(format!("interval outside Z_2^{bits}")));
        }
        intervals.sort();
        let mut out: Vec<(BigUint, BigUint)> = Vec::with_capacity(intervals.len());
        for (lo, hi) in intervals {
            match out.last_mut() {
                Some(last) if lo <= &last.1 + 1u32 => {
                    if hi > last.1 {
                        last.1 = hi;
                    }
                }
                _ => out.push((lo, hi)),
            }
        }
        Ok(Constraint { bits, intervals: out })
    }

    pub fn full(bits: u32) -> Self {
        Constraint { bits, intervals: vec![(BigUint::zero(), modulus(bits) - 1u32)] }
    }

    /// Cyclic interval `lo, lo + 1, ..., hi` in `Z_{2^bits}`; wraps when `lo > hi`.
    pub fn cyclic(bits: u32, lo: &BigUint, hi: &BigUint) -> Result<Self> {
        let m = modulus(bits);
        if *lo >= m || *hi >= m {
            return Err(Error::Domain(format!("endpoint outside Z_2^{bits}")));
        }
        if lo <= hi {
            Constraint::new(bits, vec![(lo.clone(), hi.clone())])
        } else {
            Constraint::new(bits, vec![(BigUint::zero(), hi.clone()), (lo.clone(), m - 1u32)])
        }
    }

    pub fn residue(bits: u32, x: &BigUint) -> Result<Self> {
        Constraint::cyclic(bits, x, x)
    }

    pub fn is_full(&self) -> bool {
        self.intervals.len() == 1 && self.intervals[0].0.is_zero() && self.intervals[0].1 == modulus(self.bits) - 1u32
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn size(&self) -> BigUint {
        self.intervals.iter().map(|(lo, hi)| hi - lo + 1u32).sum()
    }

    pub fn admits(&self, x: &BigUint) -> bool {
        let r = x % modulus(self.bits);
        let k = self.intervals.partition_point(|(lo, _)| *lo <= r);
        k > 0 && r <= self.intervals[k - 1].1
    }

    pub fn complement(&self) -> Constraint {
        let mut out = Vec::new();
        let mut next = BigUint::zero();
        for (lo, hi) in &self.intervals {
            if *lo > next {
                out.push((next.clone(), lo - 1u32));
            }
            next = hi + 1u32;
        }
        let m = modulus(self.bits);
        if next < m {
            out.push((next, m - 1u32));
        }
        Constraint { bits: self.bits, intervals: out }
    }

    pub fn intersect(&self, other: &Constraint) -> Constraint {
        assert_eq!(self.bits, other.bits);
        let (a, b) = (&self.intervals, &other.intervals);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() && j < b.len() {
            let lo = (&a[i].0).max(&b[j].0);
            let hi = (&a[i].1).min(&b[j].1);
            if lo <= hi {
                out.push((lo.clone(), hi.clone()));
            }
            if a[i].1 < b[j].1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        Constraint { bits: self.bits, intervals: out }
    }

    /// `{ x + r }`.
    pub fn shift(&self, r: &BigInt) -> Constraint {
        let m = modulus(self.bits);
        let s = reduce(r, self.bits);
        if s.is_zero() || self.is_full() {
            return self.clone();
        }
        let mut out = Vec::new();
        for (lo, hi) in &self.intervals {
            let a = (lo + &s) % &m;
            let b = (hi + &s) % &m;
            if a <= b {
                out.push((a, b));
            } else {
                out.push((a, &m - 1u32));
                out.push((BigUint::zero(), b));
            }
        }
        Constraint::new(self.bits, out).expect("shifted intervals stay in range")
    }
}

/// `{ x in Z_{2^bits} : every constraint admits x }`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ResidueSet {
    pub bits: u32,
    constraints: Vec<Constraint>,
}

impl ResidueSet {
    pub fn full(bits: u32) -> Self {
        ResidueSet { bits, constraints: Vec::new() }
    }

    pub fn empty(bits: u32) -> Self {
        ResidueSet { bits, constraints: vec![Constraint { bits, intervals: Vec::new() }] }
    }

    pub fn from_constraint(bits: u32, c: Constraint) -> Result<Self> {
        ResidueSet::full(bits).with(c)
    }

    pub fn residue(bits: u32, x: &BigUint) -> Result<Self> {
        ResidueSet::from_constraint(bits, Constraint::residue(bits, x)?)
    }

    /// Explicit residues.
    pub fn from_residues(bits: u32, xs: &[BigUint]) -> Result<Self> {
        let iv = xs.iter().map(|x| (x.clone(), x.clone())).collect();
        ResidueSet::from_constraint(bits, Constraint::new(bits, iv)?)
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// Adds a condition on `x mod 2^c.bits`, with `c.bits <= self.bits`.
    pub fn with(mut self, c: Constraint) -> Result<Self> {
        if c.bits > self.bits {
            return Err(Error::Domain(format!("constraint on 2^{} above ambient 2^{}", c.bits, self.bits)));
        }
        if c.is_full() {
            return Ok(self);
        }
        match self.constraints.binary_search_by(|k| k.bits.cmp(&c.bits)) {
            Ok(i) => {
                let merged = self.constraints[i].intersect(&c);
                self.constraints[i] = merged;
            }
            Err(i) => self.constraints.insert(i, c),
        }
        Ok(self)
    }

    pub fn intersect(&self, other: &ResidueSet) -> Result<ResidueSet> {
        if self.bits != other.bits {
            return Err(Error::Domain(format!("residue sets at 2^{} and 2^{}", self.bits, other.bits)));
        }
        other.constraints.iter().try_fold(self.clone(), |s, c| s.with(c.clone()))
    }

    /// Same conditions read in `Z_{2^bits}`, `bits >= self.bits`.
    pub fn lift(&self, bits: u32) -> Result<ResidueSet> {
        if bits < self.bits {
            return Err(Error::Domain(format!("cannot lift 2^{} to 2^{bits}", self.bits)));
        }
        Ok(ResidueSet { bits, constraints: self.constraints.clone() })
    }

    /// Conditions at or below `bits` only, read in `Z_{2^bits}`.
    pub fn truncate(&self, bits: u32) -> ResidueSet {
        let cons = self.constraints.iter().filter(|c| c.bits <= bits).cloned().collect();
        ResidueSet { bits: bits.min(self.bits), constraints: cons }
    }

    pub fn shift(&self, r: &BigInt) -> ResidueSet {
        ResidueSet { bits: self.bits, constraints: self.constraints.iter().map(|c| c.shift(r)).collect() }
    }

    pub fn contains(&self, x: &BigUint) -> bool {
        *x < modulus(self.bits) && self.constraints.iter().all(|c| c.admits(x))
    }

    pub fn complement(&self) -> ResidueUnion {
        let terms = self
            .constraints
            .iter()
            .map(|c| ResidueSet { bits: self.bits, constraints: vec![c.complement()] })
            .collect();
        ResidueUnion { bits: self.bits, terms }
    }

    /// `#{ 0 <= x < n : constraints[..=j] admit x }`.
    fn prefix(&self, j: Option<usize>, n: &BigUint, period: &[BigUint]) -> BigUint {
        let Some(j) = j else { return n.clone() };
        let c = &self.constraints[j];
        let p = modulus(c.bits);
        let (q, r) = (n / &p, n % &p);
        let mut total = q * &period[j];
        let below = j.checked_sub(1);
        for (lo, hi) in &c.intervals {
            if *lo >= r {
                break;
            }
            let top = (hi + 1u32).min(r.clone());
            total += self.prefix(below, &top, period) - self.prefix(below, lo, period);
        }
        total
    }

    fn periods(&self) -> Vec<BigUint> {
        let mut period: Vec<BigUint> = Vec::with_capacity(self.constraints.len());
        for (j, c) in self.constraints.iter().enumerate() {
            let below = j.checked_sub(1);
            let n = c
                .intervals
                .iter()
                .map(|(lo, hi)| self.prefix(below, &(hi + 1u32), &period) - self.prefix(below, lo, &period))
                .sum();
            period.push(n);
        }
        period
    }

    pub fn count(&self) -> BigUint {
        let Some(top) = self.constraints.last() else { return modulus(self.bits) };
        let period = self.periods();
        period.last().unwrap() << (self.bits - top.bits) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.count().is_zero()
    }

    /// Haar measure `|S| / 2^bits`.
    pub fn measure(&self) -> Q {
        Q::new(BigInt::from(self.count()), BigInt::from(modulus(self.bits)))
    }

    /// `#{ x in self : x < n }`.
    pub fn count_below(&self, n: &BigUint) -> BigUint {
        let period = self.periods();
        self.prefix(self.constraints.len().checked_sub(1), &n.clone().min(modulus(self.bits)), &period)
    }

    pub fn is_subset(&self, other: &ResidueSet) -> Result<bool> {
        Ok(self.intersect(other)?.count() == self.count())
    }

    /// Largest `x <= t` admitted by `constraints[..=j]`.
    fn max_le(&self, j: Option<usize>, t: &BigUint) -> Option<BigUint> {
        let Some(j) = j else { return Some(t.clone()) };
        let c = &self.constraints[j];
        let p = modulus(c.bits);
        let r = t % &p;
        let base = t - &r;
        let below = j.checked_sub(1);
        let in_block = |r: &BigUint| -> Option<BigUint> {
            for (lo, hi) in c.intervals.iter().rev() {
                if lo > r {
                    continue;
                }
                if let Some(y) = self.max_le(below, hi.min(r)) {
                    if y >= *lo {
                        return Some(y);
                    }
                }
            }
            None
        };
        if let Some(y) = in_block(&r) {
            return Some(base + y);
        }
        if base >= p {
            let last = &p - 1u32;
            return in_block(&last).map(|y| base - &p + y);
        }
        None
    }

    pub fn max(&self) -> Option<BigUint> {
        self.max_le(self.constraints.len().checked_sub(1), &(modulus(self.bits) - 1u32))
    }

    pub fn min(&self) -> Option<BigUint> {
        // away from 0 the minimum of S is the negated maximum of -S
        if self.contains(&BigUint::zero()) {
            return Some(BigUint::zero());
        }
        let m = modulus(self.bits);
        let neg = ResidueSet {
            bits: self.bits,
            constraints: self
                .constraints
                .iter()
                .map(|c| {
                    let p = modulus(c.bits);
                    let iv = c.intervals.iter().map(|(lo, hi)| ((&p - hi) % &p, (&p - lo) % &p)).collect::<Vec<_>>();
                    negate(c.bits, iv)
                })
                .collect(),
        };
        neg.max().map(|x| (&m - x) % &m)
    }

    /// Minimum in the lexicographic order of `(x mod 2, x mod 4, ...)`.
    pub fn lex_min(&self) -> Option<BigUint> {
        if self.is_empty() {
            return None;
        }
        let mut x = BigUint::zero();
        for b in 0..self.bits {
            let trial = self.clone().with(Constraint::residue(b + 1, &x).ok()?).ok()?;
            if trial.is_empty() {
                x += BigUint::one() << b as usize;
            }
        }
        Some(x)
    }

    /// Sorted elements, failing when there are more than `budget`.
    pub fn elements(&self, budget: usize) -> Result<Vec<BigUint>> {
        let n = self.count();
        if n > BigUint::from(budget) {
            return Err(Error::Budget(format!("{n} residues exceed the enumeration budget {budget}")));
        }
        let mut list = vec![BigUint::zero()];
        let mut bits = 0u32;
        for c in &self.constraints {
            list = lift_list(&list, bits, c.bits, Some(c));
            bits = c.bits;
        }
        Ok(lift_list(&list, bits, self.bits, None))
    }
}

fn negate(bits: u32, iv: Vec<(BigUint, BigUint)>) -> Constraint {
    // images of intervals under x -> -x; endpoints swapped, 0 stays put
    let m = modulus(bits);
    let mut out = Vec::new();
    for (a, b) in iv {
        if a <= b {
            out.push((a, b));
        } else {
            out.push((BigUint::zero(), b));
            out.push((a, &m - 1u32));
        }
    }
    Constraint::new(bits, out).expect("negated intervals stay in range")
}

/// Elements of `Z_{2^to}` reducing into `list` mod `2^from`, filtered by `c`.
fn lift_list(list: &[BigUint], from: u32, to: u32, c: Option<&Constraint>) -> Vec<BigUint> {
    let step = modulus(from);
    let mut out = Vec::new();
    let ranges: Vec<(BigUint, BigUint)> = match c {
        Some(c) => c.intervals.clone(),
        None => vec![(BigUint::zero(), modulus(to) - 1u32)],
    };
    for (lo, hi) in ranges {
        let mut block = &lo / &step * &step;
        while block <= hi {
            for e in list {
                let x = &block + e;
                if x >= lo && x <= hi {
                    out.push(x);
                }
            }
            block += &step;
        }
    }
    out
}

/// Finite union of residue sets in one ambient group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueUnion {
    pub bits: u32,
    pub terms: Vec<ResidueSet>,
}

/// Largest union handled by inclusion-exclusion.
pub const UNION_TERM_LIMIT: usize = 20;

impl ResidueUnion {
    pub fn empty(bits: u32) -> Self {
        ResidueUnion { bits, terms: Vec::new() }
    }

    pub fn from_set(s: ResidueSet) -> Self {
        ResidueUnion { bits: s.bits, terms: vec![s] }
    }

    /// `⋃_{t in lo..=hi} (s + t)`.
    pub fn shifts(s: &ResidueSet, lo: i64, hi: i64) -> Self {
        ResidueUnion { bits: s.bits, terms: (lo..=hi).map(|t| s.shift(&BigInt::from(t))).collect() }
    }

    fn pruned(mut self) -> Self {
        self.terms.retain(|t| !t.is_empty());
        self.terms.sort_by(|a, b| format!("{a:?}").cmp(&format!("{b:?}")));
        self.terms.dedup();
        self
    }

    pub fn contains(&self, x: &BigUint) -> bool {
        self.terms.iter().any(|t| t.contains(x))
    }

    pub fn is_empty(&self) -> bool {
        self.terms.iter().all(|t| t.is_empty())
    }

    pub fn shift(&self, r: &BigInt) -> Self {
        ResidueUnion { bits: self.bits, terms: self.terms.iter().map(|t| t.shift(r)).collect() }
    }

    pub fn union(mut self, other: ResidueUnion) -> Self {
        self.terms.extend(other.terms);
        self
    }

    pub fn intersect_set(&self, s: &ResidueSet) -> Result<Self> {
        let terms = self.terms.iter().map(|t| t.intersect(s)).collect::<Result<Vec<_>>>()?;
        Ok(ResidueUnion { bits: self.bits, terms }.pruned())
    }

    pub fn intersect(&self, other: &ResidueUnion) -> Result<Self> {
        let mut terms = Vec::new();
        for a in &self.terms {
            for b in &other.terms {
                terms.push(a.intersect(b)?);
            }
        }
        Ok(ResidueUnion { bits: self.bits, terms }.pruned())
    }

    pub fn complement(&self) -> Result<Self> {
        let mut acc = ResidueUnion::from_set(ResidueSet::full(self.bits));
        for t in &self.terms {
            acc = acc.intersect(&t.complement())?;
        }
        Ok(acc)
    }

    /// Exact size by inclusion-exclusion over the nonempty terms.
    pub fn count(&self) -> Result<BigUint> {
        let u = self.clone().pruned();
        let n = u.terms.len();
        if n > UNION_TERM_LIMIT {
            return Err(Error::Budget(format!("union of {n} terms exceeds {UNION_TERM_LIMIT}")));
        }
        let (mut plus, mut minus) = (BigUint::zero(), BigUint::zero());
        let mut stack: Vec<(usize, ResidueSet, usize)> =
            u.terms.iter().enumerate().map(|(i, t)| (i, t.clone(), 1)).collect();
        while let Some((i, s, size)) = stack.pop() {
            let c = s.count();
            if c.is_zero() {
                continue;
            }
            if size % 2 == 1 {
                plus += &c;
            } else {
                minus += &c;
            }
            for (j, t) in u.terms.iter().enumerate().skip(i + 1) {
                stack.push((j, s.intersect(t)?, size + 1));
            }
        }
        Ok(plus - minus)
    }

    pub fn is_subset_of_set(&self, s: &ResidueSet) -> Result<bool> {
        let outside = s.complement();
        Ok(self.intersect(&outside)?.is_empty())
    }

    pub fn lift(&self, bits: u32) -> Result<Self> {
        let terms = self.terms.iter().map(|t| t.lift(bits)).collect::<Result<Vec<_>>>()?;
        Ok(ResidueUnion { bits, terms })
    }

    /// `self ⊆ other`, term by term.
    pub fn is_subset(&self, other: &ResidueUnion) -> Result<bool> {
        for t in &self.terms {
            if t.is_empty() {
                continue;
            }
            if other.intersect_set(t)?.count()? != t.count() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn same_set(&self, other: &ResidueUnion) -> Result<bool> {
        Ok(self.is_subset(other)? && other.is_subset(self)?)
    }

    pub fn elements(&self, budget: usize) -> Result<Vec<BigUint>> {
        let mut out = Vec::new();
        for t in &self.terms {
            out.extend(t.elements(budget)?);
        }
        out.sort();
        out.dedup();
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(x: u64) -> BigUint {
        BigUint::from(x)
    }

    fn brute(s: &ResidueSet) -> Vec<BigUint> {
        (0..1u64 << s.bits).map(u).filter(|x| s.contains(x)).collect()
    }

    #[test]
    fn counts_match_enumeration() {
        let s = ResidueSet::full(8)
            .with(Constraint::residue(2, &u(0)).unwrap())
            .unwrap()
            .with(Constraint::new(8, vec![(u(96), u(160))]).unwrap().complement())
            .unwrap();
        assert_eq!(s.count(), u(47));
        assert_eq!(s.elements(1000).unwrap(), brute(&s));
        assert_eq!(s.max(), Some(u(252)));
        assert_eq!(s.min(), Some(u(0)));
        assert_eq!(s.count_below(&u(100)), u(24));
    }

    #[test]
    fn shift_and_complement() {
        let s = ResidueSet::from_constraint(5, Constraint::cyclic(5, &u(30), &u(2)).unwrap()).unwrap();
        assert_eq!(s.count(), u(5));
        let t = s.shift(&BigInt::from(3));
        assert_eq!(brute(&t), (1..=5).map(u).collect::<Vec<_>>());
        assert_eq!(s.complement().count().unwrap(), u(27));
    }
}
