//! Distinct windows of the membership sequence `x -> [x in S]` along the
//! `+1` orbit, counted without walking the whole period.

use std::collections::HashSet;

use num::bigint::BigInt;
use num::{BigUint, One, ToPrimitive, Zero};

use crate::error::{Error, Result};

use super::residue::{modulus, ResidueSet};

/// Periods up to this length are scanned directly.
pub const EXPLICIT_PERIOD: u32 = 16;
/// Windows examined explicitly before giving up.
pub const WINDOW_BUDGET: usize = 1 << 22;

pub type Word = Vec<u64>;

fn pack(bits: impl Iterator<Item = bool>, n: usize) -> Word {
    let mut w = vec![0u64; n.div_ceil(64)];
    for (i, b) in bits.enumerate() {
        if b {
            w[i / 64] |= 1 << (i % 64);
        }
    }
    w
}

/// Membership of `start, start + 1, ..., start + len - 1` (mod the period).
fn segment(s: &ResidueSet, start: &BigUint, len: usize, period: &BigUint) -> Vec<bool> {
    let mut x = start % period;
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(s.contains(&x));
        x += 1u32;
        if x == *period {
            x = BigUint::zero();
        }
    }
    out
}

/// Every length-`n` window of the marker sequence of `s`.
pub fn marker_words(s: &ResidueSet, n: usize) -> Result<HashSet<Word>> {
    if n == 0 {
        return Err(Error::Domain("word length must be positive".into()));
    }
    let cons = s.constraints();
    let Some(top) = cons.last() else {
        return Ok(HashSet::from([pack(std::iter::repeat(true).take(n), n)]));
    };
    let b = top.bits;
    let base = s.truncate(b);
    let period = modulus(b);
    let mut out = HashSet::new();
    if b <= EXPLICIT_PERIOD {
        let p = 1usize << b;
        let mut arr = vec![false; p];
        for x in base.elements(p)? {
            arr[x.to_usize().unwrap()] = true;
        }
        for x in 0..p {
            out.insert(pack((0..n).map(|i| arr[(x + i) % p]), n));
        }
        return Ok(out);
    }
    let below = if cons.len() >= 2 { s.truncate(cons[cons.len() - 2].bits) } else { ResidueSet::full(0) };
    let lower_period = below.constraints().last().map(|c| modulus(c.bits)).unwrap_or_else(BigUint::one);

    // cyclic runs of the top condition
    let mut runs: Vec<(BigUint, BigUint)> = top.intervals.clone();
    if runs.is_empty() {
        out.insert(vec![0u64; n.div_ceil(64)]);
        return Ok(out);
    }
    if top.is_full() {
        return marker_words(&below, n);
    }
    if runs.len() > 1 && runs[0].0.is_zero() && runs.last().unwrap().1 == &period - 1u32 {
        let (_, hi) = runs.remove(0);
        runs.last_mut().unwrap().1 = hi + &period;
    }
    let nn = BigUint::from(n);
    let mut explicit = 0usize;
    let mut budget = |k: usize| -> Result<()> {
        explicit += k;
        if explicit > WINDOW_BUDGET {
            return Err(Error::Budget(format!("more than {WINDOW_BUDGET} windows to examine")));
        }
        Ok(())
    };
    let mut boundaries = Vec::new();
    for (i, (lo, hi)) in runs.iter().enumerate() {
        let len = hi - lo + 1u32;
        if len >= &nn + &lower_period - 1u32 {
            out.extend(marker_words(&below, n)?);
        } else if len >= nn {
            let starts = (&len - &nn + 1u32).to_usize().unwrap();
            budget(starts)?;
            let seg = segment(s, lo, starts + n - 1, &period);
            for x in 0..starts {
                out.insert(pack(seg[x..x + n].iter().copied(), n));
            }
        }
        let next_lo = if i + 1 < runs.len() { runs[i + 1].0.clone() } else { &runs[0].0 + &period };
        let gap = &next_lo - hi - 1u32;
        if gap >= nn {
            out.insert(vec![0u64; n.div_ceil(64)]);
        }
        boundaries.push(lo.clone());
        boundaries.push((hi + 1u32) % &period);
    }
    for beta in boundaries {
        budget(n - 1)?;
        let start = BigInt::from(beta) - BigInt::from(n - 1);
        let start = super::residue::reduce(&start, b);
        let seg = segment(s, &start, 2 * n - 2, &period);
        for x in 0..n - 1 {
            out.insert(pack(seg[x..x + n].iter().copied(), n));
        }
    }
    Ok(out)
}

pub fn marker_word_count(s: &ResidueSet, n: usize) -> Result<usize> {
    Ok(marker_words(s, n)?.len())
}

/// `(1/n) ln(count)`.
pub fn growth_rate(count: usize, n: usize) -> f64 {
    (count as f64).ln() / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::odometer_measure::residue::Constraint;

    fn brute(s: &ResidueSet, n: usize) -> usize {
        let p = 1u64 << s.bits;
        let arr: Vec<bool> = (0..p).map(|x| s.contains(&BigUint::from(x))).collect();
        let words: HashSet<Vec<bool>> =
            (0..p as usize).map(|x| (0..n).map(|i| arr[(x + i) % p as usize]).collect()).collect();
        words.len()
    }

    #[test]
    fn symbolic_matches_scan() {
        // top level above the explicit threshold, checked against a full scan
        let s = ResidueSet::full(18)
            .with(Constraint::residue(2, &BigUint::zero()).unwrap())
            .unwrap()
            .with(Constraint::new(18, vec![(BigUint::from(1000u32), BigUint::from(1600u32))]).unwrap().complement())
            .unwrap();
        for n in [1, 5, 64, 200] {
            assert_eq!(marker_word_count(&s, n).unwrap(), brute(&s, n), "n = {n}");
        }
    }
}
