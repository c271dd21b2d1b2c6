use std::collections::HashSet;

use num::bigint::BigInt;
use num::{BigUint, ToPrimitive};

use crate::entropy_lab::{word_count, Sft};
use crate::error::{Error, Result};
use crate::odometer_measure::residue::modulus;
use crate::odometer_measure::{add, marker_word_count, KConstruction, OdometerPoint, Word};

/// Direct product of the truncated odometer with a fibre shift, acting by
/// `(x, c) -> (x + 1, σ c)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SkewModel {
    pub kc: KConstruction,
    pub fiber: Sft,
}

pub fn model_system(kc: &KConstruction, sft: &Sft) -> Result<SkewModel> {
    sft.check()?;
    Ok(SkewModel { kc: kc.clone(), fiber: sft.clone() })
}

impl SkewModel {
    /// Odometer coordinates used by the model: `k_0, ..., k_D`.
    pub fn levels(&self) -> Vec<u32> {
        self.kc.k_seq.clone()
    }

    pub fn point(&self, top: &BigUint) -> Result<OdometerPoint> {
        OdometerPoint::from_top(self.levels(), top)
    }

    /// `G^q(x, w) = (x + q, σ^q w)` on a finite fibre window.
    pub fn act(&self, x: &OdometerPoint, w: &[usize], q: usize) -> Result<(OdometerPoint, Vec<usize>)> {
        if !self.fiber.admissible(w) {
            return Err(Error::Domain("fibre word is not admissible".into()));
        }
        if q > w.len() {
            return Err(Error::Domain(format!("window of {} symbols shifted {q} times", w.len())));
        }
        Ok((add(x, &BigInt::from(q))?, w[q..].to_vec()))
    }

    /// Distinct `n`-words of the marker coding `x -> [x in K]`.
    pub fn odometer_word_count(&self, n: usize) -> Result<usize> {
        marker_word_count(&self.kc.k, n)
    }

    pub fn fiber_word_count(&self, n: usize) -> Result<BigUint> {
        word_count(&self.fiber, n)
    }

    /// Product coding count; the factors are independent.
    pub fn product_word_count(&self, n: usize) -> Result<BigUint> {
        Ok(BigUint::from(self.odometer_word_count(n)?) * self.fiber_word_count(n)?)
    }

    /// Product words read off orbits of `G` from every `(x, w)` with `x` in
    /// `Z_{2^{k_D}}` and `w` an admissible `n`-word; small cases only.
    pub fn product_words(&self, n: usize, budget: usize) -> Result<HashSet<(Word, Vec<usize>)>> {
        let top = self.kc.top_bits();
        let p = modulus(top).to_usize().filter(|&p| p <= budget).ok_or_else(|| Error::Budget("odometer too large to walk".into()))?;
        let words = fiber_words(&self.fiber, n, budget)?;
        let mut out = HashSet::new();
        for x0 in 0..p {
            for w in &words {
                let mut x = self.point(&BigUint::from(x0))?;
                let mut c = w.clone();
                let mut marks = vec![0u64; n.div_ceil(64)];
                let mut symbols = Vec::with_capacity(n);
                for i in 0..n {
                    if self.kc.k.contains(x.top()) {
                        marks[i / 64] |= 1 << (i % 64);
                    }
                    symbols.push(c[0]);
                    if i + 1 < n {
                        (x, c) = self.act(&x, &c, 1)?;
                    }
                }
                out.insert((marks, symbols));
            }
        }
        Ok(out)
    }
}

/// Every admissible word of length `n`.
pub fn fiber_words(s: &Sft, n: usize, budget: usize) -> Result<Vec<Vec<usize>>> {
    let mut words: Vec<Vec<usize>> = (0..s.alphabet).map(|a| vec![a]).collect();
    for _ in 1..n {
        let mut next = Vec::new();
        for w in &words {
            for &b in &s.succ[*w.last().unwrap()] {
                let mut v = w.clone();
                v.push(b);
                next.push(v);
            }
        }
        if next.len() > budget {
            return Err(Error::Budget(format!("more than {budget} fibre words")));
        }
        words = next;
    }
    Ok(words)
}
