use num::{BigUint, One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::bracket::{log_spectral_bracket, EntropyInterval, Rows};

/// Target log-width of certified brackets.
pub const BRACKET_WIDTH: f64 = 1e-7;
pub const MAX_ITER: usize = 200_000;
/// Default state budget for `sft_with_entropy`.
pub const STATE_BUDGET: usize = 10_000;

/// Base symbols `m` that may change only when the period-`n` clock returns to 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Clock {
    pub m: usize,
    pub n: usize,
}

/// Vertex shift on `0..alphabet` with successor lists.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sft {
    pub alphabet: usize,
    pub succ: Vec<Vec<usize>>,
    pub clock: Option<Clock>,
}

impl Sft {
    pub fn new(succ: Vec<Vec<usize>>) -> Result<Self> {
        let a = succ.len();
        if a == 0 {
            return Err(Error::Domain("empty alphabet".into()));
        }
        let mut succ = succ;
        for (i, s) in succ.iter_mut().enumerate() {
            s.sort();
            s.dedup();
            if s.iter().any(|&j| j >= a) {
                return Err(Error::Domain(format!("state {i} has a successor outside the alphabet")));
            }
        }
        Ok(Sft { alphabet: a, succ, clock: None })
    }

    pub fn from_matrix(m: &[Vec<u8>]) -> Result<Self> {
        let a = m.len();
        if m.iter().any(|r| r.len() != a || r.iter().any(|&x| x > 1)) {
            return Err(Error::Domain("transition matrix must be square with 0/1 entries".into()));
        }
        Sft::new(m.iter().map(|r| (0..a).filter(|&j| r[j] == 1).collect()).collect())
    }

    pub fn matrix(&self) -> Vec<Vec<u8>> {
        (0..self.alphabet).map(|i| (0..self.alphabet).map(|j| self.succ[i].contains(&j) as u8).collect()).collect()
    }

    pub fn full(k: usize) -> Self {
        Sft::new(vec![(0..k).collect(); k]).expect("full shift")
    }

    pub fn golden_mean() -> Self {
        Sft::new(vec![vec![0, 1], vec![0]]).expect("golden mean")
    }

    pub fn one_point() -> Self {
        Sft::new(vec![vec![0]]).expect("one point")
    }

    /// State `(a, c)` is `a * n + c`; `(a, c) -> (b, c + 1)` with `b = a`
    /// unless the clock wraps to 0.
    pub fn clocked(m: usize, n: usize) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::Domain("clocked shift needs m, n >= 1".into()));
        }
        let succ = (0..m * n)
            .map(|s| {
                let (a, c) = (s / n, s % n);
                let c1 = (c + 1) % n;
                if c1 == 0 {
                    (0..m).map(|b| b * n).collect()
                } else {
                    vec![a * n + c1]
                }
            })
            .collect();
        let mut s = Sft::new(succ)?;
        s.clock = Some(Clock { m, n });
        Ok(s)
    }

    /// Member `k` of the sequence standing in for infinite entropy: the full `(k + 2)`-shift.
    pub fn unbounded(k: usize) -> Self {
        Sft::full(k + 2)
    }

    pub fn states(&self) -> usize {
        self.alphabet
    }

    pub fn rows(&self) -> Rows {
        self.succ.iter().map(|s| s.iter().map(|&j| (j, 1)).collect()).collect()
    }

    pub fn allows(&self, a: usize, b: usize) -> bool {
        self.succ.get(a).is_some_and(|s| s.binary_search(&b).is_ok())
    }

    pub fn admissible(&self, w: &[usize]) -> bool {
        w.iter().all(|&a| a < self.alphabet) && w.windows(2).all(|p| self.allows(p[0], p[1]))
    }

    /// States lying on a cycle, i.e. carrying a bi-infinite sequence.
    pub fn recurrent_states(&self) -> Vec<usize> {
        let mut out: Vec<usize> = super::bracket::recurrent_blocks(&self.rows()).into_iter().flatten().collect();
        out.sort();
        out
    }

    /// Rows and columns never all zero on the recurrent part.
    pub fn check(&self) -> Result<()> {
        let rec = self.recurrent_states();
        if rec.is_empty() {
            return Err(Error::Domain("no bi-infinite sequence".into()));
        }
        if let Some(c) = self.clock {
            for s in 0..self.alphabet {
                let (a, ph) = (s / c.n, s % c.n);
                for &t in &self.succ[s] {
                    if (ph + 1) % c.n != 0 && t / c.n != a {
                        return Err(Error::Domain(format!("clocked state {s} changes symbol off clock 0")));
                    }
                }
            }
        }
        Ok(())
    }
}

pub fn sft_entropy(s: &Sft) -> EntropyInterval {
    log_spectral_bracket(&s.rows(), BRACKET_WIDTH, MAX_ITER)
}

/// Admissible `n`-words by iterating the transfer matrix on the all-ones vector.
pub fn word_count_matrix(s: &Sft, n: usize) -> Result<BigUint> {
    if n == 0 {
        return Err(Error::Domain("word length must be at least 1".into()));
    }
    let mut v = vec![BigUint::one(); s.alphabet];
    for _ in 1..n {
        v = s.succ.iter().map(|r| r.iter().fold(BigUint::zero(), |acc, &j| acc + &v[j])).collect();
    }
    Ok(v.into_iter().sum())
}

/// Closed form for clocked shifts: start phase `c` contributes
/// `m^(1 + #{1 <= i < n : c + i = 0 mod p})`.
pub fn word_count(s: &Sft, n: usize) -> Result<BigUint> {
    let Some(Clock { m, n: p }) = s.clock else {
        return word_count_matrix(s, n);
    };
    if n == 0 {
        return Err(Error::Domain("word length must be at least 1".into()));
    }
    let m = BigUint::from(m);
    let mut total = BigUint::zero();
    for c in 0..p {
        // wraps in c+1 ..= c+n-1
        let wraps = (c + n - 1) / p - c / p;
        total += m.pow(1 + wraps as u32);
    }
    Ok(total)
}

/// Clocked shift realizing a target entropy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealizedSft {
    pub sft: Sft,
    pub m: usize,
    pub n: usize,
    pub states: usize,
    pub target: f64,
    /// `ln(m) / n`.
    pub achieved: f64,
    pub bracket: EntropyInterval,
}

pub fn sft_with_entropy(r: f64, tol: f64) -> Result<RealizedSft> {
    sft_with_entropy_budget(r, tol, STATE_BUDGET)
}

pub fn sft_with_entropy_budget(r: f64, tol: f64, budget: usize) -> Result<RealizedSft> {
    if !r.is_finite() {
        return Err(Error::Domain("no finite SFT has infinite entropy; use Sft::unbounded".into()));
    }
    if r < 0.0 || tol <= 0.0 {
        return Err(Error::Domain(format!("need r >= 0 and tol > 0, got r = {r}, tol = {tol}")));
    }
    if r == 0.0 {
        let sft = Sft::one_point();
        let bracket = sft_entropy(&sft);
        return Ok(RealizedSft { sft, m: 1, n: 1, states: 1, target: r, achieved: 0.0, bracket });
    }
    let mut best: Option<(usize, usize, f64)> = None;
    let mut closest = f64::INFINITY;
    for n in 1..=budget / 2 {
        let e = (r * n as f64).exp();
        if e > budget as f64 {
            break;
        }
        for m in [e.floor() as usize, e.ceil() as usize] {
            if m < 2 || m * n > budget {
                continue;
            }
            let err = ((m as f64).ln() / n as f64 - r).abs();
            closest = closest.min(err);
            if err <= tol && best.is_none_or(|(bm, bn, be)| m * n < bm * bn || (m * n == bm * bn && err < be)) {
                best = Some((m, n, err));
            }
        }
    }
    let Some((m, n, _)) = best else {
        return Err(Error::Budget(format!(
            "no clocked shift within {budget} states reaches tolerance {tol}; best achievable {closest:.3e}"
        )));
    };
    let sft = Sft::clocked(m, n)?;
    let achieved = (m as f64).ln() / n as f64;
    let bracket = sft_entropy(&sft);
    if bracket.distance(achieved) > 1e-9 {
        return Err(Error::Verification(format!(
            "certified bracket [{}, {}] misses ln({m})/{n} = {achieved}",
            bracket.lo(),
            bracket.hi()
        )));
    }
    Ok(RealizedSft { sft, m, n, states: m * n, target: r, achieved, bracket })
}
