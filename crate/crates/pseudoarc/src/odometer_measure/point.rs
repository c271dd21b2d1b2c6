use num::{BigUint, One};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::residue::modulus;

/// Coherent residues `x_{k_0}, ..., x_{k_D}` with `x_{k_i} in Z_{2^{k_i}}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OdometerPoint {
    pub levels: Vec<u32>,
    #[serde(with = "crate::json::uint_vec")]
    pub residues: Vec<BigUint>,
}

impl OdometerPoint {
    pub fn new(levels: Vec<u32>, residues: Vec<BigUint>) -> Result<Self> {
        let p = OdometerPoint { levels, residues };
        p.check()?;
        Ok(p)
    }

    /// The point of the truncation determined by its top residue.
    pub fn from_top(levels: Vec<u32>, top: &BigUint) -> Result<Self> {
        let residues = levels.iter().map(|&k| top % modulus(k)).collect();
        OdometerPoint::new(levels, residues)
    }

    pub fn depth(&self) -> usize {
        self.levels.len().saturating_sub(1)
    }

    pub fn top(&self) -> &BigUint {
        self.residues.last().expect("nonempty point")
    }

    pub fn check(&self) -> Result<()> {
        if self.levels.is_empty() || self.levels.len() != self.residues.len() {
            return Err(Error::Domain("levels and residues must be nonempty and of equal length".into()));
        }
        if self.levels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain("levels must increase".into()));
        }
        for (i, (&k, x)) in self.levels.iter().zip(&self.residues).enumerate() {
            if *x >= modulus(k) {
                return Err(Error::Domain(format!("residue {x} outside Z_2^{k}")));
            }
            if i > 0 && x % modulus(self.levels[i - 1]) != self.residues[i - 1] {
                return Err(Error::Domain(format!("residue at 2^{k} does not reduce to the one below")));
            }
        }
        Ok(())
    }

    /// Period of the truncation, `2^{k_D}`.
    pub fn period(&self) -> BigUint {
        modulus(*self.levels.last().expect("nonempty point"))
    }
}

/// `+1` with carry at every level.
pub fn add_one(x: &OdometerPoint) -> Result<OdometerPoint> {
    x.check()?;
    let residues = x.levels.iter().zip(&x.residues).map(|(&k, r)| (r + BigUint::one()) % modulus(k)).collect();
    Ok(OdometerPoint { levels: x.levels.clone(), residues })
}

/// `add_one` iterated `r` times, `r` taken modulo the period.
pub fn add(x: &OdometerPoint, r: &num::BigInt) -> Result<OdometerPoint> {
    x.check()?;
    let top = super::residue::reduce(&(num::BigInt::from(x.top().clone()) + r), *x.levels.last().unwrap());
    OdometerPoint::from_top(x.levels.clone(), &top)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(r: [u64; 3]) -> OdometerPoint {
        OdometerPoint::new(vec![1, 2, 3], r.iter().map(|&x| BigUint::from(x)).collect()).unwrap()
    }

    #[test]
    fn carries() {
        assert_eq!(add_one(&pt([0, 0, 0])).unwrap(), pt([1, 1, 1]));
        assert_eq!(add_one(&pt([1, 3, 7])).unwrap(), pt([0, 0, 0]));
        assert!(OdometerPoint::new(vec![1, 2], vec![BigUint::from(1u32), BigUint::from(2u32)]).is_err());
    }

    #[test]
    fn full_orbit_returns() {
        let start = pt([1, 1, 5]);
        let mut x = start.clone();
        for _ in 0..8 {
            x = add_one(&x).unwrap();
        }
        assert_eq!(x, start);
    }
}
