use num::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::pl_tree::{metric_dist, PLMap, Subtree, TreePoint};
use crate::scalar::{dyadic, q};
use crate::{QPoint, Q};

use super::Tower;

/// Truncated point `(z_1, ..., z_M)` of an inverse limit at tree level `level`.
#[derive(Clone, Debug, PartialEq)]
pub struct LimitPoint {
    pub level: u32,
    pub coords: Vec<QPoint>,
}

impl LimitPoint {
    pub fn depth(&self) -> usize {
        self.coords.len()
    }

    /// `z_i = bonds[i](z_{i+1})` for every stored pair.
    pub fn check_coherent(&self, bonds: &[&PLMap<Q>]) -> Result<()> {
        if bonds.len() + 1 < self.depth() {
            return Err(Error::Domain(format!("{} bonding maps for depth {}", bonds.len(), self.depth())));
        }
        for i in 0..self.depth().saturating_sub(1) {
            let img = bonds[i].eval(&self.coords[i + 1])?;
            if img != self.coords[i] {
                return Err(Error::Verification(format!("coordinate {i} is not the image of coordinate {}", i + 1)));
            }
        }
        Ok(())
    }

    /// Coherent point whose last coordinate is `deep`.
    pub fn from_deep(level: u32, bonds: &[&PLMap<Q>], deep: QPoint) -> Result<LimitPoint> {
        let mut coords = vec![deep];
        for f in bonds.iter().rev() {
            let next = f.eval(coords.last().unwrap())?;
            coords.push(next);
        }
        coords.reverse();
        Ok(LimitPoint { level, coords })
    }

    /// Constant sequence at `p`.
    pub fn constant(level: u32, p: QPoint, depth: usize) -> LimitPoint {
        LimitPoint { level, coords: vec![p; depth] }
    }

    /// Coordinatewise rotation by `k` arms.
    pub fn rotate(&self, k: usize) -> LimitPoint {
        let arms = 1usize << self.level;
        LimitPoint { level: self.level, coords: self.coords.iter().map(|p| p.rotate(k, arms)).collect() }
    }

    /// Least `k >= 1` with `R^k(z) = z`.
    pub fn rotation_period(&self) -> usize {
        let arms = 1usize << self.level;
        (1..=arms).find(|&k| self.rotate(k) == *self).unwrap_or(arms)
    }

    /// `sum_j 2^-j d(z_j, w_j)` over the common coordinates.
    pub fn product_distance(&self, other: &LimitPoint) -> Q {
        self.coords
            .iter()
            .zip(&other.coords)
            .enumerate()
            .fold(Q::zero(), |s, (j, (a, b))| s + dyadic::<Q>(j as u32) * metric_dist(a, b))
    }
}

/// `(f(z_1), z_1, ..., z_{M-1})`.
pub fn shift_on_truncation(p: &LimitPoint, f: &PLMap<Q>) -> Result<LimitPoint> {
    let bonds = vec![f; p.depth().saturating_sub(1)];
    p.check_coherent(&bonds)?;
    let first = p.coords.first().ok_or_else(|| Error::Domain("empty point".into()))?;
    let mut coords = vec![f.eval(first)?];
    coords.extend(p.coords[..p.depth() - 1].iter().cloned());
    Ok(LimitPoint { level: p.level, coords })
}

/// `(z_2, ..., z_M, w)` for the least preimage `w` of `z_M`.
pub fn unshift_on_truncation(p: &LimitPoint, f: &PLMap<Q>) -> Result<LimitPoint> {
    let bonds = vec![f; p.depth().saturating_sub(1)];
    p.check_coherent(&bonds)?;
    let last = p.coords.last().ok_or_else(|| Error::Domain("empty point".into()))?;
    let w = f
        .preimages(last)
        .into_iter()
        .next()
        .ok_or_else(|| Error::Domain("last coordinate has no preimage".into()))?;
    let mut coords: Vec<QPoint> = p.coords[1..].to_vec();
    coords.push(w);
    Ok(LimitPoint { level: p.level, coords })
}

/// `2 ε_k + 2^{-2k+1}`.
pub fn eps_map_formula(eps_k: &Q, k: usize) -> Q {
    q(2, 1) * eps_k.clone() + q(2, 1) * dyadic::<Q>(2 * k as u32)
}

pub fn eps_map_bound(tower: &Tower, k: usize) -> Result<Q> {
    if k >= tower.stages() {
        return Err(Error::Domain(format!("stage {k} not built ({} stages)", tower.stages())));
    }
    Ok(eps_map_formula(&tower.eps[k], k))
}

#[derive(Clone, Debug)]
pub struct EpsMapReport {
    pub stage: usize,
    pub bound: Q,
    pub pairs: usize,
    pub skipped: usize,
    pub worst: Q,
    pub holds: bool,
}

/// Random point from `set` on a grid of spacing `1/den`.
fn sample_in(rng: &mut ChaCha8Rng, set: &Subtree<Q>, arms: usize, den: i64) -> QPoint {
    loop {
        let p = TreePoint::new(rng.gen_range(0..arms), q(rng.gen_range(0..=den), den));
        if set.contains(&p) {
            return p;
        }
    }
}

/// Sample coherent pairs at level 1 of the refined system
/// `f̂_0, g_0, f̂_1, g_1, ...` that agree in coordinate `2k`, and compare
/// their product distance with `eps_map_bound`.
pub fn eps_map_check(tower: &Tower, k: usize, pairs: usize, seed: u64) -> Result<EpsMapReport> {
    let bound = eps_map_bound(tower, k)?;
    let bonds = tower.refined_bonds(1);
    let arms = 2;
    let top = bonds.len();
    let mut images = vec![Subtree::whole(arms); top + 1];
    for j in (0..top).rev() {
        images[j] = bonds[j].image_subtree(&images[j + 1]);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = Q::zero();
    let mut skipped = 0;
    let mut done = 0;
    while done < pairs {
        let x = LimitPoint::from_deep(1, &bonds, sample_in(&mut rng, &images[top], arms, 1024))?;
        let mut tail = vec![x.coords[2 * k].clone()];
        let mut ok = true;
        for j in 2 * k..top {
            let pre: Vec<QPoint> =
                bonds[j].preimages(tail.last().unwrap()).into_iter().filter(|p| images[j + 1].contains(p)).collect();
            if pre.is_empty() {
                ok = false;
                break;
            }
            tail.push(pre[rng.gen_range(0..pre.len())].clone());
        }
        if !ok {
            skipped += 1;
            if skipped > 10 * pairs {
                return Err(Error::Budget("preimage sampling keeps leaving the eventual image".into()));
            }
            continue;
        }
        let y = LimitPoint::from_deep(1, &bonds, tail.pop().unwrap())?;
        if y.coords[2 * k] != x.coords[2 * k] {
            return Err(Error::Verification("sampled pair disagrees at the flattened coordinate".into()));
        }
        let d = x.product_distance(&y);
        if d > worst {
            worst = d;
        }
        done += 1;
    }
    let holds = worst <= bound;
    Ok(EpsMapReport { stage: k, bound, pairs, skipped, worst, holds })
}

/// Branch constant fixed, every other sampled point of exact period `2^n`.
pub fn rotation_orbit_check(tower: &Tower, level: u32, samples: usize, seed: u64) -> Result<bool> {
    let bonds: Vec<&PLMap<Q>> = (0..tower.stages()).map(|k| tower.map(k, level)).collect();
    let arms = 1usize << level;
    let centre = LimitPoint::constant(level, TreePoint::branch(), bonds.len() + 1);
    centre.check_coherent(&bonds)?;
    if centre.rotate(1) != centre {
        return Ok(false);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let deep = TreePoint::new(rng.gen_range(0..arms), q(rng.gen_range(1..=997), 997));
        let p = LimitPoint::from_deep(level, &bonds, deep)?;
        for k in 1..arms {
            p.rotate(k).check_coherent(&bonds)?;
        }
        if p.rotation_period() != arms {
            return Ok(false);
        }
    }
    Ok(true)
}
