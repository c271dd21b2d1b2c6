use crate::error::{Error, Result};
use crate::pl_tree::{PLMap, Tree, TreePoint};
use crate::scalar::{dyadic, Scalar};

use super::pattern::pattern;
use super::{certify_with, exactness_certificate, expansion_check, CertifyOptions};

#[derive(Clone, Debug)]
pub struct PerturbOptions<S> {
    /// Known doubling scale of the input; searched dyadically when absent.
    pub beta_hint: Option<S>,
    pub retry_budget: u32,
    /// Largest iterate `n` tried per zigzag scale.
    pub n_max: u32,
    /// Piece budget for `F^n`.
    pub piece_budget: usize,
    pub certify: CertifyOptions,
}

impl<S> Default for PerturbOptions<S> {
    fn default() -> Self {
        PerturbOptions {
            beta_hint: None,
            retry_budget: 8,
            n_max: 8,
            piece_budget: 20_000,
            certify: CertifyOptions { refinements: 2, max_net_per_arm: 1 << 16 },
        }
    }
}

/// One zigzag scale tried by the generator.
#[derive(Clone, Debug)]
pub struct PerturbReport {
    pub zeta: f64,
    pub pieces: usize,
    pub sup_distance: Option<f64>,
    pub xi: Option<f64>,
    pub outcome: String,
}

#[derive(Clone, Debug)]
pub struct CrookResult<S> {
    /// `f̃∘g`.
    pub map: PLMap<S>,
    pub g: PLMap<S>,
    pub xi: S,
    pub n: u32,
    pub delta_used: S,
    pub beta: S,
    pub zeta: S,
    pub attempts: Vec<PerturbReport>,
}

/// Equivariant map fixing every window `[kζ, (k+1)ζ]` of each arm and running
/// through it along the recursive zigzag with turn-back `ζ/4`, at uniform
/// speed.
pub fn window_zigzag<S: Scalar>(tree: Tree, zeta: &S) -> Result<PLMap<S>> {
    if *zeta <= S::zero() || *zeta > S::one() {
        return Err(Error::Domain("zigzag scale must lie in (0, 1]".into()));
    }
    let w = crate::scalar::ceil_int(&(S::one() / zeta.clone()).to_ratio());
    let w: usize = num::ToPrimitive::to_usize(&w).ok_or_else(|| Error::Domain("too many windows".into()))?;
    let len = S::one() / S::from_usize(w).unwrap();
    let m = len.clone() / S::from_i64(4).unwrap();
    let mut arm0 = vec![(S::zero(), TreePoint::branch())];
    for k in 0..w {
        let a = len.clone() * S::from_usize(k).unwrap();
        let b = if k + 1 == w { S::one() } else { a.clone() + len.clone() };
        let vals = pattern(&a, &b, &m);
        let total = vals.windows(2).fold(S::zero(), |s, p| s + (p[1].clone() - p[0].clone()).abs());
        let mut t = a.clone();
        for p in vals.windows(2) {
            t = t + (p[1].clone() - p[0].clone()).abs() * (b.clone() - a.clone()) / total.clone();
            arm0.push((t.clone(), TreePoint::new(0, p[1].clone())));
        }
        arm0.last_mut().unwrap().0 = b;
    }
    PLMap::equivariant(tree, arm0)
}

fn largest_dyadic_beta<S: Scalar>(f: &PLMap<S>, from: u32, to: u32) -> Result<Option<S>> {
    for j in from..=to {
        let b = dyadic::<S>(j);
        if expansion_check(f, &b)? {
            return Ok(Some(b));
        }
    }
    Ok(None)
}

pub fn crooked_perturb<S: Scalar>(f_tilde: &PLMap<S>, delta: &S) -> Result<CrookResult<S>> {
    crooked_perturb_with(f_tilde, delta, &PerturbOptions::default())
}

/// Zigzag perturbation `F = f̃∘g`, accepted only when closeness, doubling at
/// `ξ/5`, exactness and crookedness of `F^n` are all verified.
pub fn crooked_perturb_with<S: Scalar>(f_tilde: &PLMap<S>, delta: &S, opts: &PerturbOptions<S>) -> Result<CrookResult<S>> {
    if *delta <= S::zero() || *delta >= S::one() {
        return Err(Error::Domain("delta must lie in (0, 1)".into()));
    }
    let beta = match &opts.beta_hint {
        Some(b) if expansion_check(f_tilde, b)? => b.clone(),
        Some(_) => return Err(Error::Precondition("doubling fails at the supplied scale".into())),
        None => largest_dyadic_beta(f_tilde, 1, 30)?
            .ok_or_else(|| Error::Precondition("no dyadic doubling scale down to 2^-30".into()))?,
    };
    let equivariant = f_tilde.equivariance_check();
    let five = S::from_i64(5).unwrap();
    let mut zeta = beta.clone();
    let mut attempts = Vec::new();
    for _ in 0..opts.retry_budget {
        let g = window_zigzag(f_tilde.dom(), &zeta)?;
        let map = f_tilde.compose(&g)?;
        let mut rep = PerturbReport {
            zeta: zeta.to_f64().unwrap_or(f64::NAN),
            pieces: map.piece_count(),
            sup_distance: None,
            xi: None,
            outcome: String::new(),
        };
        let attempt = (|| -> Result<Option<(S, u32)>> {
            let d = map.sup_distance(f_tilde)?;
            rep.sup_distance = d.to_f64();
            if !(d < *delta) {
                rep.outcome = "not within delta".into();
                return Ok(None);
            }
            if equivariant && !map.equivariance_check() {
                rep.outcome = "equivariance lost".into();
                return Ok(None);
            }
            // F^n(A) = T for |A| = ξ/5 < δ/5 needs Λ^n ξ/5 >= 2
            let lam = map.max_slope().to_f64().unwrap_or(f64::INFINITY);
            let n_lower = if lam > 1.0 {
                ((10.0 / delta.to_f64().unwrap()).ln() / lam.ln() - 1e-9).ceil().max(1.0) as u32
            } else {
                u32::MAX
            };
            if n_lower > opts.n_max {
                rep.outcome = format!("exactness needs n >= {n_lower} > n_max");
                return Ok(None);
            }
            if n_lower >= 2 {
                let est = map.compose_piece_estimate(&map);
                if est > opts.piece_budget {
                    rep.outcome = format!("exactness needs n >= {n_lower}; F^2 has about {est} pieces");
                    return Ok(None);
                }
            }
            let from = (0..).find(|&j| dyadic::<S>(j) * five.clone() < *delta).unwrap();
            let Some(b) = largest_dyadic_beta(&map, from, from + 24)? else {
                rep.outcome = "no doubling scale".into();
                return Ok(None);
            };
            let xi = five.clone() * b.clone();
            rep.xi = xi.to_f64();
            let Some(exact_n) = exactness_certificate(&map, opts.n_max, &b) else {
                rep.outcome = format!("no iterate up to {} is exact on the grid", opts.n_max);
                return Ok(None);
            };
            let mut power = map.power(exact_n, Some(opts.piece_budget)).map_err(|e| {
                rep.outcome = e.to_string();
                e
            });
            for n in exact_n..=opts.n_max {
                let p = match power {
                    Ok(p) => p,
                    Err(Error::Budget(_)) => return Ok(None),
                    Err(e) => return Err(e),
                };
                match certify_with(&p, delta, &opts.certify) {
                    Ok(v) if v.is_crooked() => return Ok(Some((xi, n))),
                    Ok(_) => rep.outcome = format!("F^{n} not crooked at delta"),
                    Err(e) => rep.outcome = format!("F^{n}: {e}"),
                }
                power = map.compose(&p).and_then(|q| {
                    if q.piece_count() > opts.piece_budget {
                        Err(Error::Budget(format!("F^{} has {} pieces", n + 1, q.piece_count())))
                    } else {
                        Ok(q)
                    }
                });
                if let Err(Error::Budget(msg)) = &power {
                    rep.outcome = format!("{}; {msg}", rep.outcome);
                }
                if n == opts.n_max {
                    break;
                }
            }
            if rep.outcome.is_empty() {
                rep.outcome = format!("no iterate up to {} is exact on the grid", opts.n_max);
            }
            Ok(None)
        })()?;
        attempts.push(rep);
        if let Some((xi, n)) = attempt {
            return Ok(CrookResult {
                map,
                g,
                xi,
                n,
                delta_used: delta.clone(),
                beta,
                zeta,
                attempts,
            });
        }
        zeta = zeta / S::two();
    }
    let summary: Vec<String> = attempts
        .iter()
        .map(|r| format!("zeta {:.3e} ({} pieces): {}", r.zeta, r.pieces, r.outcome))
        .collect();
    Err(Error::Budget(format!(
        "crooked_perturb: {} zigzag scales rejected [{}]",
        attempts.len(),
        summary.join("; ")
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;
    use crate::Q;

    #[test]
    fn zigzag_fixes_windows() {
        let g = window_zigzag::<Q>(Tree::new(2).unwrap(), &q(1, 4)).unwrap();
        for k in 0..=4 {
            let p = TreePoint::new(1, q(k, 4));
            assert_eq!(g.eval(&p).unwrap(), p);
        }
        assert!(g.equivariance_check());
        let s = g.max_slope();
        assert_eq!(s, g.min_slope());
    }

    #[test]
    fn precondition_needs_doubling() {
        let id = PLMap::<Q>::identity(Tree::new(2).unwrap());
        assert!(matches!(crooked_perturb(&id, &q(1, 10)), Err(Error::Precondition(_))));
    }
}
