use num::bigint::BigInt;
use num::{BigUint, One};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::odometer_measure::residue::{Constraint, ResidueUnion};
use crate::odometer_measure::{a1c_helper, KConstruction};
use crate::report::Check;
use crate::Q;

use super::family::{build_graph, compatible, q_iterable_verdict, refines_verdict};
use super::orbit::{children_counts, orbit_acyclic, orbit_compatible, orbit_q_iterable, orbit_refines, OrbitFamily};

/// Families with at most this many rectangles after iteration are also
/// decided by the explicit routines.
pub const CROSS_CHECK: usize = 600;

/// `ℰ^0_{(0)}, ..., ℰ^0_{(n)}` and the checks they passed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Generated {
    pub k_seq: Vec<u32>,
    pub depth: usize,
    pub families: Vec<OrbitFamily>,
    pub checks: Vec<Check>,
}

impl Generated {
    pub fn all_ok(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// `ℰ^0_{(j)} = { R^i(V'_j) : R^i(V_j) ∩ K ≠ ∅, 0 <= i <= s_j }` with
/// `V'_j` the cube of `p` at level `k_j`.
pub fn family_at(kc: &KConstruction, j: usize) -> Result<OrbitFamily> {
    let b = kc.k_seq[j];
    let lineage = (0..=j).map(|i| (format!("V{i}"), kc.k_seq[i])).collect();
    let p = kc.p_at(j);
    let offsets = kc.level(j).shift(&-BigInt::from(p.clone()));
    let window = Constraint::new(b, vec![(BigUint::default(), kc.s_seq[j].clone())])?;
    let offsets = offsets.with(window)?;
    OrbitFamily::new(j, lineage, p, ResidueUnion::from_set(offsets))
}

fn small(f: &OrbitFamily, q: usize) -> bool {
    f.len().map(|n| n * BigUint::from(2 * q + 1) <= BigUint::from(CROSS_CHECK)).unwrap_or(false)
}

/// Every A-condition on the given families.
pub fn verify_families(kc: &KConstruction, fams: &[OrbitFamily]) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let n = fams.len().saturating_sub(1);
    for (j, f) in fams.iter().enumerate() {
        let covers = f.cylinders().is_subset(&ResidueUnion::from_set(kc.level(j)))?
            && ResidueUnion::from_set(kc.level(j)).is_subset(&f.cylinders())?;
        checks.push(Check::new(format!("cover E_{j}"), covers, format!("s(E_{j}) equals K at level k_{j}")));

        let it = orbit_q_iterable(f, j + 1);
        let ac = orbit_acyclic(f, j)?;
        let mut ok = it.ok && ac.ok;
        let mut detail = format!("{}; {}", it.detail, ac.detail);
        if small(f, j + 1) {
            let ex = f.expand()?;
            let v = q_iterable_verdict(&ex, j + 1)?;
            let g = build_graph(&ex, j)?;
            ok &= v.ok && g.acyclic;
            detail += &format!("; explicit: {}, graph on {} vertices with {} edges, acyclic {}", v.detail, g.vertices.len(), g.edges.len(), g.acyclic);
        }
        checks.push(Check::new(format!("A1(a) n={j}"), ok, detail));
    }
    for j in 1..=n {
        for m in 0..j {
            let r = orbit_refines(&fams[j].iterates(j + 1), &fams[m].iterates(m + 1))?;
            let mut ok = r.ok;
            let mut detail = r.detail;
            if small(&fams[j], j + 1) && small(&fams[m], m + 1) {
                let v = refines_verdict(&fams[j].expand()?.iterates(j + 1)?, &fams[m].expand()?.iterates(m + 1)?)?;
                ok &= v.ok;
                detail += &format!("; explicit: {}", v.detail);
            }
            checks.push(Check::new(format!("A1(b) n={j} m={m}"), ok, detail));
        }
        let items = orbit_compatible(&fams[j], &fams[j - 1], j)?;
        let mut ok = items.iter().all(|v| v.ok);
        let mut detail: Vec<String> = items.iter().enumerate().map(|(i, v)| format!("({}) {}", i + 1, v.detail)).collect();
        if small(&fams[j], j + 1) && small(&fams[j - 1], j) {
            let c = compatible(&fams[j].expand()?, &fams[j - 1].expand()?, j)?;
            ok &= c.ok();
            detail.push(format!("explicit: failing item {:?}", c.failing_item()));
        }
        checks.push(Check::new(format!("A1(c) n={j}"), ok, detail.join("; ")));
    }
    for j in 0..n {
        let counts = children_counts(&fams[j + 1], &fams[j])?;
        let two = BigUint::from(2u32);
        let bad: Vec<String> = counts.iter().filter(|(_, c)| *c < two).map(|(a, c)| format!("R^{a}: {c}")).collect();
        let least = counts.iter().map(|(_, c)| c.clone()).min().unwrap_or_default();
        let detail = if bad.is_empty() {
            format!("{} parents, each with at least {least} children", counts.len())
        } else {
            format!("parents with fewer than two children: {}", bad.join(", "))
        };
        checks.push(Check::new(format!("A2 n={j}"), bad.is_empty(), detail));
    }
    let meshes: Vec<Q> = fams.iter().map(|f| Q::new(BigInt::one(), BigInt::one() << f.bits() as usize)).collect();
    for j in 1..=n {
        let ok = meshes[j].clone() * Q::from_integer(2.into()) <= meshes[j - 1];
        checks.push(Check::new(format!("A3 n={j}"), ok, format!("mesh {} after {}", meshes[j], meshes[j - 1])));
    }
    let h = a1c_helper(kc)?;
    checks.push(h);
    Ok(checks)
}

pub fn generate_e(kc: &KConstruction, depth: usize) -> Result<Generated> {
    if depth > kc.depth {
        return Err(Error::Precondition(format!("construction has depth {}, asked for {depth}", kc.depth)));
    }
    if let Some(msg) = &kc.degenerate {
        return Err(Error::Precondition(msg.clone()));
    }
    let families = (0..=depth).map(|j| family_at(kc, j)).collect::<Result<Vec<_>>>()?;
    let checks = verify_families(kc, &families)?;
    if let Some(c) = checks.iter().find(|c| !c.ok) {
        return Err(Error::Verification(format!("{} failed: {}", c.name, c.detail)));
    }
    Ok(Generated { k_seq: kc.k_seq.clone(), depth, families, checks })
}
