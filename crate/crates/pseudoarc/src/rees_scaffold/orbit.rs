use num::bigint::BigInt;
use num::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::odometer_measure::residue::{modulus, Constraint, ResidueSet, ResidueUnion};

use super::family::Verdict;
use super::rect::{BoxId, BoxLevel, Rectangle, RectangleFamily, EXPLICIT_BUDGET};

/// `{ R^t(V) : t in offsets }` for one cube `V` whose cylinder is the single
/// residue `anchor` at `bits`; iterates keep the form with shifted offsets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitFamily {
    pub level: usize,
    pub lineage: Vec<(String, u32)>,
    #[serde(with = "crate::json::uint")]
    pub anchor: BigUint,
    pub offsets: ResidueUnion,
}

impl OrbitFamily {
    pub fn new(level: usize, lineage: Vec<(String, u32)>, anchor: BigUint, offsets: ResidueUnion) -> Result<Self> {
        let bits = lineage.last().ok_or_else(|| Error::Domain("empty lineage".into()))?.1;
        if offsets.bits != bits {
            return Err(Error::Domain(format!("offsets at {} bits, cube at {bits}", offsets.bits)));
        }
        let anchor = anchor % modulus(bits);
        Ok(OrbitFamily { level, lineage, anchor, offsets })
    }

    pub fn bits(&self) -> u32 {
        self.offsets.bits
    }

    fn path(&self) -> Vec<BoxLevel> {
        self.lineage.iter().map(|(n, b)| BoxLevel { name: n.clone(), bits: *b }).collect()
    }

    pub fn len(&self) -> Result<BigUint> {
        self.offsets.count()
    }

    /// `R^t(V)`.
    pub fn rect(&self, t: &BigUint) -> Result<Rectangle> {
        let b = self.bits();
        let cyl = ResidueSet::residue(b, &((&self.anchor + t) % modulus(b)))?;
        Rectangle::new(self.level, cyl, BoxId::new(self.path(), t.clone())?)
    }

    /// `ℰ^q`.
    pub fn iterates(&self, q: usize) -> OrbitFamily {
        let q = q as i64;
        let terms = self.offsets.terms.iter().flat_map(|t| ResidueUnion::shifts(t, -q, q).terms).collect();
        OrbitFamily { offsets: ResidueUnion { bits: self.bits(), terms }, ..self.clone() }
    }

    /// Cylinder residues of the realization.
    pub fn cylinders(&self) -> ResidueUnion {
        self.offsets.shift(&BigInt::from(self.anchor.clone()))
    }

    pub fn expand(&self) -> Result<RectangleFamily> {
        let ts = self.offsets.elements(EXPLICIT_BUDGET)?;
        let rects = ts.iter().map(|t| self.rect(t)).collect::<Result<Vec<_>>>()?;
        RectangleFamily::new(self.level, rects)
    }

    /// Whether `self` names a strict ancestor lineage of `other`.
    pub fn is_ancestor_of(&self, other: &OrbitFamily) -> bool {
        self.lineage.len() < other.lineage.len() && other.lineage[..self.lineage.len()] == self.lineage[..]
    }
}

/// One lineage with single-residue cylinders: iterates are equal exactly when
/// their offsets agree, and disjoint otherwise.
pub fn orbit_q_iterable(e: &OrbitFamily, q: usize) -> Verdict {
    Verdict { ok: true, detail: format!("single lineage, {} offset terms, q = {q}", e.offsets.terms.len()) }
}

/// `𝒢(ℰ^n)` is a union of paths unless the offsets of `ℰ^n` fill the period.
pub fn orbit_acyclic(e: &OrbitFamily, n: usize) -> Result<Verdict> {
    let c = e.iterates(n).offsets.count()?;
    let p = modulus(e.bits());
    Ok(Verdict { ok: c < p, detail: format!("{c} of {p} offsets in E^{n}") })
}

/// Every element of `e` contains an element of `f`, and every meeting pair is nested.
pub fn orbit_refines(f: &OrbitFamily, e: &OrbitFamily) -> Result<Verdict> {
    let b = f.bits().max(e.bits());
    let fc = f.cylinders().lift(b)?;
    let ec = e.cylinders().lift(b)?;
    let meet = !fc.intersect(&ec)?.is_empty();
    let nested = e.is_ancestor_of(f) && f.bits() > e.bits() && &f.anchor % modulus(e.bits()) == e.anchor;
    if meet && !nested {
        return Ok(Verdict { ok: false, detail: "(2) families meet without strict lineage descent".into() });
    }
    if !nested {
        return Ok(Verdict { ok: e.offsets.is_empty(), detail: "(1) no element of F descends from E".into() });
    }
    // nested lineage: a descendant cube lies in R^a(V_E) exactly when its cylinder does
    let eb = e.bits();
    for a in e.offsets.elements(EXPLICIT_BUDGET)? {
        let class = Constraint::residue(eb, &((&e.anchor + &a) % modulus(eb)))?;
        let hit = fc.intersect_set(&ResidueSet::full(b).with(class)?)?;
        if hit.is_empty() {
            return Ok(Verdict { ok: false, detail: format!("(1) R^{a}(V) of E contains no element of F") });
        }
    }
    Ok(Verdict { ok: true, detail: format!("lineage nested, {} bits over {eb}", f.bits()) })
}

/// Items (1)-(4) of compatibility, decided on cylinders.
pub fn orbit_compatible(f: &OrbitFamily, e: &OrbitFamily, q: usize) -> Result<Vec<Verdict>> {
    let b = f.bits().max(e.bits());
    let mut items = vec![orbit_q_iterable(e, q), orbit_q_iterable(f, q + 1)];
    let sf = f.cylinders().lift(b)?;
    let se = e.cylinders().lift(b)?;
    items.push(if !sf.is_subset(&se)? {
        Verdict { ok: false, detail: "realization of F is not inside that of E".into() }
    } else {
        let r = orbit_refines(&f.iterates(q + 1), &e.iterates(q))?;
        Verdict { ok: r.ok, detail: format!("F^{} refines E^{q}: {}", q + 1, r.detail) }
    });
    let sfq = f.iterates(q + 1).cylinders().lift(b)?;
    let mut v4 = Verdict { ok: true, detail: format!("|k| <= {q}") };
    for k in -(q as i64)..=q as i64 {
        let k_ = BigInt::from(k);
        let lhs = sfq.intersect(&se.shift(&k_))?;
        if !lhs.same_set(&sf.shift(&k_))? {
            v4 = Verdict { ok: false, detail: format!("k = {k}: s(F^{}) ∩ R^k(s(E)) differs from R^k(s(F))", q + 1) };
            break;
        }
    }
    items.push(v4);
    Ok(items)
}

/// Number of elements of `f` inside each element of `e`, per offset of `e`.
pub fn children_counts(f: &OrbitFamily, e: &OrbitFamily) -> Result<Vec<(BigUint, BigUint)>> {
    if !e.is_ancestor_of(f) {
        return Ok(e.offsets.elements(EXPLICIT_BUDGET)?.into_iter().map(|a| (a, BigUint::default())).collect());
    }
    let eb = e.bits();
    let fc = f.cylinders();
    let mut out = Vec::new();
    for a in e.offsets.elements(EXPLICIT_BUDGET)? {
        let class = Constraint::residue(eb, &((&e.anchor + &a) % modulus(eb)))?;
        let n = fc.intersect_set(&ResidueSet::full(f.bits()).with(class)?)?.count()?;
        out.push((a, n));
    }
    Ok(out)
}
