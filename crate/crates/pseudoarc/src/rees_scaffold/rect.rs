use std::collections::BTreeSet;

use num::bigint::BigInt;
use num::{BigUint, One};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::odometer_measure::residue::{modulus, reduce, ResidueSet};
use crate::Q;

/// Largest residue list expanded when deciding predicates explicitly.
pub const EXPLICIT_BUDGET: usize = 1 << 16;

/// One generation of a box lineage: its name and the level (bits) of its cube.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BoxLevel {
    pub name: String,
    pub bits: u32,
}

/// Symbolic cube `R^offset(V)` where `V` is the last entry of `path`.
/// Its id reads `V0@2/V1@8#17`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BoxId {
    pub path: Vec<BoxLevel>,
    pub offset: BigUint,
}

impl BoxId {
    pub fn new(path: Vec<BoxLevel>, offset: BigUint) -> Result<Self> {
        let Some(last) = path.last() else {
            return Err(Error::Domain("box lineage is empty".into()));
        };
        if path.windows(2).any(|w| w[0].bits >= w[1].bits) {
            return Err(Error::Domain("box lineage levels must increase".into()));
        }
        let offset = offset % modulus(last.bits);
        Ok(BoxId { path, offset })
    }

    pub fn root(name: &str, bits: u32) -> Self {
        BoxId { path: vec![BoxLevel { name: name.into(), bits }], offset: BigUint::default() }
    }

    pub fn bits(&self) -> u32 {
        self.path.last().unwrap().bits
    }

    pub fn id(&self) -> String {
        let p: Vec<String> = self.path.iter().map(|l| format!("{}@{}", l.name, l.bits)).collect();
        format!("{}#{}", p.join("/"), self.offset)
    }

    pub fn parent(&self) -> Option<BoxId> {
        if self.path.len() < 2 {
            return None;
        }
        let path = self.path[..self.path.len() - 1].to_vec();
        let bits = path.last().unwrap().bits;
        Some(BoxId { path, offset: &self.offset % modulus(bits) })
    }

    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("box id {s:?}"));
        let (p, off) = s.rsplit_once('#').ok_or_else(bad)?;
        let path = p
            .split('/')
            .map(|l| {
                let (name, bits) = l.rsplit_once('@').ok_or_else(bad)?;
                Ok(BoxLevel { name: name.into(), bits: bits.parse().map_err(|_| bad())? })
            })
            .collect::<Result<Vec<_>>>()?;
        BoxId::new(path, off.parse().map_err(|_| bad())?)
    }

    /// Same cube iterated `k` times.
    pub fn iterate(&self, k: &BigInt) -> BoxId {
        let off = reduce(&(BigInt::from(self.offset.clone()) + k), self.bits());
        BoxId { path: self.path.clone(), offset: off }
    }

    /// Strict lineage descent: `other` is a proper ancestor whose iterate matches.
    pub fn descends_from(&self, other: &BoxId) -> bool {
        other.path.len() < self.path.len()
            && self.path[..other.path.len()] == other.path[..]
            && &self.offset % modulus(other.bits()) == other.offset
    }
}

/// `π_{k_n}^{-1}(D)` recorded as its odometer cylinder and the symbolic cube `D`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rectangle {
    pub level: usize,
    pub cylinder: ResidueSet,
    pub cube: BoxId,
    /// The cube stays off the branch fibre.
    pub branch_free: bool,
}

impl Rectangle {
    pub fn new(level: usize, cylinder: ResidueSet, cube: BoxId) -> Result<Self> {
        if cylinder.bits != cube.bits() {
            return Err(Error::Domain(format!("cylinder at {} bits, cube at {}", cylinder.bits, cube.bits())));
        }
        Ok(Rectangle { level, cylinder, cube, branch_free: true })
    }

    pub fn bits(&self) -> u32 {
        self.cylinder.bits
    }

    /// `R^k(X)`, for `|k|` up to one full period `2^bits`.
    pub fn iterate(&self, k: i64) -> Result<Rectangle> {
        if BigUint::from(k.unsigned_abs()) > modulus(self.bits()) {
            return Err(Error::Domain(format!("|{k}| beyond the period 2^{}", self.bits())));
        }
        let k = BigInt::from(k);
        Ok(Rectangle {
            level: self.level,
            cylinder: self.cylinder.shift(&k),
            cube: self.cube.iterate(&k),
            branch_free: self.branch_free,
        })
    }

    /// Cylinders lifted to a common level.
    fn common(&self, other: &Rectangle) -> Result<(ResidueSet, ResidueSet)> {
        let b = self.bits().max(other.bits());
        Ok((self.cylinder.lift(b)?, other.cylinder.lift(b)?))
    }

    /// `X ∩ Y ≠ ∅`.
    pub fn meets(&self, other: &Rectangle) -> Result<bool> {
        let (a, b) = self.common(other)?;
        Ok(!a.intersect(&b)?.is_empty())
    }

    /// Same level, same cube and the same cylinder as a set.
    pub fn same(&self, other: &Rectangle) -> Result<bool> {
        if self.level != other.level || self.cube != other.cube {
            return Ok(false);
        }
        let (a, b) = self.common(other)?;
        Ok(a.is_subset(&b)? && b.is_subset(&a)?)
    }

    /// `self ⊂ Int(other)`: strict lineage descent and strict cylinder containment.
    pub fn inside(&self, other: &Rectangle) -> Result<bool> {
        if !self.cube.descends_from(&other.cube) {
            return Ok(false);
        }
        let (a, b) = self.common(other)?;
        Ok(a.is_subset(&b)? && a.count() < b.count())
    }

    /// 2-adic diameter of the cylinder.
    pub fn diameter(&self) -> Result<Q> {
        let xs = self.cylinder.elements(EXPLICIT_BUDGET)?;
        let Some(x0) = xs.first() else {
            return Ok(Q::default());
        };
        let spread = xs.iter().fold(BigUint::default(), |acc, x| acc | (x ^ x0));
        let v = spread.trailing_zeros().map(|t| t as u32).unwrap_or(self.bits());
        Ok(Q::new(BigInt::one(), BigInt::one() << v as usize))
    }

    pub fn to_json(&self) -> Result<Value> {
        let residues: Vec<Value> = self.cylinder.elements(EXPLICIT_BUDGET)?.iter().map(uint_json).collect();
        Ok(json!({
            "level": self.level,
            "cylinder": {"k": self.bits(), "residues": residues},
            "box": {"id": self.cube.id(), "parent": self.cube.parent().map(|p| p.id())},
            "branch_free": self.branch_free,
        }))
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |what: &str| Error::Parse(format!("rectangle: {what}"));
        let level = v["level"].as_u64().ok_or_else(|| bad("level"))? as usize;
        let k = v["cylinder"]["k"].as_u64().ok_or_else(|| bad("cylinder.k"))? as u32;
        let residues = v["cylinder"]["residues"]
            .as_array()
            .ok_or_else(|| bad("cylinder.residues"))?
            .iter()
            .map(crate::json::uint_from_json)
            .collect::<Result<Vec<_>>>()?;
        let cube = BoxId::parse(v["box"]["id"].as_str().ok_or_else(|| bad("box.id"))?)?;
        let parent = v["box"]["parent"].as_str().map(BoxId::parse).transpose()?;
        if parent != cube.parent() {
            return Err(bad("box.parent does not match the lineage in box.id"));
        }
        let mut r = Rectangle::new(level, ResidueSet::from_residues(k, &residues)?, cube)?;
        r.branch_free = v.get("branch_free").and_then(Value::as_bool).unwrap_or(true);
        Ok(r)
    }
}

fn uint_json(x: &BigUint) -> Value {
    use num::ToPrimitive;
    match x.to_u64() {
        Some(u) => json!(u),
        None => json!(x.to_string()),
    }
}

impl Serialize for Rectangle {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().map_err(serde::ser::Error::custom)?.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Rectangle {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Rectangle::from_json(&Value::deserialize(d)?).map_err(D::Error::custom)
    }
}

/// Finite family `ℰ` of rectangles sharing one level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RectangleFamily {
    pub level: usize,
    pub rectangles: Vec<Rectangle>,
}

impl RectangleFamily {
    pub fn new(level: usize, rectangles: Vec<Rectangle>) -> Result<Self> {
        if let Some(r) = rectangles.iter().find(|r| r.level != level) {
            return Err(Error::Domain(format!("rectangle at level {} in a level-{level} family", r.level)));
        }
        Ok(RectangleFamily { level, rectangles })
    }

    pub fn len(&self) -> usize {
        self.rectangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rectangles.is_empty()
    }

    /// `ℰ^q = ⋃_{|k| <= q} R^k(ℰ)`, duplicates removed.
    pub fn iterates(&self, q: usize) -> Result<RectangleFamily> {
        let mut out: Vec<Rectangle> = Vec::new();
        for x in &self.rectangles {
            for k in -(q as i64)..=q as i64 {
                let y = x.iterate(k)?;
                if !contains_same(&out, &y)? {
                    out.push(y);
                }
            }
        }
        RectangleFamily::new(self.level, out)
    }

    /// Residues of the realization `𝔰(ℰ)` at `bits`.
    pub fn realization(&self, bits: u32) -> Result<BTreeSet<BigUint>> {
        let mut out = BTreeSet::new();
        for r in &self.rectangles {
            out.extend(r.cylinder.lift(bits)?.elements(EXPLICIT_BUDGET)?);
            if out.len() > EXPLICIT_BUDGET {
                return Err(Error::Budget(format!("realization above {EXPLICIT_BUDGET} residues")));
            }
        }
        Ok(out)
    }

    pub fn max_bits(&self) -> u32 {
        self.rectangles.iter().map(|r| r.bits()).max().unwrap_or(0)
    }

    pub fn mesh(&self) -> Result<Q> {
        let mut m = Q::default();
        for r in &self.rectangles {
            m = m.max(r.diameter()?);
        }
        Ok(m)
    }
}

pub(crate) fn contains_same(list: &[Rectangle], y: &Rectangle) -> Result<bool> {
    for x in list {
        if x.same(y)? {
            return Ok(true);
        }
    }
    Ok(false)
}
