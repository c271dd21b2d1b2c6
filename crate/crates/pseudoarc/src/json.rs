//! Exact rationals as JSON integer pairs `["num", "den"]`.

use num::bigint::BigInt;
use num::rational::BigRational;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Value};

use crate::error::{Error, Result};

pub fn rat_to_json(q: &BigRational) -> Value {
    json!([q.numer().to_string(), q.denom().to_string()])
}

fn int_from(v: &Value) -> Result<BigInt> {
    match v {
        Value::String(s) => s.parse().map_err(|_| Error::Parse(format!("bad integer {s:?}"))),
        Value::Number(n) => n.to_string().parse().map_err(|_| Error::Parse(format!("bad integer {n}"))),
        other => Err(Error::Parse(format!("expected integer, got {other}"))),
    }
}

pub fn rat_from_json(v: &Value) -> Result<BigRational> {
    let pair = v.as_array().ok_or_else(|| Error::Parse(format!("expected [num, den], got {v}")))?;
    if pair.len() != 2 {
        return Err(Error::Parse(format!("expected [num, den], got {v}")));
    }
    let den = int_from(&pair[1])?;
    if den == BigInt::from(0) {
        return Err(Error::Parse("zero denominator".into()));
    }
    Ok(BigRational::new(int_from(&pair[0])?, den))
}

/// Serde adapter for `BigRational` fields.
pub mod rat {
    use super::*;

    pub fn serialize<S: Serializer>(q: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
        rat_to_json(q).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigRational, D::Error> {
        let v = Value::deserialize(d)?;
        rat_from_json(&v).map_err(D::Error::custom)
    }
}

/// Serde adapter for `Option<BigRational>` fields.
pub mod opt_rat {
    use super::*;

    pub fn serialize<S: Serializer>(q: &Option<BigRational>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match q {
            Some(q) => rat_to_json(q).serialize(s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<BigRational>, D::Error> {
        let v = Value::deserialize(d)?;
        if v.is_null() {
            return Ok(None);
        }
        rat_from_json(&v).map(Some).map_err(D::Error::custom)
    }
}

/// Serde adapter for `Vec<BigRational>` fields.
pub mod vec_rat {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> std::result::Result<S::Ok, S::Error> {
        Value::Array(v.iter().map(rat_to_json).collect()).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<BigRational>, D::Error> {
        let v = Value::deserialize(d)?;
        let arr = v.as_array().ok_or_else(|| D::Error::custom("expected array"))?;
        arr.iter().map(|x| rat_from_json(x).map_err(D::Error::custom)).collect()
    }
}

/// Serde adapter for `BigUint` fields, as decimal strings.
pub mod uint {
    use super::*;
    use num::BigUint;

    pub fn serialize<S: Serializer>(x: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
        x.to_string().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigUint, D::Error> {
        let v = Value::deserialize(d)?;
        uint_from_json(&v).map_err(D::Error::custom)
    }
}

/// Serde adapter for `Vec<(BigUint, BigUint)>` fields.
pub mod uint_pairs {
    use super::*;
    use num::BigUint;

    pub fn serialize<S: Serializer>(v: &[(BigUint, BigUint)], s: S) -> std::result::Result<S::Ok, S::Error> {
        let arr: Vec<Value> = v.iter().map(|(a, b)| json!([a.to_string(), b.to_string()])).collect();
        Value::Array(arr).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<(BigUint, BigUint)>, D::Error> {
        let v = Value::deserialize(d)?;
        let arr = v.as_array().ok_or_else(|| D::Error::custom("expected array"))?;
        arr.iter()
            .map(|p| match p.as_array().map(|p| p.as_slice()) {
                Some([a, b]) => Ok((uint_from_json(a).map_err(D::Error::custom)?, uint_from_json(b).map_err(D::Error::custom)?)),
                _ => Err(D::Error::custom(format!("expected [lo, hi], got {p}"))),
            })
            .collect()
    }
}

/// Nonnegative integer from a JSON number or decimal string.
pub mod uint_vec {
    use num::BigUint;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use serde_json::Value;

    pub fn serialize<S: Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|x| x.to_string()).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigUint>, D::Error> {
        let v = Vec::<Value>::deserialize(d)?;
        v.iter().map(|x| crate::json::uint_from_json(x).map_err(D::Error::custom)).collect()
    }
}

pub fn uint_from_json(v: &Value) -> Result<num::BigUint> {
    let i = int_from(v)?;
    i.to_biguint().ok_or_else(|| Error::Parse(format!("negative integer {i}")))
}
