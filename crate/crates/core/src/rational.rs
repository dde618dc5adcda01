//! Exact rational numbers used for every probability, score and ratio.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer, MapAccess, Visitor};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};

pub type Rational = BigRational;

/// `num/den` as an exact rational. Panics on a zero denominator.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

pub fn half() -> Rational {
    ratio(1, 2)
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

pub fn in_unit_interval(q: &Rational) -> bool {
    !q.is_negative() && q <= &one()
}

/// Decimal rendering with `digits` significant digits.
pub fn format_significant(q: &Rational, digits: usize) -> String {
    let x = to_f64(q);
    if x == 0.0 {
        return "0".to_string();
    }
    let magnitude = x.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Parses `"n/d"` or `"n"`.
pub fn parse(text: &str) -> Option<Rational> {
    let text = text.trim();
    match text.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rational::new(n, d))
            }
        }
        None => text.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

/// JSON form of a rational: `{"num": N, "den": D}`. Floats are rejected.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Exact(pub Rational);

impl From<Rational> for Exact {
    fn from(q: Rational) -> Self {
        Exact(q)
    }
}

impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn int_to_json(n: &BigInt) -> serde_json::Value {
    match n.to_i64() {
        Some(v) => serde_json::Value::from(v),
        None => serde_json::Value::from(n.to_string()),
    }
}

/// `{"num":..,"den":..}` as a JSON value, for reports.
pub fn to_json(q: &Rational) -> serde_json::Value {
    serde_json::json!({ "num": int_to_json(q.numer()), "den": int_to_json(q.denom()) })
}

impl Serialize for Exact {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(2))?;
        map.serialize_entry("num", &int_to_json(self.0.numer()))?;
        map.serialize_entry("den", &int_to_json(self.0.denom()))?;
        map.end()
    }
}

fn json_to_int<E: de::Error>(value: serde_json::Value, field: &str) -> Result<BigInt, E> {
    match value {
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(BigInt::from(i))
            } else if let Some(u) = n.as_u64() {
                Ok(BigInt::from(u))
            } else {
                Err(E::custom(format!(
                    "`{field}` must be an integer, got {n} (floats are rejected)"
                )))
            }
        }
        serde_json::Value::String(s) => s
            .parse()
            .map_err(|_| E::custom(format!("`{field}` is not an integer: {s:?}"))),
        other => Err(E::custom(format!("`{field}` must be an integer, got {other}"))),
    }
}

impl<'de> Deserialize<'de> for Exact {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct ExactVisitor;

        impl<'de> Visitor<'de> for ExactVisitor {
            type Value = Exact;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an exact rational {\"num\": N, \"den\": D}")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Exact, E> {
                Err(E::custom(format!(
                    "floating-point probability {v} rejected; use {{\"num\":N,\"den\":D}}"
                )))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Exact, E> {
                Ok(Exact(int(v)))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Exact, E> {
                Ok(Exact(Rational::from_integer(BigInt::from(v))))
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Exact, A::Error> {
                let mut num = None;
                let mut den = None;
                while let Some(key) = map.next_key::<String>()? {
                    let value: serde_json::Value = map.next_value()?;
                    match key.as_str() {
                        "num" => num = Some(json_to_int::<A::Error>(value, "num")?),
                        "den" => den = Some(json_to_int::<A::Error>(value, "den")?),
                        other => return Err(de::Error::unknown_field(other, &["num", "den"])),
                    }
                }
                let num = num.ok_or_else(|| de::Error::missing_field("num"))?;
                let den = den.ok_or_else(|| de::Error::missing_field("den"))?;
                if den.is_zero() {
                    return Err(de::Error::custom("zero denominator"));
                }
                Ok(Exact(Rational::new(num, den)))
            }
        }

        deserializer.deserialize_any(ExactVisitor)
    }
}

/// `#[serde(with = "crate::rational::exact")]` for `Rational` fields.
pub mod exact {
    use super::{Exact, Rational};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, serializer: S) -> Result<S::Ok, S::Error> {
        Exact(q.clone()).serialize(serializer)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Rational, D::Error> {
        Exact::deserialize(deserializer).map(|e| e.0)
    }
}
