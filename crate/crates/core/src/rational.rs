//! Exact rational helpers on top of `BigRational`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn zero() -> Q {
    Q::zero()
}

pub fn one() -> Q {
    Q::one()
}

/// Smallest integer `>= x`.
pub fn ceil_int(x: &Q) -> BigInt {
    x.ceil().to_integer()
}

/// Renders `x` as `"a/b"` (or `"a"` for integers).
pub fn render(x: &Q) -> String {
    x.to_string()
}

/// Decimal rendering with `digits` digits after the point, truncated toward zero.
pub fn render_decimal(x: &Q, digits: usize) -> String {
    let neg = x.is_negative();
    let a = x.abs();
    let int = a.numer().div_floor(a.denom());
    let mut rem = a.numer() - &int * a.denom();
    let mut s = String::new();
    if neg {
        s.push('-');
    }
    s.push_str(&int.to_string());
    if digits > 0 {
        s.push('.');
        for _ in 0..digits {
            rem *= 10;
            let d = rem.div_floor(a.denom());
            rem -= &d * a.denom();
            s.push_str(&d.to_string());
        }
    }
    s
}

/// Parses `"a/b"`, `"a"` or a plain decimal integer.
pub fn parse(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Validation(format!("cannot parse rational `{s}`"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::Validation(format!("zero denominator in `{s}`")));
            }
            Ok(Q::new(n, d))
        }
        None => {
            let n: BigInt = s.parse().map_err(|_| bad())?;
            Ok(Q::from_integer(n))
        }
    }
}

/// Numerator/denominator as `i64`, failing on overflow.
pub fn to_pair(x: &Q) -> Result<(i64, i64)> {
    let n = x.numer().to_i64();
    let d = x.denom().to_i64();
    match (n, d) {
        (Some(n), Some(d)) => Ok((n, d)),
        _ => Err(Error::Resource(format!("rational {x} does not fit in 64-bit JSON integers"))),
    }
}

pub fn from_pair(n: i64, d: i64) -> Result<Q> {
    if d == 0 {
        return Err(Error::Validation("zero denominator".into()));
    }
    Ok(q(n, d))
}

pub fn max_q<'a>(xs: impl IntoIterator<Item = &'a Q>) -> Option<Q> {
    xs.into_iter().max().cloned()
}

/// `serde` adapter storing a rational as the string `"a/b"`.
pub mod as_string {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&render(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        value_to_q(&v).map_err(serde::de::Error::custom)
    }
}

/// Accepts `"a/b"`, an integer, or a `[num, den]` pair.
pub fn value_to_q(v: &serde_json::Value) -> Result<Q> {
    match v {
        serde_json::Value::String(s) => parse(s),
        serde_json::Value::Number(n) => n
            .as_i64()
            .map(qi)
            .ok_or_else(|| Error::Validation(format!("expected an integer, got {n}"))),
        serde_json::Value::Array(a) if a.len() == 2 => {
            let n = a[0].as_i64();
            let d = a[1].as_i64();
            match (n, d) {
                (Some(n), Some(d)) => from_pair(n, d),
                _ => Err(Error::Validation("rational pair must hold integers".into())),
            }
        }
        other => Err(Error::Validation(format!("cannot read a rational from {other}"))),
    }
}
