//! Serde adapters for exact numbers.
//!
//! Integers within the IEEE double safe range (|n| < 2^53) are written as
//! JSON numbers, larger ones as decimal strings. Both forms are accepted on
//! input. Rationals are always strings of the form `"p/q"` or `"p"`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::str::FromStr;

const SAFE: i64 = 1 << 53;

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum NumOrStr {
    Num(i64),
    Str(String),
}

fn to_repr(x: &BigInt) -> NumOrStr {
    match x.to_i64() {
        Some(v) if v.abs() < SAFE => NumOrStr::Num(v),
        _ => NumOrStr::Str(x.to_string()),
    }
}

fn from_repr<E: serde::de::Error>(r: NumOrStr) -> Result<BigInt, E> {
    match r {
        NumOrStr::Num(v) => Ok(BigInt::from(v)),
        NumOrStr::Str(s) => BigInt::from_str(s.trim()).map_err(E::custom),
    }
}

pub mod int {
    use super::*;

    pub fn serialize<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        to_repr(x).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        from_repr(NumOrStr::deserialize(d)?)
    }
}

pub mod int_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(to_repr).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        Vec::<NumOrStr>::deserialize(d)?
            .into_iter()
            .map(from_repr)
            .collect()
    }
}

pub mod int_mat {
    use super::*;

    pub fn serialize<S: Serializer>(m: &[Vec<BigInt>], s: S) -> Result<S::Ok, S::Error> {
        m.iter()
            .map(|r| r.iter().map(to_repr).collect::<Vec<_>>())
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<BigInt>>, D::Error> {
        Vec::<Vec<NumOrStr>>::deserialize(d)?
            .into_iter()
            .map(|r| r.into_iter().map(from_repr).collect())
            .collect()
    }
}

pub fn format_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n = BigInt::from_str(n).map_err(|e| format!("bad numerator in {s:?}: {e}"))?;
    let d = BigInt::from_str(d).map_err(|e| format!("bad denominator in {s:?}: {e}"))?;
    if d.is_zero() {
        return Err(format!("zero denominator in {s:?}"));
    }
    Ok(BigRational::new(n, d))
}

pub mod rational {
    use super::*;

    pub fn serialize<S: Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        format_rational(q).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(D::Error::custom)
    }
}

/// A polynomial as its list of rational coefficients, lowest degree first.
pub mod upoly {
    use super::*;
    use crate::poly::upoly::UPoly;

    pub fn serialize<S: Serializer>(p: &UPoly, s: S) -> Result<S::Ok, S::Error> {
        p.coeffs().iter().map(format_rational).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<UPoly, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        let c = v.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>().map_err(D::Error::custom)?;
        Ok(UPoly::new(c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize, Deserialize, PartialEq, Debug)]
    struct Wrap(#[serde(with = "int_vec")] Vec<BigInt>);

    #[test]
    fn large_integers_become_strings() {
        let big = BigInt::from(1u64 << 60);
        let w = Wrap(vec![BigInt::from(-3), big.clone()]);
        let s = serde_json::to_string(&w).unwrap();
        assert_eq!(s, format!("[-3,\"{big}\"]"));
        let back: Wrap = serde_json::from_str(&s).unwrap();
        assert_eq!(back, w);
    }

    #[test]
    fn rationals_parse() {
        assert_eq!(
            parse_rational("-3/6").unwrap(),
            BigRational::new((-1).into(), 2.into())
        );
        assert!(parse_rational("1/0").is_err());
        assert_eq!(format_rational(&BigRational::from_integer(7.into())), "7");
    }
}
