//! Exact rationals and their `"p/q"` string encoding.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serializer};
use std::str::FromStr;

/// Exact rational used for exponents, coefficients, radii and residues.
pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn zero() -> Q {
    Q::zero()
}

pub fn one() -> Q {
    Q::one()
}

/// Parses `"p/q"`, `"p"` or `"-p/q"`.
pub fn parse(s: &str) -> Result<Q, String> {
    let s = s.trim();
    let r = Q::from_str(s).map_err(|e| format!("bad rational {s:?}: {e}"))?;
    Ok(r)
}

pub fn format(r: &Q) -> String {
    r.to_string()
}

/// Serde adapter storing a rational as a string.
pub mod qstr {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for `Option<Q>`.
pub mod qstr_opt {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Option<Q>, s: S) -> Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_some(&format(r)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Q>, D::Error> {
        let s = Option::<String>::deserialize(d)?;
        s.map(|s| parse(&s).map_err(serde::de::Error::custom)).transpose()
    }
}

/// Serde adapter for `Vec<(Q, Q)>` as a list of string pairs.
pub mod qpairs {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(v: &[(Q, Q)], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for (a, b) in v {
            seq.serialize_element(&(format(a), format(b)))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<(Q, Q)>, D::Error> {
        let raw = Vec::<(String, String)>::deserialize(d)?;
        raw.into_iter()
            .map(|(a, b)| {
                Ok((parse(&a).map_err(serde::de::Error::custom)?, parse(&b).map_err(serde::de::Error::custom)?))
            })
            .collect()
    }
}

/// Serde adapter for `Vec<Q>` as a list of strings.
pub mod qvec {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(v: &[Q], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for a in v {
            seq.serialize_element(&format(a))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Q>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.into_iter().map(|a| parse(&a).map_err(serde::de::Error::custom)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fraction_and_integer() {
        assert_eq!(parse("3/6").unwrap(), qf(1, 2));
        assert_eq!(parse("-4").unwrap(), q(-4));
        assert!(parse("x/2").is_err());
    }

    #[test]
    fn formats_reduced() {
        assert_eq!(format(&qf(2, 4)), "1/2");
        assert_eq!(format(&q(7)), "7");
    }
}
