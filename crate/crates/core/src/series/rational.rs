//! Rational helpers shared by the series types.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact exponent of `q`, always stored in lowest terms with a positive denominator.
pub type Exponent = Ratio<i64>;

/// Exact coefficient type.
pub type Rational = BigRational;

pub fn exp(n: i64, d: i64) -> Exponent {
    Exponent::new(n, d)
}

pub fn exp_int(n: i64) -> Exponent {
    Exponent::from_integer(n)
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn lcm(a: i64, b: i64) -> i64 {
    a.lcm(&b)
}

pub fn gcd(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

/// Largest integer `k` with `k / scale <= e`.
pub fn floor_key(e: Exponent, scale: i64) -> i64 {
    (e * exp_int(scale)).floor().to_integer()
}

/// Convert an exact coefficient into an exponent, failing if it does not fit in `i64`.
pub fn rational_to_exponent(r: &Rational) -> Result<Exponent> {
    let n = r.numer().to_i64();
    let d = r.denom().to_i64();
    match (n, d) {
        (Some(n), Some(d)) => Ok(Exponent::new(n, d)),
        _ => Err(Error::InvalidArgument(format!("exponent {r} out of range"))),
    }
}

pub fn exponent_to_rational(e: Exponent) -> Rational {
    rat(*e.numer(), *e.denom())
}

/// `c^n` for a rational `c` and any integer `n`.
pub fn rat_pow(c: &Rational, n: i64) -> Result<Rational> {
    if n >= 0 {
        Ok(num_traits::pow::pow(c.clone(), n as usize))
    } else if c.is_zero() {
        Err(Error::ZeroDenominator("zero raised to a negative power".into()))
    } else {
        Ok(num_traits::pow::pow(c.recip(), n.unsigned_abs() as usize))
    }
}

pub fn sign_pow(n: i64) -> Rational {
    if n.rem_euclid(2) == 0 {
        Rational::one()
    } else {
        -Rational::one()
    }
}

/// Format an exponent as `p/q` (or `p` when integral).
pub fn fmt_exponent(e: Exponent) -> String {
    if *e.denom() == 1 {
        e.numer().to_string()
    } else {
        format!("{}/{}", e.numer(), e.denom())
    }
}

pub fn fmt_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parse `p`, `-p` or `p/q`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::InvalidArgument(format!("malformed rational `{s}`"));
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

pub fn parse_exponent(s: &str) -> Result<Exponent> {
    rational_to_exponent(&parse_rational(s)?)
}

pub(crate) mod serde_exponent {
    use super::{fmt_exponent, parse_exponent, Exponent};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(e: &Exponent, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_exponent(*e))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Exponent, D::Error> {
        let s = String::deserialize(d)?;
        parse_exponent(&s).map_err(serde::de::Error::custom)
    }
}

pub(crate) mod serde_rational {
    use super::{fmt_rational, parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floor_key_handles_negative_exponents() {
        assert_eq!(floor_key(exp(-1, 2), 4), -2);
        assert_eq!(floor_key(exp(-1, 3), 2), -1);
        assert_eq!(floor_key(exp(7, 3), 1), 2);
    }

    #[test]
    fn rational_round_trip() {
        for s in ["3/4", "-5", "0", "-7/12"] {
            assert_eq!(fmt_rational(&parse_rational(s).unwrap()), s);
        }
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }
}
