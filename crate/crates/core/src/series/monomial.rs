use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::rational::{
    exp_int, fmt_exponent, fmt_rational, parse_exponent, parse_rational, rat_int, rat_pow, serde_exponent,
    serde_rational, Exponent, Rational,
};
use crate::error::{Error, Result};

/// A signed monomial `c * q^e` with exact rational `c` and `e`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Monomial {
    #[serde(with = "serde_rational")]
    pub coeff: Rational,
    #[serde(with = "serde_exponent")]
    pub exp: Exponent,
}

impl Monomial {
    pub fn new(coeff: Rational, exp: Exponent) -> Self {
        Self { coeff, exp }
    }

    /// `q^e`
    pub fn q(exp: Exponent) -> Self {
        Self::new(Rational::one(), exp)
    }

    /// `q^k` for an integer `k`.
    pub fn qi(k: i64) -> Self {
        Self::q(exp_int(k))
    }

    /// `-q^e`
    pub fn neg_q(exp: Exponent) -> Self {
        Self::new(-Rational::one(), exp)
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(c, Exponent::zero())
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.coeff.is_one() && self.exp.is_zero()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial::new(&self.coeff * &other.coeff, self.exp + other.exp)
    }

    pub fn pow(&self, n: i64) -> Result<Monomial> {
        Ok(Monomial::new(rat_pow(&self.coeff, n)?, self.exp * exp_int(n)))
    }

    pub fn neg(&self) -> Monomial {
        Monomial::new(-&self.coeff, self.exp)
    }

    pub fn scale(&self, c: i64) -> Monomial {
        Monomial::new(&self.coeff * rat_int(c), self.exp)
    }

    /// Parse the forms produced by `Display`: `3/2`, `q`, `-q^3`, `q^(-1/2)`, `2*q^(1/3)`.
    pub fn parse(src: &str) -> Result<Monomial> {
        let bad = || Error::Parse { offset: 0, expected: "monomial such as -q^(1/2)".into() };
        let s: String = src.chars().filter(|c| !c.is_whitespace()).collect();
        let (sign, body) = match s.strip_prefix('-') {
            Some(rest) => (-Rational::one(), rest),
            None => (Rational::one(), s.strip_prefix('+').unwrap_or(&s)),
        };
        let (coeff, qpart) = match body.find('q') {
            None => return Ok(Monomial::constant(sign * parse_rational(body).map_err(|_| bad())?)),
            Some(0) => (Rational::one(), body),
            Some(i) => {
                let c = body[..i].strip_suffix('*').ok_or_else(bad)?;
                (parse_rational(c).map_err(|_| bad())?, &body[i..])
            }
        };
        let rest = &qpart[1..];
        let exp = if rest.is_empty() {
            exp_int(1)
        } else {
            let e = rest.strip_prefix('^').ok_or_else(bad)?;
            let e = e.strip_prefix('(').and_then(|x| x.strip_suffix(')')).unwrap_or(e);
            parse_exponent(e).map_err(|_| bad())?
        };
        Ok(Monomial::new(sign * coeff, exp))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp.is_zero() {
            return write!(f, "{}", fmt_rational(&self.coeff));
        }
        let c = if self.coeff.is_one() {
            String::new()
        } else if self.coeff == -Rational::one() {
            "-".to_string()
        } else {
            format!("{}*", fmt_rational(&self.coeff))
        };
        if self.exp.is_one() {
            write!(f, "{c}q")
        } else if *self.exp.denom() == 1 && *self.exp.numer() > 0 {
            write!(f, "{c}q^{}", fmt_exponent(self.exp))
        } else {
            write!(f, "{c}q^({})", fmt_exponent(self.exp))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::rational::exp;

    #[test]
    fn display_parse_round_trip() {
        for m in [
            Monomial::q(exp(1, 2)),
            Monomial::neg_q(exp_int(11)),
            Monomial::new(rat_int(3), exp(-2, 3)),
            Monomial::constant(rat_int(-5)),
            Monomial::qi(1),
        ] {
            assert_eq!(Monomial::parse(&m.to_string()).unwrap(), m);
        }
        assert!(Monomial::parse("q^").is_err());
    }
}
