//! Truncated Laurent-Puiseux series in `q`.
//!
//! A series is stored on a scale `L`: the key `k` stands for `q^(k/L)`. The
//! order `N` records validity: every coefficient of `q^e` with `e <= N` is
//! exact, everything above `N` is unknown. Scales are merged by lcm and reduced
//! to the smallest scale carrying all keys, so equal series compare equal
//! structurally.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::monomial::Monomial;
use super::rational::{
    exp, exp_int, floor_key, fmt_exponent, fmt_rational, gcd, lcm, parse_exponent,
    parse_rational, Exponent, Rational,
};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSeries {
    scale: i64,
    terms: BTreeMap<i64, Rational>,
    order: Exponent,
}

/// First exponent at which two series disagree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Discrepancy {
    #[serde(with = "super::rational::serde_exponent")]
    pub exponent: Exponent,
    #[serde(with = "super::rational::serde_rational")]
    pub lhs: Rational,
    #[serde(with = "super::rational::serde_rational")]
    pub rhs: Rational,
}

impl QSeries {
    pub fn zero(order: Exponent) -> Self {
        Self { scale: 1, terms: BTreeMap::new(), order }
    }

    pub fn one(order: Exponent) -> Self {
        Self::constant(Rational::one(), order)
    }

    pub fn constant(c: Rational, order: Exponent) -> Self {
        Self::monomial(&Monomial::constant(c), order)
    }

    pub fn monomial(m: &Monomial, order: Exponent) -> Self {
        Self::from_terms([(m.exp, m.coeff.clone())], order)
    }

    /// Build from `(exponent, coefficient)` pairs; repeated exponents add up and
    /// anything above `order` is dropped.
    pub fn from_terms<I>(terms: I, order: Exponent) -> Self
    where
        I: IntoIterator<Item = (Exponent, Rational)>,
    {
        let terms: Vec<(Exponent, Rational)> = terms.into_iter().collect();
        let scale = terms.iter().fold(1, |l, (e, _)| lcm(l, *e.denom()));
        let kmax = floor_key(order, scale);
        let mut map: BTreeMap<i64, Rational> = BTreeMap::new();
        for (e, c) in terms {
            let k = e.numer() * (scale / e.denom());
            if k <= kmax {
                *map.entry(k).or_insert_with(Rational::zero) += c;
            }
        }
        Self::build(scale, map, order)
    }

    fn build(scale: i64, mut terms: BTreeMap<i64, Rational>, order: Exponent) -> Self {
        terms.retain(|_, c| !c.is_zero());
        let mut s = Self { scale, terms, order };
        s.reduce_scale();
        s
    }

    /// Build from a dense coefficient vector: `coeffs[i]` is the coefficient of
    /// `q^((offset + i) / scale)`.
    pub(crate) fn from_dense(scale: i64, offset: i64, coeffs: Vec<Rational>, order: Exponent) -> Self {
        let kmax = floor_key(order, scale);
        let terms = coeffs
            .into_iter()
            .enumerate()
            .map(|(i, c)| (offset + i as i64, c))
            .filter(|(k, c)| *k <= kmax && !c.is_zero())
            .collect();
        Self::build(scale, terms, order)
    }

    fn reduce_scale(&mut self) {
        let g = self.terms.keys().fold(self.scale, |g, &k| gcd(g, k));
        if g > 1 {
            self.scale /= g;
            self.terms = std::mem::take(&mut self.terms).into_iter().map(|(k, c)| (k / g, c)).collect();
        }
    }

    pub fn scale(&self) -> i64 {
        self.scale
    }

    pub fn order(&self) -> Exponent {
        self.order
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Non-zero terms in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (Exponent, &Rational)> + '_ {
        let l = self.scale;
        self.terms.iter().map(move |(&k, c)| (exp(k, l), c))
    }

    pub fn coeff(&self, e: Exponent) -> Rational {
        let k = e * exp_int(self.scale);
        if !k.is_integer() {
            return Rational::zero();
        }
        self.terms.get(&k.to_integer()).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn min_exponent(&self) -> Option<Exponent> {
        self.terms.keys().next().map(|&k| exp(k, self.scale))
    }

    pub fn max_exponent(&self) -> Option<Exponent> {
        self.terms.keys().next_back().map(|&k| exp(k, self.scale))
    }

    /// Lower bound for the true valuation: the leading exponent, or the order
    /// when no term is known to be non-zero.
    pub fn valuation(&self) -> Exponent {
        self.min_exponent().unwrap_or(self.order)
    }

    pub fn leading(&self) -> Option<Monomial> {
        self.terms.iter().next().map(|(&k, c)| Monomial::new(c.clone(), exp(k, self.scale)))
    }

    /// Lower the order to `order` (no-op if already lower).
    pub fn truncate(&self, order: Exponent) -> Self {
        let order = order.min(self.order);
        let kmax = floor_key(order, self.scale);
        let terms = self.terms.range(..=kmax).map(|(&k, c)| (k, c.clone())).collect();
        Self::build(self.scale, terms, order)
    }

    /// Keys on a finer scale `new_scale`, which must be a multiple of the current one.
    fn keys_on(&self, new_scale: i64) -> impl Iterator<Item = (i64, &Rational)> + '_ {
        let f = new_scale / self.scale;
        self.terms.iter().map(move |(&k, c)| (k * f, c))
    }

    /// The same series written on scale `new_scale`; fails unless every
    /// exponent is representable there. Mainly useful for dense export.
    pub fn rescale_to(&self, new_scale: i64) -> Result<Self> {
        if new_scale <= 0 || new_scale % self.scale != 0 {
            return Err(Error::InvalidScale(format!(
                "cannot write a scale-{} series on scale {new_scale}",
                self.scale
            )));
        }
        Ok(Self {
            scale: new_scale,
            terms: self.keys_on(new_scale).map(|(k, c)| (k, c.clone())).collect(),
            order: self.order,
        })
    }

    pub fn add(&self, other: &QSeries) -> QSeries {
        let l = lcm(self.scale, other.scale);
        let order = self.order.min(other.order);
        let kmax = floor_key(order, l);
        let mut terms: BTreeMap<i64, Rational> = BTreeMap::new();
        for (k, c) in self.keys_on(l).chain(other.keys_on(l)) {
            if k <= kmax {
                *terms.entry(k).or_insert_with(Rational::zero) += c;
            }
        }
        Self::build(l, terms, order)
    }

    pub fn neg(&self) -> QSeries {
        Self {
            scale: self.scale,
            terms: self.terms.iter().map(|(&k, c)| (k, -c)).collect(),
            order: self.order,
        }
    }

    pub fn sub(&self, other: &QSeries) -> QSeries {
        self.add(&other.neg())
    }

    pub fn scalar_mul(&self, c: &Rational) -> QSeries {
        if c.is_zero() {
            return QSeries::zero(self.order);
        }
        Self {
            scale: self.scale,
            terms: self.terms.iter().map(|(&k, v)| (k, v * c)).collect(),
            order: self.order,
        }
    }

    /// Multiply by `c * q^e`; exact, so the order shifts by `e`.
    pub fn mul_monomial(&self, m: &Monomial) -> QSeries {
        if m.coeff.is_zero() {
            return QSeries::zero(self.order + m.exp);
        }
        let l = lcm(self.scale, *m.exp.denom());
        let shift = m.exp.numer() * (l / m.exp.denom());
        let terms = self.keys_on(l).map(|(k, c)| (k + shift, c * &m.coeff)).collect();
        Self::build(l, terms, self.order + m.exp)
    }

    pub fn mul(&self, other: &QSeries) -> QSeries {
        let order = (self.order + other.valuation()).min(other.order + self.valuation());
        let l = lcm(self.scale, other.scale);
        let kmax = floor_key(order, l);
        let a: Vec<(i64, &Rational)> = self.keys_on(l).collect();
        let b: Vec<(i64, &Rational)> = other.keys_on(l).collect();
        if a.is_empty() || b.is_empty() {
            return QSeries::zero(order);
        }
        let kmin = a[0].0 + b[0].0;
        if kmin > kmax {
            return QSeries::zero(order);
        }
        let width = (kmax - kmin + 1) as usize;
        if width <= 1 << 22 {
            let mut acc = vec![Rational::zero(); width];
            for &(ka, ca) in &a {
                for &(kb, cb) in &b {
                    let k = ka + kb;
                    if k > kmax {
                        break;
                    }
                    acc[(k - kmin) as usize] += ca * cb;
                }
            }
            Self::from_dense(l, kmin, acc, order)
        } else {
            let mut acc: BTreeMap<i64, Rational> = BTreeMap::new();
            for &(ka, ca) in &a {
                for &(kb, cb) in &b {
                    let k = ka + kb;
                    if k > kmax {
                        break;
                    }
                    *acc.entry(k).or_insert_with(Rational::zero) += ca * cb;
                }
            }
            Self::build(l, acc, order)
        }
    }

    /// Multiplicative inverse. The leading term is factored out, so the result
    /// has order `N - 2v` where `v` is the leading exponent.
    pub fn invert(&self) -> Result<QSeries> {
        let (&k0, c0) = self
            .terms
            .iter()
            .next()
            .ok_or_else(|| Error::NotInvertible(format!("series is zero up to O(q^{})", fmt_exponent(self.order))))?;
        let v = exp(k0, self.scale);
        let order = self.order - v - v;
        let rel: Vec<(i64, Rational)> = self
            .terms
            .iter()
            .skip(1)
            .map(|(&k, c)| (k - k0, -(c / c0)))
            .collect();
        let step = rel.iter().fold(0, |g, (k, _)| gcd(g, *k)).max(1);
        let rel: Vec<(usize, Rational)> = rel.into_iter().map(|(k, c)| ((k / step) as usize, c)).collect();
        // Relative expansion (1 + t)^-1 in units of q^(step/scale), up to key kmax.
        let kmax = floor_key(order + v, self.scale);
        let units = if kmax < 0 { -1 } else { kmax / step };
        let mut r: Vec<Rational> = Vec::with_capacity((units + 1).max(0) as usize);
        for m in 0..=units {
            if m == 0 {
                r.push(Rational::one());
                continue;
            }
            let mut s = Rational::zero();
            for (j, c) in &rel {
                if *j as i64 > m {
                    break;
                }
                let prev = &r[(m as usize) - j];
                if !prev.is_zero() {
                    s += c * prev;
                }
            }
            r.push(s);
        }
        let inv_c0 = c0.recip();
        let terms: BTreeMap<i64, Rational> = r
            .into_iter()
            .enumerate()
            .map(|(m, c)| (m as i64 * step - k0, c * &inv_c0))
            .collect();
        Ok(Self::build(self.scale, terms, order))
    }

    pub fn div(&self, other: &QSeries) -> Result<QSeries> {
        Ok(self.mul(&other.invert()?))
    }

    /// Integer power; negative powers go through `invert`.
    pub fn pow(&self, n: i64) -> Result<QSeries> {
        if n == 0 {
            return Ok(QSeries::one(self.order));
        }
        let base = if n < 0 { self.invert()? } else { self.clone() };
        let mut acc = base.clone();
        for _ in 1..n.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    /// `q -> q^m` for rational `m > 0`.
    pub fn substitute_power(&self, m: Exponent) -> Result<QSeries> {
        if m <= Exponent::zero() {
            return Err(Error::InvalidArgument(format!("substitution q -> q^{} needs a positive power", fmt_exponent(m))));
        }
        let (p, r) = (*m.numer(), *m.denom());
        let terms = self.terms.iter().map(|(&k, c)| (k * p, c.clone())).collect();
        Ok(Self::build(self.scale * r, terms, self.order * m))
    }

    /// `q -> -q`; every exponent must be an integer.
    pub fn substitute_signed(&self) -> Result<QSeries> {
        if self.scale != 1 {
            let bad = self.terms.keys().find(|&&k| k % self.scale != 0).copied().unwrap_or(1);
            return Err(Error::NonIntegerExponent(exp(bad, self.scale)));
        }
        let terms = self
            .terms
            .iter()
            .map(|(&k, c)| (k, if k.rem_euclid(2) == 1 { -c } else { c.clone() }))
            .collect();
        Ok(Self::build(1, terms, self.order))
    }

    /// Compare coefficients of every exponent `<= n`. `Ok(None)` means equal.
    pub fn equal_up_to(&self, other: &QSeries, n: Exponent) -> Result<Option<Discrepancy>> {
        for s in [self, other] {
            if s.order < n {
                return Err(Error::InsufficientOrder { needed: n, available: s.order });
            }
        }
        let l = lcm(self.scale, other.scale);
        let kmax = floor_key(n, l);
        let a: BTreeMap<i64, &Rational> = self.keys_on(l).filter(|(k, _)| *k <= kmax).collect();
        let b: BTreeMap<i64, &Rational> = other.keys_on(l).filter(|(k, _)| *k <= kmax).collect();
        let keys: std::collections::BTreeSet<i64> = a.keys().chain(b.keys()).copied().collect();
        let zero = Rational::zero();
        for k in keys {
            let ca = a.get(&k).copied().unwrap_or(&zero);
            let cb = b.get(&k).copied().unwrap_or(&zero);
            if ca != cb {
                return Ok(Some(Discrepancy { exponent: exp(k, l), lhs: ca.clone(), rhs: cb.clone() }));
            }
        }
        Ok(None)
    }

    /// Smallest exponent on this series' lattice beyond the validity order:
    /// the `O(..)` term of the printed form.
    pub fn tail_exponent(&self) -> Exponent {
        let s = Exponent::from_integer(self.scale);
        ((self.order * s).floor() + Exponent::from_integer(1)) / s
    }

    /// Largest absolute value of a coefficient, as `f64` (for diagnostics).
    pub fn max_abs_coeff(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.terms.values().map(|c| c.abs().to_f64().unwrap_or(f64::INFINITY)).fold(0.0, f64::max)
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.terms() {
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let cs = fmt_rational(&a);
            if e.is_zero() {
                write!(f, "{cs}")?;
                continue;
            }
            if !a.is_one() {
                write!(f, "{cs}*")?;
            }
            if e.is_one() {
                write!(f, "q")?;
            } else if e.is_integer() && e > Exponent::zero() {
                write!(f, "q^{}", fmt_exponent(e))?;
            } else {
                write!(f, "q^({})", fmt_exponent(e))?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(q^({}))", fmt_exponent(self.tail_exponent()))
    }
}

#[derive(Serialize, Deserialize)]
struct QSeriesRepr {
    scale: i64,
    order: String,
    terms: Vec<(String, String)>,
}

impl Serialize for QSeries {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        QSeriesRepr {
            scale: self.scale,
            order: fmt_exponent(self.order),
            terms: self.terms().map(|(e, c)| (fmt_exponent(e), fmt_rational(c))).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for QSeries {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = QSeriesRepr::deserialize(d)?;
        let order = parse_exponent(&r.order).map_err(D::Error::custom)?;
        let mut terms = Vec::with_capacity(r.terms.len());
        for (e, c) in &r.terms {
            terms.push((parse_exponent(e).map_err(D::Error::custom)?, parse_rational(c).map_err(D::Error::custom)?));
        }
        Ok(QSeries::from_terms(terms, order))
    }
}
