//! Series in two variables: a truncated power series in `x` whose coefficients
//! are truncated q-series sharing one q-order.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use serde::Serialize;

use super::monomial::Monomial;
use super::qseries::{Discrepancy, QSeries};
use super::rational::{exp_int, fmt_exponent, Exponent, Rational};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiSeries {
    coeffs: BTreeMap<i64, QSeries>,
    x_order: i64,
    q_order: Exponent,
}

/// First `(x-power, q-exponent)` at which two bivariate series disagree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BiDiscrepancy {
    pub x_power: i64,
    #[serde(flatten)]
    pub q: Discrepancy,
}

impl BiSeries {
    pub fn zero(x_order: i64, q_order: Exponent) -> Self {
        Self { coeffs: BTreeMap::new(), x_order, q_order }
    }

    /// Build from coefficients; the q-order becomes the minimum coefficient order.
    pub fn from_coeffs(coeffs: BTreeMap<i64, QSeries>, x_order: i64, q_order: Exponent) -> Self {
        let q_order = coeffs.values().map(|c| c.order()).fold(q_order, Exponent::min);
        let coeffs = coeffs
            .into_iter()
            .filter(|(m, _)| *m <= x_order)
            .map(|(m, c)| (m, c.truncate(q_order)))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        Self { coeffs, x_order, q_order }
    }

    pub fn from_qseries(s: &QSeries, x_order: i64) -> Self {
        Self::from_coeffs(BTreeMap::from([(0, s.clone())]), x_order, s.order())
    }

    /// `c * x^k * q^e`.
    pub fn monomial(m: &Monomial, x_power: i64, x_order: i64, q_order: Exponent) -> Self {
        if x_power < 0 {
            return Self::zero(x_order, q_order);
        }
        Self::from_coeffs(BTreeMap::from([(x_power, QSeries::monomial(m, q_order))]), x_order, q_order)
    }

    pub fn x_order(&self) -> i64 {
        self.x_order
    }

    pub fn q_order(&self) -> Exponent {
        self.q_order
    }

    pub fn coeff(&self, m: i64) -> QSeries {
        self.coeffs.get(&m).cloned().unwrap_or_else(|| QSeries::zero(self.q_order))
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (i64, &QSeries)> + '_ {
        self.coeffs.iter().map(|(&m, c)| (m, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Smallest leading q-exponent over all x-coefficients (or the q-order if all vanish).
    pub fn valuation(&self) -> Exponent {
        self.coeffs.values().map(|c| c.valuation()).fold(self.q_order, Exponent::min)
    }

    pub fn truncate(&self, x_order: i64, q_order: Exponent) -> Self {
        Self::from_coeffs(self.coeffs.clone(), x_order.min(self.x_order), q_order.min(self.q_order))
    }

    pub fn add(&self, other: &BiSeries) -> BiSeries {
        let mut out = self.coeffs.clone();
        for (&m, c) in &other.coeffs {
            let e = out.entry(m).or_insert_with(|| QSeries::zero(self.q_order));
            *e = e.add(c);
        }
        Self::from_coeffs(out, self.x_order.min(other.x_order), self.q_order.min(other.q_order))
    }

    pub fn neg(&self) -> BiSeries {
        Self {
            coeffs: self.coeffs.iter().map(|(&m, c)| (m, c.neg())).collect(),
            x_order: self.x_order,
            q_order: self.q_order,
        }
    }

    pub fn sub(&self, other: &BiSeries) -> BiSeries {
        self.add(&other.neg())
    }

    pub fn mul_qseries(&self, s: &QSeries) -> BiSeries {
        self.mul(&BiSeries::from_qseries(s, self.x_order))
    }

    pub fn scalar_mul(&self, c: &Rational) -> BiSeries {
        Self::from_coeffs(
            self.coeffs.iter().map(|(&m, s)| (m, s.scalar_mul(c))).collect(),
            self.x_order,
            self.q_order,
        )
    }

    pub fn mul(&self, other: &BiSeries) -> BiSeries {
        let x_order = self.x_order.min(other.x_order);
        // An absent coefficient is only known to vanish up to the q-order.
        let q_order = (self.q_order + other.valuation()).min(other.q_order + self.valuation());
        let mut out: BTreeMap<i64, QSeries> = BTreeMap::new();
        for (&i, a) in &self.coeffs {
            for (&j, b) in &other.coeffs {
                if i + j > x_order {
                    break;
                }
                let p = a.mul(b).truncate(q_order);
                let e = out.entry(i + j).or_insert_with(|| QSeries::zero(q_order));
                *e = e.add(&p);
            }
        }
        Self::from_coeffs(out, x_order, q_order)
    }

    /// Inverse as a power series in `x`; the `x^0` coefficient must be invertible.
    pub fn invert(&self) -> Result<BiSeries> {
        let a0 = self.coeff(0);
        if a0.is_zero() {
            return Err(Error::NotInvertible("constant x-coefficient vanishes".into()));
        }
        let b0 = a0.invert()?;
        let mut b: Vec<QSeries> = vec![b0.clone()];
        for m in 1..=self.x_order {
            let mut s = QSeries::zero(b0.order());
            for k in 1..=m {
                if let Some(ak) = self.coeffs.get(&k) {
                    s = s.add(&ak.mul(&b[(m - k) as usize]));
                }
            }
            b.push(s.mul(&b0).neg());
        }
        let q_order = b.iter().map(|c| c.order()).fold(b0.order(), Exponent::min);
        Ok(Self::from_coeffs(b.into_iter().enumerate().map(|(m, c)| (m as i64, c)).collect(), self.x_order, q_order))
    }

    pub fn div(&self, other: &BiSeries) -> Result<BiSeries> {
        Ok(self.mul(&other.invert()?))
    }

    pub fn pow(&self, n: i64) -> Result<BiSeries> {
        let base = if n < 0 { self.invert()? } else { self.clone() };
        let mut acc = BiSeries::from_qseries(&QSeries::one(self.q_order), self.x_order);
        for _ in 0..n.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    /// `x -> m * x`: the coefficient of `x^k` is multiplied by `m^k`.
    pub fn rescale_x(&self, m: &Monomial) -> Result<BiSeries> {
        let mut out = BTreeMap::new();
        for (&k, c) in &self.coeffs {
            out.insert(k, c.mul_monomial(&m.pow(k)?));
        }
        let shift = if m.exp < Exponent::zero() { m.exp * exp_int(self.x_order) } else { Exponent::zero() };
        Ok(Self::from_coeffs(out, self.x_order, self.q_order + shift))
    }

    /// `q -> q^m` in every coefficient.
    pub fn substitute_power(&self, m: Exponent) -> Result<BiSeries> {
        let mut out = BTreeMap::new();
        for (&k, c) in &self.coeffs {
            out.insert(k, c.substitute_power(m)?);
        }
        Ok(Self::from_coeffs(out, self.x_order, self.q_order * m))
    }

    pub fn substitute_signed(&self) -> Result<BiSeries> {
        let mut out = BTreeMap::new();
        for (&k, c) in &self.coeffs {
            out.insert(k, c.substitute_signed()?);
        }
        Ok(Self::from_coeffs(out, self.x_order, self.q_order))
    }

    /// Compare all coefficients of `x^m q^e` with `m <= x_order`, `e <= q_order`.
    pub fn equal_up_to(&self, other: &BiSeries, x_order: i64, q_order: Exponent) -> Result<Option<BiDiscrepancy>> {
        for s in [self, other] {
            if s.x_order < x_order {
                return Err(Error::InvalidArgument(format!(
                    "x-order {} is below the requested {x_order}",
                    s.x_order
                )));
            }
        }
        for m in 0..=x_order {
            let (a, b) = (self.coeff(m), other.coeff(m));
            if let Some(d) = a.equal_up_to(&b, q_order)? {
                return Ok(Some(BiDiscrepancy { x_power: m, q: d }));
            }
        }
        Ok(None)
    }
}

impl fmt::Display for BiSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (m, c) in &self.coeffs {
            if c.is_zero() {
                continue;
            }
            if !first {
                writeln!(f)?;
            }
            first = false;
            write!(f, "x^{m}: {c}")?;
        }
        if first {
            write!(f, "0")?;
        }
        let tail = self.coeffs.values().map(QSeries::tail_exponent).min().unwrap_or(self.q_order + exp_int(1));
        write!(f, "\n+ O(x^{}) + O(q^({}))", self.x_order + 1, fmt_exponent(tail))
    }
}

impl Serialize for BiSeries {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            x_order: i64,
            q_order: String,
            coefficients: Vec<(i64, &'a QSeries)>,
        }
        Repr {
            x_order: self.x_order,
            q_order: fmt_exponent(self.q_order),
            coefficients: self.coeffs.iter().filter(|(_, c)| !c.is_zero()).map(|(&m, c)| (m, c)).collect(),
        }
        .serialize(s)
    }
}
