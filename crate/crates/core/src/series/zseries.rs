//! Laurent polynomials in an auxiliary variable `z` with q-series coefficients,
//! kept on an explicit window `[z_min, z_max]`. Used for constant-term
//! extraction.

use std::collections::BTreeMap;

use super::qseries::QSeries;
use super::rational::Exponent;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZSeries {
    coeffs: BTreeMap<i64, QSeries>,
    z_min: i64,
    z_max: i64,
    q_order: Exponent,
}

impl ZSeries {
    pub fn new(coeffs: BTreeMap<i64, QSeries>, z_min: i64, z_max: i64, q_order: Exponent) -> Result<Self> {
        if z_min > z_max {
            return Err(Error::InvalidArgument(format!("empty z-window [{z_min}, {z_max}]")));
        }
        let q_order = coeffs.values().map(|c| c.order()).fold(q_order, Exponent::min);
        let coeffs = coeffs
            .into_iter()
            .filter(|(m, _)| (z_min..=z_max).contains(m))
            .map(|(m, c)| (m, c.truncate(q_order)))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        Ok(Self { coeffs, z_min, z_max, q_order })
    }

    pub fn z_min(&self) -> i64 {
        self.z_min
    }

    pub fn z_max(&self) -> i64 {
        self.z_max
    }

    pub fn q_order(&self) -> Exponent {
        self.q_order
    }

    pub fn coeff(&self, m: i64) -> QSeries {
        self.coeffs.get(&m).cloned().unwrap_or_else(|| QSeries::zero(self.q_order))
    }

    /// Product restricted to the window `[lo, hi]`. Only terms whose z-powers are
    /// both inside their factor windows contribute; the caller is responsible
    /// for choosing windows wide enough.
    pub fn mul_window(&self, other: &ZSeries, lo: i64, hi: i64) -> Result<ZSeries> {
        let q_order = self.q_order.min(other.q_order);
        let mut out: BTreeMap<i64, QSeries> = BTreeMap::new();
        for (&i, a) in &self.coeffs {
            for (&j, b) in &other.coeffs {
                let m = i + j;
                if m < lo || m > hi {
                    continue;
                }
                let p = a.mul(b);
                let e = out.entry(m).or_insert_with(|| QSeries::zero(q_order));
                *e = e.add(&p);
            }
        }
        let q_order = out.values().map(|c| c.order()).fold(q_order, Exponent::min);
        ZSeries::new(out, lo, hi, q_order)
    }

    /// Coefficient of `z^0`.
    pub fn ct_extract(&self) -> Result<QSeries> {
        if self.z_min > 0 || self.z_max < 0 {
            return Err(Error::InvalidArgument(format!(
                "z-window [{}, {}] does not contain 0",
                self.z_min, self.z_max
            )));
        }
        Ok(self.coeff(0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::rational::{exp_int, rat_int};
    use crate::series::Monomial;

    #[test]
    fn constant_term_of_product() {
        // (z + 1/z)^2 has constant term 2.
        let o = exp_int(5);
        let c = |v| QSeries::constant(rat_int(v), o);
        let a = ZSeries::new(BTreeMap::from([(-1, c(1)), (1, c(1))]), -1, 1, o).unwrap();
        let p = a.mul_window(&a, -2, 2).unwrap();
        assert_eq!(p.ct_extract().unwrap(), c(2));
        let shifted = ZSeries::new(BTreeMap::from([(1, QSeries::monomial(&Monomial::qi(1), o))]), 1, 1, o).unwrap();
        assert!(shifted.ct_extract().is_err());
    }
}
