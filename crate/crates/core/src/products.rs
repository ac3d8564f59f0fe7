//! Infinite and finite q-products, theta-type sums and the prefactor that
//! turns an eta quotient into a modular object.
//!
//! Notation: `J_m = (q^m; q^m)_inf` and `J_{a,m} = (q^a, q^(m-a), q^m; q^m)_inf`.
//! The Jacobi triple product reads
//! `(Q, z, Q/z; Q)_inf = sum_n (-1)^n Q^(n(n-1)/2) z^n`.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::rational::{exp, exp_int, rat_pow, sign_pow, Exponent, Rational};
use crate::series::{pochhammer_power, Monomial, QSeries};

/// `(base; nome)_len ^ power`, with `len = None` for the infinite product.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProductFactor {
    pub base: Monomial,
    pub nome: Monomial,
    pub power: i64,
    pub len: Option<usize>,
}

impl ProductFactor {
    pub fn infinite(base: Monomial, nome: Monomial, power: i64) -> Self {
        Self { base, nome, power, len: None }
    }

    pub fn finite(base: Monomial, nome: Monomial, len: usize, power: i64) -> Self {
        Self { base, nome, power, len: Some(len) }
    }

    pub fn eval(&self, order: Exponent) -> Result<QSeries> {
        pochhammer_power(&self.base, &self.nome, self.len, self.power, order)
    }
}

/// A monomial prefactor times a product of Pochhammer powers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductExpr {
    pub prefactor: Monomial,
    pub factors: Vec<ProductFactor>,
}

impl ProductExpr {
    pub fn new(prefactor: Monomial, factors: Vec<ProductFactor>) -> Self {
        Self { prefactor, factors }
    }

    /// `J_m ^ power`
    pub fn j(m: i64, power: i64) -> Self {
        Self::new(Monomial::one(), vec![j_factor(m, power)])
    }

    pub fn times(mut self, other: ProductExpr) -> Self {
        self.prefactor = self.prefactor.mul(&other.prefactor);
        self.factors.extend(other.factors);
        self
    }
}

/// `(q^m; q^m)_inf ^ power`
pub fn j_factor(m: i64, power: i64) -> ProductFactor {
    ProductFactor::infinite(Monomial::qi(m), Monomial::qi(m), power)
}

/// The three factors of `J_{a,m} ^ power`.
pub fn jam_factors(a: i64, m: i64, power: i64) -> Vec<ProductFactor> {
    vec![
        ProductFactor::infinite(Monomial::qi(a), Monomial::qi(m), power),
        ProductFactor::infinite(Monomial::qi(m - a), Monomial::qi(m), power),
        ProductFactor::infinite(Monomial::qi(m), Monomial::qi(m), power),
    ]
}

/// Expand a product to order `order`.
pub fn eval_product(e: &ProductExpr, order: Exponent) -> Result<QSeries> {
    if e.prefactor.is_zero() {
        return Ok(QSeries::zero(order));
    }
    let target = order - e.prefactor.exp;
    let mut series: Vec<QSeries> = e.factors.iter().map(|f| f.eval(target)).collect::<Result<_>>()?;
    let negs: Vec<Exponent> = series.iter().map(|s| s.valuation().min(Exponent::zero())).collect();
    let total: Exponent = negs.iter().copied().sum();
    if total < Exponent::zero() {
        for (i, f) in e.factors.iter().enumerate() {
            let need = target - (total - negs[i]);
            if need > series[i].order() {
                series[i] = f.eval(need)?;
            }
        }
    }
    let mut acc = QSeries::one(target);
    for s in &series {
        acc = acc.mul(s);
    }
    Ok(acc.mul_monomial(&e.prefactor).truncate(order))
}

/// Integers `n` in `[lo, hi]` with `a n^2 + b n + c <= bound`, for `a > 0`.
/// Float roots give a first guess which is then corrected exactly.
pub fn quadratic_range(a: Exponent, b: Exponent, c: Exponent, bound: Exponent) -> Option<(i64, i64)> {
    assert!(a > Exponent::zero());
    let f = |n: i64| a * exp_int(n * n) + b * exp_int(n) + c;
    let fa = *a.numer() as f64 / *a.denom() as f64;
    let fb = *b.numer() as f64 / *b.denom() as f64;
    let fc = (*c.numer() as f64 / *c.denom() as f64) - (*bound.numer() as f64 / *bound.denom() as f64);
    let vertex = -fb / (2.0 * fa);
    let disc = fb * fb - 4.0 * fa * fc;
    let v = vertex.round() as i64;
    // The minimum over the integers is at floor or ceil of the vertex.
    let vmin = [vertex.floor() as i64, vertex.ceil() as i64, v]
        .into_iter()
        .min_by_key(|&n| f(n))
        .unwrap();
    if f(vmin) > bound {
        return None;
    }
    let r = if disc > 0.0 { disc.sqrt() / (2.0 * fa) } else { 0.0 };
    let mut lo = ((vertex - r).floor() as i64).min(vmin);
    let mut hi = ((vertex + r).ceil() as i64).max(vmin);
    while f(lo) <= bound {
        lo -= 1;
    }
    while lo < vmin && f(lo + 1) > bound {
        lo += 1;
    }
    while f(hi) <= bound {
        hi += 1;
    }
    while hi > vmin && f(hi - 1) > bound {
        hi -= 1;
    }
    Some((lo + 1, hi - 1))
}

/// `sum_n (-1)^n nome^(n(n-1)/2) z^n`, the series side of the triple product.
pub fn jacobi_triple_sum(z: &Monomial, nome: &Monomial, order: Exponent) -> Result<QSeries> {
    if nome.exp <= Exponent::zero() {
        return Err(Error::Divergent(format!("theta sum with nome {nome} diverges")));
    }
    let half = exp(1, 2);
    let a = nome.exp * half;
    let b = z.exp - nome.exp * half;
    let mut terms = Vec::new();
    if let Some((lo, hi)) = quadratic_range(a, b, Exponent::zero(), order) {
        for n in lo..=hi {
            let tri = n * (n - 1) / 2;
            let c = sign_pow(n) * rat_pow(&nome.coeff, tri)? * rat_pow(&z.coeff, n)?;
            terms.push((a * exp_int(n * n) + b * exp_int(n), c));
        }
    }
    Ok(QSeries::from_terms(terms, order))
}

/// Which of the two partial theta functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ThetaKind {
    /// `h_{j,m} = sum_k q^(m (k + j/(2m))^2)`
    H,
    /// `g_{j,m} = sum_k (-1)^k q^(m (k + j/(2m))^2)`
    G,
}

/// `h_{j,m}` or `g_{j,m}` for rational `j` and `m > 0`.
pub fn theta_series(kind: ThetaKind, j: Exponent, m: Exponent, order: Exponent) -> Result<QSeries> {
    if m <= Exponent::zero() {
        return Err(Error::Divergent(format!("theta series needs m > 0, got {m}")));
    }
    let sum = TSum {
        a: m,
        b: j,
        c: j * j / (exp_int(4) * m),
        w1: Rational::zero(),
        w0: Rational::one(),
        alternating: kind == ThetaKind::G,
        bilateral: true,
    };
    sum.eval(order)
}

/// `sum_n s^n (w1 n + w0) q^(a n^2 + b n + c)` over `n` in `Z` (bilateral) or
/// `n >= 0`, where `s = -1` when alternating.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TSum {
    pub a: Exponent,
    pub b: Exponent,
    pub c: Exponent,
    pub w1: Rational,
    pub w0: Rational,
    pub alternating: bool,
    pub bilateral: bool,
}

impl TSum {
    pub fn eval(&self, order: Exponent) -> Result<QSeries> {
        let f = |n: i64| self.a * exp_int(n * n) + self.b * exp_int(n) + self.c;
        let range = if self.a > Exponent::zero() {
            quadratic_range(self.a, self.b, self.c, order).map(|(lo, hi)| (if self.bilateral { lo } else { lo.max(0) }, hi))
        } else if self.a.is_zero() && !self.bilateral && self.b > Exponent::zero() {
            let hi = ((order - self.c) / self.b).floor().to_integer();
            Some((0, hi))
        } else {
            return Err(Error::Divergent("quadratic sum does not converge q-adically".into()));
        };
        let mut terms = Vec::new();
        if let Some((lo, hi)) = range {
            for n in lo..=hi {
                let w = &self.w1 * Rational::from_integer(n.into()) + &self.w0;
                let w = if self.alternating { w * sign_pow(n) } else { w };
                if !w.is_zero() {
                    terms.push((f(n), w));
                }
            }
        }
        Ok(QSeries::from_terms(terms, order))
    }
}

/// `phi(q) = sum_{n in Z} q^(n^2)`
pub fn phi(order: Exponent) -> QSeries {
    theta_series(ThetaKind::H, Exponent::zero(), Exponent::one(), order).expect("m > 0")
}

/// `psi(q) = sum_{n >= 0} q^(n(n+1)/2)`
pub fn psi(order: Exponent) -> QSeries {
    TSum {
        a: exp(1, 2),
        b: exp(1, 2),
        c: Exponent::zero(),
        w1: Rational::zero(),
        w0: Rational::one(),
        alternating: false,
        bilateral: false,
    }
    .eval(order)
    .expect("convergent")
}

/// `sum_{n >= 0} (-1)^n (2n + 1) q^(n(n+1)/2)`, which equals `J_1^3`.
pub fn jacobi_cube_sum(order: Exponent) -> QSeries {
    TSum {
        a: exp(1, 2),
        b: exp(1, 2),
        c: Exponent::zero(),
        w1: Rational::from_integer(2.into()),
        w0: Rational::one(),
        alternating: true,
        bilateral: false,
    }
    .eval(order)
    .expect("convergent")
}

/// Second periodic Bernoulli polynomial `{t}^2 - {t} + 1/6`.
pub fn p2(t: Exponent) -> Exponent {
    let f = t - t.floor();
    f * f - f + exp(1, 6)
}

/// Exponent `c` such that `q^c * e` is an eta quotient.
///
/// Factors are normalised to `(q^a; q^m)_inf` with `0 < a <= m`: negative nomes
/// split by parity, and `(-q^a; q^m)_inf = (q^(2a); q^(2m))_inf / (q^a; q^m)_inf`.
/// Then `J_m` contributes `m/24` per power, a matched pair
/// `(q^a, q^(m-a); q^m)_inf` contributes `(m/2) P2(a/m)` and a lone
/// `(q^(m/2); q^m)_inf` contributes `(m/4) P2(1/2)`.
pub fn prefactor_exponent(e: &ProductExpr) -> Result<Exponent> {
    let mut powers: BTreeMap<(Exponent, Exponent), i64> = BTreeMap::new();
    let mut stack: Vec<(Monomial, Monomial, i64)> = Vec::new();
    for f in &e.factors {
        if let Some(len) = f.len {
            return Err(Error::Unsupported(format!("finite product ({}; {})_{len} in an eta quotient", f.base, f.nome)));
        }
        stack.push((f.base.clone(), f.nome.clone(), f.power));
    }
    let unit = |c: &Rational| c.abs().is_one();
    while let Some((base, nome, power)) = stack.pop() {
        if power == 0 {
            continue;
        }
        if !unit(&base.coeff) || !unit(&nome.coeff) || base.exp <= Exponent::zero() || nome.exp <= Exponent::zero() {
            return Err(Error::Unsupported(format!("factor ({base}; {nome})_inf is not of eta type")));
        }
        if nome.coeff.is_negative() {
            let sq = Monomial::q(nome.exp * exp_int(2));
            stack.push((base.clone(), sq.clone(), power));
            stack.push((base.mul(&nome), sq, power));
            continue;
        }
        if base.coeff.is_negative() {
            stack.push((Monomial::q(base.exp * exp_int(2)), Monomial::q(nome.exp * exp_int(2)), power));
            stack.push((Monomial::q(base.exp), nome, -power));
            continue;
        }
        let (a, m) = (base.exp, nome.exp);
        if a > m {
            return Err(Error::Unsupported(format!("factor (q^{a}; q^{m})_inf has base beyond its nome")));
        }
        *powers.entry((a, m)).or_insert(0) += power;
    }
    let mut c = Exponent::zero();
    let half = exp(1, 2);
    for (&(a, m), &p) in &powers {
        if p == 0 {
            continue;
        }
        let pe = exp_int(p);
        if a == m {
            c += pe * m / exp_int(24);
        } else if a == m * half {
            c += pe * m / exp_int(4) * p2(half);
        } else if a < m * half {
            let partner = powers.get(&(m - a, m)).copied().unwrap_or(0);
            if partner != p {
                return Err(Error::Unsupported(format!(
                    "(q^{a}; q^{m})_inf^{p} is not matched by (q^{}; q^{m})_inf^{p}",
                    m - a
                )));
            }
            c += pe * m * half * p2(a / m);
        } else {
            let partner = powers.get(&(m - a, m)).copied().unwrap_or(0);
            if partner != p {
                return Err(Error::Unsupported(format!(
                    "(q^{a}; q^{m})_inf^{p} is not matched by (q^{}; q^{m})_inf^{p}",
                    m - a
                )));
            }
        }
    }
    Ok(c - e.prefactor.exp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::rational::rat_int;
    use crate::series::pochhammer_infinite;

    fn n(k: i64) -> Exponent {
        exp_int(k)
    }

    #[test]
    fn triple_sum_range_and_product() {
        let s = jacobi_triple_sum(&Monomial::qi(1), &Monomial::qi(1), n(10)).unwrap();
        // (q, q, 1; q)_inf vanishes, so every coefficient cancels.
        assert!(s.is_zero());
        let (lo, hi) = quadratic_range(exp(1, 2), exp(1, 2), n(0), n(10)).unwrap();
        assert_eq!((lo, hi), (-5, 4));
    }

    #[test]
    fn triple_product_identity() {
        let o = n(40);
        let nome = Monomial::qi(3);
        let z = Monomial::neg_q(exp_int(1));
        let lhs = jacobi_triple_sum(&z, &nome, o).unwrap();
        let e = ProductExpr::new(
            Monomial::one(),
            vec![
                ProductFactor::infinite(nome.clone(), nome.clone(), 1),
                ProductFactor::infinite(z.clone(), nome.clone(), 1),
                ProductFactor::infinite(Monomial::neg_q(exp_int(2)), nome.clone(), 1),
            ],
        );
        let rhs = eval_product(&e, o).unwrap();
        assert_eq!(lhs.equal_up_to(&rhs, o).unwrap(), None);
    }

    #[test]
    fn theta_specials() {
        let o = n(60);
        let two = Monomial::qi(2);
        // phi = (-q; q^2)^2 (q^2; q^2)
        let e = ProductExpr::new(
            Monomial::one(),
            vec![ProductFactor::infinite(Monomial::neg_q(n(1)), two.clone(), 2), j_factor(2, 1)],
        );
        assert_eq!(phi(o).equal_up_to(&eval_product(&e, o).unwrap(), o).unwrap(), None);
        let psi_prod = eval_product(&ProductExpr::new(Monomial::one(), vec![j_factor(2, 2), j_factor(1, -1)]), o).unwrap();
        assert_eq!(psi(o).equal_up_to(&psi_prod, o).unwrap(), None);
        let cube = eval_product(&ProductExpr::j(1, 3), o).unwrap();
        assert_eq!(jacobi_cube_sum(o).equal_up_to(&cube, o).unwrap(), None);
    }

    #[test]
    fn theta_h_small() {
        // h_{1,1} = sum q^((k + 1/2)^2) = 2 q^(1/4) + 2 q^(9/4) + ...
        let s = theta_series(ThetaKind::H, n(1), n(1), n(7)).unwrap();
        assert_eq!(s.coeff(exp(1, 4)), rat_int(2));
        assert_eq!(s.coeff(exp(9, 4)), rat_int(2));
        assert_eq!(s.coeff(exp(25, 4)), rat_int(2));
        assert_eq!(s.len(), 3);
    }

    #[test]
    fn eta_prefactors() {
        assert_eq!(prefactor_exponent(&ProductExpr::j(1, 1)).unwrap(), exp(1, 24));
        let e = ProductExpr::j(2, 1).times(ProductExpr::j(1, -1));
        assert_eq!(prefactor_exponent(&e).unwrap(), exp(1, 24));
        // (q^(1/2); q)_inf carries q^(-1/48).
        let f1 = ProductExpr::new(Monomial::one(), vec![ProductFactor::infinite(Monomial::q(exp(1, 2)), Monomial::qi(1), 1)]);
        assert_eq!(prefactor_exponent(&f1).unwrap(), exp(-1, 48));
        let lone = ProductExpr::new(Monomial::one(), vec![ProductFactor::infinite(Monomial::qi(1), Monomial::qi(4), 1)]);
        assert!(prefactor_exponent(&lone).is_err());
        // J_{a,m} = m P2(a/m)/2 + m/24
        let jam = ProductExpr::new(Monomial::one(), jam_factors(2, 7, 1));
        assert_eq!(prefactor_exponent(&jam).unwrap(), exp(7, 2) * p2(exp(2, 7)) + exp(7, 24));
    }

    #[test]
    fn p2_values() {
        assert_eq!(p2(n(0)), exp(1, 6));
        assert_eq!(p2(exp(1, 2)), exp(-1, 12));
        assert_eq!(p2(exp(5, 4)), p2(exp(1, 4)));
    }

    #[test]
    fn negative_nome_split_matches_series() {
        let o = n(30);
        let base = Monomial::neg_q(n(1));
        let nome = Monomial::neg_q(n(11));
        let direct = pochhammer_infinite(&base, &nome, o).unwrap();
        let sq = Monomial::qi(22);
        let split = pochhammer_infinite(&base, &sq, o).unwrap().mul(&pochhammer_infinite(&base.mul(&nome), &sq, o).unwrap());
        assert_eq!(direct.equal_up_to(&split, o).unwrap(), None);
    }
}
