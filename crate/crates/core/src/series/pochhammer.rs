//! q-Pochhammer symbols as truncated series.
//!
//! `(a; Q)_n = (1 - a)(1 - aQ)...(1 - aQ^(n-1))` and `(a; Q)_inf` the infinite
//! product, where `a` and `Q` are signed monomials.

use num_traits::{One, Zero};

use super::monomial::Monomial;
use super::qseries::QSeries;
use super::rational::{exp_int, floor_key, lcm, rat_pow, Exponent, Rational};
use crate::error::{Error, Result};

/// `prod (1 - c_i q^(e_i))` truncated at `order`.
pub fn binomial_product(factors: &[(Rational, Exponent)], order: Exponent) -> QSeries {
    let factors: Vec<&(Rational, Exponent)> = factors.iter().filter(|(c, _)| !c.is_zero()).collect();
    let scale = factors.iter().fold(*order.denom(), |l, (_, e)| lcm(l, *e.denom()));
    let negsum: Exponent = factors.iter().map(|(_, e)| (*e).min(Exponent::zero())).sum();
    let lo = floor_key(negsum, scale);
    let hi = floor_key(order - negsum, scale);
    if hi < 0 {
        return QSeries::zero(order);
    }
    let lo = lo.min(0);
    let width = (hi - lo + 1) as usize;
    let mut a = vec![Rational::zero(); width];
    a[(-lo) as usize] = Rational::one();
    for (c, e) in factors {
        let k = (e * exp_int(scale)).to_integer();
        if k > 0 {
            let k = k as usize;
            for i in (k..width).rev() {
                if !a[i - k].is_zero() {
                    let t = c * &a[i - k];
                    a[i] -= t;
                }
            }
        } else if k < 0 {
            let k = (-k) as usize;
            for i in 0..width.saturating_sub(k) {
                if !a[i + k].is_zero() {
                    let t = c * &a[i + k];
                    a[i] -= t;
                }
            }
        } else {
            let f = Rational::one() - c;
            for v in a.iter_mut() {
                if !v.is_zero() {
                    *v *= &f;
                }
            }
        }
    }
    QSeries::from_dense(scale, lo, a, order)
}

fn factor(base: &Monomial, nome: &Monomial, k: i64) -> Result<(Rational, Exponent)> {
    Ok((&base.coeff * rat_pow(&nome.coeff, k)?, base.exp + nome.exp * exp_int(k)))
}

/// `(base; nome)_n`.
pub fn pochhammer_finite(base: &Monomial, nome: &Monomial, n: usize, order: Exponent) -> Result<QSeries> {
    let factors = (0..n as i64).map(|k| factor(base, nome, k)).collect::<Result<Vec<_>>>()?;
    Ok(binomial_product(&factors, order))
}

/// `(base; nome)_inf`; the nome must carry a positive power of `q`.
pub fn pochhammer_infinite(base: &Monomial, nome: &Monomial, order: Exponent) -> Result<QSeries> {
    if nome.exp <= Exponent::zero() {
        return Err(Error::Divergent(format!("infinite product with nome {nome} does not converge q-adically")));
    }
    // Factors with a negative exponent lower the valuation, so later factors
    // must be kept until they clear `order - negsum`.
    let mut negsum = Exponent::zero();
    let mut k = 0i64;
    while base.exp + nome.exp * exp_int(k) < Exponent::zero() {
        negsum += base.exp + nome.exp * exp_int(k);
        k += 1;
    }
    let mut factors = Vec::new();
    let mut k = 0i64;
    loop {
        let (c, e) = factor(base, nome, k)?;
        if e > order - negsum {
            break;
        }
        factors.push((c, e));
        k += 1;
    }
    Ok(binomial_product(&factors, order))
}

/// `(base; nome)_n` with `n = None` meaning the infinite product, raised to an
/// integer power. Orders are raised internally so the result is valid to `order`.
pub fn pochhammer_power(
    base: &Monomial,
    nome: &Monomial,
    len: Option<usize>,
    power: i64,
    order: Exponent,
) -> Result<QSeries> {
    if power == 0 {
        return Ok(QSeries::one(order));
    }
    let build = |o: Exponent| match len {
        Some(n) => pochhammer_finite(base, nome, n, o),
        None => pochhammer_infinite(base, nome, o),
    };
    // The valuation is at most 0, so probing at a non-negative order finds it.
    let probe_order = order.max(Exponent::zero());
    let probe = build(probe_order)?;
    let v = probe.valuation();
    let base_order = if power > 0 {
        order - v * exp_int(power - 1)
    } else {
        order.max(order + v * exp_int(2))
    };
    let p = if base_order <= probe_order { probe } else { build(base_order)? };
    if p.is_zero() && power < 0 {
        return Err(Error::ZeroDenominator(format!(
            "({base}; {nome})_{} vanishes",
            len.map(|n| n.to_string()).unwrap_or_else(|| "inf".into())
        )));
    }
    Ok(p.pow(power)?.truncate(order))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::rational::{exp, rat_int};

    fn ints(s: &QSeries) -> Vec<(i64, i64)> {
        s.terms()
            .map(|(e, c)| (e.to_integer(), c.to_integer().try_into().unwrap()))
            .collect()
    }

    #[test]
    fn finite_euler_product() {
        let s = pochhammer_finite(&Monomial::qi(1), &Monomial::qi(1), 3, exp_int(20)).unwrap();
        assert_eq!(ints(&s), vec![(0, 1), (1, -1), (2, -1), (4, 1), (5, 1), (6, -1)]);
    }

    #[test]
    fn infinite_euler_product() {
        let s = pochhammer_infinite(&Monomial::qi(1), &Monomial::qi(1), exp_int(7)).unwrap();
        assert_eq!(ints(&s), vec![(0, 1), (1, -1), (2, -1), (5, 1), (7, 1)]);
    }

    #[test]
    fn inverse_odd_parts() {
        let s = pochhammer_power(&Monomial::qi(1), &Monomial::qi(2), None, -1, exp_int(6)).unwrap();
        assert_eq!(ints(&s), vec![(0, 1), (1, 1), (2, 1), (3, 2), (4, 2), (5, 3), (6, 4)]);
    }

    #[test]
    fn negative_exponent_base_is_exact() {
        // (q^-1; q)_3 = (1 - q^-1)(1 - 1)(1 - q) = 0
        let s = pochhammer_finite(&Monomial::qi(-1), &Monomial::qi(1), 3, exp_int(5)).unwrap();
        assert!(s.is_zero());
        // (q^-2; q^3)_inf = (1 - q^-2)(1 - q)(1 - q^4)...
        let s = pochhammer_infinite(&Monomial::qi(-2), &Monomial::qi(3), exp_int(3)).unwrap();
        let direct = binomial_product(
            &[(rat_int(1), exp_int(-2)), (rat_int(1), exp_int(1)), (rat_int(1), exp_int(4)), (rat_int(1), exp_int(7))],
            exp_int(3),
        );
        assert_eq!(s, direct);
        assert_eq!(s.coeff(exp_int(2)), rat_int(1));
    }

    #[test]
    fn half_integer_base() {
        // (-q^(1/2); q)_inf = 1 + q^(1/2) + q^(3/2) + q^2 + ...
        let s = pochhammer_infinite(&Monomial::neg_q(exp(1, 2)), &Monomial::qi(1), exp_int(2)).unwrap();
        assert_eq!(s.coeff(exp(1, 2)), rat_int(1));
        assert_eq!(s.coeff(exp_int(1)), rat_int(0));
        assert_eq!(s.coeff(exp(3, 2)), rat_int(1));
        assert_eq!(s.coeff(exp_int(2)), rat_int(1));
    }

    #[test]
    fn divergent_nome_rejected() {
        assert!(matches!(
            pochhammer_infinite(&Monomial::qi(1), &Monomial::qi(0), exp_int(3)),
            Err(Error::Divergent(_))
        ));
    }
}
