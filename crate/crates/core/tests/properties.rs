//! Algebraic invariants checked on random inputs: series ring laws,
//! inversion, substitutions, Pochhammer recurrences, the q-binomial theorem,
//! the triple product, theta periodicity and Nahm sum symmetries.

use proptest::prelude::*;
use qnahm::nahm::{nahm_sum, Decoration, NahmQuadruple, Parity};
use qnahm::products::{jacobi_triple_sum, theta_series, ThetaKind};
use qnahm::series::{exp, exp_int, pochhammer_finite, pochhammer_infinite, rat, rat_int};
use qnahm::{Exponent, Monomial, QSeries, Rational};

fn assert_eq_to(a: &QSeries, b: &QSeries, n: Exponent) -> std::result::Result<(), TestCaseError> {
    match a.equal_up_to(b, n) {
        Ok(None) => Ok(()),
        Ok(Some(d)) => Err(TestCaseError::fail(format!("differ at q^{}: {} vs {}", d.exponent, d.lhs, d.rhs))),
        Err(e) => Err(TestCaseError::fail(e.to_string())),
    }
}

fn coeff() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=3).prop_map(|(n, d)| rat(n, d))
}

/// Series on the lattice `(1/den) Z`, exponents in `[0, 12]`, valid to `q^12`.
fn series(den: i64) -> impl Strategy<Value = QSeries> {
    prop::collection::vec((0..=12 * den, coeff()), 0..8)
        .prop_map(move |ts| QSeries::from_terms(ts.into_iter().map(|(k, c)| (exp(k, den), c)), exp_int(12)))
}

fn unit_series() -> impl Strategy<Value = QSeries> {
    (series(2), coeff().prop_filter("nonzero", |c| *c != rat_int(0))).prop_map(|(s, c)| {
        let head = QSeries::constant(c - s.coeff(exp_int(0)), exp_int(12));
        s.add(&head)
    })
}

fn signed_q(e: Exponent) -> impl Strategy<Value = Monomial> {
    prop_oneof![Just(rat_int(1)), Just(rat_int(-1)), Just(rat_int(2)), Just(rat(1, 2))]
        .prop_map(move |c| Monomial::new(c, e))
}

/// Positive definite integer forms of rank 1 or 2 with small linear terms.
fn quadruple() -> impl Strategy<Value = NahmQuadruple> {
    prop_oneof![
        (1i64..=4, -2i64..=2).prop_map(|(a, b)| {
            NahmQuadruple::new(vec![vec![exp_int(a)]], vec![exp(b, 2)], exp_int(0), vec![1]).unwrap()
        }),
        (1i64..=4, 1i64..=4, -3i64..=3, -2i64..=2, -2i64..=2)
            .prop_filter("positive definite", |&(a, c, m, _, _)| m * m < a * c)
            .prop_map(|(a, c, m, b0, b1)| {
                let a = vec![vec![exp_int(a), exp_int(m)], vec![exp_int(m), exp_int(c)]];
                NahmQuadruple::new(a, vec![exp(b0, 2), exp(b1, 2)], exp_int(0), vec![1, 1]).unwrap()
            }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn addition_is_commutative_with_inverse(a in series(2), b in series(3)) {
        let n = exp_int(12);
        assert_eq_to(&a.add(&b), &b.add(&a), n)?;
        prop_assert!(a.sub(&a).is_zero());
        assert_eq_to(&a.add(&b).sub(&b), &a, n)?;
    }

    #[test]
    fn multiplication_is_associative_and_distributes(a in series(2), b in series(2), c in series(3)) {
        let n = exp_int(12);
        assert_eq_to(&a.mul(&b).mul(&c), &a.mul(&b.mul(&c)), n)?;
        assert_eq_to(&a.mul(&b), &b.mul(&a), n)?;
        assert_eq_to(&a.mul(&b.add(&c)), &a.mul(&b).add(&a.mul(&c)), n)?;
        assert_eq_to(&a.mul(&QSeries::one(n)), &a, n)?;
    }

    #[test]
    fn inverse_of_a_unit(s in unit_series()) {
        let n = exp_int(12);
        let inv = s.invert().unwrap();
        assert_eq_to(&s.mul(&inv), &QSeries::one(n), n)?;
        assert_eq_to(&inv.invert().unwrap(), &s, n)?;
    }

    #[test]
    fn power_substitutions_compose(s in series(2), m1 in 1i64..=3, d1 in 1i64..=2, m2 in 1i64..=3) {
        let (m1, m2) = (exp(m1, d1), exp_int(m2));
        let lhs = s.substitute_power(m1).unwrap().substitute_power(m2).unwrap();
        let rhs = s.substitute_power(m1 * m2).unwrap();
        assert_eq_to(&lhs, &rhs, exp_int(12) * m1 * m2)?;
    }

    #[test]
    fn sign_substitution_is_an_involution_and_a_ring_map(a in series(1), b in series(1)) {
        let n = exp_int(12);
        let twice = a.substitute_signed().unwrap().substitute_signed().unwrap();
        assert_eq_to(&twice, &a, n)?;
        let lhs = a.mul(&b).substitute_signed().unwrap();
        let rhs = a.substitute_signed().unwrap().mul(&b.substitute_signed().unwrap());
        assert_eq_to(&lhs, &rhs, n)?;
    }

    #[test]
    fn pochhammer_recurrence(e in 0i64..=6, k in 1i64..=3, len in 0usize..8) {
        let n = exp_int(30);
        let nome = Monomial::q(exp_int(k));
        for base in [Monomial::q(exp_int(e)), Monomial::neg_q(exp(e, 2))] {
            let step = pochhammer_finite(&base, &nome, len, n).unwrap();
            let next = pochhammer_finite(&base, &nome, len + 1, n).unwrap();
            let last = base.mul(&nome.pow(len as i64).unwrap());
            let factor = QSeries::one(n).sub(&QSeries::monomial(&last, n));
            assert_eq_to(&next, &step.mul(&factor), n)?;
        }
    }

    #[test]
    fn q_binomial_theorem(len in 0usize..7, e in 1i64..=4) {
        // (z;q)_n = sum_k (-1)^k q^(k(k-1)/2) [n k]_q z^k
        let n = exp_int(30);
        let q = Monomial::qi(1);
        let fact = |k: usize| pochhammer_finite(&q, &q, k, n).unwrap();
        let z = Monomial::q(exp(e, 2));
        let mut rhs = QSeries::zero(n);
        for k in 0..=len {
            let binom = fact(len).div(&fact(k).mul(&fact(len - k))).unwrap();
            let k = k as i64;
            let sign = if k % 2 == 0 { rat_int(1) } else { rat_int(-1) };
            let m = Monomial::new(sign, exp_int(k * (k - 1) / 2)).mul(&z.pow(k).unwrap());
            rhs = rhs.add(&binom.mul_monomial(&m));
        }
        assert_eq_to(&pochhammer_finite(&z, &q, len, n).unwrap(), &rhs, n)?;
    }

    #[test]
    fn euler_infinite_product_is_the_limit(e in 1i64..=4, k in 1i64..=3) {
        // (z;Q)_inf agrees with (z;Q)_n up to the valuation of the first omitted factor.
        let n = exp_int(30);
        let z = Monomial::neg_q(exp_int(e));
        let nome = Monomial::q(exp_int(k));
        let inf = pochhammer_infinite(&z, &nome, n).unwrap();
        let len = 4usize;
        let fin = pochhammer_finite(&z, &nome, len, n).unwrap();
        let cut = exp_int(e + k * len as i64) - exp(1, 2);
        assert_eq_to(&inf, &fin, cut)?;
    }

    #[test]
    fn jacobi_triple_product(e in 1i64..=5, extra in 1i64..=4, z in signed_q(exp_int(0))) {
        // sum (-1)^n Q^(n(n-1)/2) z^n = (z;Q)_inf (Q/z;Q)_inf (Q;Q)_inf
        let n = exp_int(30);
        let z = Monomial::new(z.coeff, exp(e, 2));
        let nome = Monomial::q(exp(e, 2) + exp_int(extra));
        let zinv = Monomial::new(rat_int(1) / &z.coeff, -z.exp);
        let prod = pochhammer_infinite(&z, &nome, n).unwrap()
            .mul(&pochhammer_infinite(&nome.mul(&zinv), &nome, n).unwrap())
            .mul(&pochhammer_infinite(&nome, &nome, n).unwrap());
        assert_eq_to(&jacobi_triple_sum(&z, &nome, n).unwrap(), &prod, n)?;
    }

    #[test]
    fn theta_periodicity_and_reflection(j in -6i64..=6, m in 1i64..=4, half in any::<bool>()) {
        let n = exp_int(30);
        let (j, m) = if half { (exp(j, 2), exp(m, 2)) } else { (exp_int(j), exp_int(m)) };
        let h = |j| theta_series(ThetaKind::H, j, m, n).unwrap();
        let g = |j| theta_series(ThetaKind::G, j, m, n).unwrap();
        let two_m = exp_int(2) * m;
        assert_eq_to(&h(j + two_m), &h(j), n)?;
        assert_eq_to(&h(-j), &h(j), n)?;
        assert_eq_to(&g(j + two_m), &g(j).neg(), n)?;
        assert_eq_to(&g(-j), &g(j), n)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn nahm_truncation_is_monotone(q in quadruple(), lo in 5i64..=15) {
        let plain = Decoration::default();
        let deep = nahm_sum(&q, &plain, exp_int(25)).unwrap();
        let shallow = nahm_sum(&q, &plain, exp_int(lo)).unwrap();
        assert_eq_to(&deep.truncate(exp_int(lo)), &shallow, exp_int(lo))?;
    }

    #[test]
    fn nahm_parity_classes_partition_the_sum(q in quadruple(), idx in 0usize..2) {
        let n = exp_int(20);
        let idx = idx % q.rank();
        let with = |p: Option<Parity>| {
            let mut parity = vec![None; q.rank()];
            parity[idx] = p;
            nahm_sum(&q, &Decoration { parity, ..Decoration::default() }, n).unwrap()
        };
        let split = with(Some(Parity::Even)).add(&with(Some(Parity::Odd)));
        assert_eq_to(&split, &with(None), n)?;
    }

    #[test]
    fn nahm_sum_is_invariant_under_index_permutation(q in quadruple()) {
        prop_assume!(q.rank() == 2);
        let n = exp_int(20);
        let swapped = NahmQuadruple::new(
            vec![vec![q.a[1][1], q.a[1][0]], vec![q.a[0][1], q.a[0][0]]],
            vec![q.b[1], q.b[0]],
            q.c,
            vec![q.d[1], q.d[0]],
        ).unwrap();
        let plain = Decoration::default();
        assert_eq_to(&nahm_sum(&q, &plain, n).unwrap(), &nahm_sum(&swapped, &plain, n).unwrap(), n)?;
    }

    #[test]
    fn nahm_duality_is_an_involution(q in quadruple()) {
        prop_assert_eq!(q.dual().unwrap().dual().unwrap(), q);
    }

    #[test]
    fn nahm_constant_shift_multiplies_by_a_monomial(q in quadruple(), c in -3i64..=3) {
        let n = exp_int(15);
        let shift = exp(c, 4);
        let shifted = NahmQuadruple { c: q.c + shift, ..q.clone() };
        let plain = Decoration::default();
        let lhs = nahm_sum(&shifted, &plain, n).unwrap();
        let rhs = nahm_sum(&q, &plain, n - shift.min(exp_int(0))).unwrap().mul_monomial(&Monomial::q(shift));
        assert_eq_to(&lhs, &rhs, n)?;
    }
}
