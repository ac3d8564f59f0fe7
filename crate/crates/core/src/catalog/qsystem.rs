//! The Andrews q-difference system for
//!
//! ```text
//! Q_{k,i}(x) = sum x^(N_1+...+N_{k-1}) q^(N_1^2+...+N_{k-1}^2 + N_i+...+N_{k-1}) / prod_j (q;q)_(n_j),
//! N_j = n_j + ... + n_{k-1},
//! Q_{k,i}(x) - Q_{k,i-1}(x) = (xq)^(i-1) Q_{k,k-i+1}(xq),   Q_{k,0} = 0,
//! ```
//!
//! and, for `k = 4`, the index-(1,2,2) family
//!
//! ```text
//! L_2(x) = sum q^(i^2+2j^2+2k^2+2ij+2jk+j+2k) x^(i+2j+2k) / ((q;q)_i (q^2;q^2)_j (q^2;q^2)_k)
//! L_4(x) = the same with q^(... + j)
//! L_1(x) = L_4(xq),   L_3(x) = L_2(x) + (xq)^2 L_2(xq)
//! ```
//!
//! which satisfies the same relations, so `Q_{4,i} = L_i`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::nahm::{nahm_sum_bivariate, Decoration, NahmQuadruple};
use crate::series::rational::fmt_exponent;
use crate::series::{exp_int, BiDiscrepancy, BiSeries, Exponent, Monomial, QSeries};

/// Which system to check: `Q_{k,*}` alone, or (for `k = 4`) together with `L_*`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QSystem {
    pub k: usize,
    pub with_l: bool,
}

impl QSystem {
    pub fn andrews(k: usize) -> Self {
        QSystem { k, with_l: false }
    }

    /// `k = 4` with the `L_i` family.
    pub fn index_122() -> Self {
        QSystem { k: 4, with_l: true }
    }
}

/// One relation and its outcome.
#[derive(Clone, Debug, Serialize)]
pub struct RelationCheck {
    pub relation: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub discrepancy: Option<BiDiscrepancy>,
}

fn form_of(k: usize, i: usize) -> Result<(NahmQuadruple, Decoration)> {
    let r = k - 1;
    let m = (1..=r).map(|l| (1..=r).map(|j| exp_int(2 * l.min(j) as i64)).collect()).collect();
    let b = (1..=r).map(|l| exp_int((l + 1).saturating_sub(i) as i64)).collect();
    let q = NahmQuadruple::from_form(m, b, Exponent::from_integer(0), vec![1; r])?;
    let dec = Decoration { x_grading: Some((1..=r as i64).collect()), ..Decoration::default() };
    Ok((q, dec))
}

/// `Q_{k,i}(x)` to `(x_order, order)`.
pub fn q_family(k: usize, i: usize, x_order: i64, order: Exponent) -> Result<BiSeries> {
    if !(2..=5).contains(&k) || !(1..=k).contains(&i) {
        return Err(Error::InvalidArgument(format!("Q_{{{k},{i}}} needs 2 <= k <= 5 and 1 <= i <= k")));
    }
    let (q, dec) = form_of(k, i)?;
    nahm_sum_bivariate(&q, &dec, x_order, order)
}

fn l_base(lin_k: i64, x_order: i64, order: Exponent) -> Result<BiSeries> {
    let m = [[2, 2, 0], [2, 4, 2], [0, 2, 4]].iter().map(|r| r.iter().map(|&v| exp_int(v)).collect()).collect();
    let b = vec![exp_int(0), exp_int(1), exp_int(lin_k)];
    let q = NahmQuadruple::from_form(m, b, exp_int(0), vec![1, 2, 2])?;
    let dec = Decoration { x_grading: Some(vec![1, 2, 2]), ..Decoration::default() };
    nahm_sum_bivariate(&q, &dec, x_order, order)
}

/// `L_1, ..., L_4` to `(x_order, order)`.
pub fn l_family(x_order: i64, order: Exponent) -> Result<[BiSeries; 4]> {
    let l2 = l_base(2, x_order, order)?;
    let l4 = l_base(0, x_order, order)?;
    let l1 = shift_x(&l4)?;
    let l3 = l2.add(&xq_pow(2, &shift_x(&l2)?));
    Ok([l1, l2, l3, l4])
}

/// `f(x) -> f(xq)`.
fn shift_x(f: &BiSeries) -> Result<BiSeries> {
    f.rescale_x(&Monomial::qi(1))
}

/// `(xq)^j f`.
fn xq_pow(j: i64, f: &BiSeries) -> BiSeries {
    f.mul(&BiSeries::monomial(&Monomial::qi(j), j, f.x_order(), f.q_order()))
}

/// Checks the relations `F_i - F_{i-1} = (xq)^(i-1) F_{k-i+1}(xq)` for a family `F`.
fn relations(name: &str, f: &[BiSeries], x_order: i64, order: Exponent) -> Result<Vec<RelationCheck>> {
    let k = f.len();
    let mut out = Vec::new();
    for i in 1..=k {
        let lhs = if i == 1 { f[0].clone() } else { f[i - 1].sub(&f[i - 2]) };
        let rhs = xq_pow(i as i64 - 1, &shift_x(&f[k - i])?);
        let d = lhs.equal_up_to(&rhs, x_order, order)?;
        let prev = if i == 1 { String::new() } else { format!(" - {name}{}(x)", i - 1) };
        out.push(RelationCheck {
            relation: format!("{name}{i}(x){prev} = (xq)^{} {name}{}(xq)", i - 1, k - i + 1),
            pass: d.is_none(),
            discrepancy: d,
        });
    }
    Ok(out)
}

/// Check the q-difference relations of `sys` as bivariate series to
/// x-order `x_order` and q-order `order`. With the `L` family this also
/// compares `Q_{4,i} = L_i` and the `x = 1` value of `Q_{4,4}` against the
/// Andrews-Gordon product.
pub fn q_system_check(sys: QSystem, x_order: i64, order: Exponent) -> Result<Vec<RelationCheck>> {
    let k = sys.k;
    if sys.with_l && k != 4 {
        return Err(Error::InvalidArgument("the L family exists for k = 4 only".into()));
    }
    // x -> xq lowers nothing in q, so the family is expanded once at the target orders.
    let q: Vec<BiSeries> = (1..=k).map(|i| q_family(k, i, x_order, order)).collect::<Result<_>>()?;
    let mut out = relations("Q", &q, x_order, order)?;
    if sys.with_l {
        let l = l_family(x_order, order)?;
        out.extend(relations("L", &l, x_order, order)?);
        for i in 0..4 {
            let d = q[i].equal_up_to(&l[i], x_order, order)?;
            out.push(RelationCheck { relation: format!("Q4{}(x) = L{}(x)", i + 1, i + 1), pass: d.is_none(), discrepancy: d });
        }
        out.push(specialization_check(&q[3], x_order, order)?);
    }
    Ok(out)
}

/// `Q_{4,4}(1)` against the product `(q^4, q^5, q^9; q^9)_inf / (q;q)_inf`.
/// Coefficients of `x^m` start at `q^(m^2/3)`, so the truncated x-sum is
/// exact for integer exponents below `(x_order+1)^2/3`.
fn specialization_check(q44: &BiSeries, x_order: i64, order: Exponent) -> Result<RelationCheck> {
    let valid = order.min(exp_int(((x_order + 1) * (x_order + 1) - 1) / 3));
    let mut at_one = QSeries::zero(q44.q_order());
    for (_, c) in q44.coeffs() {
        at_one = at_one.add(c);
    }
    let product = super::expr::evaluate(&super::expr::parse_expr("J(4,9)/J(1)")?, valid, None)?;
    let d = at_one.equal_up_to(product.as_qseries()?, valid)?;
    Ok(RelationCheck {
        relation: format!("Q44(1) = (q^4,q^5,q^9;q^9)_inf/(q;q)_inf (to q^{})", fmt_exponent(valid)),
        pass: d.is_none(),
        discrepancy: d.map(|q| BiDiscrepancy { x_power: 0, q }),
    })
}
