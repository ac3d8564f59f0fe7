//! Shared helpers for integration tests: the naive Nahm-sum oracle.

use qnahm::catalog::expr::{parse_expr, Expr, NahmNode, Range};
use qnahm::catalog::Catalog;
use qnahm::nahm::{nahm_sum, nahm_sum_bivariate};
use qnahm::series::{exp_int, pochhammer_finite};
use qnahm::{BiSeries, Exponent, Monomial, QSeries};

const BOX: i64 = 40;
const ORDER: i64 = 20;
const X_ORDER: i64 = 6;

pub fn collect<'a>(e: &'a Expr, out: &mut Vec<&'a NahmNode>) {
    match e {
        Expr::Nahm(n) => out.push(n),
        Expr::Neg(a) | Expr::Subst(a, _) | Expr::Ct(a) | Expr::XSet(a, _) => collect(a, out),
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
            collect(a, out);
            collect(b, out);
        }
        Expr::Sum(s) => {
            for v in &s.vars {
                if let Range::Finite(lo, hi) = &v.range {
                    collect(lo, out);
                    collect(hi, out);
                }
            }
            collect(&s.body, out);
        }
        Expr::Poch { bases, nome, len } => {
            bases.iter().for_each(|b| collect(b, out));
            collect(nome, out);
            if let Some(l) = len {
                collect(l, out);
            }
        }
        _ => {}
    }
}

/// Naive expansion over the box `0 <= n_i <= 40`, multiplying out each
/// summand with plain series arithmetic; returns the x-graded coefficients (all in degree 0 when ungraded).
pub fn naive(node: &NahmNode, order: Exponent) -> Vec<(i64, QSeries)> {
    let q = &node.quad;
    let dec = &node.dec;
    let r = q.rank();
    assert!(r <= 3, "oracle covers rank <= 3");
    let m = q.form();
    let weight = |i: usize| dec.weights.get(i).cloned().unwrap_or_else(Monomial::one);
    let grading = |i: usize| dec.x_grading.as_ref().map_or(0, |g| g[i]);
    let mut out: Vec<(i64, QSeries)> = Vec::new();
    let mut n = vec![0i64; r];
    loop {
        let parity_ok = n.iter().enumerate().all(|(i, &v)| match dec.parity.get(i).copied().flatten() {
            Some(p) => p.admits(v),
            None => true,
        });
        let deg: i64 = (0..r).map(|i| grading(i) * n[i]).sum();
        let mut e = q.c;
        for i in 0..r {
            e += q.b[i] * exp_int(n[i]) + weight(i).exp * exp_int(n[i]);
            for j in 0..r {
                e += m[i][j] * exp_int(n[i] * n[j]) / exp_int(2);
            }
        }
        if parity_ok && e <= order && (dec.x_grading.is_none() || deg <= X_ORDER) {
            assert!(n.iter().all(|&v| v < BOX), "box too small at {n:?}");
            let mut coeff = Monomial::q(e);
            for i in 0..r {
                coeff.coeff *= weight(i).pow(n[i]).unwrap().coeff;
            }
            let mut term = QSeries::monomial(&coeff, order);
            for i in 0..r {
                let (s, t) = dec.den_index.get(i).copied().unwrap_or((1, 0));
                let qd = Monomial::qi(q.d[i]);
                let den = pochhammer_finite(&qd, &qd, (s * n[i] + t) as usize, order - e).unwrap();
                term = term.mul(&den.invert().unwrap()).truncate(order);
            }
            match out.iter_mut().find(|(d, _)| *d == deg) {
                Some((_, acc)) => *acc = acc.add(&term),
                None => out.push((deg, term)),
            }
        }
        let mut i = 0;
        loop {
            if i == r {
                return out;
            }
            n[i] += 1;
            if n[i] <= BOX {
                break;
            }
            n[i] = 0;
            i += 1;
        }
    }
}

/// Compare every distinct Nahm sum of the built-in catalog with the naive
/// loop at q-order 20 (x-order 6 when graded). Returns the number of distinct
/// sums checked, or the first disagreement.
pub fn check_catalog_sums() -> Result<usize, String> {
    let cat = Catalog::builtin().map_err(|e| e.to_string())?;
    let order = exp_int(ORDER);
    let mut seen = Vec::new();
    let mut exprs = Vec::new();
    for r in cat.records() {
        for side in [&r.lhs, &r.rhs] {
            exprs.push(parse_expr(side).map_err(|e| e.to_string())?);
        }
    }
    for e in &exprs {
        let mut nodes = Vec::new();
        collect(e, &mut nodes);
        for node in nodes {
            if seen.contains(&node) {
                continue;
            }
            seen.push(node);
            let expected = naive(node, order);
            let shown = || Expr::Nahm(Box::new(node.clone())).to_string();
            let differs = if node.dec.x_grading.is_some() {
                let got = nahm_sum_bivariate(&node.quad, &node.dec, X_ORDER, order).map_err(|e| e.to_string())?;
                let want = BiSeries::from_coeffs(expected.into_iter().collect(), X_ORDER, order);
                got.equal_up_to(&want, X_ORDER, order).map_err(|e| e.to_string())?.is_some()
            } else {
                let got = nahm_sum(&node.quad, &node.dec, order).map_err(|e| e.to_string())?;
                let want = expected.into_iter().map(|(_, s)| s).next().unwrap_or_else(|| QSeries::zero(order));
                got.equal_up_to(&want, order).map_err(|e| e.to_string())?.is_some()
            };
            if differs {
                return Err(format!("engine and naive loop differ on {}", shown()));
            }
        }
    }
    Ok(seen.len())
}
