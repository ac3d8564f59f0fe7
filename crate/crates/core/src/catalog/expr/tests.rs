use proptest::prelude::*;

use super::*;
use crate::error::Error;
use crate::series::rational::{exp, exp_int};
use crate::series::QSeries;

fn q(src: &str, order: i64) -> QSeries {
    let e = parse_expr(src).unwrap_or_else(|err| panic!("{src}: {err}"));
    evaluate(&e, exp_int(order), None).unwrap_or_else(|err| panic!("{src}: {err}")).as_qseries().unwrap().clone()
}

fn same(a: &str, b: &str, order: i64) {
    let (x, y) = (q(a, order), q(b, order));
    assert_eq!(x.equal_up_to(&y, exp_int(order)).unwrap(), None, "{a}  vs  {b}");
}

fn bi(src: &str, xo: i64, order: i64) -> BiSeries {
    match evaluate(&parse_expr(src).unwrap(), exp_int(order), Some(xo)).unwrap() {
        Value::X(s) => s,
        Value::Q(s) => BiSeries::from_qseries(&s, xo),
    }
}

use crate::series::BiSeries;

fn same_bi(a: &str, b: &str, xo: i64, order: i64) {
    let (x, y) = (bi(a, xo, order), bi(b, xo, order));
    assert_eq!(x.equal_up_to(&y, xo, exp_int(order)).unwrap(), None, "{a}  vs  {b}");
}

#[test]
fn parses_product_sides() {
    let e = parse_expr("P(q^20,q^24,q^44;q^44)_inf / P(q,q^3,q^4;q^4)_inf").unwrap();
    assert!(matches!(e, Expr::Div(..)));
    assert!(matches!(parse_expr("J(1)").unwrap(), Expr::J { a: None, .. }));
}

#[test]
fn negative_length_is_rejected_with_location() {
    match parse_expr("P(q;q)_-1") {
        Err(Error::Parse { offset, expected }) => {
            assert_eq!(offset, 7);
            assert!(expected.contains("non-negative length"));
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn diagnostics_point_at_the_problem() {
    for (src, at) in [("q +", 3), ("J(1", 3), ("P(q;q)_", 7), ("nahm{b=[1]}", 5), ("1 $ 2", 2)] {
        match parse_expr(src) {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, at, "{src}"),
            other => panic!("{src}: unexpected {other:?}"),
        }
    }
}

#[test]
fn rogers_ramanujan_three_ways() {
    let prod = "1/P(q,q^4;q^5)_inf";
    same("nahm{M=[[2]]; b=[0]; c=0; d=[1]}", prod, 40);
    same("sum{n>=0; floor=n^2: q^(n^2)/P(q;q)_n}", prod, 40);
    same("sum{n>=0; floor=n^2+n: q^(n^2+n)/P(q;q)_n}", "1/P(q^2,q^3;q^5)_inf", 40);
}

#[test]
fn floor_violation_is_reported() {
    let e = parse_expr("sum{n>=0; floor=n^2+1: q^(n^2)/P(q;q)_n}").unwrap();
    assert!(evaluate(&e, exp_int(10), None).is_err());
}

#[test]
fn theta_and_substitution() {
    same("subst(theta_h(0,1), q->-q)", "J(1)^2/J(2)", 60);
    same("sum{n>=0; floor=(n^2+n)/2: q^((n^2+n)/2)}", "J(2)^2/J(1)", 60);
    same("sum{n>=0; floor=(n^2+n)/2: (-1)^n*(2*n+1)*q^((n^2+n)/2)}", "J(1)^3", 60);
    same("subst(J(1), q->q^2)", "J(2)", 30);
    same("J(1,5)", "P(q,q^4,q^5;q^5)_inf", 30);
}

#[test]
fn negative_valuation_products_reach_the_order() {
    let s = q("q^(-3)*J(1)/(1-q)", 20);
    assert_eq!(s.order(), exp_int(20));
    assert_eq!(s.valuation(), exp_int(-3));
    same("q^(-1)*(J(2)/J(1) - J(1)^3/J(2))/4*q", "(J(2)/J(1) - J(1)^3/J(2))/4", 30);
    let s = q("(J(2)/J(1) - J(1)^3/J(2))/(4*q)", 30);
    assert_eq!(s.valuation(), exp_int(0));
}

#[test]
fn finite_sums_with_constraint() {
    // sum_{i+2j=n} q^(i(i-1)/2) / ((q;q)_i (q^2;q^2)_j) = 1/(q;q)_n
    for n in 0..8 {
        let lhs = format!("sum{{i=0..{n}, j=0..{n} | i+2*j = {n}: q^(i*(i-1)/2)/(P(q;q)_i*P(q^2;q^2)_j)}}");
        same(&lhs, &format!("1/P(q;q)_{n}"), 30);
    }
}

#[test]
fn constant_term_basics() {
    same("CT_z(z + 1 + q/z)", "1", 10);
    same("CT_z(z*J(1))", "0", 10);
    // (q, -z q^(1/2), -q^(1/2)/z; q)_inf = sum_n z^n q^(n^2/2)
    same("CT_z(P(-z*q^(1/2), -q^(1/2)/z, q; q)_inf)", "1", 30);
    same("CT_z(z^(-2)*P(-z*q^(1/2), -q^(1/2)/z, q; q)_inf)", "q^2", 30);
}

#[test]
fn constant_term_of_triple_sum_integrand() {
    let integrand = |u: &str, v: &str, w: &str| {
        format!(
            "CT_z(P(-({u})*z*q^(1/2);q)_inf*P(-q*({v})*z;q^2)_inf*P(-q*z,-q/z,q^2;q^2)_inf/P(({w})*z^2;q^2)_inf)"
        )
    };
    let nahm = |u: &str, v: &str, w: &str| {
        format!("nahm{{M=[[3,2,4],[2,4,4],[4,4,8]]; b=[0,0,0]; c=0; d=[1,2,2]; u=[{u},{v},{w}]}}")
    };
    for (u, v, w) in [("1", "1", "1"), ("1", "1", "q"), ("1", "q", "q^2"), ("q", "q", "q^2")] {
        same(&integrand(u, v, w), &nahm(u, v, w), 24);
    }
}

#[test]
fn euler_expansions_in_x() {
    same_bi("nahm{M=[[1]]; b=[-1/2]; c=0; d=[1]; x=[1]}", "P(-x;q)_inf", 10, 30);
    same_bi("sum{n=0..10: x^n/P(q;q)_n}", "1/P(x;q)_inf", 10, 30);
    same_bi("sum{n=0..10: x^n*q^n/P(q;q)_n}", "xset(1/P(x;q)_inf, x->q*x)", 10, 30);
    same_bi("P(x*q;q^2)_3", "(1-x*q)*(1-x*q^3)*(1-x*q^5)", 10, 30);
    same_bi("1/P(-x^2*q;q^2)_2", "1/((1+x^2*q)*(1+x^2*q^3))", 10, 30);
}

#[test]
fn x_binding_specialises_nahm_sums() {
    same("xset(nahm{M=[[2]]; b=[0]; c=0; d=[1]; x=[1]}, x->q)", "nahm{M=[[2]]; b=[1]; c=0; d=[1]}", 30);
    same_bi(
        "xset(nahm{M=[[2]]; b=[0]; c=0; d=[1]; x=[1]}, x->q*x)",
        "nahm{M=[[2]]; b=[1]; c=0; d=[1]; x=[1]}",
        8,
        30,
    );
    // Nested bindings compose: x -> q x, then x -> q.
    same("xset(xset(nahm{M=[[2]]; b=[0]; c=0; d=[1]; x=[1]}, x->q*x), x->q)", "nahm{M=[[2]]; b=[2]; c=0; d=[1]}", 30);
}

#[test]
fn stretched_denominators_via_step_and_shift() {
    same("nahm{M=[[4]]; b=[0]; c=0; d=[1]; step=[2]; shift=[0]}", "sum{n>=0; floor=2*n^2: q^(2*n^2)/P(q;q)_(2*n)}", 40);
    same(
        "nahm{M=[[4]]; b=[2]; c=1/2; d=[1]; step=[2]; shift=[1]}",
        "sum{n>=0; floor=2*n^2+2*n: q^(2*n^2+2*n+1/2)/P(q;q)_(2*n+1)}",
        40,
    );
}

#[test]
fn printer_examples_round_trip() {
    for src in [
        "P(q^20,q^24,q^44;q^44)_inf/P(q,q^3,q^4;q^4)_inf + q*P(-q,q^10,-q^11;-q^11)_inf",
        "-q^(1/2)*x - -(1 - q)^3",
        "sum{i=0..(n+1), j in Z | i + j = 3; floor=j^2: (-1)^j*q^(j^2)}",
        "nahm{M=[[2,0,1],[0,4,2],[1,2,2]]; b=[0,0,1]; c=-1/24; d=[1,2,2]; u=[q,1,-q^(1/2)]; parity=[e,-,o]; x=[1,2,2]; step=[2,1,1]; shift=[1,0,0]}",
        "subst(CT_z(z/z), q->q^(1/2)) + subst(J(2,7), q->-q) + xset(x^2, x->-q^3*x)",
        "theta_g(1/2, 11) - theta_h(3,22)^2",
    ] {
        let e = parse_expr(src).unwrap_or_else(|err| panic!("{src}: {err}"));
        let printed = e.to_string();
        assert_eq!(parse_expr(&printed).unwrap(), e, "{printed}");
    }
}

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (0i64..50).prop_map(Expr::Num),
        Just(Expr::Q),
        Just(Expr::X),
        Just(Expr::Z),
        prop_oneof![Just("i"), Just("n"), Just("k2")].prop_map(Expr::var),
        (1i64..30).prop_map(|m| Expr::J { a: None, m: Box::new(Expr::Num(m)) }),
    ]
}

fn tree() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(5, 48, 3, |inner| {
        let b = |e: Expr| Box::new(e);
        prop_oneof![
            inner.clone().prop_map(move |a| Expr::Neg(b(a))),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| Expr::Add(Box::new(x), Box::new(y))),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| Expr::Sub(Box::new(x), Box::new(y))),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| Expr::Mul(Box::new(x), Box::new(y))),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| Expr::Div(Box::new(x), Box::new(y))),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| Expr::Pow(Box::new(x), Box::new(y))),
            (prop::collection::vec(inner.clone(), 1..3), inner.clone(), prop::option::of(inner.clone()))
                .prop_map(|(bases, nome, len)| Expr::Poch { bases, nome: Box::new(nome), len: len.map(Box::new) }),
            inner.clone().prop_map(|a| Expr::Ct(Box::new(a))),
            (inner.clone(), 1i64..5).prop_map(|(a, m)| Expr::Subst(Box::new(a), Subst::Power(exp(m, 2)))),
            inner.clone().prop_map(|a| Expr::Subst(Box::new(a), Subst::Signed)),
            (inner.clone(), -3i64..4, any::<bool>()).prop_map(|(a, e, keep_x)| Expr::XSet(
                Box::new(a),
                XBind { mono: Monomial::new(crate::series::rat(e, 2), exp_int(e)), keep_x }
            )),
            (inner.clone(), inner.clone(), inner).prop_map(|(lo, hi, body)| Expr::Sum(Box::new(SumNode {
                vars: vec![
                    SumVar { name: "i".into(), range: Range::Finite(lo, hi) },
                    SumVar { name: "j".into(), range: Range::NonNegative },
                ],
                constraint: None,
                floor: Some(Expr::var("j")),
                body,
            }))),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn print_then_parse_is_identity(e in tree()) {
        let printed = e.to_string();
        let back = parse_expr(&printed);
        prop_assert!(back.is_ok(), "{printed}: {back:?}");
        prop_assert_eq!(back.unwrap(), e);
    }

    #[test]
    fn parser_never_panics(s in "[-+*/^()_;,.{}=|:0-9qxzPJijnZ ]{0,40}") {
        let _ = parse_expr(&s);
    }
}
