//! Timing of the hot paths: infinite products, Nahm lattice sums of rank 1
//! and 3, a bivariate sum, a full catalog record and a Bailey pair check.

use criterion::{black_box, criterion_group, criterion_main, Criterion};
use qnahm::bailey::{named_pair, verify_pair};
use qnahm::catalog::expr::{evaluate, parse_expr};
use qnahm::catalog::{verify_record, Catalog, VerifyOptions};
use qnahm::nahm::{nahm_sum, nahm_sum_bivariate, Decoration, NahmQuadruple};
use qnahm::series::{exp_int, pochhammer_infinite};
use qnahm::{Exponent, Monomial};

fn form(rows: &[&[i64]]) -> Vec<Vec<Exponent>> {
    rows.iter().map(|r| r.iter().map(|&v| exp_int(v)).collect()).collect()
}

fn products(c: &mut Criterion) {
    let q = Monomial::qi(1);
    c.bench_function("euler product (q;q)_inf to q^500", |b| {
        b.iter(|| pochhammer_infinite(black_box(&q), &q, exp_int(500)).unwrap())
    });
    let e = parse_expr("J(20,44)*J(24,44)/J(1,4)").unwrap();
    c.bench_function("theta quotient to q^200", |b| b.iter(|| evaluate(black_box(&e), exp_int(200), None).unwrap()));
}

fn nahm(c: &mut Criterion) {
    let rr = NahmQuadruple::from_form(form(&[&[2]]), vec![exp_int(0)], exp_int(0), vec![1]).unwrap();
    c.bench_function("rank 1 Nahm sum to q^200", |b| {
        b.iter(|| nahm_sum(black_box(&rr), &Decoration::default(), exp_int(200)).unwrap())
    });
    let f = NahmQuadruple::from_form(form(&[&[1, 0, 1], &[0, 2, 2], &[1, 2, 4]]), vec![exp_int(0); 3], exp_int(0), vec![1, 1, 2])
        .unwrap();
    c.bench_function("rank 3 index (1,1,2) Nahm sum to q^60", |b| {
        b.iter(|| nahm_sum(black_box(&f), &Decoration::default(), exp_int(60)).unwrap())
    });
    let dec = Decoration { x_grading: Some(vec![1, 2, 3]), ..Decoration::default() };
    let ag = NahmQuadruple::from_form(form(&[&[2, 2, 2], &[2, 4, 4], &[2, 4, 6]]), vec![exp_int(0); 3], exp_int(0), vec![1; 3])
        .unwrap();
    c.bench_function("bivariate rank 3 sum to x^12 q^40", |b| {
        b.iter(|| nahm_sum_bivariate(black_box(&ag), &dec, 12, exp_int(40)).unwrap())
    });
}

fn catalog(c: &mut Criterion) {
    let cat = Catalog::builtin().unwrap();
    let r = cat.get("T1.1.1").unwrap();
    let opts = VerifyOptions { order: Some(exp_int(100)), x_order: None };
    c.bench_function("verify T1.1.1 to q^100", |b| b.iter(|| verify_record(black_box(r), &opts)));
    let c1 = named_pair("C1").unwrap();
    c.bench_function("Bailey pair C1, n <= 10 to q^40", |b| {
        b.iter(|| verify_pair(black_box(&c1), 10, exp_int(40)).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = products, nahm, catalog
}
criterion_main!(benches);
