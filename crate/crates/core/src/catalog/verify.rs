//! Expansion of both sides of a record and exact comparison.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;

use super::expr::{evaluate_in, parse_expr, Expr, Value};
use super::{Arity, IdentityRecord};
use crate::error::{Error, Result};
use crate::series::{BiDiscrepancy, BiSeries, Discrepancy, Exponent};

/// Caller overrides of the per-record orders.
#[derive(Clone, Debug, Default)]
pub struct VerifyOptions {
    pub order: Option<Exponent>,
    pub x_order: Option<i64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

/// First disagreement, univariate or bivariate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Mismatch {
    Q(Discrepancy),
    X(BiDiscrepancy),
}

impl Mismatch {
    pub fn exponent(&self) -> Exponent {
        match self {
            Mismatch::Q(d) => d.exponent,
            Mismatch::X(d) => d.q.exponent,
        }
    }
}

/// Outcome of verifying one record.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub id: String,
    #[serde(with = "crate::series::rational::serde_exponent")]
    pub order: Exponent,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_order: Option<i64>,
    pub status: Status,
    pub elapsed_ms: u64,
    /// Grid assignment at which the discrepancy or error occurred.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<BTreeMap<String, i64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub discrepancy: Option<Mismatch>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// The typed error behind `error`.
    #[serde(skip)]
    pub cause: Option<Error>,
}

/// Reports of a batch, in input order, with counts.
#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
    pub elapsed_ms: u64,
    pub reports: Vec<Report>,
}

impl Summary {
    pub fn all_passed(&self) -> bool {
        self.passed == self.total
    }
}

/// Expand both sides of `r` and compare them at the effective orders.
pub fn verify_record(r: &IdentityRecord, opts: &VerifyOptions) -> Report {
    let start = Instant::now();
    let order = opts.order.unwrap_or_else(|| r.order());
    let x_order = r.x_order().map(|x| opts.x_order.unwrap_or(x));
    let mut report = Report {
        id: r.id.clone(),
        order,
        x_order,
        status: Status::Pass,
        elapsed_ms: 0,
        params: None,
        discrepancy: None,
        error: None,
        cause: None,
    };
    let sides = parse_expr(&r.lhs).and_then(|l| Ok((l, parse_expr(&r.rhs)?)));
    match sides {
        Err(e) => {
            report.status = Status::Error;
            report.error = Some(e.to_string());
            report.cause = Some(e);
        }
        Ok((lhs, rhs)) => {
            for env in r.assignments() {
                let outcome = compare(&lhs, &rhs, r.arity, order, x_order, &env);
                let failed = !matches!(outcome, Ok(None));
                match outcome {
                    Ok(None) => {}
                    Ok(Some(d)) => {
                        report.status = Status::Fail;
                        report.discrepancy = Some(d);
                    }
                    Err(e) => {
                        report.status = Status::Error;
                        report.error = Some(e.to_string());
                        report.cause = Some(e);
                    }
                }
                if failed {
                    if !env.is_empty() {
                        report.params = Some(env.into_iter().collect());
                    }
                    break;
                }
            }
        }
    }
    report.elapsed_ms = start.elapsed().as_millis() as u64;
    report
}

fn compare(
    lhs: &Expr,
    rhs: &Expr,
    arity: Arity,
    order: Exponent,
    x_order: Option<i64>,
    env: &[(String, i64)],
) -> Result<Option<Mismatch>> {
    let l = evaluate_in(lhs, order, x_order, env)?;
    let r = evaluate_in(rhs, order, x_order, env)?;
    match arity {
        Arity::Q => Ok(l.as_qseries()?.equal_up_to(r.as_qseries()?, order)?.map(Mismatch::Q)),
        Arity::XQ => {
            let xo = x_order.expect("bivariate records carry an x-order");
            let (l, r) = (bivariate(l, xo), bivariate(r, xo));
            Ok(l.equal_up_to(&r, xo, order)?.map(Mismatch::X))
        }
    }
}

fn bivariate(v: Value, x_order: i64) -> BiSeries {
    match v {
        Value::Q(s) => BiSeries::from_qseries(&s, x_order),
        Value::X(s) => s,
    }
}

/// Verify `records` concurrently on `jobs` threads (all cores if `None`);
/// reports come back in input order.
pub fn verify_all<'a>(
    records: impl IntoIterator<Item = &'a IdentityRecord>,
    opts: &VerifyOptions,
    jobs: Option<usize>,
) -> Result<Summary> {
    use rayon::prelude::*;

    let start = Instant::now();
    let records: Vec<&IdentityRecord> = records.into_iter().collect();
    let run = || records.par_iter().map(|r| verify_record(r, opts)).collect::<Vec<_>>();
    let reports = match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::InvalidArgument(format!("worker pool: {e}")))?
            .install(run),
        None => run(),
    };
    let count = |s: Status| reports.iter().filter(|r| r.status == s).count();
    Ok(Summary {
        total: reports.len(),
        passed: count(Status::Pass),
        failed: count(Status::Fail),
        errors: count(Status::Error),
        elapsed_ms: start.elapsed().as_millis() as u64,
        reports,
    })
}
