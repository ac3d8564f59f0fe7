//! `qnahm modular`.

use qnahm::modular::{
    check_s, check_v_translation, dual_path, duality_checks, eta_weber_laws, suite, theta_laws, EvalPolicy, Residual, Tau,
};
use qnahm::Error;
use serde::Serialize;

use crate::{print_json, Format, ModularArgs, EXIT_FAIL, EXIT_PASS};

#[derive(Serialize)]
struct ModularReport {
    total: usize,
    passed: usize,
    failed: usize,
    residuals: Vec<Residual>,
}

fn at(tau: Tau, tol: f64, p: &EvalPolicy) -> qnahm::Result<Vec<Residual>> {
    let mut out = check_s(tau, tol, p)?;
    out.extend(dual_path(tau, tol, p)?);
    out.push(check_v_translation(tau, tol, p)?);
    out.extend(eta_weber_laws(tau, tol, p)?);
    for m2 in [11, 22] {
        out.extend(theta_laws(tau, m2, tol, p)?);
    }
    out.extend(duality_checks(tau, tol, p)?);
    Ok(out)
}

pub fn run(a: &ModularArgs) -> anyhow::Result<u8> {
    if !(a.tol > 0.0 && a.tol.is_finite()) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {}", a.tol)).into());
    }
    let policy = EvalPolicy::default();
    let residuals = match &a.tau {
        Some(t) => at(Tau::parse(t)?, a.tol, &policy)?,
        None => suite(a.tol, &policy)?,
    };
    let passed = residuals.iter().filter(|r| r.passed()).count();
    let report = ModularReport { total: residuals.len(), passed, failed: residuals.len() - passed, residuals };
    match a.format {
        Format::Json => print_json(&report)?,
        Format::Text => {
            for r in &report.residuals {
                let status = if r.passed() { "PASS" } else { "FAIL" };
                say!("{status:<5} {:<26} {:<58} {:.3e}", r.tau, r.equation, r.residual);
            }
            say!("{}/{} passed", report.passed, report.total);
        }
    }
    Ok(if report.failed == 0 { EXIT_PASS } else { EXIT_FAIL })
}
