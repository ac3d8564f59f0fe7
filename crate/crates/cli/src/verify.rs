//! `qnahm verify`.

use qnahm::catalog::{verify_all, Catalog, IdentityRecord, Mismatch, Report, Status, Summary, VerifyOptions};
use qnahm::series::rational::{fmt_exponent, fmt_rational};
use qnahm::Error;

use crate::config::Config;
use crate::{print_json, Format, VerifyArgs, EXIT_CERTIFICATE, EXIT_FAIL, EXIT_PASS};

fn select(catalog: &Catalog, a: &VerifyArgs) -> anyhow::Result<Vec<IdentityRecord>> {
    if a.all {
        return Ok(catalog.records().to_vec());
    }
    if let Some(prefix) = &a.filter {
        let found = catalog.filter(prefix);
        if found.is_empty() {
            return Err(Error::UnknownId(format!("{prefix}*")).into());
        }
        return Ok(found.into_iter().cloned().collect());
    }
    Ok(a.id.iter().map(|id| catalog.resolve(id).cloned()).collect::<Result<_, _>>()?)
}

pub fn run(a: &VerifyArgs) -> anyhow::Result<u8> {
    let catalog = Catalog::load()?;
    let mut records = select(&catalog, a)?;
    if let Some(path) = &a.config {
        Config::load(path)?.apply(&catalog, &mut records)?;
    }
    let opts = VerifyOptions { order: a.order, x_order: a.x_order };
    let summary = verify_all(&records, &opts, a.jobs.map(usize::from))?;
    match a.format {
        Format::Json => print_json(&summary)?,
        Format::Text => print_text(&summary),
    }
    Ok(exit_code(&summary))
}

fn exit_code(s: &Summary) -> u8 {
    if s.reports.iter().any(|r| matches!(r.cause, Some(Error::BoundCertificate(_)))) {
        EXIT_CERTIFICATE
    } else if s.all_passed() {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

fn print_text(s: &Summary) {
    for r in &s.reports {
        say!("{}", line(r));
    }
    say!(
        "{}/{} passed, {} failed, {} errors ({} ms)",
        s.passed, s.total, s.failed, s.errors, s.elapsed_ms
    );
}

fn line(r: &Report) -> String {
    let status = match r.status {
        Status::Pass => "PASS",
        Status::Fail => "FAIL",
        Status::Error => "ERROR",
    };
    let mut out = format!("{status:<5} {:<14} q^{}", r.id, fmt_exponent(r.order));
    if let Some(x) = r.x_order {
        out.push_str(&format!(" x^{x}"));
    }
    out.push_str(&format!("  {} ms", r.elapsed_ms));
    if let Some(p) = &r.params {
        let p: Vec<String> = p.iter().map(|(k, v)| format!("{k}={v}")).collect();
        out.push_str(&format!("  at {}", p.join(",")));
    }
    match &r.discrepancy {
        Some(Mismatch::Q(d)) => out.push_str(&format!(
            "  first difference at q^{}: {} vs {}",
            fmt_exponent(d.exponent),
            fmt_rational(&d.lhs),
            fmt_rational(&d.rhs)
        )),
        Some(Mismatch::X(d)) => out.push_str(&format!(
            "  first difference at x^{} q^{}: {} vs {}",
            d.x_power,
            fmt_exponent(d.q.exponent),
            fmt_rational(&d.q.lhs),
            fmt_rational(&d.q.rhs)
        )),
        None => {}
    }
    if let Some(e) = &r.error {
        out.push_str(&format!("  {e}"));
    }
    out
}
