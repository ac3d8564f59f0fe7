//! `qnahm bailey`.

use qnahm::bailey::{named_pair, registry, run_derivation, run_pipeline, verify_pair, PairReport, DERIVATIONS};
use qnahm::series::rational::fmt_exponent;
use serde::Serialize;

use crate::{print_json, BaileyArgs, Format, EXIT_FAIL, EXIT_PASS};

const TRANSFORMS: [&str; 5] = ["rho_infty", "reduce_binf", "reduce_b(MONOMIAL)", "raise_binf", "raise_b0"];

#[derive(Serialize)]
struct Listing {
    pairs: Vec<PairEntry>,
    derivations: Vec<&'static str>,
    transforms: Vec<&'static str>,
}

#[derive(Serialize)]
struct PairEntry {
    name: String,
    a: String,
}

pub fn run(a: &BaileyArgs) -> anyhow::Result<u8> {
    if a.list {
        let listing = Listing {
            pairs: registry().iter().map(|p| PairEntry { name: p.name().to_string(), a: format!("q^{}", fmt_exponent(p.a_exp())) }).collect(),
            derivations: DERIVATIONS.to_vec(),
            transforms: TRANSFORMS.to_vec(),
        };
        match a.format {
            Format::Json => print_json(&listing)?,
            Format::Text => {
                for p in &listing.pairs {
                    say!("{:<8} relative to a = {}", p.name, p.a);
                }
                say!("derivations: {}", listing.derivations.join(", "));
                say!("transforms: {}", listing.transforms.join(", "));
            }
        }
        return Ok(EXIT_PASS);
    }
    if let Some(name) = &a.verify {
        let report = verify_pair(&named_pair(name)?, a.n_max.unwrap_or(20), a.order)?;
        emit_pair(&report, a.format)?;
        return Ok(if report.passed() { EXIT_PASS } else { EXIT_FAIL });
    }
    let chain = a.chain.as_deref().expect("clap requires one action");
    if DERIVATIONS.contains(&chain) {
        let report = run_derivation(chain, a.n_max.unwrap_or(10), a.order)?;
        match a.format {
            Format::Json => print_json(&report)?,
            Format::Text => {
                for s in &report.steps {
                    say!("{:<5} {}  ({} failures)", s.report.status.to_uppercase(), s.label, s.report.failures.len());
                }
                say!("{} {}", report.chain, report.status);
            }
        }
        return Ok(if report.passed() { EXIT_PASS } else { EXIT_FAIL });
    }
    let pair = run_pipeline(chain)?;
    let report = verify_pair(&pair, a.n_max.unwrap_or(20), a.order)?;
    emit_pair(&report, a.format)?;
    Ok(if report.passed() { EXIT_PASS } else { EXIT_FAIL })
}

fn emit_pair(r: &PairReport, format: Format) -> anyhow::Result<()> {
    match format {
        Format::Json => print_json(r)?,
        Format::Text => {
            for f in &r.failures {
                say!("n = {}: first difference at q^{}: {} vs {}", f.n, f.exponent, f.lhs, f.rhs);
            }
            say!("{} n <= {} to q^{}: {}", r.pair, r.n_max, r.order, r.status);
        }
    }
    Ok(())
}
