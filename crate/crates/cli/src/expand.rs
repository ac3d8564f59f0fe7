//! `qnahm expand` and `qnahm dual`.

use anyhow::Context;
use qnahm::catalog::expr::{evaluate, parse_expr, Value};
use qnahm::nahm::{DecoratedQuadruple, Decoration};
use qnahm::series::rational::fmt_exponent;
use qnahm::Error;
use serde::Serialize;

use crate::{print_json, DualArgs, ExpandArgs, Format, EXIT_PASS};

#[derive(Serialize)]
struct Expansion {
    expr: String,
    order: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    x_order: Option<i64>,
    series: serde_json::Value,
}

pub fn run(a: &ExpandArgs) -> anyhow::Result<u8> {
    let e = parse_expr(&a.expr)?;
    let v = evaluate(&e, a.order, a.x_order)?;
    match a.format {
        Format::Json => print_json(&Expansion {
            expr: e.to_string(),
            order: fmt_exponent(a.order),
            x_order: a.x_order,
            series: match &v {
                Value::Q(s) => serde_json::to_value(s)?,
                Value::X(s) => serde_json::to_value(s)?,
            },
        })?,
        Format::Text => match &v {
            Value::Q(s) => say!("{s}"),
            Value::X(s) => say!("{s}"),
        },
    }
    Ok(EXIT_PASS)
}

#[derive(Serialize)]
struct DualReport {
    quadruple: DecoratedQuadruple,
    dual: DecoratedQuadruple,
}

pub fn dual(a: &DualArgs) -> anyhow::Result<u8> {
    let text = std::fs::read_to_string(&a.quad).with_context(|| format!("cannot read {}", a.quad.display()))?;
    let quadruple: DecoratedQuadruple =
        serde_json::from_str(&text).map_err(|e| Error::InvalidQuadruple(format!("{}: {e}", a.quad.display())))?;
    if !quadruple.decoration.is_plain() {
        return Err(Error::InvalidQuadruple("the dual is defined for undecorated quadruples".into()).into());
    }
    quadruple.quadruple.validate()?;
    let dual = DecoratedQuadruple { quadruple: quadruple.quadruple.dual()?, decoration: Decoration::default() };
    match a.format {
        Format::Json => print_json(&DualReport { quadruple, dual })?,
        Format::Text => say!("{}", serde_json::to_string(&dual)?),
    }
    Ok(EXIT_PASS)
}
