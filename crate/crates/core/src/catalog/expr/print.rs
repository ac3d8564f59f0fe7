//! Printer producing text that parses back to the same tree.

use std::fmt::{self, Write};

use super::{Expr, NahmNode, Range, Subst, SumNode, XBind};
use crate::nahm::Parity;
use crate::products::ThetaKind;
use crate::series::rational::fmt_exponent;
use crate::series::Exponent;

const ADD: u8 = 1;
const MUL: u8 = 2;
const NEG: u8 = 3;
const POW: u8 = 4;
const ATOM: u8 = 5;

fn level(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => ADD,
        Expr::Mul(..) | Expr::Div(..) => MUL,
        Expr::Neg(_) => NEG,
        Expr::Pow(..) => POW,
        _ => ATOM,
    }
}

fn write_at(f: &mut impl Write, e: &Expr, min: u8) -> fmt::Result {
    if level(e) < min {
        f.write_char('(')?;
        write_expr(f, e)?;
        f.write_char(')')
    } else {
        write_expr(f, e)
    }
}

/// Bare numbers and indices, anything else parenthesised.
fn write_short(f: &mut impl Write, e: &Expr) -> fmt::Result {
    match e {
        Expr::Num(_) | Expr::Var(_) => write_expr(f, e),
        _ => {
            f.write_char('(')?;
            write_expr(f, e)?;
            f.write_char(')')
        }
    }
}

fn write_list<T>(f: &mut dyn Write, items: &[T], mut item: impl FnMut(&mut dyn Write, &T) -> fmt::Result) -> fmt::Result {
    f.write_char('[')?;
    for (i, v) in items.iter().enumerate() {
        if i > 0 {
            f.write_char(',')?;
        }
        item(f, v)?;
    }
    f.write_char(']')
}

fn write_exponents(f: &mut dyn Write, v: &[Exponent]) -> fmt::Result {
    write_list(f, v, |f, e| f.write_str(&fmt_exponent(*e)))
}

fn write_ints(f: &mut dyn Write, v: &[i64]) -> fmt::Result {
    write_list(f, v, |f, e| write!(f, "{e}"))
}

fn write_nahm(f: &mut dyn Write, n: &NahmNode) -> fmt::Result {
    let (name, m) = if n.as_form { ("M", n.quad.form()) } else { ("A", n.quad.a.clone()) };
    write!(f, "nahm{{{name}=")?;
    write_list(f, &m, |f, row| write_exponents(f, row))?;
    f.write_str("; b=")?;
    write_exponents(f, &n.quad.b)?;
    write!(f, "; c={}; d=", fmt_exponent(n.quad.c))?;
    write_ints(f, &n.quad.d)?;
    let dec = &n.dec;
    if !dec.weights.is_empty() {
        f.write_str("; u=")?;
        write_list(f, &dec.weights, |f, w| write!(f, "{w}"))?;
    }
    if !dec.parity.is_empty() {
        f.write_str("; parity=")?;
        write_list(f, &dec.parity, |f, p| {
            f.write_str(match p {
                Some(Parity::Even) => "e",
                Some(Parity::Odd) => "o",
                None => "-",
            })
        })?;
    }
    if let Some(g) = &dec.x_grading {
        f.write_str("; x=")?;
        write_ints(f, g)?;
    }
    if !dec.den_index.is_empty() {
        let (s, t): (Vec<i64>, Vec<i64>) = dec.den_index.iter().copied().unzip();
        f.write_str("; step=")?;
        write_ints(f, &s)?;
        f.write_str("; shift=")?;
        write_ints(f, &t)?;
    }
    f.write_char('}')
}

fn write_sum(f: &mut dyn Write, s: &SumNode) -> fmt::Result {
    let mut f = f;
    f.write_str("sum{")?;
    for (i, v) in s.vars.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        f.write_str(&v.name)?;
        match &v.range {
            Range::Finite(lo, hi) => {
                f.write_char('=')?;
                write_short(&mut f, lo)?;
                f.write_str("..")?;
                write_short(&mut f, hi)?;
            }
            Range::NonNegative => f.write_str(">=0")?,
            Range::Integers => f.write_str(" in Z")?,
        }
    }
    if let Some((l, r)) = &s.constraint {
        f.write_str(" | ")?;
        write_expr(&mut f, l)?;
        f.write_str(" = ")?;
        write_expr(&mut f, r)?;
    }
    if let Some(fl) = &s.floor {
        f.write_str("; floor=")?;
        write_expr(&mut f, fl)?;
    }
    f.write_str(": ")?;
    write_expr(&mut f, &s.body)?;
    f.write_char('}')
}

fn write_xbind(f: &mut impl Write, b: &XBind) -> fmt::Result {
    match (b.keep_x, b.mono.is_one()) {
        (true, true) => f.write_char('x'),
        (true, false) => write!(f, "{}*x", b.mono),
        (false, _) => write!(f, "{}", b.mono),
    }
}

fn write_expr(f: &mut impl Write, e: &Expr) -> fmt::Result {
    match e {
        Expr::Num(n) => write!(f, "{n}"),
        Expr::Q => f.write_char('q'),
        Expr::X => f.write_char('x'),
        Expr::Z => f.write_char('z'),
        Expr::Var(s) => f.write_str(s),
        Expr::Neg(a) => {
            f.write_char('-')?;
            write_at(f, a, NEG)
        }
        Expr::Add(a, b) | Expr::Sub(a, b) => {
            write_at(f, a, ADD)?;
            f.write_str(if matches!(e, Expr::Add(..)) { " + " } else { " - " })?;
            write_at(f, b, MUL)
        }
        Expr::Mul(a, b) | Expr::Div(a, b) => {
            write_at(f, a, MUL)?;
            f.write_char(if matches!(e, Expr::Mul(..)) { '*' } else { '/' })?;
            write_at(f, b, NEG)
        }
        Expr::Pow(a, b) => {
            write_at(f, a, ATOM)?;
            f.write_char('^')?;
            write_short(f, b)
        }
        Expr::Poch { bases, nome, len } => {
            f.write_str("P(")?;
            for (i, b) in bases.iter().enumerate() {
                if i > 0 {
                    f.write_char(',')?;
                }
                write_expr(f, b)?;
            }
            f.write_char(';')?;
            write_expr(f, nome)?;
            f.write_str(")_")?;
            match len {
                None => f.write_str("inf"),
                Some(l) => write_short(f, l),
            }
        }
        Expr::J { a, m } => {
            f.write_str("J(")?;
            if let Some(a) = a {
                write_expr(f, a)?;
                f.write_char(',')?;
            }
            write_expr(f, m)?;
            f.write_char(')')
        }
        Expr::Theta { kind, j, m } => {
            f.write_str(if *kind == ThetaKind::H { "theta_h(" } else { "theta_g(" })?;
            write_expr(f, j)?;
            f.write_char(',')?;
            write_expr(f, m)?;
            f.write_char(')')
        }
        Expr::Nahm(n) => {
            let mut s = String::new();
            write_nahm(&mut s, n)?;
            f.write_str(&s)
        }
        Expr::Sum(n) => {
            let mut s = String::new();
            write_sum(&mut s, n)?;
            f.write_str(&s)
        }
        Expr::Subst(a, s) => {
            f.write_str("subst(")?;
            write_expr(f, a)?;
            match s {
                Subst::Signed => f.write_str(", q->-q)"),
                Subst::Power(m) if *m.denom() == 1 && *m.numer() > 0 => write!(f, ", q->q^{})", m.numer()),
                Subst::Power(m) => write!(f, ", q->q^({}))", fmt_exponent(*m)),
            }
        }
        Expr::Ct(a) => {
            f.write_str("CT_z(")?;
            write_expr(f, a)?;
            f.write_char(')')
        }
        Expr::XSet(a, b) => {
            f.write_str("xset(")?;
            write_expr(f, a)?;
            f.write_str(", x->")?;
            write_xbind(f, b)?;
            f.write_char(')')
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self)
    }
}
