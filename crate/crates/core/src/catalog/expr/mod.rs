//! Expression language for identity sides.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' ('-' atom | atom))?
//! atom   := integer | 'q' | 'x' | 'z' | index | '(' expr ')'
//!         | 'P(' expr (',' expr)* ';' expr ')_' ('inf' | integer | index | '(' expr ')')
//!         | 'J(' expr (',' expr)? ')' | 'theta_h(' expr ',' expr ')' | 'theta_g(' expr ',' expr ')'
//!         | 'nahm{' field (';' field)* '}'
//!         | 'sum{' range (',' range)* ('|' expr '=' expr)? (';' 'floor' '=' expr)? ':' expr '}'
//!         | 'subst(' expr ',' 'q->q' ('^' atom)? | 'q->-q' ')'
//!         | 'CT_z(' expr ')' | 'xset(' expr ',' 'x->' expr ')'
//! range  := index '=' bound '..' bound | index '>=' '0' | index 'in' 'Z'
//! field  := 'M=' matrix | 'A=' matrix | 'b=' list | 'c=' rational | 'd=' list
//!         | 'u=' monomials | 'parity=' [e|o|-]* | 'x=' list | 'step=' list | 'shift=' list
//! ```
//!
//! Index variables are lowercase identifiers other than `q`, `x`, `z`. In
//! `nahm{...}` the matrix `M` is the quadratic form, so the summand is
//! `q^(n^T M n / 2 + b.n + c) prod u_i^(n_i) / prod (q^(d_i); q^(d_i))_(s_i n_i + t_i)`
//! with `(s_i, t_i)` from `step` and `shift` (default `(1, 0)`).
//! Infinite sums declare a `floor`: every term must have q-valuation at least
//! `floor(n)`, which is what makes truncated enumeration exact.

mod ct;
mod eval;
mod parse;
mod print;

pub use eval::{evaluate, evaluate_in, Value};
pub(crate) use eval::{monomial_value, MonoVal};
pub use parse::parse_expr;

use crate::nahm::{Decoration, NahmQuadruple};
use crate::products::ThetaKind;
use crate::series::{Exponent, Monomial};

/// Expression tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    /// Non-negative integer literal.
    Num(i64),
    Q,
    X,
    Z,
    /// Summation index bound by an enclosing `sum`.
    Var(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    /// `(b_1, ..., b_k; nome)_len`, `len = None` for the infinite product.
    Poch { bases: Vec<Expr>, nome: Box<Expr>, len: Option<Box<Expr>> },
    /// `J(m)` or `J(a, m)`.
    J { a: Option<Box<Expr>>, m: Box<Expr> },
    Theta { kind: ThetaKind, j: Box<Expr>, m: Box<Expr> },
    Nahm(Box<NahmNode>),
    Sum(Box<SumNode>),
    Subst(Box<Expr>, Subst),
    Ct(Box<Expr>),
    XSet(Box<Expr>, XBind),
}

/// A decorated Nahm sum; `as_form` records whether it was written with `M` or `A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NahmNode {
    pub quad: NahmQuadruple,
    pub dec: Decoration,
    pub as_form: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Range {
    Finite(Expr, Expr),
    NonNegative,
    Integers,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SumVar {
    pub name: String,
    pub range: Range,
}

/// Multiple sum over index ranges with an optional linear constraint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SumNode {
    pub vars: Vec<SumVar>,
    pub constraint: Option<(Expr, Expr)>,
    pub floor: Option<Expr>,
    pub body: Expr,
}

/// `q -> q^m` or `q -> -q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Subst {
    Power(Exponent),
    Signed,
}

/// `x -> mono` or, with `keep_x`, `x -> mono * x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XBind {
    pub mono: Monomial,
    pub keep_x: bool,
}

impl XBind {
    /// The binding `inner` seen through the outer binding `self`.
    pub fn compose(&self, inner: &XBind) -> XBind {
        if inner.keep_x {
            XBind { mono: inner.mono.mul(&self.mono), keep_x: self.keep_x }
        } else {
            inner.clone()
        }
    }
}

impl Expr {
    pub fn num(n: i64) -> Expr {
        Expr::Num(n)
    }

    pub fn var(s: &str) -> Expr {
        Expr::Var(s.to_string())
    }

    /// Whether `z` occurs anywhere outside a nested `CT_z`.
    pub fn mentions_z(&self) -> bool {
        match self {
            Expr::Z => true,
            Expr::Num(_) | Expr::Q | Expr::X | Expr::Var(_) | Expr::Nahm(_) | Expr::Ct(_) => false,
            Expr::Neg(a) | Expr::Subst(a, _) | Expr::XSet(a, _) => a.mentions_z(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                a.mentions_z() || b.mentions_z()
            }
            Expr::Poch { bases, nome, len } => {
                bases.iter().any(Expr::mentions_z) || nome.mentions_z() || len.as_ref().is_some_and(|l| l.mentions_z())
            }
            Expr::J { a, m } => a.as_ref().is_some_and(|a| a.mentions_z()) || m.mentions_z(),
            Expr::Theta { j, m, .. } => j.mentions_z() || m.mentions_z(),
            Expr::Sum(s) => s.body.mentions_z(),
        }
    }

    /// Whether a free `x` occurs (one not bound by `xset`).
    pub fn mentions_x(&self) -> bool {
        match self {
            Expr::X => true,
            Expr::Num(_) | Expr::Q | Expr::Z | Expr::Var(_) => false,
            Expr::Nahm(n) => n.dec.x_grading.is_some(),
            Expr::XSet(a, b) => b.keep_x && a.mentions_x(),
            Expr::Neg(a) | Expr::Subst(a, _) | Expr::Ct(a) => a.mentions_x(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                a.mentions_x() || b.mentions_x()
            }
            Expr::Poch { bases, nome, .. } => bases.iter().any(Expr::mentions_x) || nome.mentions_x(),
            Expr::J { .. } | Expr::Theta { .. } => false,
            Expr::Sum(s) => s.body.mentions_x(),
        }
    }
}

#[cfg(test)]
mod tests;
