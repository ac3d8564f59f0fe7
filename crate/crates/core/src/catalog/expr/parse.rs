//! Recursive-descent parser. Errors carry the byte offset and what was expected.

use num_traits::{One, Zero};

use super::eval::{const_value, monomial_value};
use super::{Expr, NahmNode, Range, Subst, SumNode, SumVar, XBind};
use crate::error::{Error, Result};
use crate::nahm::{Decoration, NahmQuadruple, Parity};
use crate::products::ThetaKind;
use crate::series::rational::{parse_exponent, rational_to_exponent};
use crate::series::{Exponent, Monomial};

const MAX_DEPTH: usize = 200;

const RESERVED: &[&str] = &["q", "x", "z", "inf", "in", "floor", "P", "J", "theta_h", "theta_g", "nahm", "sum", "subst", "CT_z", "xset"];

/// Parse an expression; the whole input must be consumed.
pub fn parse_expr(src: &str) -> Result<Expr> {
    let mut p = Parser { src: src.as_bytes(), pos: 0, depth: 0 };
    let e = p.expr()?;
    p.ws();
    if p.pos < p.src.len() {
        return p.fail("an operator or end of input");
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    depth: usize,
}

impl<'a> Parser<'a> {
    fn fail<T>(&self, expected: &str) -> Result<T> {
        Err(Error::Parse { offset: self.pos, expected: expected.to_string() })
    }

    fn fail_at<T>(&self, offset: usize, expected: &str) -> Result<T> {
        Err(Error::Parse { offset, expected: expected.to_string() })
    }

    fn ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, s: &str) -> bool {
        self.ws();
        if self.src[self.pos..].starts_with(s.as_bytes()) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<()> {
        if self.eat(s) {
            Ok(())
        } else {
            self.fail(&format!("`{s}`"))
        }
    }

    fn ident(&mut self) -> Option<String> {
        self.ws();
        let start = self.pos;
        match self.src.get(self.pos) {
            Some(c) if c.is_ascii_alphabetic() || *c == b'_' => {}
            _ => return None,
        }
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        Some(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn integer(&mut self) -> Result<i64> {
        self.ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.fail("an integer");
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .map_or_else(|| self.fail_at(start, "an integer that fits in 64 bits"), Ok)
    }

    fn enter(&mut self) -> Result<()> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return self.fail("less deeply nested input");
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Expr> {
        self.enter()?;
        let mut e = self.term()?;
        loop {
            if self.eat("+") {
                e = Expr::Add(Box::new(e), Box::new(self.term()?));
            } else if self.peek() == Some(b'-') && !self.src[self.pos..].starts_with(b"->") {
                self.pos += 1;
                e = Expr::Sub(Box::new(e), Box::new(self.term()?));
            } else {
                break;
            }
        }
        self.depth -= 1;
        Ok(e)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut e = self.unary()?;
        loop {
            if self.eat("*") {
                e = Expr::Mul(Box::new(e), Box::new(self.unary()?));
            } else if self.eat("/") {
                e = Expr::Div(Box::new(e), Box::new(self.unary()?));
            } else {
                break;
            }
        }
        Ok(e)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat("-") {
            self.enter()?;
            let e = Expr::Neg(Box::new(self.unary()?));
            self.depth -= 1;
            return Ok(e);
        }
        let base = self.atom()?;
        if self.eat("^") {
            let ex = self.signed_atom()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(ex)));
        }
        Ok(base)
    }

    fn signed_atom(&mut self) -> Result<Expr> {
        if self.eat("-") {
            Ok(Expr::Neg(Box::new(self.atom()?)))
        } else {
            self.atom()
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        const EXPECTED: &str = "a number, `q`, `x`, `z`, an index, `(` or a function such as `P(`";
        match self.peek() {
            None => return self.fail(EXPECTED),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(")")?;
                return Ok(e);
            }
            Some(c) if c.is_ascii_digit() => return Ok(Expr::Num(self.integer()?)),
            _ => {}
        }
        let start = self.pos;
        let Some(id) = self.ident() else {
            return self.fail(EXPECTED);
        };
        match id.as_str() {
            "q" => Ok(Expr::Q),
            "x" => Ok(Expr::X),
            "z" => Ok(Expr::Z),
            "P" => self.pochhammer(),
            "J" => {
                self.expect("(")?;
                let first = self.expr()?;
                let e = if self.eat(",") {
                    let m = self.expr()?;
                    Expr::J { a: Some(Box::new(first)), m: Box::new(m) }
                } else {
                    Expr::J { a: None, m: Box::new(first) }
                };
                self.expect(")")?;
                Ok(e)
            }
            "theta_h" | "theta_g" => {
                let kind = if id == "theta_h" { ThetaKind::H } else { ThetaKind::G };
                self.expect("(")?;
                let j = self.expr()?;
                self.expect(",")?;
                let m = self.expr()?;
                self.expect(")")?;
                Ok(Expr::Theta { kind, j: Box::new(j), m: Box::new(m) })
            }
            "nahm" => self.nahm(),
            "sum" => self.sum(),
            "subst" => self.subst(),
            "CT_z" => {
                self.expect("(")?;
                let e = self.expr()?;
                self.expect(")")?;
                Ok(Expr::Ct(Box::new(e)))
            }
            "xset" => self.xset(),
            _ if is_index(&id) => Ok(Expr::Var(id)),
            _ => self.fail_at(start, EXPECTED),
        }
    }

    fn pochhammer(&mut self) -> Result<Expr> {
        self.expect("(")?;
        let mut bases = vec![self.expr()?];
        while self.eat(",") {
            bases.push(self.expr()?);
        }
        self.expect(";")?;
        let nome = self.expr()?;
        self.expect(")")?;
        self.expect("_")?;
        let len = match self.peek() {
            Some(b'-') => return self.fail("a non-negative length"),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(")")?;
                Some(Box::new(e))
            }
            Some(c) if c.is_ascii_digit() => Some(Box::new(Expr::Num(self.integer()?))),
            _ => {
                let start = self.pos;
                match self.ident() {
                    Some(s) if s == "inf" => None,
                    Some(s) if is_index(&s) => Some(Box::new(Expr::Var(s))),
                    _ => return self.fail_at(start, "`inf`, an integer, an index or `(`"),
                }
            }
        };
        Ok(Expr::Poch { bases, nome: Box::new(nome), len })
    }

    fn bound(&mut self) -> Result<Expr> {
        self.signed_atom()
    }

    fn sum(&mut self) -> Result<Expr> {
        self.expect("{")?;
        let mut vars = Vec::new();
        loop {
            let start = self.pos;
            let Some(name) = self.ident().filter(|s| is_index(s)) else {
                return self.fail_at(start, "an index name");
            };
            let range = if self.eat(">=") {
                let at = self.pos;
                if self.integer()? != 0 {
                    return self.fail_at(at, "`0`");
                }
                Range::NonNegative
            } else if self.eat("=") {
                let lo = self.bound()?;
                self.expect("..")?;
                let hi = self.bound()?;
                Range::Finite(lo, hi)
            } else {
                let at = self.pos;
                if self.ident().as_deref() != Some("in") {
                    return self.fail_at(at, "`=`, `>=` or `in`");
                }
                let at = self.pos;
                if self.ident().as_deref() != Some("Z") {
                    return self.fail_at(at, "`Z`");
                }
                Range::Integers
            };
            vars.push(SumVar { name, range });
            if !self.eat(",") {
                break;
            }
        }
        let constraint = if self.eat("|") {
            let l = self.expr()?;
            self.expect("=")?;
            let r = self.expr()?;
            Some((l, r))
        } else {
            None
        };
        let floor = if self.eat(";") {
            let at = self.pos;
            if self.ident().as_deref() != Some("floor") {
                return self.fail_at(at, "`floor`");
            }
            self.expect("=")?;
            Some(self.expr()?)
        } else {
            None
        };
        self.expect(":")?;
        let body = self.expr()?;
        self.expect("}")?;
        let node = SumNode { vars, constraint, floor, body };
        validate_sum(&node).map_err(|msg| Error::Parse { offset: self.pos, expected: msg })?;
        Ok(Expr::Sum(Box::new(node)))
    }

    fn subst(&mut self) -> Result<Expr> {
        self.expect("(")?;
        let e = self.expr()?;
        self.expect(",")?;
        self.expect("q")?;
        self.expect("->")?;
        let s = if self.eat("-") {
            self.expect("q")?;
            Subst::Signed
        } else {
            self.expect("q")?;
            if self.eat("^") {
                let at = self.pos;
                let ex = self.signed_atom()?;
                let m = const_value(&ex, &[])
                    .and_then(|r| rational_to_exponent(&r))
                    .or_else(|_| self.fail_at(at, "a constant exponent"))?;
                if m <= Exponent::zero() {
                    return self.fail_at(at, "a positive exponent");
                }
                Subst::Power(m)
            } else {
                Subst::Power(Exponent::one())
            }
        };
        self.expect(")")?;
        Ok(Expr::Subst(Box::new(e), s))
    }

    fn xset(&mut self) -> Result<Expr> {
        self.expect("(")?;
        let e = self.expr()?;
        self.expect(",")?;
        self.expect("x")?;
        self.expect("->")?;
        let at = self.pos;
        let target = self.expr()?;
        let bind = monomial_value(&target, &[], None)
            .ok()
            .flatten()
            .filter(|m| m.z == 0 && (m.x == 0 || m.x == 1))
            .map(|m| XBind { mono: m.mono, keep_x: m.x == 1 });
        let Some(bind) = bind else {
            return self.fail_at(at, "a q-monomial, optionally times `x`");
        };
        self.expect(")")?;
        Ok(Expr::XSet(Box::new(e), bind))
    }

    /// Raw token up to a delimiter at bracket depth 0.
    fn token(&mut self, stops: &[u8]) -> (usize, String) {
        self.ws();
        let start = self.pos;
        let mut depth = 0i32;
        while let Some(&c) = self.src.get(self.pos) {
            if depth == 0 && stops.contains(&c) {
                break;
            }
            match c {
                b'(' => depth += 1,
                b')' => depth -= 1,
                _ => {}
            }
            self.pos += 1;
        }
        (start, String::from_utf8_lossy(&self.src[start..self.pos]).trim().to_string())
    }

    fn list<T>(&mut self, mut item: impl FnMut(&mut Self) -> Result<T>) -> Result<Vec<T>> {
        self.expect("[")?;
        let mut out = Vec::new();
        if self.eat("]") {
            return Ok(out);
        }
        loop {
            out.push(item(self)?);
            if self.eat("]") {
                return Ok(out);
            }
            if !self.eat(",") {
                return self.fail("`,` or `]`");
            }
        }
    }

    fn rational(&mut self) -> Result<Exponent> {
        let (at, tok) = self.token(b",];}");
        parse_exponent(&tok).or_else(|_| self.fail_at(at, "a rational such as -3/2"))
    }

    fn int_item(&mut self) -> Result<i64> {
        let (at, tok) = self.token(b",];}");
        tok.parse().or_else(|_| self.fail_at(at, "an integer"))
    }

    fn nahm(&mut self) -> Result<Expr> {
        self.expect("{")?;
        let open = self.pos;
        let mut mat: Option<(bool, Vec<Vec<Exponent>>)> = None;
        let mut b = None;
        let mut c = Exponent::zero();
        let mut d = None;
        let mut dec = Decoration::default();
        let mut step: Option<Vec<i64>> = None;
        let mut shift: Option<Vec<i64>> = None;
        loop {
            let at = self.pos;
            let Some(field) = self.ident() else {
                return self.fail("a field name (M, A, b, c, d, u, parity, x, step, shift)");
            };
            self.expect("=")?;
            match field.as_str() {
                "M" | "A" => mat = Some((field == "M", self.list(|p| p.list(Parser::rational))?)),
                "b" => b = Some(self.list(Parser::rational)?),
                "c" => c = self.rational()?,
                "d" => d = Some(self.list(Parser::int_item)?),
                "u" => {
                    dec.weights = self.list(|p| {
                        let (at, tok) = p.token(b",]");
                        Monomial::parse(&tok).or_else(|_| p.fail_at(at, "a monomial such as -q^(1/2)"))
                    })?
                }
                "parity" => {
                    dec.parity = self.list(|p| {
                        let (at, tok) = p.token(b",]");
                        match tok.as_str() {
                            "e" => Ok(Some(Parity::Even)),
                            "o" => Ok(Some(Parity::Odd)),
                            "-" => Ok(None),
                            _ => p.fail_at(at, "`e`, `o` or `-`"),
                        }
                    })?
                }
                "x" => dec.x_grading = Some(self.list(Parser::int_item)?),
                "step" => step = Some(self.list(Parser::int_item)?),
                "shift" => shift = Some(self.list(Parser::int_item)?),
                _ => return self.fail_at(at, "a field name (M, A, b, c, d, u, parity, x, step, shift)"),
            }
            if self.eat("}") {
                break;
            }
            self.expect(";")?;
        }
        let Some((as_form, m)) = mat else {
            return self.fail_at(open, "an `M=` or `A=` field");
        };
        let r = m.len();
        let d = d.unwrap_or_else(|| vec![1; r]);
        let b = b.unwrap_or_else(|| vec![Exponent::zero(); r]);
        if step.is_some() || shift.is_some() {
            let step = step.unwrap_or_else(|| vec![1; r]);
            let shift = shift.unwrap_or_else(|| vec![0; r]);
            if step.len() != r || shift.len() != r {
                return self.fail_at(open, "`step` and `shift` of the same length as `d`");
            }
            dec.den_index = step.into_iter().zip(shift).collect();
        }
        let quad = if as_form { NahmQuadruple::from_form(m, b, c, d) } else { NahmQuadruple::new(m, b, c, d) };
        let quad = quad.map_err(|e| Error::Parse { offset: open, expected: format!("a valid quadruple ({e})") })?;
        let node = NahmNode { quad, dec, as_form };
        check_nahm(&node).map_err(|msg| Error::Parse { offset: open, expected: msg })?;
        Ok(Expr::Nahm(Box::new(node)))
    }
}

fn is_index(s: &str) -> bool {
    s.starts_with(|c: char| c.is_ascii_lowercase()) && !RESERVED.contains(&s)
}

fn check_nahm(n: &NahmNode) -> std::result::Result<(), String> {
    let r = n.quad.rank();
    let dec = &n.dec;
    if !dec.weights.is_empty() && dec.weights.len() != r {
        return Err(format!("{r} weights"));
    }
    if !dec.parity.is_empty() && dec.parity.len() != r {
        return Err(format!("{r} parity entries"));
    }
    if dec.x_grading.as_ref().is_some_and(|g| g.len() != r || g.iter().any(|&v| v < 0)) {
        return Err(format!("{r} non-negative x-grades"));
    }
    if dec.den_index.iter().any(|&(s, t)| s < 1 || t < 0) {
        return Err("steps >= 1 and shifts >= 0".into());
    }
    Ok(())
}

fn validate_sum(s: &SumNode) -> std::result::Result<(), String> {
    let infinite: Vec<usize> =
        s.vars.iter().enumerate().filter(|(_, v)| !matches!(v.range, Range::Finite(..))).map(|(i, _)| i).collect();
    if infinite.len() > 1 || infinite.first().is_some_and(|&i| i + 1 != s.vars.len()) {
        return Err("at most one unbounded index, listed last".into());
    }
    if !infinite.is_empty() && s.floor.is_none() {
        return Err("a `floor=` declaration for the unbounded index".into());
    }
    let mut names: Vec<&str> = s.vars.iter().map(|v| v.name.as_str()).collect();
    names.sort_unstable();
    if names.windows(2).any(|w| w[0] == w[1]) {
        return Err("distinct index names".into());
    }
    Ok(())
}
