//! Evaluation of expression trees to truncated series.
//!
//! Every node is evaluated at a requested q-order and reports the order it
//! actually reached; products re-request operands whose valuation turned out
//! negative, and the top level retries with a raised order until the target
//! is met.

use num_traits::{One, ToPrimitive, Zero};

use super::ct::{eval_ct, EulerFactor};
use super::{Expr, NahmNode, Range, Subst, SumNode, XBind};
use crate::error::{Error, Result};
use crate::nahm::{nahm_sum, nahm_sum_bivariate};
use crate::products::{eval_product, j_factor, jam_factors, quadratic_range, theta_series, ProductExpr, ProductFactor};
use crate::series::rational::{exp_int, fmt_exponent, rational_to_exponent};
use crate::series::{BiSeries, Exponent, Monomial, QSeries, Rational};

/// A univariate or bivariate result.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Q(QSeries),
    X(BiSeries),
}

impl Value {
    pub fn order(&self) -> Exponent {
        match self {
            Value::Q(s) => s.order(),
            Value::X(s) => s.q_order(),
        }
    }

    pub fn valuation(&self) -> Exponent {
        match self {
            Value::Q(s) => s.valuation(),
            Value::X(s) => s.valuation(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Value::Q(s) => s.is_zero(),
            Value::X(s) => s.is_zero(),
        }
    }

    pub fn truncate(&self, order: Exponent) -> Value {
        match self {
            Value::Q(s) => Value::Q(s.truncate(order)),
            Value::X(s) => Value::X(s.truncate(s.x_order(), order)),
        }
    }

    pub fn as_qseries(&self) -> Result<&QSeries> {
        match self {
            Value::Q(s) => Ok(s),
            Value::X(_) => Err(Error::InvalidArgument("expected a univariate series, found one in x".into())),
        }
    }

    fn pair(&self, other: &Value) -> (BiSeries, BiSeries) {
        match (self, other) {
            (Value::X(a), Value::X(b)) => (a.clone(), b.clone()),
            (Value::X(a), Value::Q(b)) => (a.clone(), BiSeries::from_qseries(b, a.x_order())),
            (Value::Q(a), Value::X(b)) => (BiSeries::from_qseries(a, b.x_order()), b.clone()),
            (Value::Q(_), Value::Q(_)) => unreachable!("pair is only used for mixed values"),
        }
    }

    pub fn add(&self, other: &Value) -> Value {
        match (self, other) {
            (Value::Q(a), Value::Q(b)) => Value::Q(a.add(b)),
            _ => {
                let (a, b) = self.pair(other);
                Value::X(a.add(&b))
            }
        }
    }

    pub fn neg(&self) -> Value {
        match self {
            Value::Q(s) => Value::Q(s.neg()),
            Value::X(s) => Value::X(s.neg()),
        }
    }

    pub fn sub(&self, other: &Value) -> Value {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Value) -> Value {
        match (self, other) {
            (Value::Q(a), Value::Q(b)) => Value::Q(a.mul(b)),
            _ => {
                let (a, b) = self.pair(other);
                Value::X(a.mul(&b))
            }
        }
    }

    pub fn scalar_mul(&self, c: &Rational) -> Value {
        match self {
            Value::Q(s) => Value::Q(s.scalar_mul(c)),
            Value::X(s) => Value::X(s.scalar_mul(c)),
        }
    }

    pub fn invert(&self) -> Result<Value> {
        match self {
            Value::Q(s) => Ok(Value::Q(s.invert()?)),
            Value::X(s) => Ok(Value::X(s.invert()?)),
        }
    }

    pub fn pow(&self, k: i64) -> Result<Value> {
        match self {
            Value::Q(s) => Ok(Value::Q(s.pow(k)?)),
            Value::X(s) => Ok(Value::X(s.pow(k)?)),
        }
    }

    fn substitute(&self, s: &Subst) -> Result<Value> {
        Ok(match (self, s) {
            (Value::Q(v), Subst::Power(m)) => Value::Q(v.substitute_power(*m)?),
            (Value::Q(v), Subst::Signed) => Value::Q(v.substitute_signed()?),
            (Value::X(v), Subst::Power(m)) => Value::X(v.substitute_power(*m)?),
            (Value::X(v), Subst::Signed) => Value::X(v.substitute_signed()?),
        })
    }
}

/// Evaluation context: bound indices, the active x-binding and the x-order.
#[derive(Clone, Debug, Default)]
pub(super) struct Ctx {
    pub env: Vec<(String, i64)>,
    pub bind: Option<XBind>,
    pub x_order: Option<i64>,
}

/// A monomial `c q^e x^a z^b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct MonoVal {
    pub mono: Monomial,
    pub x: i64,
    pub z: i64,
}

impl MonoVal {
    fn constant(c: Rational) -> Self {
        MonoVal { mono: Monomial::constant(c), x: 0, z: 0 }
    }

    fn is_constant(&self) -> bool {
        self.x == 0 && self.z == 0 && self.mono.exp.is_zero()
    }
}

fn lookup(env: &[(String, i64)], name: &str) -> Result<i64> {
    env.iter()
        .rev()
        .find(|(n, _)| n == name)
        .map(|(_, v)| *v)
        .ok_or_else(|| Error::UnknownId(name.to_string()))
}

fn not_constant(e: &Expr) -> Error {
    Error::InvalidArgument(format!("`{e}` is not a constant"))
}

/// Value of an expression built from integers and bound indices.
pub(crate) fn const_value(e: &Expr, env: &[(String, i64)]) -> Result<Rational> {
    match monomial_value(e, env, None)? {
        Some(m) if m.is_constant() => Ok(m.mono.coeff),
        _ => Err(not_constant(e)),
    }
}

fn const_int(e: &Expr, env: &[(String, i64)]) -> Result<i64> {
    let r = const_value(e, env)?;
    if !r.is_integer() {
        return Err(Error::InvalidArgument(format!("`{e}` must be an integer, found {r}")));
    }
    r.to_integer().to_i64().ok_or_else(|| Error::InvalidArgument(format!("`{e}` is out of range")))
}

fn const_exponent(e: &Expr, env: &[(String, i64)]) -> Result<Exponent> {
    rational_to_exponent(&const_value(e, env)?)
}

/// The monomial an expression denotes, or `None` if it is not a monomial.
pub(crate) fn monomial_value(e: &Expr, env: &[(String, i64)], bind: Option<&XBind>) -> Result<Option<MonoVal>> {
    Ok(Some(match e {
        Expr::Num(n) => MonoVal::constant(Rational::from_integer((*n).into())),
        Expr::Var(v) => MonoVal::constant(Rational::from_integer(lookup(env, v)?.into())),
        Expr::Q => MonoVal { mono: Monomial::qi(1), x: 0, z: 0 },
        Expr::X => match bind {
            Some(b) => MonoVal { mono: b.mono.clone(), x: i64::from(b.keep_x), z: 0 },
            None => MonoVal { mono: Monomial::one(), x: 1, z: 0 },
        },
        Expr::Z => MonoVal { mono: Monomial::one(), x: 0, z: 1 },
        Expr::Neg(a) => match monomial_value(a, env, bind)? {
            Some(m) => MonoVal { mono: m.mono.neg(), ..m },
            None => return Ok(None),
        },
        Expr::Mul(a, b) | Expr::Div(a, b) => {
            let Some(ma) = monomial_value(a, env, bind)? else {
                return Ok(None);
            };
            let Some(mb) = monomial_value(b, env, bind)? else {
                return Ok(None);
            };
            if matches!(e, Expr::Mul(..)) {
                MonoVal { mono: ma.mono.mul(&mb.mono), x: ma.x + mb.x, z: ma.z + mb.z }
            } else {
                if mb.mono.is_zero() {
                    return Err(Error::ZeroDenominator(format!("division by zero in `{e}`")));
                }
                MonoVal { mono: ma.mono.mul(&mb.mono.pow(-1)?), x: ma.x - mb.x, z: ma.z - mb.z }
            }
        }
        Expr::Add(a, b) | Expr::Sub(a, b) => {
            let Some(ma) = monomial_value(a, env, bind)? else {
                return Ok(None);
            };
            let Some(mb) = monomial_value(b, env, bind)? else {
                return Ok(None);
            };
            if !ma.is_constant() || !mb.is_constant() {
                return Ok(None);
            }
            let c = if matches!(e, Expr::Add(..)) { ma.mono.coeff + mb.mono.coeff } else { ma.mono.coeff - mb.mono.coeff };
            MonoVal::constant(c)
        }
        Expr::Pow(a, k) => {
            let Some(ma) = monomial_value(a, env, bind)? else {
                return Ok(None);
            };
            let k = const_value(k, env)?;
            if k.is_integer() {
                let k = k.to_integer().to_i64().ok_or_else(|| Error::InvalidArgument("power out of range".into()))?;
                MonoVal { mono: ma.mono.pow(k)?, x: ma.x * k, z: ma.z * k }
            } else if ma.x == 0 && ma.z == 0 && ma.mono.coeff.is_one() {
                MonoVal { mono: Monomial::q(ma.mono.exp * rational_to_exponent(&k)?), x: 0, z: 0 }
            } else {
                return Err(Error::InvalidArgument(format!("fractional power of `{a}`")));
            }
        }
        _ => return Ok(None),
    }))
}

/// Evaluate to q-order `order`; bivariate results need `x_order`.
pub fn evaluate(e: &Expr, order: Exponent, x_order: Option<i64>) -> Result<Value> {
    evaluate_in(e, order, x_order, &[])
}

/// [`evaluate`] with free indices bound to the integers in `env`.
pub fn evaluate_in(e: &Expr, order: Exponent, x_order: Option<i64>, env: &[(String, i64)]) -> Result<Value> {
    let ctx = Ctx { x_order, env: env.to_vec(), ..Ctx::default() };
    let mut n = order;
    for _ in 0..10 {
        let v = eval_at(e, n, &ctx)?;
        if v.order() >= order {
            return Ok(v.truncate(order));
        }
        n += order - v.order();
    }
    Err(Error::NoConvergence(format!("could not reach O(q^{}) for `{e}`", fmt_exponent(order))))
}

fn mono_value(m: &MonoVal, n: Exponent, ctx: &Ctx) -> Result<Value> {
    if m.z != 0 {
        return Err(Error::InvalidArgument("`z` may only appear inside CT_z".into()));
    }
    if m.x < 0 {
        return Err(Error::InvalidArgument("negative power of x".into()));
    }
    if m.x > 0 {
        let xo = x_order(ctx)?;
        return Ok(Value::X(BiSeries::monomial(&m.mono, m.x, xo, n)));
    }
    Ok(Value::Q(QSeries::monomial(&m.mono, n)))
}

fn x_order(ctx: &Ctx) -> Result<i64> {
    ctx.x_order
        .ok_or_else(|| Error::InvalidArgument("expression depends on x; an x-order is required".into()))
}

/// Multiply two lazily evaluated operands so that the product is valid to `n`.
pub(super) fn mul_pair(
    n: Exponent,
    fa: &dyn Fn(Exponent) -> Result<Value>,
    fb: &dyn Fn(Exponent) -> Result<Value>,
) -> Result<Value> {
    let mut a = fa(n)?;
    for _ in 0..4 {
        let b = fb(n - a.valuation().min(n))?;
        let need = n - b.valuation();
        if need <= a.order() {
            return Ok(a.mul(&b).truncate(n));
        }
        a = fa(need)?;
    }
    let b = fb(n - a.valuation().min(n))?;
    Ok(a.mul(&b).truncate(n))
}

/// `1 / e` valid to `t`.
fn inverse_at(e: &Expr, t: Exponent, ctx: &Ctx) -> Result<Value> {
    let probe = eval_at(e, t, ctx)?;
    if probe.is_zero() {
        return Err(Error::ZeroDenominator(format!("`{e}` vanishes to O(q^{})", fmt_exponent(probe.order()))));
    }
    let v = probe.valuation();
    let need = t + v + v;
    let b = if need > probe.order() { eval_at(e, need, ctx)? } else { probe };
    b.invert()
}

fn product_of(e: &Expr, ctx: &Ctx) -> Result<Option<ProductExpr>> {
    match e {
        Expr::J { a, m } => {
            let m = const_int(m, &ctx.env)?;
            if m <= 0 {
                return Err(Error::InvalidArgument(format!("J needs a positive modulus, got {m}")));
            }
            let factors = match a {
                None => vec![j_factor(m, 1)],
                Some(a) => jam_factors(const_int(a, &ctx.env)?, m, 1),
            };
            Ok(Some(ProductExpr::new(Monomial::one(), factors)))
        }
        Expr::Poch { bases, nome, len } => {
            let nome = q_monomial(nome, ctx)?;
            let len = length(len.as_deref(), ctx)?;
            let mut factors = Vec::with_capacity(bases.len());
            for b in bases {
                let m = monomial_value(b, &ctx.env, ctx.bind.as_ref())?
                    .ok_or_else(|| Error::InvalidArgument(format!("Pochhammer base `{b}` is not a monomial")))?;
                if m.x != 0 || m.z != 0 {
                    return Ok(None);
                }
                factors.push(ProductFactor { base: m.mono, nome: nome.clone(), power: 1, len });
            }
            Ok(Some(ProductExpr::new(Monomial::one(), factors)))
        }
        _ => Ok(None),
    }
}

pub(super) fn q_monomial(e: &Expr, ctx: &Ctx) -> Result<Monomial> {
    match monomial_value(e, &ctx.env, ctx.bind.as_ref())? {
        Some(m) if m.x == 0 && m.z == 0 => Ok(m.mono),
        _ => Err(Error::InvalidArgument(format!("`{e}` must be a q-monomial"))),
    }
}

pub(super) fn length(len: Option<&Expr>, ctx: &Ctx) -> Result<Option<usize>> {
    let Some(l) = len else { return Ok(None) };
    let v = const_int(l, &ctx.env)?;
    if v < 0 {
        return Err(Error::InvalidArgument(format!("negative Pochhammer length {v}")));
    }
    Ok(Some(v as usize))
}

fn pow_product(p: &ProductExpr, k: i64, n: Exponent) -> Result<Value> {
    let mut p = p.clone();
    for f in &mut p.factors {
        f.power *= k;
    }
    Ok(Value::Q(eval_product(&p, n)?))
}

pub(super) fn eval_at(e: &Expr, n: Exponent, ctx: &Ctx) -> Result<Value> {
    if let Some(m) = monomial_value(e, &ctx.env, ctx.bind.as_ref())? {
        return mono_value(&m, n, ctx);
    }
    match e {
        Expr::Add(a, b) => Ok(eval_at(a, n, ctx)?.add(&eval_at(b, n, ctx)?)),
        Expr::Sub(a, b) => Ok(eval_at(a, n, ctx)?.sub(&eval_at(b, n, ctx)?)),
        Expr::Neg(a) => Ok(eval_at(a, n, ctx)?.neg()),
        Expr::Mul(a, b) => mul_pair(n, &|t| eval_at(a, t, ctx), &|t| eval_at(b, t, ctx)),
        Expr::Div(a, b) => mul_pair(n, &|t| eval_at(a, t, ctx), &|t| inverse_at(b, t, ctx)),
        Expr::Pow(a, k) => {
            let k = const_int(k, &ctx.env)?;
            if let Some(p) = product_of(a, ctx)? {
                return pow_product(&p, k, n);
            }
            eval_pow(a, k, n, ctx)
        }
        Expr::J { .. } | Expr::Poch { .. } => match product_of(e, ctx)? {
            Some(p) => pow_product(&p, 1, n),
            None => eval_x_pochhammer(e, n, ctx),
        },
        Expr::Theta { kind, j, m } => {
            Ok(Value::Q(theta_series(*kind, const_exponent(j, &ctx.env)?, const_exponent(m, &ctx.env)?, n)?))
        }
        Expr::Nahm(node) => eval_nahm(node, n, ctx),
        Expr::Sum(node) => eval_sum(node, n, ctx),
        Expr::Subst(a, s) => {
            let inner = match s {
                Subst::Power(m) => n / *m,
                Subst::Signed => n,
            };
            eval_at(a, inner, ctx)?.substitute(s)
        }
        Expr::Ct(a) => eval_ct(a, n, ctx),
        Expr::XSet(a, b) => {
            let bind = match &ctx.bind {
                Some(outer) => outer.compose(b),
                None => b.clone(),
            };
            let inner = Ctx { bind: Some(bind), ..ctx.clone() };
            eval_at(a, n, &inner)
        }
        Expr::Z => Err(Error::InvalidArgument("`z` may only appear inside CT_z".into())),
        Expr::Num(_) | Expr::Q | Expr::X | Expr::Var(_) => unreachable!("monomials are handled above"),
    }
}

fn eval_pow(a: &Expr, k: i64, n: Exponent, ctx: &Ctx) -> Result<Value> {
    if k == 0 {
        return Ok(Value::Q(QSeries::one(n)));
    }
    let p = k.unsigned_abs() as i64;
    if k > 0 {
        let probe = eval_at(a, n, ctx)?;
        let v = probe.valuation();
        let need = n - v * exp_int(p - 1);
        let base = if need > probe.order() { eval_at(a, need, ctx)? } else { probe };
        return Ok(base.pow(p)?.truncate(n));
    }
    let probe = eval_at(a, n, ctx)?;
    let v = probe.valuation().max(Exponent::zero());
    let inv = inverse_at(a, n + v * exp_int(p - 1), ctx)?;
    Ok(inv.pow(p)?.truncate(n))
}

/// A Pochhammer symbol some of whose bases carry a power of `x`.
fn eval_x_pochhammer(e: &Expr, n: Exponent, ctx: &Ctx) -> Result<Value> {
    let Expr::Poch { bases, nome, len } = e else {
        unreachable!("only Pochhammer symbols reach here")
    };
    let xo = x_order(ctx)?;
    let nome = q_monomial(nome, ctx)?;
    let len = length(len.as_deref(), ctx)?;
    let mut factors: Vec<Box<dyn Fn(Exponent) -> Result<Value> + '_>> = Vec::new();
    for b in bases {
        let m = monomial_value(b, &ctx.env, ctx.bind.as_ref())?
            .ok_or_else(|| Error::InvalidArgument(format!("Pochhammer base `{b}` is not a monomial")))?;
        if m.z != 0 {
            return Err(Error::InvalidArgument("`z` may only appear inside CT_z".into()));
        }
        if m.x < 0 {
            return Err(Error::InvalidArgument("negative power of x in a Pochhammer base".into()));
        }
        let nome = nome.clone();
        if m.x == 0 {
            let f = ProductFactor { base: m.mono, nome, power: 1, len };
            factors.push(Box::new(move |t| Ok(Value::Q(f.eval(t)?))));
        } else {
            let ef = EulerFactor { coeff: m.mono, nome, len, inverse: false };
            let a = m.x;
            factors.push(Box::new(move |t| Ok(Value::X(ef.x_series(a, xo, t)?))));
        }
    }
    let mut acc: Box<dyn Fn(Exponent) -> Result<Value> + '_> = Box::new(|t| Ok(Value::Q(QSeries::one(t))));
    for f in factors {
        acc = Box::new(move |t| mul_pair(t, &acc, &f));
    }
    acc(n)
}

fn eval_nahm(node: &NahmNode, n: Exponent, ctx: &Ctx) -> Result<Value> {
    let mut dec = node.dec.clone();
    if let (Some(g), Some(b)) = (&node.dec.x_grading, &ctx.bind) {
        let mut w = Vec::with_capacity(g.len());
        for (i, &gi) in g.iter().enumerate() {
            let base = dec.weights.get(i).cloned().unwrap_or_else(Monomial::one);
            w.push(base.mul(&b.mono.pow(gi)?));
        }
        dec.weights = w;
        if !b.keep_x {
            dec.x_grading = None;
        }
    }
    if dec.x_grading.is_some() {
        Ok(Value::X(nahm_sum_bivariate(&node.quad, &dec, x_order(ctx)?, n)?))
    } else {
        Ok(Value::Q(nahm_sum(&node.quad, &dec, n)?))
    }
}

fn zero_like(n: Exponent, ctx: &Ctx, bivariate: bool) -> Result<Value> {
    if bivariate {
        Ok(Value::X(BiSeries::zero(x_order(ctx)?, n)))
    } else {
        Ok(Value::Q(QSeries::zero(n)))
    }
}

fn eval_sum(node: &SumNode, n: Exponent, ctx: &Ctx) -> Result<Value> {
    let mut ctx = ctx.clone();
    let mut acc: Option<Value> = None;
    sum_rec(node, 0, n, &mut ctx, &mut acc)?;
    match acc {
        Some(v) => Ok(v),
        None => zero_like(n, &ctx, false),
    }
}

fn accumulate(acc: &mut Option<Value>, v: Value) {
    *acc = Some(match acc.take() {
        Some(a) => a.add(&v),
        None => v,
    });
}

/// Coefficients `(a, b, c)` of the floor `a k^2 + b k + c` in the index `name`.
fn floor_quadratic(floor: &Expr, name: &str, ctx: &Ctx) -> Result<(Exponent, Exponent, Exponent)> {
    let at = |k: i64| -> Result<Exponent> {
        let mut env = ctx.env.clone();
        env.push((name.to_string(), k));
        const_exponent(floor, &env)
    };
    let (f0, f1, f2, f3) = (at(0)?, at(1)?, at(2)?, at(-1)?);
    let a = (f2 - f1 - f1 + f0) / exp_int(2);
    let b = f1 - f0 - a;
    if a + f0 - b != f3 || a * exp_int(9) + b * exp_int(3) + f0 != at(3)? {
        return Err(Error::InvalidArgument(format!("floor `{floor}` must be at most quadratic in {name}")));
    }
    Ok((a, b, f0))
}

fn sum_rec(node: &SumNode, depth: usize, n: Exponent, ctx: &mut Ctx, acc: &mut Option<Value>) -> Result<()> {
    if depth == node.vars.len() {
        if let Some((l, r)) = &node.constraint {
            if const_value(l, &ctx.env)? != const_value(r, &ctx.env)? {
                return Ok(());
            }
        }
        let term = eval_at(&node.body, n, ctx)?;
        if let Some(fl) = &node.floor {
            let bound = const_exponent(fl, &ctx.env)?;
            if !term.is_zero() && term.valuation() < bound {
                return Err(Error::InvalidArgument(format!(
                    "summand at {:?} has valuation {} below the declared floor {}",
                    ctx.env,
                    fmt_exponent(term.valuation()),
                    fmt_exponent(bound)
                )));
            }
        }
        accumulate(acc, term);
        return Ok(());
    }
    let var = &node.vars[depth];
    let (lo, hi) = match &var.range {
        Range::Finite(lo, hi) => (const_int(lo, &ctx.env)?, const_int(hi, &ctx.env)?),
        Range::NonNegative | Range::Integers => {
            let fl = node.floor.as_ref().expect("validated at parse time");
            let (a, b, c) = floor_quadratic(fl, &var.name, ctx)?;
            let bilateral = matches!(var.range, Range::Integers);
            let range = if a > Exponent::zero() {
                quadratic_range(a, b, c, n).map(|(lo, hi)| if bilateral { (lo, hi) } else { (lo.max(0), hi) })
            } else if a.is_zero() && b > Exponent::zero() && !bilateral {
                Some((0, ((n - c) / b).floor().to_integer()))
            } else {
                return Err(Error::Divergent(format!("floor `{fl}` does not grow in {}", var.name)));
            };
            match range {
                Some(r) => r,
                None => return Ok(()),
            }
        }
    };
    for k in lo..=hi {
        ctx.env.push((var.name.clone(), k));
        let r = sum_rec(node, depth + 1, n, ctx, acc);
        ctx.env.pop();
        r?;
    }
    Ok(())
}
