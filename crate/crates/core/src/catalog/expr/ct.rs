//! Constant terms in an auxiliary variable `z`, and Euler expansions of
//! Pochhammer symbols whose base carries a power of `x` or `z`.
//!
//! With `Y = c q^e w^a` and nome `t = +-q^s`:
//!
//! ```text
//! (Y; t)_inf     = sum_n (-1)^n t^(n(n-1)/2) (c q^e)^n w^(an) / (t; t)_n
//! 1 / (Y; t)_inf = sum_n (c q^e)^n w^(an) / (t; t)_n
//! (Y; t)_L       = sum_{n <= L} [L, n]_t (-1)^n t^(n(n-1)/2) (c q^e)^n w^(an)
//! 1 / (Y; t)_L   = sum_n [L + n - 1, n]_t (c q^e)^n w^(an)
//! ```
//!
//! The constant term of a product of such factors is a sum over tuples
//! `(n_f)` with `sum a_f n_f = 0`. For any `lambda`, the q-valuation of a
//! tuple equals `sum_f (val_f(n_f) - lambda a_f n_f)`, and each summand is
//! bounded below by `-pen_f(lambda)`; this bounds the search, and the
//! `lambda` with the smallest total penalty is used.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::eval::{eval_at, length, monomial_value, mul_pair, q_monomial, Ctx, Value};
use super::Expr;
use crate::error::{Error, Result};
use crate::series::rational::{exp, exp_int, sign_pow};
use crate::series::{BiSeries, Exponent, Monomial, QSeries, Rational};

/// `(Y; t)_len` (or its inverse) with `Y = coeff * w^a`.
#[derive(Clone, Debug)]
pub(super) struct EulerFactor {
    pub coeff: Monomial,
    pub nome: Monomial,
    pub len: Option<usize>,
    pub inverse: bool,
}

impl EulerFactor {
    fn check(&self) -> Result<()> {
        if self.nome.exp <= Exponent::zero() {
            return Err(Error::Divergent(format!("Pochhammer nome {} must carry a positive power of q", self.nome)));
        }
        Ok(())
    }

    fn max_n(&self) -> Option<i64> {
        match (self.len, self.inverse) {
            (Some(l), false) => Some(l as i64),
            (Some(0), true) => Some(0),
            _ => None,
        }
    }

    fn val(&self, n: i64) -> Exponent {
        let base = self.coeff.exp * exp_int(n);
        if self.inverse {
            base
        } else {
            base + self.nome.exp * exp_int(n * (n - 1) / 2)
        }
    }

    fn mono(&self, n: i64) -> Result<Monomial> {
        let p = self.coeff.pow(n)?;
        if self.inverse {
            return Ok(p);
        }
        Ok(p.mul(&self.nome.pow(n * (n - 1) / 2)?).mul(&Monomial::constant(sign_pow(n))))
    }

    /// The series part of the `n`-th coefficient (constant term 1).
    fn unit(&self, n: i64, cache: &mut UnitCache) -> Result<QSeries> {
        let n = n as usize;
        Ok(match (self.len, self.inverse) {
            (None, _) => {
                cache.grow(n)?;
                cache.inv[n].clone()
            }
            (Some(l), false) => {
                cache.grow(l)?;
                cache.poch[l].mul(&cache.inv[n]).mul(&cache.inv[l - n])
            }
            (Some(0), true) => QSeries::one(cache.order),
            (Some(l), true) => {
                cache.grow(l + n - 1)?;
                cache.poch[l + n - 1].mul(&cache.inv[n]).mul(&cache.inv[l - 1])
            }
        })
    }

    /// Expansion as a series in `x`, where the base carries `x^a` with `a > 0`.
    pub fn x_series(&self, a: i64, x_order: i64, order: Exponent) -> Result<BiSeries> {
        self.check()?;
        let mut top = x_order / a;
        if let Some(m) = self.max_n() {
            top = top.min(m);
        }
        let lowest = (0..=top).map(|n| self.val(n)).fold(Exponent::zero(), Exponent::min);
        let mut cache = UnitCache::new(self.nome.clone(), order - lowest);
        let mut coeffs = BTreeMap::new();
        for n in 0..=top {
            let v = self.val(n);
            if v > order {
                continue;
            }
            let c = self.unit(n, &mut cache)?.truncate(order - v).mul_monomial(&self.mono(n)?);
            coeffs.insert(a * n, c);
        }
        Ok(BiSeries::from_coeffs(coeffs, x_order, order))
    }
}

/// `(t; t)_k` and `1 / (t; t)_k` at a fixed order, grown on demand.
struct UnitCache {
    nome: Monomial,
    order: Exponent,
    poch: Vec<QSeries>,
    inv: Vec<QSeries>,
}

impl UnitCache {
    fn new(nome: Monomial, order: Exponent) -> Self {
        let one = QSeries::one(order);
        UnitCache { nome, order, poch: vec![one.clone()], inv: vec![one] }
    }

    /// `1 - t^k`
    fn binomial(&self, k: usize) -> Result<QSeries> {
        let tk = self.nome.pow(k as i64)?;
        Ok(QSeries::one(self.order).sub(&QSeries::monomial(&tk, self.order)))
    }

    /// Make `(t; t)_j` and its inverse available for `j <= k`.
    fn grow(&mut self, k: usize) -> Result<()> {
        while self.poch.len() <= k {
            let b = self.binomial(self.poch.len())?;
            let next = self.poch.last().expect("non-empty").mul(&b);
            let next_inv = self.inv.last().expect("non-empty").mul(&b.invert()?);
            self.poch.push(next);
            self.inv.push(next_inv);
        }
        Ok(())
    }
}

enum ZKind {
    Mono(Monomial),
    Euler(EulerFactor),
}

struct ZItem {
    a: i64,
    kind: ZKind,
}

impl ZItem {
    fn range(&self) -> (i64, Option<i64>) {
        match &self.kind {
            ZKind::Mono(_) => (1, Some(1)),
            ZKind::Euler(f) => (0, f.max_n()),
        }
    }

    fn val(&self, n: i64) -> Exponent {
        match &self.kind {
            ZKind::Mono(m) => m.exp,
            ZKind::Euler(f) => f.val(n),
        }
    }

    fn g(&self, n: i64, lambda: Exponent) -> Exponent {
        self.val(n) - lambda * exp_int(self.a * n)
    }

    /// Index past which `g` is non-decreasing.
    fn vertex(&self, lambda: Exponent) -> i64 {
        match &self.kind {
            ZKind::Mono(_) => 1,
            ZKind::Euler(f) if f.inverse => 0,
            ZKind::Euler(f) => {
                let v = (lambda * exp_int(self.a) - f.coeff.exp) / f.nome.exp + exp(1, 2);
                v.ceil().to_integer().max(0)
            }
        }
    }

    /// `-min_n g(n)`, or `None` when `g` is unbounded below.
    fn penalty(&self, lambda: Exponent) -> Option<Exponent> {
        let (lo, hi) = self.range();
        if let ZKind::Euler(f) = &self.kind {
            if f.inverse && hi.is_none() && f.coeff.exp - lambda * exp_int(self.a) <= Exponent::zero() {
                return None;
            }
        }
        let top = match hi {
            Some(h) => h.min(self.vertex(lambda) + 1),
            None => self.vertex(lambda) + 1,
        };
        (lo..=top.max(lo)).map(|n| self.g(n, lambda)).min().map(|m| -m)
    }
}

struct Parts {
    coeff: Rational,
    free: Vec<(Expr, i64)>,
    items: Vec<ZItem>,
}

fn unsupported(e: &Expr) -> Error {
    Error::Unsupported(format!("CT_z needs a product of z-monomials and Pochhammer symbols, found `{e}`"))
}

fn collect(e: &Expr, power: i64, ctx: &Ctx, parts: &mut Parts) -> Result<()> {
    if !e.mentions_z() {
        parts.free.push((e.clone(), power));
        return Ok(());
    }
    if let Some(m) = monomial_value(e, &ctx.env, ctx.bind.as_ref())? {
        if m.x != 0 {
            return Err(Error::Unsupported("x inside a z-dependent factor of CT_z".into()));
        }
        if m.z == 0 {
            parts.free.push((e.clone(), power));
            return Ok(());
        }
        parts.items.push(ZItem { a: m.z * power, kind: ZKind::Mono(m.mono.pow(power)?) });
        return Ok(());
    }
    match e {
        Expr::Neg(a) => {
            parts.coeff *= sign_pow(power);
            collect(a, power, ctx, parts)
        }
        Expr::Mul(a, b) => {
            collect(a, power, ctx, parts)?;
            collect(b, power, ctx, parts)
        }
        Expr::Div(a, b) => {
            collect(a, power, ctx, parts)?;
            collect(b, -power, ctx, parts)
        }
        Expr::Pow(a, k) => {
            let k = super::eval::const_value(k, &ctx.env)?;
            if !k.is_integer() {
                return Err(unsupported(e));
            }
            let k: i64 = k.to_integer().try_into().map_err(|_| unsupported(e))?;
            collect(a, power * k, ctx, parts)
        }
        Expr::Poch { bases, nome, len } => {
            let t = q_monomial(nome, ctx)?;
            let l = length(len.as_deref(), ctx)?;
            for b in bases {
                let m = monomial_value(b, &ctx.env, ctx.bind.as_ref())?.ok_or_else(|| unsupported(e))?;
                if m.x != 0 {
                    return Err(Error::Unsupported("x inside a z-dependent factor of CT_z".into()));
                }
                if m.z == 0 {
                    let single = Expr::Poch { bases: vec![b.clone()], nome: nome.clone(), len: len.clone() };
                    parts.free.push((single, power));
                    continue;
                }
                let f = EulerFactor { coeff: m.mono, nome: t.clone(), len: l, inverse: power < 0 };
                f.check()?;
                for _ in 0..power.unsigned_abs() {
                    parts.items.push(ZItem { a: m.z, kind: ZKind::Euler(f.clone()) });
                }
            }
            Ok(())
        }
        _ => Err(unsupported(e)),
    }
}

fn free_product(free: &[(Expr, i64)]) -> Expr {
    let mut acc = Expr::Num(1);
    for (e, k) in free {
        let factor = if k.abs() == 1 { e.clone() } else { Expr::Pow(Box::new(e.clone()), Box::new(Expr::Num(k.abs()))) };
        acc = if *k > 0 { Expr::Mul(Box::new(acc), Box::new(factor)) } else { Expr::Div(Box::new(acc), Box::new(factor)) };
    }
    acc
}

/// Constant term in `z` of `body`, valid to `n`.
pub(super) fn eval_ct(body: &Expr, n: Exponent, ctx: &Ctx) -> Result<Value> {
    match body {
        Expr::Add(a, b) => return Ok(eval_ct(a, n, ctx)?.add(&eval_ct(b, n, ctx)?)),
        Expr::Sub(a, b) => return Ok(eval_ct(a, n, ctx)?.sub(&eval_ct(b, n, ctx)?)),
        _ => {}
    }
    if !body.mentions_z() {
        return eval_at(body, n, ctx);
    }
    let mut parts = Parts { coeff: Rational::one(), free: Vec::new(), items: Vec::new() };
    collect(body, 1, ctx, &mut parts)?;
    parts.items.sort_by_key(|it| matches!(it.kind, ZKind::Euler(_)));
    let free = free_product(&parts.free);
    let coeff = parts.coeff.clone();
    let items = parts.items;
    mul_pair(
        n,
        &|t| Ok(eval_at(&free, t, ctx)?.scalar_mul(&coeff)),
        &|t| Ok(Value::Q(ct_core(&items, t)?)),
    )
}

fn choose_lambda(items: &[ZItem]) -> Result<(Exponent, Vec<Exponent>)> {
    let mut best: Option<(Exponent, Vec<Exponent>, Exponent)> = None;
    for k in -96..=96 {
        let lambda = exp(k, 8);
        let pens: Option<Vec<Exponent>> = items.iter().map(|it| it.penalty(lambda)).collect();
        let Some(pens) = pens else { continue };
        let total: Exponent = pens.iter().copied().sum();
        if best.as_ref().is_none_or(|(_, _, t)| total < *t) {
            best = Some((lambda, pens, total));
        }
    }
    best.map(|(l, p, _)| (l, p))
        .ok_or_else(|| Error::Divergent("constant term does not converge q-adically".into()))
}

struct Search<'a> {
    items: &'a [ZItem],
    lambda: Exponent,
    suffix: Vec<Exponent>,
    order: Exponent,
    caches: Vec<Option<UnitCache>>,
    choice: Vec<i64>,
    acc: QSeries,
}

impl Search<'_> {
    fn leaf(&mut self) -> Result<()> {
        let v: Exponent = self.items.iter().zip(&self.choice).map(|(it, &n)| it.val(n)).sum();
        if v > self.order {
            return Ok(());
        }
        let target = self.order - v;
        let mut mono = Monomial::one();
        let mut unit = QSeries::one(target);
        for (i, it) in self.items.iter().enumerate() {
            let n = self.choice[i];
            match &it.kind {
                ZKind::Mono(m) => mono = mono.mul(m),
                ZKind::Euler(f) => {
                    mono = mono.mul(&f.mono(n)?);
                    let cache = self.caches[i].as_mut().expect("Euler items have caches");
                    unit = unit.mul(&f.unit(n, cache)?.truncate(target));
                }
            }
        }
        self.acc = self.acc.add(&unit.mul_monomial(&mono).truncate(self.order));
        Ok(())
    }

    fn dfs(&mut self, k: usize, g: Exponent, z: i64) -> Result<()> {
        let it = &self.items[k];
        let (lo, hi) = it.range();
        if k + 1 == self.items.len() {
            if z % it.a != 0 {
                return Ok(());
            }
            let n = -z / it.a;
            if n < lo || hi.is_some_and(|h| n > h) {
                return Ok(());
            }
            self.choice[k] = n;
            return self.leaf();
        }
        let slack = self.order + self.suffix[k + 1] - g;
        let vertex = it.vertex(self.lambda);
        let mut n = lo;
        loop {
            if hi.is_some_and(|h| n > h) {
                break;
            }
            let gn = it.g(n, self.lambda);
            if gn <= slack {
                self.choice[k] = n;
                self.dfs(k + 1, g + gn, z + it.a * n)?;
            } else if n >= vertex {
                break;
            }
            n += 1;
        }
        Ok(())
    }
}

/// Constant term of a product of z-factors, valid to `order`.
fn ct_core(items: &[ZItem], order: Exponent) -> Result<QSeries> {
    if items.is_empty() {
        return Ok(QSeries::one(order));
    }
    let (lambda, pens) = choose_lambda(items)?;
    let mut suffix = vec![Exponent::zero(); items.len() + 1];
    for i in (0..items.len()).rev() {
        suffix[i] = suffix[i + 1] + pens[i];
    }
    let unit_order = order + suffix[0].max(Exponent::zero());
    let caches = items
        .iter()
        .map(|it| match &it.kind {
            ZKind::Euler(f) => Some(UnitCache::new(f.nome.clone(), unit_order)),
            ZKind::Mono(_) => None,
        })
        .collect();
    let mut s = Search {
        items,
        lambda,
        suffix,
        order,
        caches,
        choice: vec![0; items.len()],
        acc: QSeries::zero(order),
    };
    s.dfs(0, Exponent::zero(), 0)?;
    Ok(s.acc)
}
