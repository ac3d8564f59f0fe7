//! Bailey pairs relative to `a = q^a_exp`.
//!
//! ```text
//! beta_n = sum_{k=0}^{n} alpha_k / ((q;q)_(n-k) (aq;q)_(n+k))
//! ```
//!
//! Pairs are pairs of generators `n -> QSeries` (valid to a requested order)
//! with memoisation. Each pair also carries quadratic lower bounds on the
//! valuations of `alpha_n` and `beta_n`; the transforms propagate them, and
//! they decide where the infinite sums of [`pair_sum`] can be cut off.
//!
//! Transforms:
//!
//! ```text
//! rho_infty    alpha' = a^n q^(n^2) alpha_n,   beta'_n = sum_r a^r q^(r^2) beta_r / (q;q)_(n-r)
//! reduce_b     (a -> a/q)  beta'_n = (1 - b q^n)/(1 - b) beta_n
//! reduce_binf  (a -> a/q)  beta'_n = q^n beta_n
//! raise_binf   (a -> aq)   alpha'_n = (1 - a q^(2n+1))/(1 - aq) q^-n sum_r alpha_r,  beta'_n = q^-n beta_n
//! raise_b0     (a -> aq)   alpha'_n = (1 - a q^(2n+1))/(1 - aq) a^n q^(n^2) sum_r a^-r q^(-r^2) alpha_r
//! ```
//!
//! Every pair uses `alpha_0 = 1`.

use std::collections::HashMap;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use parking_lot::Mutex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::products::quadratic_range;
use crate::series::rational::{exp, exp_int, fmt_exponent, fmt_rational, rat_int};
use crate::series::{pochhammer_power, Exponent, Monomial, QSeries, Rational};

/// `c2 n^2 + c1 n + c0`, used as a lower bound for `n >= 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Quad {
    pub c2: Exponent,
    pub c1: Exponent,
    pub c0: Exponent,
}

impl Quad {
    pub fn new(c2: Exponent, c1: Exponent, c0: Exponent) -> Self {
        Self { c2, c1, c0 }
    }

    pub fn constant(c: Exponent) -> Self {
        Self::new(Exponent::zero(), Exponent::zero(), c)
    }

    pub fn eval(&self, n: i64) -> Exponent {
        self.c2 * exp_int(n * n) + self.c1 * exp_int(n) + self.c0
    }

    pub fn add(&self, o: &Quad) -> Quad {
        Quad::new(self.c2 + o.c2, self.c1 + o.c1, self.c0 + o.c0)
    }

    /// Componentwise minimum, a lower bound for both on `n >= 0`.
    pub fn min(&self, o: &Quad) -> Quad {
        Quad::new(self.c2.min(o.c2), self.c1.min(o.c1), self.c0.min(o.c0))
    }

    /// Replace `n` by `n - 1`.
    pub fn shift_back(&self) -> Quad {
        Quad::new(self.c2, self.c1 - self.c2 * exp_int(2), self.c2 - self.c1 + self.c0)
    }

    /// A lower bound, as a function of `n`, for `min_{0 <= r <= n} Q(r)`.
    pub fn prefix_min(&self) -> Quad {
        let zero = Exponent::zero();
        if self.c2 > zero {
            if self.c1 >= zero {
                Quad::constant(self.c0)
            } else {
                Quad::constant(self.c0 - self.c1 * self.c1 / (exp_int(4) * self.c2))
            }
        } else if self.c2 == zero {
            if self.c1 >= zero {
                Quad::constant(self.c0)
            } else {
                Quad::new(zero, self.c1, self.c0)
            }
        } else {
            Quad::new(self.c2, self.c1.min(zero), self.c0)
        }
    }
}

type SeqFn = dyn Fn(usize, Exponent) -> Result<QSeries> + Send + Sync;

struct PairInner {
    name: String,
    a_exp: Exponent,
    alpha_floor: Quad,
    beta_floor: Quad,
    alpha: Box<SeqFn>,
    beta: Box<SeqFn>,
    cache: Mutex<HashMap<(bool, usize), QSeries>>,
}

/// A Bailey pair relative to `q^a_exp`.
#[derive(Clone)]
pub struct BaileyPair(Arc<PairInner>);

impl std::fmt::Debug for BaileyPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "BaileyPair({}, a = q^{})", self.0.name, self.0.a_exp)
    }
}

/// Call `f` with increasing working orders until its result is valid to `order`.
fn ensure(order: Exponent, f: impl Fn(Exponent) -> Result<QSeries>) -> Result<QSeries> {
    let mut work = order;
    for _ in 0..16 {
        let s = f(work)?;
        if s.order() >= order {
            return Ok(s.truncate(order));
        }
        work += order - s.order();
    }
    Err(Error::NoConvergence(format!("could not reach order {order}")))
}

impl BaileyPair {
    /// Build a pair from generators. `alpha_0 = 1` is imposed.
    pub fn new(
        name: impl Into<String>,
        a_exp: Exponent,
        alpha_floor: Quad,
        beta_floor: Quad,
        alpha: impl Fn(usize, Exponent) -> Result<QSeries> + Send + Sync + 'static,
        beta: impl Fn(usize, Exponent) -> Result<QSeries> + Send + Sync + 'static,
    ) -> Self {
        let mut alpha_floor = alpha_floor;
        alpha_floor.c0 = alpha_floor.c0.min(Exponent::zero());
        let alpha = move |n: usize, o: Exponent| if n == 0 { Ok(QSeries::one(o)) } else { alpha(n, o) };
        Self::raw(name, a_exp, alpha_floor, beta_floor, alpha, beta)
    }

    fn raw(
        name: impl Into<String>,
        a_exp: Exponent,
        alpha_floor: Quad,
        beta_floor: Quad,
        alpha: impl Fn(usize, Exponent) -> Result<QSeries> + Send + Sync + 'static,
        beta: impl Fn(usize, Exponent) -> Result<QSeries> + Send + Sync + 'static,
    ) -> Self {
        BaileyPair(Arc::new(PairInner {
            name: name.into(),
            a_exp,
            alpha_floor,
            beta_floor,
            alpha: Box::new(alpha),
            beta: Box::new(beta),
            cache: Mutex::new(HashMap::new()),
        }))
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn a_exp(&self) -> Exponent {
        self.0.a_exp
    }

    pub fn alpha_floor(&self) -> Quad {
        self.0.alpha_floor
    }

    pub fn beta_floor(&self) -> Quad {
        self.0.beta_floor
    }

    /// Same pair under another name.
    pub fn renamed(&self, name: impl Into<String>) -> Self {
        let p = self.clone();
        let q = self.clone();
        Self::raw(name, self.a_exp(), self.alpha_floor(), self.beta_floor(), move |n, o| p.alpha(n, o), move |n, o| {
            q.beta(n, o)
        })
    }

    fn get(&self, beta: bool, n: usize, order: Exponent) -> Result<QSeries> {
        if let Some(s) = self.0.cache.lock().get(&(beta, n)) {
            if s.order() >= order {
                return Ok(s.truncate(order));
            }
        }
        let f = if beta { &self.0.beta } else { &self.0.alpha };
        let s = ensure(order, |o| f(n, o))?;
        self.0.cache.lock().insert((beta, n), s.clone());
        Ok(s)
    }

    /// `alpha_n` valid to `order`.
    pub fn alpha(&self, n: usize, order: Exponent) -> Result<QSeries> {
        self.get(false, n, order)
    }

    /// `beta_n` valid to `order`.
    pub fn beta(&self, n: usize, order: Exponent) -> Result<QSeries> {
        self.get(true, n, order)
    }

    /// The same pair with `beta_n` replaced by `f(n, beta_n)` (negative controls).
    pub fn map_beta(&self, name: impl Into<String>, f: impl Fn(usize, QSeries) -> QSeries + Send + Sync + 'static) -> Self {
        let p = self.clone();
        let q = self.clone();
        Self::raw(name, self.a_exp(), self.alpha_floor(), Quad::constant(exp_int(-1_000_000)), move |n, o| p.alpha(n, o), move |n, o| {
            Ok(f(n, q.beta(n, o)?))
        })
    }
}

fn qm(e: Exponent) -> Monomial {
    Monomial::q(e)
}

/// `sum_k c_k q^(e_k)` to `order`.
fn poly(terms: &[(i64, Exponent)], order: Exponent) -> QSeries {
    QSeries::from_terms(terms.iter().map(|&(c, e)| (e, rat_int(c))), order)
}

/// `sum_{k=0}^{len-1} q^(start + k step)`, e.g. `(1 - q^(len step))/(1 - q^step)` times `q^start`.
fn geometric(start: Exponent, step: Exponent, len: i64, order: Exponent) -> QSeries {
    QSeries::from_terms((0..len).map(|k| (start + step * exp_int(k), Rational::one())), order)
}

/// `1 / prod (base_i; nome_i)_n`.
fn poch_inv(factors: &[(Monomial, Monomial)], n: usize, order: Exponent) -> Result<QSeries> {
    let mut acc = QSeries::one(order);
    for (b, q) in factors {
        acc = acc.mul(&pochhammer_power(b, q, Some(n), -1, order)?);
    }
    Ok(acc)
}

/// `(1 - q^x)/(1 - q^y)` with the removable singularity `x = y = 0` set to 1.
fn ratio_one_minus(x: Exponent, y: Exponent, order: Exponent) -> Result<QSeries> {
    if y.is_zero() {
        if x.is_zero() {
            return Ok(QSeries::one(order));
        }
        return Err(Error::ZeroDenominator(format!("(1 - q^{x})/(1 - q^0)")));
    }
    if x.is_zero() {
        return Ok(QSeries::zero(order));
    }
    let work = order.max(Exponent::zero()) + x.abs() + y.abs() * exp_int(2);
    Ok(poly(&[(1, Exponent::zero()), (-1, x)], work).div(&poly(&[(1, Exponent::zero()), (-1, y)], work))?.truncate(order))
}

/// `beta_n` computed from the `alpha` sequence of `p` through the defining relation.
pub fn beta_from_alpha(p: &BaileyPair, n: usize, order: Exponent) -> Result<QSeries> {
    let a = p.a_exp();
    if a.is_integer() && a <= exp_int(-1) && a >= exp_int(-2 * n as i64 - 1) {
        return Err(Error::ZeroDenominator(format!("(aq;q)_{} vanishes for a = q^{a}", 2 * n)));
    }
    let alphas: Vec<QSeries> = (0..=n).map(|k| p.alpha(k, order)).collect::<Result<_>>()?;
    let vmin = alphas.iter().filter(|s| !s.is_zero()).map(QSeries::valuation).min().unwrap_or_default();
    ensure(order, |work| {
        let work_t = work - vmin.min(Exponent::zero()) + (-a).max(Exponent::zero()) * exp_int(2 * n as i64 + 2);
        // t_k = 1/((q;q)_(n-k) (aq;q)_(n+k)), stepping k upwards.
        let mut t = poch_inv(&[(qm(exp_int(1)), qm(exp_int(1)))], n, work_t)?
            .mul(&poch_inv(&[(qm(a + exp_int(1)), qm(exp_int(1)))], n, work_t)?);
        let mut acc = QSeries::zero(work);
        for (k, al) in alphas.iter().enumerate() {
            if !al.is_zero() {
                acc = acc.add(&al.mul(&t));
            }
            if k < n {
                let up = poly(&[(1, Exponent::zero()), (-1, exp_int((n - k) as i64))], work_t);
                let down = poly(&[(1, Exponent::zero()), (-1, a + exp_int((n + k + 1) as i64))], work_t);
                t = t.mul(&up).div(&down)?;
            }
        }
        Ok(acc)
    })
}

/// The inverse relation: `alpha_n` recovered from `beta_0, ..., beta_n`,
///
/// ```text
/// alpha_n = (1 - a q^(2n)) sum_j (aq;q)_(n+j-1) (-1)^(n-j) q^((n-j)(n-j-1)/2) beta_j / (q;q)_(n-j)
/// ```
pub fn alpha_from_beta(p: &BaileyPair, n: usize, order: Exponent) -> Result<QSeries> {
    if n == 0 {
        return p.beta(0, order);
    }
    let a = p.a_exp();
    let betas: Vec<QSeries> = (0..=n).map(|j| p.beta(j, order)).collect::<Result<_>>()?;
    let vmin = betas.iter().filter(|s| !s.is_zero()).map(QSeries::valuation).min().unwrap_or_default();
    ensure(order, |work| {
        let wt = work - vmin.min(Exponent::zero()) + a.abs() * exp_int(4 * n as i64);
        let mut acc = QSeries::zero(wt);
        for (j, b) in betas.iter().enumerate() {
            let k = (n - j) as i64;
            let c = pochhammer_power(&qm(a + exp_int(1)), &qm(exp_int(1)), Some(n + j - 1), 1, wt)?
                .mul(&pochhammer_power(&qm(exp_int(1)), &qm(exp_int(1)), Some(n - j), -1, wt)?)
                .mul_monomial(&Monomial::new(rat_int(if k % 2 == 0 { 1 } else { -1 }), exp_int(k * (k - 1) / 2)));
            acc = acc.add(&c.mul(b));
        }
        Ok(acc.mul(&poly(&[(1, Exponent::zero()), (-1, a + exp_int(2 * n as i64))], wt)))
    })
}

/// One failing index of a pair check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairFailure {
    pub n: usize,
    pub exponent: String,
    pub lhs: String,
    pub rhs: String,
}

/// Result of checking the defining relation of a pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairReport {
    pub pair: String,
    pub n_max: usize,
    pub order: String,
    pub status: &'static str,
    pub failures: Vec<PairFailure>,
}

impl PairReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn failure(n: usize, lhs: &QSeries, rhs: &QSeries, order: Exponent) -> Result<Option<PairFailure>> {
    Ok(lhs.equal_up_to(rhs, order)?.map(|d| PairFailure {
        n,
        exponent: fmt_exponent(d.exponent),
        lhs: fmt_rational(&d.lhs),
        rhs: fmt_rational(&d.rhs),
    }))
}

/// Check `beta_n` against the defining relation for all `n <= n_max`.
pub fn verify_pair(p: &BaileyPair, n_max: usize, order: Exponent) -> Result<PairReport> {
    let mut failures = Vec::new();
    for n in 0..=n_max {
        let lhs = p.beta(n, order)?;
        let rhs = beta_from_alpha(p, n, order)?;
        failures.extend(failure(n, &lhs, &rhs, order)?);
    }
    Ok(PairReport {
        pair: p.name().to_string(),
        n_max,
        order: fmt_exponent(order),
        status: if failures.is_empty() { "pass" } else { "fail" },
        failures,
    })
}

/// Compare two pairs termwise (both `alpha` and `beta`) for `n <= n_max`.
pub fn compare_pairs(p: &BaileyPair, q: &BaileyPair, n_max: usize, order: Exponent) -> Result<PairReport> {
    if p.a_exp() != q.a_exp() {
        return Err(Error::InvalidArgument(format!(
            "{} is relative to q^{} but {} to q^{}",
            p.name(),
            p.a_exp(),
            q.name(),
            q.a_exp()
        )));
    }
    let mut failures = Vec::new();
    for n in 0..=n_max {
        failures.extend(failure(n, &p.alpha(n, order)?, &q.alpha(n, order)?, order)?);
        failures.extend(failure(n, &p.beta(n, order)?, &q.beta(n, order)?, order)?);
    }
    Ok(PairReport {
        pair: format!("{} = {}", p.name(), q.name()),
        n_max,
        order: fmt_exponent(order),
        status: if failures.is_empty() { "pass" } else { "fail" },
        failures,
    })
}

/// The transform toolbox.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PairTransform {
    RhoInfty,
    ReduceBinf,
    ReduceB(Monomial),
    RaiseBinf,
    RaiseB0,
}

impl PairTransform {
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        Ok(match s {
            "rho_infty" => PairTransform::RhoInfty,
            "reduce_binf" => PairTransform::ReduceBinf,
            "raise_binf" => PairTransform::RaiseBinf,
            "raise_b0" => PairTransform::RaiseB0,
            _ => {
                let inner = s
                    .strip_prefix("reduce_b(")
                    .and_then(|r| r.strip_suffix(')'))
                    .ok_or_else(|| Error::InvalidArgument(format!("unknown transform '{s}'")))?;
                PairTransform::ReduceB(Monomial::parse(inner)?)
            }
        })
    }

    pub fn label(&self) -> String {
        match self {
            PairTransform::RhoInfty => "rho_infty".into(),
            PairTransform::ReduceBinf => "reduce_binf".into(),
            PairTransform::ReduceB(b) => format!("reduce_b({b})"),
            PairTransform::RaiseBinf => "raise_binf".into(),
            PairTransform::RaiseB0 => "raise_b0".into(),
        }
    }
}

/// Apply a transform, producing a new pair.
pub fn apply_transform(p: &BaileyPair, t: &PairTransform) -> Result<BaileyPair> {
    let name = format!("{}>{}", p.name(), t.label());
    let a = p.a_exp();
    let one = exp_int(1);
    let zero = Exponent::zero();
    match t {
        PairTransform::RhoInfty => {
            let pa = p.clone();
            let pb = p.clone();
            let af = p.alpha_floor().add(&Quad::new(one, a, zero));
            let bf = p.beta_floor().add(&Quad::new(one, a, zero)).prefix_min();
            Ok(BaileyPair::raw(
                name,
                a,
                af,
                bf,
                move |n, o| {
                    let s = exp_int((n * n) as i64) + a * exp_int(n as i64);
                    Ok(pa.alpha(n, o - s)?.mul_monomial(&qm(s)))
                },
                move |n, o| {
                    let mut acc = QSeries::zero(o);
                    for r in 0..=n {
                        let s = exp_int((r * r) as i64) + a * exp_int(r as i64);
                        let br = pb.beta(r, o - s)?.mul_monomial(&qm(s));
                        acc = acc.add(&br.mul(&poch_inv(&[(qm(one), qm(one))], n - r, o - br.valuation().min(zero))?));
                    }
                    Ok(acc)
                },
            ))
        }
        PairTransform::ReduceBinf | PairTransform::ReduceB(_) => {
            let b = match t {
                PairTransform::ReduceB(b) => Some(b.clone()),
                _ => None,
            };
            if let Some(b) = &b {
                if b.exp.is_zero() && b.coeff.is_one() {
                    return Err(Error::ZeroDenominator("reduce_b needs b != 1".into()));
                }
            }
            let new_a = a - one;
            // (1 - a)/(1 - a q^(2m))
            let g = move |m: i64, o: Exponent| ratio_one_minus(a, a + exp_int(2 * m), o);
            let bshift = match &b {
                Some(b) => b.exp.min(zero),
                None => zero,
            };
            let af = match &b {
                None => Quad::new(zero, one, zero).add(&p.alpha_floor()).min(
                    &Quad::new(zero, one, -one).add(&p.alpha_floor().shift_back()),
                ),
                Some(bm) => p.alpha_floor().min(
                    &Quad::new(zero, one, -one + (a - one).min(bm.exp) - bshift).add(&p.alpha_floor().shift_back()),
                ),
            };
            let bf = match &b {
                None => p.beta_floor().add(&Quad::new(zero, one, zero)),
                Some(_) => p.beta_floor(),
            };
            let pa = p.clone();
            let pb = p.clone();
            let b1 = b.clone();
            // (1 - b q^n)/(1 - b), or q^n when b is absent
            let bfactor = move |n: i64, o: Exponent| -> Result<QSeries> {
                match &b1 {
                    None => Ok(QSeries::monomial(&qm(exp_int(n)), o)),
                    Some(b) => {
                        let work = o - b.exp.min(zero) * exp_int(2);
                        let num = QSeries::one(work).sub(&QSeries::monomial(&b.mul(&qm(exp_int(n))), work));
                        let den = QSeries::one(work).sub(&QSeries::monomial(b, work));
                        num.div(&den)
                    }
                }
            };
            let bfactor2 = bfactor.clone();
            let b2 = b.clone();
            Ok(BaileyPair::raw(
                name,
                new_a,
                af,
                bf,
                move |n, o| {
                    let n = n as i64;
                    let work = o - bshift * exp_int(2);
                    let mut acc = pa.alpha(n as usize, work)?.mul(&bfactor(n, work)?).mul(&g(n, work)?);
                    if n >= 1 {
                        // q^(n-1) (a q^(n-1) - b)/(1 - b), or q^(n-1) when b is absent
                        let c = match &b2 {
                            None => QSeries::monomial(&qm(exp_int(n - 1)), work),
                            Some(bm) => {
                                let w2 = work - bm.exp.min(zero) * exp_int(2);
                                let num = QSeries::monomial(&qm(a + exp_int(n - 1)), w2).sub(&QSeries::monomial(bm, w2));
                                let den = QSeries::one(w2).sub(&QSeries::monomial(bm, w2));
                                num.div(&den)?.mul_monomial(&qm(exp_int(n - 1)))
                            }
                        };
                        acc = acc.sub(&pa.alpha(n as usize - 1, work)?.mul(&c).mul(&g(n - 1, work)?));
                    }
                    Ok(acc)
                },
                move |n, o| Ok(pb.beta(n, o)?.mul(&bfactor2(n as i64, o)?)),
            ))
        }
        PairTransform::RaiseBinf | PairTransform::RaiseB0 => {
            let b0 = matches!(t, PairTransform::RaiseB0);
            let new_a = a + one;
            // (1 - a q^(2n+1))/(1 - aq)
            let h = move |n: i64, o: Exponent| ratio_one_minus(a + exp_int(2 * n + 1), a + one, o);
            let af = if b0 {
                Quad::new(one, a, zero).add(&p.alpha_floor().add(&Quad::new(-one, -a, zero)).prefix_min())
            } else {
                Quad::new(zero, -one, zero).add(&p.alpha_floor().prefix_min())
            };
            let bf = if b0 { p.beta_floor() } else { p.beta_floor().add(&Quad::new(zero, -one, zero)) };
            let pa = p.clone();
            let pb = p.clone();
            Ok(BaileyPair::raw(
                name,
                new_a,
                af,
                bf,
                move |n, o| {
                    let ni = n as i64;
                    let outer = if b0 { exp_int(ni * ni) + a * exp_int(ni) } else { exp_int(-ni) };
                    let inner_order = o - outer;
                    let mut sum = QSeries::zero(inner_order);
                    for r in 0..=n {
                        let ri = r as i64;
                        let s = if b0 { -(exp_int(ri * ri) + a * exp_int(ri)) } else { zero };
                        sum = sum.add(&pa.alpha(r, inner_order - s)?.mul_monomial(&qm(s)));
                    }
                    Ok(sum.mul(&h(ni, o - outer)?).mul_monomial(&qm(outer)))
                },
                move |n, o| {
                    if b0 {
                        pb.beta(n, o)
                    } else {
                        let s = exp_int(-(n as i64));
                        Ok(pb.beta(n, o - s)?.mul_monomial(&qm(s)))
                    }
                },
            ))
        }
    }
}

/// `sum_i w_i (alpha^(i), beta^(i))` with Laurent-polynomial weights `w_i`
/// (lists of monomials). All pairs must share `a`.
pub fn linear_combine(name: impl Into<String>, parts: &[(Vec<Monomial>, BaileyPair)]) -> Result<BaileyPair> {
    let Some(first) = parts.first() else {
        return Err(Error::InvalidArgument("empty linear combination".into()));
    };
    let a = first.1.a_exp();
    if parts.iter().any(|(_, p)| p.a_exp() != a) {
        return Err(Error::InvalidArgument("linear combination of pairs relative to different a".into()));
    }
    let mut af: Option<Quad> = None;
    let mut bf: Option<Quad> = None;
    for (w, p) in parts {
        let wv = w.iter().map(|m| m.exp).min().unwrap_or_default();
        let s = Quad::constant(wv);
        af = Some(af.map_or(p.alpha_floor().add(&s), |f| f.min(&p.alpha_floor().add(&s))));
        bf = Some(bf.map_or(p.beta_floor().add(&s), |f| f.min(&p.beta_floor().add(&s))));
    }
    let pa: Vec<(Vec<Monomial>, BaileyPair)> = parts.to_vec();
    let pb = pa.clone();
    let combine = |parts: &[(Vec<Monomial>, BaileyPair)], beta: bool, n: usize, o: Exponent| -> Result<QSeries> {
        let mut acc = QSeries::zero(o);
        for (w, p) in parts {
            for m in w {
                let s = if beta { p.beta(n, o - m.exp)? } else { p.alpha(n, o - m.exp)? };
                acc = acc.add(&s.mul_monomial(m));
            }
        }
        Ok(acc)
    };
    Ok(BaileyPair::raw(
        name,
        a,
        af.unwrap(),
        bf.unwrap(),
        move |n, o| combine(&pa, false, n, o),
        move |n, o| combine(&pb, true, n, o),
    ))
}

/// Both sides of `sum a^n q^(n^2) beta_n = 1/(aq;q)_inf sum a^n q^(n^2) alpha_n`.
pub fn pair_sum(p: &BaileyPair, order: Exponent) -> Result<(QSeries, QSeries)> {
    let a = p.a_exp();
    let weight = Quad::new(exp_int(1), a, Exponent::zero());
    let side = |floor: Quad, beta: bool| -> Result<QSeries> {
        let f = weight.add(&floor);
        if f.c2 <= Exponent::zero() {
            return Err(Error::Divergent(format!("{}: summands do not grow quadratically", p.name())));
        }
        let mut acc = QSeries::zero(order);
        if let Some((_, hi)) = quadratic_range(f.c2, f.c1, f.c0, order) {
            for n in 0..=hi.max(0) as usize {
                let s = weight.eval(n as i64);
                let t = if beta { p.beta(n, order - s)? } else { p.alpha(n, order - s)? };
                acc = acc.add(&t.mul_monomial(&qm(s)));
            }
        }
        Ok(acc)
    };
    let lhs = side(p.beta_floor(), true)?;
    let sum = side(p.alpha_floor(), false)?;
    let work = order - sum.valuation().min(Exponent::zero());
    let inv = pochhammer_power(&qm(a + exp_int(1)), &qm(exp_int(1)), None, -1, work)?;
    Ok((lhs, inv.mul(&sum).truncate(order)))
}

/// Both sides of the double-sum identity obtained by inserting `rho_infty(p)` into [`pair_sum`].
pub fn pair_double_sum(p: &BaileyPair, order: Exponent) -> Result<(QSeries, QSeries)> {
    pair_sum(&apply_transform(p, &PairTransform::RhoInfty)?, order)
}

// ---------------------------------------------------------------------------
// Named pairs.

fn e(n: i64) -> Exponent {
    exp_int(n)
}

fn half(n: i64) -> Exponent {
    exp(n, 2)
}

fn quarter(n: i64) -> Exponent {
    exp(n, 4)
}

/// Piecewise alpha: `even(m)` for `n = 2m`, `odd(m)` for `n = 2m + 1`.
fn parity_alpha(
    even: impl Fn(i64, Exponent) -> Result<QSeries> + Send + Sync + 'static,
    odd: impl Fn(i64, Exponent) -> Result<QSeries> + Send + Sync + 'static,
) -> impl Fn(usize, Exponent) -> Result<QSeries> + Send + Sync + 'static {
    move |n, o| {
        let m = (n / 2) as i64;
        if n % 2 == 0 {
            even(m, o)
        } else {
            odd(m, o)
        }
    }
}

fn signed(sign: i64, s: QSeries) -> QSeries {
    if sign.rem_euclid(2) == 0 {
        s
    } else {
        s.neg()
    }
}

fn denom_g(shift: Exponent) -> [(Monomial, Monomial); 2] {
    // (-q^shift; q)_n (q^2; q^2)_n
    [(Monomial::neg_q(shift), qm(e(1))), (qm(e(2)), qm(e(2)))]
}

fn denom_c(first: i64) -> [(Monomial, Monomial); 2] {
    // (q;q)_n (q^first; q^2)_n
    [(qm(e(1)), qm(e(1))), (qm(e(first)), qm(e(2)))]
}

/// `numerator(n) / denominator_n`.
fn beta_gen(
    den: [(Monomial, Monomial); 2],
    num: impl Fn(i64, Exponent) -> QSeries + Send + Sync + 'static,
) -> impl Fn(usize, Exponent) -> Result<QSeries> + Send + Sync + 'static {
    move |n, o| {
        let top = num(n as i64, o);
        let work = o - top.valuation().min(Exponent::zero());
        Ok(top.mul(&poch_inv(&den, n, work)?))
    }
}

fn mono_num(c: i64, ex: impl Fn(i64) -> Exponent + Send + Sync + 'static) -> impl Fn(i64, Exponent) -> QSeries + Send + Sync + 'static {
    move |n, o| poly(&[(sign_pow_i(c, n), ex(n))], o)
}

fn sign_pow_i(c: i64, n: i64) -> i64 {
    // c = 0 means "no sign", otherwise (-1)^n
    if c == 0 || n.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

fn zero_floor() -> Quad {
    Quad::constant(Exponent::zero())
}

fn qd(c2: Exponent, c1: Exponent, c0: Exponent) -> Quad {
    Quad::new(c2, c1, c0)
}

/// The registry names, in a fixed order.
pub const REGISTRY: [&str; 20] = [
    "G1", "G1s", "G2", "G3", "G4", "G5", "G4s", "C1", "C3", "C4", "C5", "C6", "C7", "C4s", "C7s", "G41new", "L22",
    "L23", "L24", "L26",
];

/// Look up a named pair.
pub fn named_pair(name: &str) -> Result<BaileyPair> {
    let z = Exponent::zero();
    let p = match name {
        "G1" => BaileyPair::new(
            name,
            z,
            qd(quarter(3), quarter(-1), z),
            zero_floor(),
            |n, o| {
                let n = n as i64;
                let base = half(n * n) + quarter(n * (n - 1));
                Ok(signed(n, poly(&[(1, base), (1, base + half(n))], o)))
            },
            beta_gen(denom_g(half(1)), |_, o| QSeries::one(o)),
        ),
        "G1s" => BaileyPair::new(
            name,
            e(1),
            qd(quarter(3), quarter(-1), z),
            zero_floor(),
            |n, o| {
                let n = n as i64;
                Ok(signed(n, geometric(quarter(3 * n * (n + 1)) - e(n), e(1), 2 * n + 1, o)))
            },
            beta_gen(denom_g(half(1)), |_, o| QSeries::one(o)),
        ),
        "G2" => BaileyPair::new(
            name,
            e(1),
            qd(quarter(3), quarter(1), z),
            zero_floor(),
            |n, o| {
                let n = n as i64;
                Ok(signed(n, geometric(quarter(3 * n * (n + 1)) - half(n), half(1), 2 * n + 1, o)))
            },
            beta_gen(denom_g(half(3)), |_, o| QSeries::one(o)),
        ),
        "G3" => BaileyPair::new(
            name,
            z,
            qd(quarter(3), quarter(-3), z),
            qd(z, e(1), z),
            |n, o| {
                let n = n as i64;
                let base = quarter(3 * n * (n - 1));
                Ok(signed(n, poly(&[(1, base), (1, base + half(3 * n))], o)))
            },
            beta_gen(denom_g(half(1)), mono_num(0, e)),
        ),
        "G4" => BaileyPair::new(
            name,
            z,
            qd(quarter(1), quarter(-1), z),
            qd(half(1), z, z),
            |n, o| {
                let n = n as i64;
                let base = quarter(n * (n - 1));
                Ok(signed(n, poly(&[(1, base), (1, base + half(n))], o)))
            },
            beta_gen(denom_g(half(1)), mono_num(1, |n| half(n * n))),
        ),
        "G5" => BaileyPair::new(
            name,
            e(1),
            qd(quarter(1), quarter(-1), z),
            qd(half(1), z, z),
            |n, o| {
                let n = n as i64;
                Ok(signed(n, geometric(quarter(n * (n - 1)), half(1), 2 * n + 1, o)))
            },
            beta_gen(denom_g(half(3)), mono_num(1, |n| half(n * n))),
        ),
        "G4s" => BaileyPair::new(
            name,
            z,
            qd(quarter(1), quarter(-3), z),
            qd(half(1), e(-1), z),
            |n, o| {
                let n = n as i64;
                let base = quarter(n * (n - 1)) - half(n);
                Ok(signed(n, poly(&[(1, base), (1, base + half(3 * n))], o)))
            },
            beta_gen(denom_g(half(1)), mono_num(1, |n| half(n * n) - e(n))),
        ),
        "C1" => BaileyPair::new(
            name,
            z,
            qd(quarter(3), half(-1), z),
            zero_floor(),
            parity_alpha(
                |m, o| Ok(signed(m, poly(&[(1, e(3 * m * m + m)), (1, e(3 * m * m - m))], o))),
                |_, o| Ok(QSeries::zero(o)),
            ),
            beta_gen(denom_c(1), |_, o| QSeries::one(o)),
        ),
        "C3" => BaileyPair::new(
            name,
            e(1),
            qd(quarter(3), half(1), z),
            zero_floor(),
            parity_alpha(
                |m, o| Ok(signed(m, poly(&[(1, e(3 * m * m + m))], o))),
                |m, o| Ok(signed(m + 1, poly(&[(1, e(3 * m * m + 5 * m + 2))], o))),
            ),
            beta_gen(denom_c(3), |_, o| QSeries::one(o)),
        ),
        "C4" => BaileyPair::new(
            name,
            e(1),
            qd(quarter(3), z, quarter(-3)),
            qd(z, e(1), z),
            parity_alpha(
                |m, o| Ok(signed(m, poly(&[(1, e(3 * m * m + 3 * m))], o))),
                |m, o| Ok(signed(m + 1, poly(&[(1, e(3 * m * m + 3 * m))], o))),
            ),
            beta_gen(denom_c(3), mono_num(0, e)),
        ),
        "C5" => BaileyPair::new(
            name,
            z,
            qd(quarter(1), half(-1), z),
            qd(half(1), half(-1), z),
            parity_alpha(
                |m, o| Ok(signed(m, poly(&[(1, e(m * m + m)), (1, e(m * m - m))], o))),
                |_, o| Ok(QSeries::zero(o)),
            ),
            beta_gen(denom_c(1), mono_num(0, |n| half(n * n - n))),
        ),
        "C6" => BaileyPair::new(
            name,
            e(1),
            qd(quarter(1), half(-1), z),
            qd(half(1), half(-1), z),
            parity_alpha(
                |m, o| Ok(signed(m, poly(&[(1, e(m * m - m))], o))),
                |m, o| Ok(signed(m + 1, poly(&[(1, e(m * m + 3 * m + 2))], o))),
            ),
            beta_gen(denom_c(3), mono_num(0, |n| half(n * n - n))),
        ),
        "C7" => BaileyPair::new(
            name,
            e(1),
            qd(quarter(1), z, quarter(-1)),
            qd(half(1), half(1), z),
            parity_alpha(
                |m, o| Ok(signed(m, poly(&[(1, e(m * m + m))], o))),
                |m, o| Ok(signed(m + 1, poly(&[(1, e(m * m + m))], o))),
            ),
            beta_gen(denom_c(3), mono_num(0, |n| half(n * n + n))),
        ),
        "C4s" => BaileyPair::new(
            name,
            e(2),
            qd(quarter(3), half(1), z),
            zero_floor(),
            parity_alpha(
                |m, o| Ok(signed(m, geometric(e(3 * m * m + m), e(2), 2 * m + 1, o))),
                |_, o| Ok(QSeries::zero(o)),
            ),
            beta_gen(denom_c(3), |_, o| QSeries::one(o)),
        ),
        "C7s" => BaileyPair::new(
            name,
            e(2),
            qd(quarter(1), half(-1), z),
            qd(half(1), half(-1), z),
            parity_alpha(
                |m, o| Ok(signed(m, geometric(e(m * m - m), e(2), 2 * m + 1, o))),
                |_, o| Ok(QSeries::zero(o)),
            ),
            beta_gen(denom_c(3), mono_num(0, |n| half(n * n - n))),
        ),
        "G41new" => BaileyPair::new(
            name,
            e(1),
            qd(quarter(1), quarter(-3), z),
            qd(half(1), e(-1), z),
            |n, o| {
                let n = n as i64;
                Ok(signed(n, geometric(quarter(n * n - 3 * n), e(1), 2 * n + 1, o)))
            },
            beta_gen(denom_g(half(1)), mono_num(1, |n| half(n * n) - e(n))),
        ),
        "L22" => BaileyPair::new(
            name,
            z,
            qd(quarter(3), half(-3), z),
            qd(z, e(1), e(-1)),
            parity_alpha(
                |m, o| Ok(signed(m, poly(&[(1, e(3 * m * m + 3 * m)), (1, e(3 * m * m - 3 * m))], o))),
                |_, o| Ok(QSeries::zero(o)),
            ),
            beta_gen(denom_c(1), |n, o| poly(&[(1, e(n)), (1, e(n - 1)), (-1, e(2 * n - 1))], o)),
        ),
        "L23" => BaileyPair::new(
            name,
            z,
            qd(quarter(3), quarter(-5), z),
            Quad::constant(half(-1)),
            |n, o| {
                let n = n as i64;
                let base = quarter(3 * n * n - 5 * n);
                Ok(signed(n, poly(&[(1, base), (1, base + half(5 * n))], o)))
            },
            beta_gen(denom_g(half(1)), |n, o| poly(&[(-1, half(-1)), (1, e(n)), (1, e(2 * n) - half(1))], o)),
        ),
        "L24" => BaileyPair::new(
            name,
            e(1),
            qd(quarter(3), half(-1), z),
            zero_floor(),
            parity_alpha(
                |m, o| Ok(signed(m, poly(&[(1, e(3 * m * m - m))], o))),
                |m, o| Ok(signed(m + 1, poly(&[(1, e(3 * (m + 1) * (m + 1) + m + 1))], o))),
            ),
            beta_gen(denom_c(3), |n, o| poly(&[(1, e(0)), (1, e(n + 1)), (-1, e(2 * n + 1))], o)),
        ),
        "L26" => BaileyPair::new(
            name,
            z,
            zero_floor(),
            zero_floor(),
            |n, o| {
                let n = n as i64;
                Ok(poly(&(-n..n).map(|i| (sign_pow_i(1, i + n), e(i * i))).collect::<Vec<_>>(), o))
            },
            |n, o| {
                let mut inner = QSeries::zero(o);
                for k in 0..=n {
                    let t = pochhammer_power(&Monomial::neg_q(e(1)), &qm(e(1)), Some(k), 1, o)?
                        .mul(&pochhammer_power(&qm(e(1)), &qm(e(1)), Some(k), -1, o)?);
                    inner = inner.add(&signed(k as i64, t));
                }
                let d = pochhammer_power(&qm(e(2)), &qm(e(2)), Some(n), -1, o)?;
                Ok(signed(n as i64, inner.mul(&d)))
            },
        ),
        _ => return Err(Error::UnknownId(format!("Bailey pair '{name}'"))),
    };
    Ok(p)
}

/// All registry pairs, in registry order.
pub fn registry() -> Vec<BaileyPair> {
    REGISTRY.iter().map(|n| named_pair(n).expect("registry pair")).collect()
}

// ---------------------------------------------------------------------------
// Stated intermediate pairs of the three derivations.

fn stated_pair(name: &str) -> Result<BaileyPair> {
    let z = Exponent::zero();
    let p = match name {
        "mod14-1.step1" => BaileyPair::new(
            name,
            e(1),
            qd(quarter(3), half(-1), z),
            zero_floor(),
            parity_alpha(
                |m, o| Ok(signed(m, geometric(e(3 * m * m - m), e(1), 4 * m + 1, o))),
                |m, o| Ok(signed(m, geometric(e(3 * m * m + 3 * m + 1), e(1), 4 * m + 3, o))),
            ),
            beta_gen(denom_c(1), |_, o| QSeries::one(o)),
        ),
        "mod14-1.step2" => BaileyPair::new(
            name,
            z,
            qd(quarter(3), e(-1), z),
            qd(z, e(1), z),
            parity_alpha(
                |m, o| Ok(signed(m, poly(&[(1, e(3 * m * m + m)), (1, e(3 * m * m - m))], o))),
                |m, o| Ok(signed(m, poly(&[(1, e(3 * m * m + 5 * m + 2)), (-1, e(3 * m * m + m))], o))),
            ),
            beta_gen(denom_c(1), mono_num(0, e)),
        ),
        "mod14-1.step3" => BaileyPair::new(
            name,
            e(1),
            qd(quarter(3), e(-1), z),
            qd(z, e(1), z),
            parity_alpha(
                |m, o| {
                    let inner = poly(
                        &[(1, e(-m * (m + 1))), (1, e(-m * (m + 1) + 1)), (-1, e(-m * (m - 1) + 1))],
                        o - e(4 * m * m),
                    );
                    let g = geometric(e(4 * m * m), e(1), 4 * m + 1, o + e(m * (m + 1)));
                    Ok(signed(m, inner.mul(&g).truncate(o)))
                },
                |m, o| {
                    let sq = (2 * m + 1) * (2 * m + 1);
                    let inner = poly(
                        &[(1, e(-m * (m + 1))), (1, e(-m * (m + 1) + 1)), (-1, e(-m * m - 3 * m - 1))],
                        o - e(sq),
                    );
                    let g = geometric(e(sq), e(1), 4 * m + 3, o + e(m * m + 3 * m + 1));
                    Ok(signed(m, inner.mul(&g).truncate(o)))
                },
            ),
            beta_gen(denom_c(1), mono_num(0, e)),
        ),
        "mod14-1.step4" => BaileyPair::new(
            name,
            z,
            qd(quarter(3), half(-3), z),
            qd(z, e(2), z),
            parity_alpha(
                |m, o| {
                    let s = 3 * m * m;
                    Ok(signed(
                        m,
                        poly(
                            &[
                                (1, e(s + m)),
                                (-1, e(s + 3 * m + 1)),
                                (1, e(s + m + 1)),
                                (1, e(s - m)),
                                (1, e(s - m + 1)),
                                (-1, e(s - 3 * m + 1)),
                            ],
                            o,
                        ),
                    ))
                },
                |m, o| {
                    let s = 3 * m * m;
                    Ok(signed(
                        m,
                        poly(&[(1, e(s + 5 * m + 2)), (1, e(s + 5 * m + 3)), (-1, e(s + m)), (-1, e(s + m + 1))], o),
                    ))
                },
            ),
            beta_gen(denom_c(1), mono_num(0, |n| e(2 * n))),
        ),
        "mod7.step1" => BaileyPair::new(
            name,
            z,
            qd(quarter(3), quarter(-3), z),
            qd(z, e(1), z),
            |n, o| {
                let n = n as i64;
                let base = quarter(3 * n * n - 3 * n);
                Ok(signed(n, poly(&[(1, base), (1, base + half(3 * n))], o)))
            },
            beta_gen(denom_g(half(1)), mono_num(0, e)),
        ),
        "mod7.step2" => BaileyPair::new(
            name,
            e(1),
            qd(quarter(3), quarter(-3), z),
            qd(z, e(1), z),
            move |n, o| {
                let n = n as i64;
                let base = quarter(3 * n * n - 3 * n);
                let inner = poly(&[(1, base), (-1, base + half(n + 1)), (1, base + e(n) + half(1))], o);
                Ok(signed(n, inner.mul(&geometric(z, e(1), 2 * n + 1, o - base))))
            },
            beta_gen(denom_g(half(1)), mono_num(0, e)),
        ),
        "mod7.step3" => BaileyPair::new(
            name,
            z,
            qd(quarter(3), quarter(-5), z),
            qd(z, e(2), z),
            |n, o| {
                let n = n as i64;
                let s = quarter(3 * n * n);
                Ok(signed(
                    n,
                    poly(
                        &[
                            (1, s - quarter(5 * n) + half(1)),
                            (-1, s - quarter(3 * n) + half(1)),
                            (1, s - quarter(n)),
                            (1, s + quarter(n)),
                            (-1, s + quarter(3 * n) + half(1)),
                            (1, s + quarter(5 * n) + half(1)),
                        ],
                        o,
                    ),
                ))
            },
            beta_gen(denom_g(half(1)), mono_num(0, |n| e(2 * n))),
        ),
        "mod14-2.step1" => BaileyPair::new(
            name,
            z,
            qd(quarter(3), half(-1), quarter(-7)),
            qd(z, e(2), z),
            parity_alpha(
                move |m, o| {
                    let s = 3 * m * m;
                    let num = poly(&[(-1, e(s - m - 1)), (1, e(s + 3 * m)), (1, e(s + 5 * m)), (-1, e(s + 9 * m - 1))], o + e(2));
                    let den = poly(&[(1, z), (-1, e(4 * m + 1))], o + e(2))
                        .mul(&poly(&[(1, z), (-1, e(4 * m - 1))], o + e(2)));
                    let r = num.mul(&poly(&[(1, z), (-1, e(1))], o + e(2))).div(&den)?;
                    Ok(signed(m, r))
                },
                move |m, o| {
                    let s = 3 * m * m;
                    let num = poly(&[(-1, e(s + 5 * m)), (1, e(s + 9 * m + 2))], o);
                    let den = poly(&[(1, z), (-1, e(4 * m + 3))], o).mul(&poly(&[(1, z), (-1, e(4 * m + 1))], o));
                    let r = num.mul(&poly(&[(1, z), (-1, e(2))], o)).div(&den)?;
                    Ok(signed(m, r))
                },
            ),
            beta_gen(denom_c(3), mono_num(0, |n| e(2 * n))),
        ),
        "mod14-2.step2" => BaileyPair::new(
            name,
            e(1),
            qd(quarter(3), half(-1), e(-1)),
            qd(z, e(2), z),
            parity_alpha(
                |m, o| {
                    let s = 3 * m * m;
                    Ok(signed(m, poly(&[(-1, e(s - m - 1)), (1, e(s + m - 1)), (1, e(s + 3 * m))], o)))
                },
                |m, o| {
                    let s = 3 * m * m;
                    Ok(signed(m, poly(&[(-1, e(s + 3 * m)), (-1, e(s + 5 * m + 1)), (1, e(s + 7 * m + 3))], o)))
                },
            ),
            beta_gen(denom_c(3), mono_num(0, |n| e(2 * n))),
        ),
        _ => return Err(Error::UnknownId(format!("intermediate pair '{name}'"))),
    };
    Ok(p)
}

/// One step of a derivation: the computed pair against the stated one.
#[derive(Clone, Debug, Serialize)]
pub struct ChainStep {
    pub label: String,
    pub report: PairReport,
}

/// Report of a full derivation.
#[derive(Clone, Debug, Serialize)]
pub struct ChainReport {
    pub chain: String,
    pub status: &'static str,
    pub steps: Vec<ChainStep>,
}

impl ChainReport {
    pub fn passed(&self) -> bool {
        self.steps.iter().all(|s| s.report.passed())
    }
}

/// Names of the built-in derivations (the target pair of each).
pub const DERIVATIONS: [&str; 3] = ["L22", "L23", "L24"];

fn lin(terms: &[(i64, Exponent)]) -> Vec<Monomial> {
    terms.iter().map(|&(c, x)| Monomial::new(rat_int(c), x)).collect()
}

/// Run one of the built-in derivations, comparing every intermediate pair
/// with its stated closed form for `n <= n_max`.
pub fn run_derivation(target: &str, n_max: usize, order: Exponent) -> Result<ChainReport> {
    use PairTransform::*;
    let mut steps = Vec::new();
    let mut check = |label: &str, got: &BaileyPair, want: &BaileyPair| -> Result<()> {
        steps.push(ChainStep { label: label.to_string(), report: compare_pairs(got, want, n_max, order)? });
        Ok(())
    };
    let z = Exponent::zero();
    match target {
        "L22" => {
            let s1 = apply_transform(&named_pair("C1")?, &RaiseB0)?;
            check("C1 > raise_b0", &s1, &stated_pair("mod14-1.step1")?)?;
            let s2 = apply_transform(&s1, &ReduceBinf)?;
            check("> reduce_binf", &s2, &stated_pair("mod14-1.step2")?)?;
            let s3 = apply_transform(&s2, &RaiseB0)?;
            check("> raise_b0", &s3, &stated_pair("mod14-1.step3")?)?;
            let s4 = apply_transform(&s3, &ReduceBinf)?;
            check("> reduce_binf", &s4, &stated_pair("mod14-1.step4")?)?;
            let comb = linear_combine("combination", &[(lin(&[(1, z), (1, e(-1))]), s2), (lin(&[(-1, e(-1))]), s4)])?;
            check("(1 + q^-1) step2 - q^-1 step4", &comb, &named_pair("L22")?)?;
        }
        "L23" => {
            let s1 = apply_transform(&named_pair("G1s")?, &ReduceBinf)?;
            check("G1s > reduce_binf", &s1, &stated_pair("mod7.step1")?)?;
            let s2 = apply_transform(&s1, &RaiseB0)?;
            check("> raise_b0", &s2, &stated_pair("mod7.step2")?)?;
            let s3 = apply_transform(&s2, &ReduceBinf)?;
            check("> reduce_binf", &s3, &stated_pair("mod7.step3")?)?;
            let comb = linear_combine(
                "combination",
                &[(lin(&[(-1, half(-1))]), named_pair("G1")?), (lin(&[(1, z)]), s1), (lin(&[(1, half(-1))]), s3)],
            )?;
            check("-q^(-1/2) G1 + step1 + q^(-1/2) step3", &comb, &named_pair("L23")?)?;
        }
        "L24" => {
            let c4 = named_pair("C4")?;
            let s1 = apply_transform(&c4, &ReduceBinf)?;
            check("C4 > reduce_binf", &s1, &stated_pair("mod14-2.step1")?)?;
            let s2 = apply_transform(&s1, &RaiseB0)?;
            check("> raise_b0", &s2, &stated_pair("mod14-2.step2")?)?;
            let comb = linear_combine(
                "combination",
                &[(lin(&[(1, z)]), named_pair("C3")?), (lin(&[(1, e(1))]), c4), (lin(&[(-1, e(1))]), s2)],
            )?;
            check("C3 + q C4 - q step2", &comb, &named_pair("L24")?)?;
        }
        _ => return Err(Error::UnknownId(format!("derivation '{target}'"))),
    }
    let status = if steps.iter().all(|s| s.report.passed()) { "pass" } else { "fail" };
    Ok(ChainReport { chain: target.to_string(), status, steps })
}

/// Single-transform derivations of registry pairs from other registry pairs.
pub const SINGLE_STEP_DERIVATIONS: [(&str, &str, &str); 4] =
    [("C4", "raise_binf", "C4s"), ("C7", "raise_binf", "C7s"), ("G3", "raise_binf", "G1s"), ("G4s", "raise_b0", "G41new")];

/// Parse and run a pipeline `PAIR>transform>transform...`.
pub fn run_pipeline(chain: &str) -> Result<BaileyPair> {
    let mut parts = chain.split('>');
    let head = parts.next().unwrap_or_default().trim();
    let mut p = named_pair(head)?;
    for t in parts {
        p = apply_transform(&p, &PairTransform::parse(t)?)?;
    }
    Ok(p)
}

/// Lowest exponent actually present in `alpha_n`, `beta_n` for `n <= n_max`,
/// compared with the declared floors (used by tests).
pub fn floors_hold(p: &BaileyPair, n_max: usize, order: Exponent) -> Result<bool> {
    for n in 0..=n_max {
        let a = p.alpha(n, order)?;
        let b = p.beta(n, order)?;
        if !a.is_zero() && a.valuation() < p.alpha_floor().eval(n as i64) {
            return Ok(false);
        }
        if !b.is_zero() && b.valuation() < p.beta_floor().eval(n as i64) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_pair_beta() {
        let unit = BaileyPair::new("unit", Exponent::zero(), zero_floor(), zero_floor(), |_, o| Ok(QSeries::zero(o)), |n, o| {
            poch_inv(&[(qm(e(1)), qm(e(1))), (qm(e(1)), qm(e(1)))], n, o)
        });
        let r = verify_pair(&unit, 6, e(20)).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn corrupted_beta_is_caught() {
        let p = named_pair("C1").unwrap().map_beta("C1-bad", |n, b| {
            if n == 3 {
                b.add(&QSeries::monomial(&qm(e(7)), b.order()))
            } else {
                b
            }
        });
        let r = verify_pair(&p, 5, e(30)).unwrap();
        assert_eq!(r.failures.len(), 1);
        assert_eq!(r.failures[0].n, 3);
        assert_eq!(r.failures[0].exponent, "7");
    }

    #[test]
    fn slater_pairs_small() {
        for p in registry() {
            let r = verify_pair(&p, 6, e(20)).unwrap();
            assert!(r.passed(), "{}: {:?}", p.name(), r.failures.first());
        }
    }

    #[test]
    fn floors_are_lower_bounds() {
        for p in registry() {
            assert!(floors_hold(&p, 12, e(30)).unwrap(), "{}", p.name());
        }
    }

    #[test]
    fn derivations_reproduce_stated_pairs() {
        for d in DERIVATIONS {
            let r = run_derivation(d, 6, e(25)).unwrap();
            for st in &r.steps {
                assert!(st.report.passed(), "{d} / {}: {:?}", st.label, st.report.failures.first());
            }
        }
    }

    #[test]
    fn single_step_derivations() {
        for (src, t, dst) in SINGLE_STEP_DERIVATIONS {
            let got = run_pipeline(&format!("{src}>{t}")).unwrap();
            let r = compare_pairs(&got, &named_pair(dst).unwrap(), 6, e(25)).unwrap();
            assert!(r.passed(), "{src}>{t}: {:?}", r.failures.first());
        }
    }

    #[test]
    fn pair_sums_agree() {
        for p in registry() {
            let (l, r) = pair_sum(&p, e(20)).unwrap();
            assert_eq!(l.equal_up_to(&r, e(20)).unwrap(), None, "{}", p.name());
            let (l, r) = pair_double_sum(&p, e(20)).unwrap();
            assert_eq!(l.equal_up_to(&r, e(20)).unwrap(), None, "{} (double)", p.name());
        }
    }

    #[test]
    fn transforms_preserve_the_relation() {
        let ts = [
            PairTransform::RhoInfty,
            PairTransform::RaiseBinf,
            PairTransform::RaiseB0,
            PairTransform::ReduceBinf,
            PairTransform::ReduceB(Monomial::neg_q(e(1))),
        ];
        for p in registry() {
            for t in &ts {
                let reduce = matches!(t, PairTransform::ReduceBinf | PairTransform::ReduceB(_));
                if reduce && p.a_exp() < e(1) {
                    continue;
                }
                let q = apply_transform(&p, t).unwrap();
                let r = verify_pair(&q, 5, e(15)).unwrap();
                assert!(r.passed(), "{}: {:?}", q.name(), r.failures.first());
                assert!(floors_hold(&q, 5, e(15)).unwrap(), "floors of {}", q.name());
            }
        }
    }
}
