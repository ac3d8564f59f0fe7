//! Double-precision evaluation on the upper half-plane and numeric checks of
//! modular transformation laws.
//!
//! Branch convention: `q^r = exp(2 pi i r tau)` for every rational `r`, and
//! `sqrt(-i tau)` is the principal square root.
//!
//! ```text
//! eta(tau) = q^(1/24) (q;q)_inf
//! f(tau)  = q^(-1/48) (-q^(1/2);q)_inf
//! f1(tau) = q^(-1/48) (q^(1/2);q)_inf
//! f2(tau) = q^(1/24) (-q;q)_inf
//! h_{j,m}(tau) = sum_k q^(m (k + j/(2m))^2),  g_{j,m}(tau) = sum_k (-1)^k q^(m (k + j/(2m))^2)
//! ```
//!
//! The vector-valued functions built from
//!
//! ```text
//! F(u,v,w) = sum q^(i^2/2 + j^2 + 2k^2 + ik + 2jk) u^i v^j w^k / ((q;q)_i (q;q)_j (q^2;q^2)_k)
//! G_s(u,v,w) = sum_{i = s mod 2} q^(i^2 + 2j^2 + k^2 + 2ij + ik) u^i v^j w^k / ((q;q)_i (q^2;q^2)_j (q^2;q^2)_k)
//!
//! U = (q^(-5/88) F(1,1,1), q^(-1/88) F(1,1,q), q^(7/88) (F(1,q,q) + q F(q,q^2,q^3)),
//!      q^(19/88) F(1,q,q^2), q^(35/88) F(q,q,q^2))
//! V = (q^(-7/88) G_0(1,1,1), q^(25/88) (G_0(q,1,1) + G_1(q^3,q^2,q)), q^(1/88) G_1(1,1,q),
//!      q^(9/88) G_1(q,1,q), q^(49/88) G_1(q^2,q^2,q))
//! ```
//!
//! satisfy `V(-1/(2 tau)) = S U(tau)` and `U(-1/tau) = 2 S V(tau/2)` with
//! `S` built from `a_k = sqrt(2/11) sin(k pi / 11)`. Each component also has
//! the closed form `U_j(tau) = f(tau)/eta(tau) g_{2j-1,11}(tau/4)`,
//! `V_j(tau) = f(2tau)/eta(2tau) g_{2j-1,11}(2tau)`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::catalog::expr::{evaluate, monomial_value, parse_expr, Expr, MonoVal};
use crate::error::{Error, Result};
use crate::products::ThetaKind;
use crate::series::{exp, Exponent, QSeries};

/// A point of the upper half-plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tau(Complex64);

impl Tau {
    pub fn new(re: f64, im: f64) -> Result<Tau> {
        Self::from_complex(Complex64::new(re, im))
    }

    pub fn from_complex(z: Complex64) -> Result<Tau> {
        if !z.re.is_finite() || !z.im.is_finite() || z.im <= 0.0 {
            return Err(Error::InvalidArgument(format!("tau = {z} is not in the upper half-plane")));
        }
        Ok(Tau(z))
    }

    /// Parse `RE+IMi`, `RE-IMi`, `IMi` or `i`; each part may be a fraction `p/q`.
    pub fn parse(src: &str) -> Result<Tau> {
        let s: String = src.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::InvalidArgument(format!("cannot parse tau `{src}`; expected RE+IMi"));
        let body = s.strip_suffix('i').ok_or_else(bad)?;
        let split = body.char_indices().skip(1).filter(|&(_, c)| c == '+' || c == '-').map(|(k, _)| k).last();
        let (re, im) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("0", body),
        };
        let im = match im {
            "" | "+" => "1",
            "-" => "-1",
            s => s,
        };
        Self::new(parse_real(re).ok_or_else(bad)?, parse_real(im).ok_or_else(bad)?)
    }

    pub fn value(self) -> Complex64 {
        self.0
    }

    /// `tau -> -1/tau`.
    pub fn inverted(self) -> Tau {
        Tau(-1.0 / self.0)
    }

    pub fn scaled(self, c: f64) -> Tau {
        Tau(self.0 * c)
    }

    pub fn shifted(self, t: f64) -> Tau {
        Tau(self.0 + t)
    }

    /// `q^r = exp(2 pi i r tau)`.
    pub fn q_pow(self, r: f64) -> Complex64 {
        (Complex64::i() * (2.0 * PI * r) * self.0).exp()
    }

    /// `|q|`.
    pub fn nome_abs(self) -> f64 {
        (-2.0 * PI * self.0.im).exp()
    }
}

impl fmt::Display for Tau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:+}i", self.0.re, self.0.im)
    }
}

fn parse_real(s: &str) -> Option<f64> {
    let (sign, s) = match s.strip_prefix('-') {
        Some(r) => (-1.0, r),
        None => (1.0, s.strip_prefix('+').unwrap_or(s)),
    };
    let v = match s.split_once('/') {
        Some((n, d)) => n.parse::<f64>().ok()? / d.parse::<f64>().ok()?,
        None => s.parse::<f64>().ok()?,
    };
    v.is_finite().then_some(sign * v)
}

/// Truncation policy for numeric evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalPolicy {
    /// Stop once the current term (or `|a nome^k|` for products) drops below this.
    pub tail_tolerance: f64,
    /// Cap on terms, factors or the q-order of an exact expansion.
    pub max_terms: usize,
}

impl Default for EvalPolicy {
    fn default() -> Self {
        EvalPolicy { tail_tolerance: 1e-16, max_terms: 100_000 }
    }
}

fn not_converged(what: &str, bound: f64) -> Error {
    Error::NoConvergence(format!("{what}: term cap reached with last term {bound:e}"))
}

/// `prod_{k >= 0} (1 - a nome^k)`, or the first `len` factors.
pub fn pochhammer(a: Complex64, nome: Complex64, len: Option<usize>, p: &EvalPolicy) -> Result<Complex64> {
    let mut acc = Complex64::new(1.0, 0.0);
    let mut t = a;
    for k in 0..p.max_terms {
        if len.is_some_and(|n| k >= n) {
            return Ok(acc);
        }
        if len.is_none() && t.norm() < p.tail_tolerance {
            return Ok(acc);
        }
        acc *= 1.0 - t;
        t *= nome;
    }
    if len.is_none() && nome.norm() >= 1.0 {
        return Err(Error::Divergent("infinite product with |nome| >= 1".into()));
    }
    Err(not_converged("product", t.norm()))
}

pub fn eta(tau: Tau, p: &EvalPolicy) -> Result<Complex64> {
    let q = tau.q_pow(1.0);
    Ok(tau.q_pow(1.0 / 24.0) * pochhammer(q, q, None, p)?)
}

pub fn weber_f(tau: Tau, p: &EvalPolicy) -> Result<Complex64> {
    Ok(tau.q_pow(-1.0 / 48.0) * pochhammer(-tau.q_pow(0.5), tau.q_pow(1.0), None, p)?)
}

pub fn weber_f1(tau: Tau, p: &EvalPolicy) -> Result<Complex64> {
    Ok(tau.q_pow(-1.0 / 48.0) * pochhammer(tau.q_pow(0.5), tau.q_pow(1.0), None, p)?)
}

pub fn weber_f2(tau: Tau, p: &EvalPolicy) -> Result<Complex64> {
    let q = tau.q_pow(1.0);
    Ok(tau.q_pow(1.0 / 24.0) * pochhammer(-q, q, None, p)?)
}

fn theta_num(kind: ThetaKind, j: f64, m: f64, tau: Tau, p: &EvalPolicy) -> Result<Complex64> {
    if m.is_nan() || m <= 0.0 {
        return Err(Error::Divergent(format!("theta series needs m > 0, got {m}")));
    }
    let shift = j / (2.0 * m);
    let term = |k: i64| {
        let s = if kind == ThetaKind::G && k.rem_euclid(2) == 1 { -1.0 } else { 1.0 };
        let x = k as f64 + shift;
        tau.q_pow(m * x * x) * s
    };
    // Centre the window on the minimum of the quadratic.
    let c = (-shift).round() as i64;
    let mut acc = term(c);
    for r in 1..p.max_terms as i64 {
        let (a, b) = (term(c + r), term(c - r));
        acc += a + b;
        if a.norm() < p.tail_tolerance && b.norm() < p.tail_tolerance {
            return Ok(acc);
        }
    }
    Err(not_converged("theta series", term(c + p.max_terms as i64).norm()))
}

/// `h_{j,m}(tau)`.
pub fn h_num(j: f64, m: f64, tau: Tau, p: &EvalPolicy) -> Result<Complex64> {
    theta_num(ThetaKind::H, j, m, tau, p)
}

/// `g_{j,m}(tau)`.
pub fn g_num(j: f64, m: f64, tau: Tau, p: &EvalPolicy) -> Result<Complex64> {
    theta_num(ThetaKind::G, j, m, tau, p)
}

fn mono_num(m: &MonoVal, tau: Tau) -> Result<Complex64> {
    if m.x != 0 || m.z != 0 {
        return Err(Error::InvalidArgument("numeric evaluation needs a univariate expression".into()));
    }
    let c = m.mono.coeff.to_f64().unwrap_or(f64::NAN);
    Ok(tau.q_pow(exp_f64(m.mono.exp)) * c)
}

fn exp_f64(e: Exponent) -> f64 {
    *e.numer() as f64 / *e.denom() as f64
}

/// Sum the terms of an exact series at `tau`. Fails unless the terms in the
/// last unit interval below the truncation order are under the tolerance.
pub fn eval_series(s: &QSeries, tau: Tau, p: &EvalPolicy) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut tail = 0.0f64;
    let edge = s.order() - Exponent::from_integer(1);
    for (e, c) in s.terms() {
        let t = tau.q_pow(exp_f64(e)) * c.to_f64().unwrap_or(f64::NAN);
        if e > edge {
            tail = tail.max(t.norm());
        }
        acc += t;
    }
    let bound = tail.max(tau.nome_abs().powf(exp_f64(s.order())));
    if bound >= p.tail_tolerance {
        return Err(Error::NoConvergence(format!(
            "series truncated at O(q^{}) still has terms of size {bound:e}",
            s.order()
        )));
    }
    Ok(acc)
}

/// Expand `e` exactly and sum it at `tau`, doubling the q-order until the
/// tail is below tolerance.
pub fn eval_series_expr(e: &Expr, tau: Tau, p: &EvalPolicy) -> Result<Complex64> {
    let start = (p.tail_tolerance.ln() / tau.nome_abs().ln()).ceil().max(4.0) as i64 + 4;
    let mut n = start;
    loop {
        let s = evaluate(e, Exponent::from_integer(n), None)?;
        match eval_series(s.as_qseries()?, tau, p) {
            Ok(v) => return Ok(v),
            Err(Error::NoConvergence(msg)) if (2 * n) as usize > p.max_terms => {
                return Err(Error::NoConvergence(msg));
            }
            Err(Error::NoConvergence(_)) => n *= 2,
            Err(e) => return Err(e),
        }
    }
}

/// Evaluate an expression at `tau`. Products, J-symbols, theta series and
/// monomials are evaluated directly as products or Gaussian sums; anything
/// else (Nahm sums, finite sums, constant terms, substitutions) goes through
/// its exact q-expansion.
pub fn eval_expr(e: &Expr, tau: Tau, p: &EvalPolicy) -> Result<Complex64> {
    if let Some(m) = monomial_value(e, &[], None)? {
        return mono_num(&m, tau);
    }
    let direct = |x: &Expr| eval_expr(x, tau, p);
    Ok(match e {
        Expr::Neg(a) => -direct(a)?,
        Expr::Add(a, b) => direct(a)? + direct(b)?,
        Expr::Sub(a, b) => direct(a)? - direct(b)?,
        Expr::Mul(a, b) => direct(a)? * direct(b)?,
        Expr::Div(a, b) => direct(a)? / direct(b)?,
        Expr::Pow(a, k) => {
            let k = monomial_value(k, &[], None)?
                .filter(|m| m.mono.exp == Exponent::from_integer(0))
                .and_then(|m| m.mono.coeff.to_integer().to_i32())
                .ok_or_else(|| Error::InvalidArgument(format!("non-integer power in `{e}`")))?;
            direct(a)?.powi(k)
        }
        Expr::Poch { bases, nome, len } => {
            let nome = mono_of(nome, tau)?;
            let len = match len {
                None => None,
                Some(l) => Some(
                    monomial_value(l, &[], None)?
                        .and_then(|m| m.mono.coeff.to_integer().to_usize())
                        .ok_or_else(|| Error::InvalidArgument(format!("bad length in `{e}`")))?,
                ),
            };
            let mut acc = Complex64::new(1.0, 0.0);
            for b in bases {
                acc *= pochhammer(mono_of(b, tau)?, nome, len, p)?;
            }
            acc
        }
        Expr::J { a, m } => {
            let m = int_of(m)?;
            let qm = tau.q_pow(m as f64);
            let mut acc = pochhammer(qm, qm, None, p)?;
            if let Some(a) = a {
                let a = int_of(a)?;
                acc *= pochhammer(tau.q_pow(a as f64), qm, None, p)? * pochhammer(tau.q_pow((m - a) as f64), qm, None, p)?;
            }
            acc
        }
        Expr::Theta { kind, j, m } => theta_num(*kind, real_of(j)?, real_of(m)?, tau, p)?,
        _ => eval_series_expr(e, tau, p)?,
    })
}

fn mono_of(e: &Expr, tau: Tau) -> Result<Complex64> {
    let m = monomial_value(e, &[], None)?.ok_or_else(|| Error::InvalidArgument(format!("`{e}` is not a monomial")))?;
    mono_num(&m, tau)
}

fn real_of(e: &Expr) -> Result<f64> {
    match monomial_value(e, &[], None)? {
        Some(m) if m.mono.exp == Exponent::from_integer(0) && m.x == 0 && m.z == 0 => {
            Ok(m.mono.coeff.to_f64().unwrap_or(f64::NAN))
        }
        _ => Err(Error::InvalidArgument(format!("`{e}` is not a constant"))),
    }
}

fn int_of(e: &Expr) -> Result<i64> {
    let v = real_of(e)?;
    if v.fract() != 0.0 {
        return Err(Error::InvalidArgument(format!("`{e}` is not an integer")));
    }
    Ok(v as i64)
}

/// `a_k = sqrt(2/11) sin(k pi / 11)`.
pub fn alpha(k: usize) -> f64 {
    (2.0f64 / 11.0).sqrt() * (k as f64 * PI / 11.0).sin()
}

/// The 5x5 matrix relating `V(-1/(2 tau))` and `U(tau)`.
pub fn s_matrix() -> [[f64; 5]; 5] {
    let rows: [[i32; 5]; 5] = [[5, 4, 3, 2, 1], [4, 1, -2, -5, -3], [3, -2, -4, 1, 5], [2, -5, 1, 3, -4], [1, -3, 5, -4, 2]];
    rows.map(|r| r.map(|k| k.signum() as f64 * alpha(k.unsigned_abs() as usize)))
}

const F_FORM: &str = "M=[[1,0,1],[0,2,2],[1,2,4]]; d=[1,1,2]";
const G_FORM: &str = "M=[[2,2,1],[2,4,0],[1,0,2]]; d=[1,2,2]";

fn f_sum(u: &str) -> String {
    format!("nahm{{{F_FORM}; u=[{u}]}}")
}

fn g_sum(parity: &str, u: &str) -> String {
    format!("nahm{{{G_FORM}; u=[{u}]; parity=[{parity},-,-]}}")
}

/// Prefactor exponent (numerator over 88) and series expression for each
/// component of U.
pub fn u_components() -> [(i64, String); 5] {
    [
        (-5, f_sum("1,1,1")),
        (-1, f_sum("1,1,q")),
        (7, format!("{} + q*{}", f_sum("1,q,q"), f_sum("q,q^2,q^3"))),
        (19, f_sum("1,q,q^2")),
        (35, f_sum("q,q,q^2")),
    ]
}

/// As [`u_components`] for V.
pub fn v_components() -> [(i64, String); 5] {
    [
        (-7, g_sum("e", "1,1,1")),
        (25, format!("{} + {}", g_sum("e", "q,1,1"), g_sum("o", "q^3,q^2,q"))),
        (1, g_sum("o", "1,1,q")),
        (9, g_sum("o", "q,1,q")),
        (49, g_sum("o", "q^2,q^2,q")),
    ]
}

/// The series part of each component, exactly, to `order`.
pub fn component_series(which: [(i64, String); 5], order: Exponent) -> Result<Vec<(Exponent, QSeries)>> {
    which
        .into_iter()
        .map(|(c, src)| {
            let s = evaluate(&parse_expr(&src)?, order, None)?;
            Ok((exp(c, 88), s.as_qseries()?.clone()))
        })
        .collect()
}

fn vec_from_series(which: [(i64, String); 5], tau: Tau, p: &EvalPolicy) -> Result<[Complex64; 5]> {
    let mut out = [Complex64::new(0.0, 0.0); 5];
    for (slot, (c, src)) in out.iter_mut().zip(which) {
        *slot = tau.q_pow(c as f64 / 88.0) * eval_series_expr(&parse_expr(&src)?, tau, p)?;
    }
    Ok(out)
}

/// `U(tau)` from its Nahm-sum definition.
pub fn u_vec(tau: Tau, p: &EvalPolicy) -> Result<[Complex64; 5]> {
    vec_from_series(u_components(), tau, p)
}

/// `V(tau)` from its Nahm-sum definition.
pub fn v_vec(tau: Tau, p: &EvalPolicy) -> Result<[Complex64; 5]> {
    vec_from_series(v_components(), tau, p)
}

/// `U(tau)` from `f(tau)/eta(tau) g_{2j-1,11}(tau/4)`.
pub fn u_vec_closed(tau: Tau, p: &EvalPolicy) -> Result<[Complex64; 5]> {
    let pre = weber_f(tau, p)? / eta(tau, p)?;
    let t4 = tau.scaled(0.25);
    let mut out = [Complex64::new(0.0, 0.0); 5];
    for (j, slot) in out.iter_mut().enumerate() {
        *slot = pre * g_num((2 * j + 1) as f64, 11.0, t4, p)?;
    }
    Ok(out)
}

/// `V(tau)` from `f(2tau)/eta(2tau) g_{2j-1,11}(2tau)`.
pub fn v_vec_closed(tau: Tau, p: &EvalPolicy) -> Result<[Complex64; 5]> {
    let t2 = tau.scaled(2.0);
    let pre = weber_f(t2, p)? / eta(t2, p)?;
    let mut out = [Complex64::new(0.0, 0.0); 5];
    for (j, slot) in out.iter_mut().enumerate() {
        *slot = pre * g_num((2 * j + 1) as f64, 11.0, t2, p)?;
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
}

/// One numeric equation check.
#[derive(Clone, Debug, Serialize)]
pub struct Residual {
    pub tau: String,
    pub equation: String,
    pub residual: f64,
    pub tolerance: f64,
    pub status: CheckStatus,
}

impl Residual {
    fn new(tau: Option<Tau>, equation: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Residual {
            tau: tau.map_or_else(|| "-".into(), |t| t.to_string()),
            equation: equation.into(),
            residual,
            tolerance,
            status: if residual < tolerance { CheckStatus::Pass } else { CheckStatus::Fail },
        }
    }

    pub fn passed(&self) -> bool {
        self.status == CheckStatus::Pass
    }
}

/// `|a - b| / max(1, |b|)`, maximised over components.
fn rel(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm() / y.norm().max(1.0)).fold(0.0, f64::max)
}

fn apply(s: &[[f64; 5]; 5], v: &[Complex64; 5], scale: f64) -> [Complex64; 5] {
    let mut out = [Complex64::new(0.0, 0.0); 5];
    for (i, row) in s.iter().enumerate() {
        out[i] = row.iter().zip(v).map(|(a, x)| x * (a * scale)).sum();
    }
    out
}

/// Max-norm of `S^2 - I/2`.
pub fn s_squared_residual() -> f64 {
    let s = s_matrix();
    let mut worst = 0.0f64;
    for i in 0..5 {
        for j in 0..5 {
            let v: f64 = (0..5).map(|k| s[i][k] * s[k][j]).sum();
            let want = if i == j { 0.5 } else { 0.0 };
            worst = worst.max((v - want).abs());
        }
    }
    worst
}

/// Residuals of `V(-1/(2 tau)) = S U(tau)`, `U(-1/tau) = 2 S V(tau/2)` and `S^2 = I/2`.
pub fn check_s(tau: Tau, tol: f64, p: &EvalPolicy) -> Result<Vec<Residual>> {
    let s = s_matrix();
    let v_left = v_vec(Tau(-1.0 / (2.0 * tau.0)), p)?;
    let su = apply(&s, &u_vec(tau, p)?, 1.0);
    let u_left = u_vec(tau.inverted(), p)?;
    let sv = apply(&s, &v_vec(tau.scaled(0.5), p)?, 2.0);
    Ok(vec![
        Residual::new(Some(tau), "V(-1/(2tau)) = S U(tau)", rel(&v_left, &su), tol),
        Residual::new(Some(tau), "U(-1/tau) = 2 S V(tau/2)", rel(&u_left, &sv), tol),
        Residual::new(None, "S^2 = I/2", s_squared_residual(), 1e-12),
    ])
}

/// Nahm-sum definitions of U and V against their closed forms.
pub fn dual_path(tau: Tau, tol: f64, p: &EvalPolicy) -> Result<Vec<Residual>> {
    Ok(vec![
        Residual::new(Some(tau), "U(tau): Nahm sums = f/eta * g_{2j-1,11}(tau/4)", rel(&u_vec(tau, p)?, &u_vec_closed(tau, p)?), tol),
        Residual::new(Some(tau), "V(tau): Nahm sums = f(2tau)/eta(2tau) * g_{2j-1,11}(2tau)", rel(&v_vec(tau, p)?, &v_vec_closed(tau, p)?), tol),
    ])
}

/// `V(tau+1) = diag(zeta_88^(-7, 25, 1, 9, 49)) V(tau)`.
pub fn check_v_translation(tau: Tau, tol: f64, p: &EvalPolicy) -> Result<Residual> {
    let phases = [-7.0, 25.0, 1.0, 9.0, 49.0];
    let left = v_vec(tau.shifted(1.0), p)?;
    let mut right = v_vec(tau, p)?;
    for (v, e) in right.iter_mut().zip(phases) {
        *v *= Complex64::from_polar(1.0, 2.0 * PI * e / 88.0);
    }
    Ok(Residual::new(Some(tau), "V(tau+1) = diag(zeta_88^(-7,25,1,9,49)) V(tau)", rel(&left, &right), tol))
}

/// The classical eta and Weber laws at `tau`.
pub fn eta_weber_laws(tau: Tau, tol: f64, p: &EvalPolicy) -> Result<Vec<Residual>> {
    let inv = tau.inverted();
    let t1 = tau.shifted(1.0);
    let root = (-Complex64::i() * tau.0).sqrt();
    let s2 = 2f64.sqrt();
    let e24 = |k: f64| Complex64::from_polar(1.0, PI * k / 24.0);
    let (f, f1, f2) = (weber_f(tau, p)?, weber_f1(tau, p)?, weber_f2(tau, p)?);
    let checks = [
        ("eta(-1/tau) = sqrt(-i tau) eta(tau)", eta(inv, p)?, root * eta(tau, p)?),
        ("eta(tau+1) = e^(pi i/12) eta(tau)", eta(t1, p)?, e24(2.0) * eta(tau, p)?),
        ("f(-1/tau) = f(tau)", weber_f(inv, p)?, f),
        ("f2(-1/tau) = f1(tau)/sqrt(2)", weber_f2(inv, p)?, f1 / s2),
        ("f1(-1/tau) = sqrt(2) f2(tau)", weber_f1(inv, p)?, f2 * s2),
        ("f(tau+1) = e^(-pi i/24) f1(tau)", weber_f(t1, p)?, e24(-1.0) * f1),
        ("f1(tau+1) = e^(-pi i/24) f(tau)", weber_f1(t1, p)?, e24(-1.0) * f),
        ("f2(tau+1) = e^(pi i/12) f2(tau)", weber_f2(t1, p)?, e24(2.0) * f2),
    ];
    Ok(checks.into_iter().map(|(name, a, b)| Residual::new(Some(tau), name, rel(&[a], &[b]), tol)).collect())
}

/// The inversion and translation laws of `h_{j,m}` and `g_{j,m}` for
/// integer `0 <= j <= 2m`, one residual per law (maximised over `j`).
pub fn theta_laws(tau: Tau, m2: i64, tol: f64, p: &EvalPolicy) -> Result<Vec<Residual>> {
    let m = m2 as f64 / 2.0;
    let inv = tau.inverted();
    let t1 = tau.shifted(1.0);
    let pre = (-Complex64::i() * tau.0).sqrt() / (2.0 * m).sqrt();
    let (mut h_inv, mut g_inv, mut h_tr, mut g_tr) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for j in 0..=m2 {
        let jf = j as f64;
        let mut h_sum = Complex64::new(0.0, 0.0);
        for k in 0..m2 {
            h_sum += Complex64::from_polar(1.0, PI * jf * k as f64 / m) * h_num(k as f64, m, tau, p)?;
        }
        h_inv = h_inv.max(rel(&[h_num(jf, m, inv, p)?], &[pre * h_sum]));
        let mut g_sum = Complex64::new(0.0, 0.0);
        for k in (1..2 * m2).step_by(2) {
            g_sum += Complex64::from_polar(1.0, PI * jf * k as f64 / (2.0 * m)) * h_num(k as f64 / 2.0, m, tau, p)?;
        }
        g_inv = g_inv.max(rel(&[g_num(jf, m, inv, p)?], &[pre * g_sum]));
    }
    // Translation needs j + m integer, so j runs over half-integers when m does.
    for j2 in (0..=2 * m2).filter(|j2| (j2 + m2) % 2 == 0) {
        let jf = j2 as f64 / 2.0;
        let ph = Complex64::from_polar(1.0, PI * jf * jf / (2.0 * m));
        h_tr = h_tr.max(rel(&[h_num(jf, m, t1, p)?], &[ph * h_num(jf, m, tau, p)?]));
        g_tr = g_tr.max(rel(&[g_num(jf, m, t1, p)?], &[ph * g_num(jf, m, tau, p)?]));
    }
    let ms = if m2 % 2 == 0 { format!("{}", m2 / 2) } else { format!("{m2}/2") };
    Ok(vec![
        Residual::new(Some(tau), format!("h_(j,{ms})(-1/tau) inversion, integer 0 <= j <= {m2}"), h_inv, tol),
        Residual::new(Some(tau), format!("g_(j,{ms})(-1/tau) inversion, integer 0 <= j <= {m2}"), g_inv, tol),
        Residual::new(Some(tau), format!("h_(j,{ms})(tau+1) phase, j + m integer"), h_tr, tol),
        Residual::new(Some(tau), format!("g_(j,{ms})(tau+1) phase, j + m integer"), g_tr, tol),
    ])
}

/// The fixed sample of the upper half-plane used by the suite.
pub fn sample_taus() -> [Tau; 4] {
    [Tau(Complex64::new(0.0, 1.0)), Tau(Complex64::new(0.0, 2.0)), Tau(Complex64::new(0.25, 1.0)), Tau(Complex64::new(-1.0 / 3.0, 1.5))]
}

/// Pairs of expressions that must agree numerically: a q-series or theta
/// sum against the corresponding product.
pub const DUALITIES: [(&str, &str); 4] = [
    ("sum{n in Z; floor=n^2: (-1)^n*q^(n^2)}", "J(1)^2/J(2)"),
    ("theta_h(1,1)", "2*q^(1/4)*J(4)^2/J(2)"),
    ("theta_g(0,1)", "J(1)^2/J(2)"),
    ("sum{n>=0; floor=(n^2+n)/2: (-1)^n*(2*n+1)*q^((n^2+n)/2)}", "J(1)^3"),
];

/// Series-side against product-side evaluation of [`DUALITIES`].
pub fn duality_checks(tau: Tau, tol: f64, p: &EvalPolicy) -> Result<Vec<Residual>> {
    DUALITIES
        .iter()
        .map(|(a, b)| {
            let x = eval_series_expr(&parse_expr(a)?, tau, p)?;
            let y = eval_expr(&parse_expr(b)?, tau, p)?;
            Ok(Residual::new(Some(tau), format!("{a} = {b}"), rel(&[x], &[y]), tol))
        })
        .collect()
}

/// Every numeric check at the sample points: S-matrix formulas (tolerance
/// `tol`), the two evaluation paths of U and V, the V translation phases,
/// eta/Weber laws and theta laws for `m` in {11/2, 11}, and series/product
/// dualities.
pub fn suite(tol: f64, p: &EvalPolicy) -> Result<Vec<Residual>> {
    let mut out = Vec::new();
    for tau in sample_taus() {
        out.extend(check_s(tau, tol, p)?);
        out.extend(eta_weber_laws(tau, tol, p)?);
        for m2 in [11, 22] {
            out.extend(theta_laws(tau, m2, tol, p)?);
        }
        out.push(check_v_translation(tau, tol, p)?);
    }
    let i = sample_taus()[0];
    out.extend(dual_path(i, tol, p)?);
    out.extend(duality_checks(i, tol, p)?);
    Ok(out)
}

/// First exponent `c + e` of `q^c s` with `e` outside `step Z`, if any.
pub fn lattice_defect(c: Exponent, s: &QSeries, step: Exponent) -> Option<Exponent> {
    s.terms().map(|(e, _)| e).find(|e| !(*e / step).is_integer()).map(|e| c + e)
}

#[cfg(test)]
mod tests;
