//! Nahm sums
//!
//! ```text
//! f_{A,b,c,d}(q) = sum_{n in N^r} q^(n^T A D n / 2 + n^T b + c) / prod_i (q^(d_i); q^(d_i))_(n_i)
//! ```
//!
//! with `D = diag(d)` and `AD` symmetric positive definite. Decorations add
//! per-index weights `u_i^(n_i)`, parity restrictions on `n_i`, stretched
//! denominators `(q^(d_i); q^(d_i))_(s_i n_i + t_i)`, and an x-grading
//! `x^(g . n)` which turns the sum into a bivariate series.
//!
//! Enumeration is certified: a rational `lambda` with `AD - lambda I` positive
//! definite (checked exactly by leading minors) bounds the exponent from
//! below by `lambda |n|^2 / 2 - |b^-|_1 |n| + c`, which yields a box outside of
//! which nothing contributes. The box boundary is re-checked afterwards.

use std::collections::{BTreeMap, HashMap, HashSet};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::series::rational::{
    exp_int, exponent_to_rational, fmt_exponent, lcm, parse_exponent, rat_pow, rational_to_exponent,
};
use crate::series::{BiSeries, Exponent, Monomial, QSeries, Rational};

/// The data `(A, b, c, d)` of a Nahm sum.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NahmQuadruple {
    pub a: Vec<Vec<Exponent>>,
    pub b: Vec<Exponent>,
    pub c: Exponent,
    pub d: Vec<i64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn admits(self, n: i64) -> bool {
        match self {
            Parity::Even => n.rem_euclid(2) == 0,
            Parity::Odd => n.rem_euclid(2) == 1,
        }
    }
}

/// Optional weights, parity restrictions and x-grading. Empty vectors mean
/// "no decoration".
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Decoration {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub weights: Vec<Monomial>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub parity: Vec<Option<Parity>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_grading: Option<Vec<i64>>,
    /// Per-index `(s_i, t_i)`: the denominator becomes `(q^(d_i); q^(d_i))_(s_i n_i + t_i)`.
    /// Empty means `(1, 0)` everywhere.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub den_index: Vec<(i64, i64)>,
}

impl Decoration {
    pub fn is_plain(&self) -> bool {
        self.weights.iter().all(Monomial::is_one)
            && self.parity.iter().all(Option::is_none)
            && self.x_grading.is_none()
            && self.den_index.iter().all(|&st| st == (1, 0))
    }

    fn den_index_at(&self, i: usize) -> (i64, i64) {
        self.den_index.get(i).copied().unwrap_or((1, 0))
    }

    fn weight(&self, i: usize) -> Monomial {
        self.weights.get(i).cloned().unwrap_or_else(Monomial::one)
    }

    fn parity_at(&self, i: usize) -> Option<Parity> {
        self.parity.get(i).copied().flatten()
    }

    /// Replace the x-grading by the substitution `x -> m`.
    pub fn bind_x(&self, m: &Monomial) -> Result<Decoration> {
        let Some(g) = &self.x_grading else {
            return Ok(self.clone());
        };
        let mut weights = Vec::with_capacity(g.len());
        for (i, &gi) in g.iter().enumerate() {
            weights.push(self.weight(i).mul(&m.pow(gi)?));
        }
        Ok(Decoration { weights, parity: self.parity.clone(), x_grading: None, den_index: self.den_index.clone() })
    }
}

impl NahmQuadruple {
    pub fn new(a: Vec<Vec<Exponent>>, b: Vec<Exponent>, c: Exponent, d: Vec<i64>) -> Result<Self> {
        let r = d.len();
        if a.len() != r || a.iter().any(|row| row.len() != r) || b.len() != r {
            return Err(Error::InvalidQuadruple(format!("dimension mismatch for rank {r}")));
        }
        if d.iter().any(|&v| v <= 0) {
            return Err(Error::InvalidQuadruple("symmetrizer entries must be positive".into()));
        }
        Ok(Self { a, b, c, d })
    }

    /// Build from the quadratic-form matrix `M = AD` instead of `A`.
    pub fn from_form(m: Vec<Vec<Exponent>>, b: Vec<Exponent>, c: Exponent, d: Vec<i64>) -> Result<Self> {
        let r = d.len();
        if m.len() != r || m.iter().any(|row| row.len() != r) {
            return Err(Error::InvalidQuadruple(format!("dimension mismatch for rank {r}")));
        }
        if d.iter().any(|&v| v <= 0) {
            return Err(Error::InvalidQuadruple("symmetrizer entries must be positive".into()));
        }
        let a = m.iter().map(|row| row.iter().zip(&d).map(|(v, &dj)| v / exp_int(dj)).collect()).collect();
        Self::new(a, b, c, d)
    }

    pub fn rank(&self) -> usize {
        self.d.len()
    }

    /// `AD`.
    pub fn form(&self) -> Vec<Vec<Exponent>> {
        self.a.iter().map(|row| row.iter().zip(&self.d).map(|(v, &dj)| v * exp_int(dj)).collect()).collect()
    }

    fn form_matrix(&self) -> Matrix {
        self.form().iter().map(|r| r.iter().map(|&v| exponent_to_rational(v)).collect()).collect()
    }

    /// `AD` must be symmetric and positive definite.
    pub fn validate(&self) -> Result<()> {
        let m = self.form_matrix();
        if !linalg::is_symmetric(&m) {
            return Err(Error::InvalidQuadruple("AD is not symmetric".into()));
        }
        if !linalg::is_positive_definite(&m) {
            return Err(Error::InvalidQuadruple("AD is not positive definite".into()));
        }
        Ok(())
    }

    /// `(A^-1, A^-1 b, b^T (AD)^-1 b / 2 - tr(D)/24 - c, d)`.
    pub fn dual(&self) -> Result<NahmQuadruple> {
        let am: Matrix = self.a.iter().map(|r| r.iter().map(|&v| exponent_to_rational(v)).collect()).collect();
        let ainv = linalg::inverse(&am).ok_or_else(|| Error::InvalidQuadruple("A is singular".into()))?;
        let minv = linalg::inverse(&self.form_matrix()).ok_or_else(|| Error::InvalidQuadruple("AD is singular".into()))?;
        let b: Vec<Rational> = self.b.iter().map(|&v| exponent_to_rational(v)).collect();
        let bs = linalg::mat_vec(&ainv, &b);
        let half = Rational::new(1.into(), 2.into());
        let tr: i64 = self.d.iter().sum();
        let cs = half * linalg::dot(&b, &linalg::mat_vec(&minv, &b))
            - Rational::new(tr.into(), 24.into())
            - exponent_to_rational(self.c);
        let conv = |v: &Rational| rational_to_exponent(v);
        NahmQuadruple::new(
            ainv.iter().map(|r| r.iter().map(conv).collect::<Result<_>>()).collect::<Result<_>>()?,
            bs.iter().map(conv).collect::<Result<_>>()?,
            conv(&cs)?,
            self.d.clone(),
        )
    }
}

/// Prepared lattice data on an integer key scale.
struct Lattice {
    rank: usize,
    scale: i64,
    /// key of the exponent is `sum diag_i n_i^2 + sum_{i<j} off_ij n_i n_j + sum lin_i n_i + c0`
    diag: Vec<i64>,
    off: Vec<Vec<i64>>,
    lin: Vec<i64>,
    c0: i64,
    d: Vec<i64>,
    coeffs: Vec<Rational>,
    parity: Vec<Option<Parity>>,
    grading: Option<Vec<i64>>,
    den_index: Vec<(i64, i64)>,
}

impl Lattice {
    fn key(&self, n: &[i64]) -> i64 {
        let mut k = self.c0;
        for i in 0..self.rank {
            k += self.diag[i] * n[i] * n[i] + self.lin[i] * n[i];
            for j in i + 1..self.rank {
                k += self.off[i][j] * n[i] * n[j];
            }
        }
        k
    }

    fn x_degree(&self, n: &[i64]) -> i64 {
        self.grading.as_ref().map(|g| g.iter().zip(n).map(|(a, b)| a * b).sum()).unwrap_or(0)
    }
}

struct Enumeration {
    lattice: Lattice,
    points: Vec<Vec<i64>>,
    key_max: i64,
}

fn prepare(q: &NahmQuadruple, dec: &Decoration, order: Exponent) -> Result<(Lattice, Vec<Exponent>, Exponent)> {
    let r = q.rank();
    if !dec.weights.is_empty() && dec.weights.len() != r
        || !dec.parity.is_empty() && dec.parity.len() != r
        || dec.x_grading.as_ref().is_some_and(|g| g.len() != r)
        || !dec.den_index.is_empty() && dec.den_index.len() != r
    {
        return Err(Error::InvalidQuadruple(format!("decoration does not match rank {r}")));
    }
    if dec.den_index.iter().any(|&(s, t)| s < 1 || t < 0) {
        return Err(Error::InvalidQuadruple("denominator index needs step >= 1 and shift >= 0".into()));
    }
    if let Some(g) = &dec.x_grading {
        if g.iter().any(|&v| v < 0) {
            return Err(Error::InvalidQuadruple("x-grading must be non-negative".into()));
        }
    }
    let m = q.form();
    let lin: Vec<Exponent> = (0..r).map(|i| q.b[i] + dec.weight(i).exp).collect();
    let half = Exponent::new(1, 2);
    let mut scale = *order.denom();
    scale = lcm(scale, *q.c.denom());
    for i in 0..r {
        scale = lcm(scale, *(m[i][i] * half).denom());
        scale = lcm(scale, *lin[i].denom());
        for j in i + 1..r {
            if m[i][j] != m[j][i] {
                return Err(Error::InvalidQuadruple("AD is not symmetric".into()));
            }
            scale = lcm(scale, *m[i][j].denom());
        }
    }
    let key = |e: Exponent| (e * exp_int(scale)).to_integer();
    let lattice = Lattice {
        rank: r,
        scale,
        diag: (0..r).map(|i| key(m[i][i] * half)).collect(),
        off: (0..r).map(|i| (0..r).map(|j| if j > i { key(m[i][j]) } else { 0 }).collect()).collect(),
        lin: lin.iter().map(|&e| key(e)).collect(),
        c0: key(q.c),
        d: q.d.clone(),
        coeffs: (0..r).map(|i| dec.weight(i).coeff).collect(),
        parity: (0..r).map(|i| dec.parity_at(i)).collect(),
        grading: dec.x_grading.clone(),
        den_index: (0..r).map(|i| dec.den_index_at(i)).collect(),
    };
    Ok((lattice, lin, q.c))
}

/// Per-coordinate box bounds `n_i <= R_i` beyond which no term has exponent
/// `<= order` (or x-degree `<= x_order`).
fn box_bounds(q: &NahmQuadruple, lin: &[Exponent], c: Exponent, grading: Option<(&[i64], i64)>, order: Exponent) -> Result<Vec<i64>> {
    let r = q.rank();
    let mut bounds: Vec<Option<i64>> = vec![None; r];
    if let Some((g, xo)) = grading {
        for i in 0..r {
            if g[i] > 0 {
                bounds[i] = Some(xo.div_euclid(g[i]).max(-1));
            }
        }
    }
    let m: Matrix = q.form().iter().map(|row| row.iter().map(|&v| exponent_to_rational(v)).collect()).collect();
    if !linalg::is_symmetric(&m) {
        return Err(Error::InvalidQuadruple("AD is not symmetric".into()));
    }
    let n_minus_c = exponent_to_rational(order - c);
    if bounds.iter().any(Option::is_none) {
        if let Some(lambda) = linalg::certified_min_eigen_bound(&m) {
            // f(R) = lambda R^2 / 2 - B R - (N - c) with B = |b^-|_1.
            let bneg: Rational = lin.iter().map(|&v| exponent_to_rational(v.min(Exponent::zero())).abs()).sum();
            let half = Rational::new(1.into(), 2.into());
            let f = |x: &Rational| &half * &lambda * x * x - &bneg * x - &n_minus_c;
            let lf = lambda.to_f64().unwrap_or(0.0);
            let bf = bneg.to_f64().unwrap_or(0.0);
            let nf = n_minus_c.to_f64().unwrap_or(0.0);
            let guess = ((bf + (bf * bf + 2.0 * lf * nf.max(0.0)).sqrt()) / lf).ceil().max(0.0);
            if !guess.is_finite() || guess > 1e7 {
                return Err(Error::BoundCertificate(format!("enumeration radius {guess} is unreasonably large")));
            }
            let mut rad = Rational::from_integer(BigInt::from(guess as i64));
            let vertex = &bneg / &lambda;
            while rad < vertex || f(&rad) < Rational::zero() {
                rad += Rational::one();
            }
            let rad = rad.to_integer().to_i64().unwrap_or(i64::MAX);
            for b in bounds.iter_mut() {
                *b = Some(b.map_or(rad, |v| v.min(rad)));
            }
        } else if linalg::is_positive_semidefinite(&m) && lin.iter().all(|&v| v > Exponent::zero()) {
            for (i, b) in bounds.iter_mut().enumerate() {
                let lim = ((order - c) / lin[i]).floor().to_integer().max(-1);
                *b = Some(b.map_or(lim, |v| v.min(lim)));
            }
        }
    }
    bounds
        .into_iter()
        .map(|b| b.ok_or_else(|| Error::InvalidQuadruple("the lattice sum is not bounded: AD is not positive definite and no grading bounds every index".into())))
        .collect()
}

fn enumerate(q: &NahmQuadruple, dec: &Decoration, x_order: Option<i64>, order: Exponent) -> Result<Enumeration> {
    if dec.x_grading.is_some() != x_order.is_some() {
        return Err(Error::InvalidArgument("x-grading and x-order must be given together".into()));
    }
    let (lattice, lin, c) = prepare(q, dec, order)?;
    let grading = dec.x_grading.as_deref().zip(x_order);
    let bounds = box_bounds(q, &lin, c, grading, order)?;
    let key_max = (order * exp_int(lattice.scale)).floor().to_integer();
    let feasible = |n: &[i64]| {
        lattice.key(n) <= key_max && x_order.is_none_or(|xo| lattice.x_degree(n) <= xo)
    };
    let r = lattice.rank;
    let mut points = Vec::new();
    if bounds.iter().all(|&b| b >= 0) || r == 0 {
        let mut n = vec![0i64; r];
        loop {
            if feasible(&n) && (0..r).all(|i| lattice.parity[i].is_none_or(|p| p.admits(n[i]))) {
                points.push(n.clone());
            }
            let mut i = r;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                if n[i] < bounds[i] {
                    n[i] += 1;
                    for v in n.iter_mut().skip(i + 1) {
                        *v = 0;
                    }
                    i = usize::MAX;
                    break;
                }
            }
            if i != usize::MAX {
                break;
            }
        }
    }
    // Shell check: every point just outside the box must be infeasible.
    for i in 0..r {
        let mut others: Vec<i64> = bounds.iter().map(|&b| b.max(-1) + 1).collect();
        others[i] = 0;
        let mut n = vec![0i64; r];
        loop {
            let mut p = n.clone();
            p[i] = bounds[i] + 1;
            if feasible(&p) {
                return Err(Error::BoundCertificate(format!(
                    "lattice point {p:?} beyond the certified box has exponent key {} <= {key_max}",
                    lattice.key(&p)
                )));
            }
            let mut j = r;
            let mut advanced = false;
            while j > 0 {
                j -= 1;
                if j == i {
                    continue;
                }
                if n[j] < others[j] {
                    n[j] += 1;
                    for (k, v) in n.iter_mut().enumerate().skip(j + 1) {
                        if k != i {
                            *v = 0;
                        }
                    }
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                break;
            }
        }
    }
    Ok(Enumeration { lattice, points, key_max })
}

enum Weight {
    One,
    Int(BigInt),
    Rat(Rational),
}

#[derive(Default)]
struct Accumulator {
    ints: Vec<BigInt>,
    rats: Option<Vec<Rational>>,
}

impl Accumulator {
    fn new(width: usize) -> Self {
        Self { ints: vec![BigInt::zero(); width], rats: None }
    }

    fn add(&mut self, start: usize, step: usize, buf: &[BigInt], w: &Weight) {
        let width = self.ints.len();
        for (u, v) in buf.iter().enumerate() {
            let idx = start + u * step;
            if idx >= width {
                break;
            }
            if v.is_zero() {
                continue;
            }
            match w {
                Weight::One => self.ints[idx] += v,
                Weight::Int(c) => self.ints[idx] += c * v,
                Weight::Rat(c) => {
                    let rats = self.rats.get_or_insert_with(|| vec![Rational::zero(); width]);
                    rats[idx] += c * Rational::from_integer(v.clone());
                }
            }
        }
    }

    fn into_rationals(self) -> Vec<Rational> {
        let mut out: Vec<Rational> = self.ints.into_iter().map(Rational::from_integer).collect();
        if let Some(r) = self.rats {
            for (o, v) in out.iter_mut().zip(r) {
                *o += v;
            }
        }
        out
    }
}

/// Walk the feasible points in lexicographic order, carrying
/// `prod_i 1/(q^(d_i); q^(d_i))_(n_i)` as a dense integer series and updating it
/// with one division by `1 - q^(d_i n_i)` per step.
fn accumulate(en: &Enumeration, mut sink: impl FnMut(&[i64], i64, &[BigInt]) -> Result<()>) -> Result<()> {
    let lat = &en.lattice;
    let r = lat.rank;
    if en.points.is_empty() {
        return Ok(());
    }
    let need = |p: &[i64]| ((en.key_max - lat.key(p)) / lat.scale + 1).max(0) as usize;
    let mut prefix: HashMap<Vec<i64>, (i64, usize)> = HashMap::new();
    let mut leaves: HashSet<&[i64]> = HashSet::new();
    for p in &en.points {
        let len = need(p);
        for l in 0..r {
            let e = prefix.entry(p[..l].to_vec()).or_insert((0, 0));
            e.0 = e.0.max(p[l]);
            e.1 = e.1.max(len);
        }
        leaves.insert(p.as_slice());
    }
    if r == 0 {
        let buf = vec![BigInt::one(); 1];
        return sink(&[], lat.key(&[]), &buf[..need(&[]).min(1)]);
    }
    fn walk(
        level: usize,
        pre: &mut Vec<i64>,
        parent: &[BigInt],
        lat: &Lattice,
        prefix: &HashMap<Vec<i64>, (i64, usize)>,
        leaves: &HashSet<&[i64]>,
        need: &dyn Fn(&[i64]) -> usize,
        sink: &mut dyn FnMut(&[i64], i64, &[BigInt]) -> Result<()>,
    ) -> Result<()> {
        let (max_next, len) = prefix[pre.as_slice()];
        let mut buf: Vec<BigInt> = parent[..len.min(parent.len())].to_vec();
        let d = lat.d[level] as usize;
        let (step, shift) = lat.den_index[level];
        for n in 0..=max_next {
            // Factors (1 - q^(d j)) entering the denominator at this step.
            let js = if n == 0 { 1..=shift } else { step * (n - 1) + shift + 1..=step * n + shift };
            for j in js {
                let s = d * j as usize;
                for k in s..buf.len() {
                    let (lo, hi) = buf.split_at_mut(k);
                    if !lo[k - s].is_zero() {
                        hi[0] += &lo[k - s];
                    }
                }
            }
            pre.push(n);
            if level + 1 == lat.rank {
                if leaves.contains(pre.as_slice()) {
                    let l = need(pre).min(buf.len());
                    sink(pre, lat.key(pre), &buf[..l])?;
                }
            } else if prefix.contains_key(pre.as_slice()) {
                walk(level + 1, pre, &buf, lat, prefix, leaves, need, sink)?;
            }
            pre.pop();
        }
        Ok(())
    }
    let root_len = prefix[&Vec::new()].1;
    let mut root = vec![BigInt::zero(); root_len];
    root[0] = BigInt::one();
    walk(0, &mut Vec::new(), &root, lat, &prefix, &leaves, &need, &mut sink)
}

fn weight_of(lat: &Lattice, n: &[i64]) -> Result<Weight> {
    let mut w = Rational::one();
    for (c, &k) in lat.coeffs.iter().zip(n) {
        if !c.is_one() {
            w *= rat_pow(c, k)?;
        }
    }
    Ok(if w.is_one() {
        Weight::One
    } else if w.is_integer() {
        Weight::Int(w.to_integer())
    } else {
        Weight::Rat(w)
    })
}

/// Expand a decorated Nahm sum to order `order`. The decoration may not carry
/// an x-grading (use [`nahm_sum_bivariate`]).
pub fn nahm_sum(q: &NahmQuadruple, dec: &Decoration, order: Exponent) -> Result<QSeries> {
    if dec.x_grading.is_some() {
        return Err(Error::InvalidArgument("x-graded sum requested as a univariate series".into()));
    }
    let en = enumerate(q, dec, None, order)?;
    let lat = &en.lattice;
    let kmin = en.points.iter().map(|p| lat.key(p)).min().unwrap_or(0);
    let width = (en.key_max - kmin + 1).max(0) as usize;
    let mut acc = Accumulator::new(width);
    accumulate(&en, |p, key, buf| {
        acc.add((key - kmin) as usize, lat.scale as usize, buf, &weight_of(lat, p)?);
        Ok(())
    })?;
    Ok(QSeries::from_dense(lat.scale, kmin, acc.into_rationals(), order))
}

/// Expand an x-graded Nahm sum to x-order `x_order` and q-order `order`.
pub fn nahm_sum_bivariate(q: &NahmQuadruple, dec: &Decoration, x_order: i64, order: Exponent) -> Result<BiSeries> {
    if dec.x_grading.is_none() {
        return Err(Error::InvalidArgument("bivariate sum needs an x-grading".into()));
    }
    let en = enumerate(q, dec, Some(x_order), order)?;
    let lat = &en.lattice;
    let kmin = en.points.iter().map(|p| lat.key(p)).min().unwrap_or(0);
    let width = (en.key_max - kmin + 1).max(0) as usize;
    let mut accs: BTreeMap<i64, Accumulator> = BTreeMap::new();
    accumulate(&en, |p, key, buf| {
        let acc = accs.entry(lat.x_degree(p)).or_insert_with(|| Accumulator::new(width));
        acc.add((key - kmin) as usize, lat.scale as usize, buf, &weight_of(lat, p)?);
        Ok(())
    })?;
    let coeffs = accs
        .into_iter()
        .map(|(m, a)| (m, QSeries::from_dense(lat.scale, kmin, a.into_rationals(), order)))
        .collect();
    Ok(BiSeries::from_coeffs(coeffs, x_order, order))
}

/// Number of lattice points that contribute below `order` (diagnostics and benches).
pub fn lattice_size(q: &NahmQuadruple, dec: &Decoration, order: Exponent) -> Result<usize> {
    Ok(enumerate(q, dec, None, order)?.points.len())
}

#[derive(Serialize, Deserialize)]
struct QuadrupleRepr {
    #[serde(rename = "A")]
    a: Vec<Vec<String>>,
    b: Vec<String>,
    c: String,
    d: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    decoration: Option<Decoration>,
}

/// A quadruple together with its decoration, in the JSON exchange format.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecoratedQuadruple {
    pub quadruple: NahmQuadruple,
    pub decoration: Decoration,
}

impl Serialize for DecoratedQuadruple {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let q = &self.quadruple;
        QuadrupleRepr {
            a: q.a.iter().map(|r| r.iter().map(|&v| fmt_exponent(v)).collect()).collect(),
            b: q.b.iter().map(|&v| fmt_exponent(v)).collect(),
            c: fmt_exponent(q.c),
            d: q.d.clone(),
            decoration: if self.decoration == Decoration::default() { None } else { Some(self.decoration.clone()) },
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DecoratedQuadruple {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = QuadrupleRepr::deserialize(d)?;
        let p = |s: &String| parse_exponent(s).map_err(D::Error::custom);
        let a = r.a.iter().map(|row| row.iter().map(p).collect()).collect::<std::result::Result<_, _>>()?;
        let b = r.b.iter().map(p).collect::<std::result::Result<_, _>>()?;
        let quadruple = NahmQuadruple::new(a, b, p(&r.c)?, r.d).map_err(D::Error::custom)?;
        Ok(Self { quadruple, decoration: r.decoration.unwrap_or_default() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::rational::exp;

    fn e(v: i64) -> Exponent {
        exp_int(v)
    }

    fn form(rows: &[&[i64]]) -> Vec<Vec<Exponent>> {
        rows.iter().map(|r| r.iter().map(|&v| e(v)).collect()).collect()
    }

    #[test]
    fn rogers_ramanujan_first_terms() {
        let q = NahmQuadruple::new(form(&[&[2]]), vec![e(0)], e(0), vec![1]).unwrap();
        let s = nahm_sum(&q, &Decoration::default(), e(8)).unwrap();
        let want = [1, 1, 1, 1, 2, 2, 3, 3, 4];
        for (k, w) in want.iter().enumerate() {
            assert_eq!(s.coeff(e(k as i64)), Rational::from_integer((*w).into()), "q^{k}");
        }
    }

    #[test]
    fn dual_of_rank_one_example() {
        let q = NahmQuadruple::new(form(&[&[2]]), vec![e(0)], exp(-1, 60), vec![1]).unwrap();
        let d = q.dual().unwrap();
        assert_eq!(d.a, vec![vec![exp(1, 2)]]);
        assert_eq!(d.b, vec![e(0)]);
        assert_eq!(d.c, exp(-1, 40));
        assert_eq!(d.dual().unwrap(), q);
    }

    #[test]
    fn validation() {
        let bad = NahmQuadruple::from_form(form(&[&[1, 2], &[2, 1]]), vec![e(0); 2], e(0), vec![1, 1]).unwrap();
        assert!(matches!(bad.validate(), Err(Error::InvalidQuadruple(_))));
        let nonsym = NahmQuadruple::new(form(&[&[2, 1], &[0, 2]]), vec![e(0); 2], e(0), vec![1, 1]).unwrap();
        assert!(nonsym.validate().is_err());
        assert!(NahmQuadruple::new(form(&[&[2]]), vec![e(0)], e(0), vec![0]).is_err());
    }

    #[test]
    fn parity_split_adds_up() {
        let q = NahmQuadruple::from_form(form(&[&[1, 0, 1], &[0, 2, 2], &[1, 2, 4]]), vec![e(0); 3], e(0), vec![1, 1, 2]).unwrap();
        let o = e(20);
        let full = nahm_sum(&q, &Decoration::default(), o).unwrap();
        let part = |p| {
            let dec = Decoration { parity: vec![Some(p), None, None], ..Default::default() };
            nahm_sum(&q, &dec, o).unwrap()
        };
        assert_eq!(part(Parity::Even).add(&part(Parity::Odd)), full);
    }

    #[test]
    fn stretched_denominator_matches_parity_form() {
        // sum q^(2n^2) / (q;q)_(2n) two ways: stretched index, or n' = 2n even.
        let o = e(30);
        let stretched = NahmQuadruple::from_form(form(&[&[4]]), vec![e(0)], e(0), vec![1]).unwrap();
        let dec = Decoration { den_index: vec![(2, 0)], ..Default::default() };
        let a = nahm_sum(&stretched, &dec, o).unwrap();
        let plain = NahmQuadruple::from_form(form(&[&[1]]), vec![e(0)], e(0), vec![1]).unwrap();
        let dec = Decoration { parity: vec![Some(Parity::Even)], ..Default::default() };
        assert_eq!(a, nahm_sum(&plain, &dec, o).unwrap());
        // odd part: n' = 2n + 1 gives q^(n'^2/2) = q^(2n^2 + 2n + 1/2)
        let stretched = NahmQuadruple::from_form(form(&[&[4]]), vec![e(2)], exp(1, 2), vec![1]).unwrap();
        let dec = Decoration { den_index: vec![(2, 1)], ..Default::default() };
        let a = nahm_sum(&stretched, &dec, o).unwrap();
        let dec = Decoration { parity: vec![Some(Parity::Odd)], ..Default::default() };
        assert_eq!(a, nahm_sum(&plain, &dec, o).unwrap());
    }

    #[test]
    fn grading_bounds_indefinite_forms() {
        // sum u^j v^k q^(2jk) / ((q^2;q^2)_j (q^2;q^2)_k) with u = v = x
        let q = NahmQuadruple::from_form(form(&[&[0, 2], &[2, 0]]), vec![e(0); 2], e(0), vec![2, 2]).unwrap();
        let dec = Decoration { x_grading: Some(vec![1, 1]), ..Default::default() };
        let s = nahm_sum_bivariate(&q, &dec, 3, e(10)).unwrap();
        // x^1 coefficient: 2/(1 - q^2)
        let c1 = s.coeff(1);
        assert_eq!(c1.coeff(e(0)), Rational::from_integer(2.into()));
        assert_eq!(c1.coeff(e(10)), Rational::from_integer(2.into()));
        assert!(nahm_sum(&q, &Decoration::default(), e(10)).is_err());
    }

    #[test]
    fn json_round_trip() {
        let q = NahmQuadruple::from_form(form(&[&[2, 0, 1], &[0, 4, 2], &[1, 2, 2]]), vec![e(0), e(1), exp(1, 2)], e(0), vec![1, 2, 2]).unwrap();
        let dq = DecoratedQuadruple { quadruple: q, decoration: Decoration::default() };
        let s = serde_json::to_string(&dq).unwrap();
        assert!(s.contains("\"A\""));
        let back: DecoratedQuadruple = serde_json::from_str(&s).unwrap();
        assert_eq!(back, dq);
    }
}
