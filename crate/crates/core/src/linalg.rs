//! Exact dense linear algebra over the rationals for small matrices.

use num_traits::{One, Zero};

use crate::series::Rational;

pub type Matrix = Vec<Vec<Rational>>;

pub fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
        .collect()
}

pub fn det(m: &Matrix) -> Rational {
    let n = m.len();
    let mut a = m.clone();
    let mut d = Rational::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Rational::zero();
        };
        if p != col {
            a.swap(p, col);
            d = -d;
        }
        let piv = a[col][col].clone();
        d *= &piv;
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] / &piv;
            for c in col..n {
                let t = &f * &a[col][c];
                a[r][c] -= t;
            }
        }
    }
    d
}

/// Inverse by Gauss-Jordan elimination; `None` if singular.
pub fn inverse(m: &Matrix) -> Option<Matrix> {
    let n = m.len();
    let mut a = m.clone();
    let mut inv = identity(n);
    for col in 0..n {
        let p = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(p, col);
        inv.swap(p, col);
        let piv = a[col][col].clone();
        for c in 0..n {
            a[col][c] = &a[col][c] / &piv;
            inv[col][c] = &inv[col][c] / &piv;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for c in 0..n {
                let t = &f * &a[col][c];
                a[r][c] -= t;
                let t = &f * &inv[col][c];
                inv[r][c] -= t;
            }
        }
    }
    Some(inv)
}

pub fn mat_vec(m: &Matrix, v: &[Rational]) -> Vec<Rational> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn is_symmetric(m: &Matrix) -> bool {
    let n = m.len();
    (0..n).all(|i| m[i].len() == n && (0..i).all(|j| m[i][j] == m[j][i]))
}

/// Leading principal minors `det(M[..k, ..k])` for `k = 1..=n`.
pub fn leading_minors(m: &Matrix) -> Vec<Rational> {
    (1..=m.len())
        .map(|k| det(&m[..k].iter().map(|r| r[..k].to_vec()).collect()))
        .collect()
}

/// Sylvester's criterion (symmetric input assumed).
pub fn is_positive_definite(m: &Matrix) -> bool {
    leading_minors(m).iter().all(|d| *d > Rational::zero())
}

/// Positive semidefiniteness via all principal minors (symmetric input assumed).
pub fn is_positive_semidefinite(m: &Matrix) -> bool {
    let n = m.len();
    if n > 16 {
        return false;
    }
    (1u32..(1 << n)).all(|mask| {
        let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let sub: Matrix = idx.iter().map(|&i| idx.iter().map(|&j| m[i][j].clone()).collect()).collect();
        det(&sub) >= Rational::zero()
    })
}

/// A rational `lambda > 0` with `M - lambda I` positive definite, found by
/// bisection with exact checks. `None` if `M` itself is not positive definite.
pub fn certified_min_eigen_bound(m: &Matrix) -> Option<Rational> {
    if !is_positive_definite(m) {
        return None;
    }
    let n = m.len();
    let shifted = |l: &Rational| -> Matrix {
        (0..n)
            .map(|i| (0..n).map(|j| if i == j { &m[i][j] - l } else { m[i][j].clone() }).collect())
            .collect()
    };
    let mut lo = Rational::zero();
    let mut hi = (0..n).map(|i| m[i][i].clone()).min().unwrap_or_else(Rational::one);
    let two = Rational::from_integer(2.into());
    for _ in 0..24 {
        let mid = (&lo + &hi) / &two;
        if is_positive_definite(&shifted(&mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if lo.is_zero() {
        // Extremely flat form; keep halving until a positive certificate appears.
        let mut l = hi;
        for _ in 0..200 {
            l /= &two;
            if is_positive_definite(&shifted(&l)) {
                return Some(l);
            }
        }
        return None;
    }
    Some(lo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::rat_int;

    fn m(rows: &[&[i64]]) -> Matrix {
        rows.iter().map(|r| r.iter().map(|&v| rat_int(v)).collect()).collect()
    }

    #[test]
    fn determinant_and_inverse() {
        let a = m(&[&[2, 0, 1], &[0, 4, 2], &[1, 2, 2]]);
        assert_eq!(det(&a), rat_int(4));
        let inv = inverse(&a).unwrap();
        let prod: Matrix = (0..3)
            .map(|i| (0..3).map(|j| (0..3).map(|k| &a[i][k] * &inv[k][j]).sum()).collect())
            .collect();
        assert_eq!(prod, identity(3));
        assert!(inverse(&m(&[&[1, 2], &[2, 4]])).is_none());
    }

    #[test]
    fn definiteness() {
        assert!(is_positive_definite(&m(&[&[2, 1], &[1, 2]])));
        assert!(!is_positive_definite(&m(&[&[1, 2], &[2, 1]])));
        assert!(is_positive_semidefinite(&m(&[&[1, 0], &[0, 0]])));
        assert!(!is_positive_semidefinite(&m(&[&[0, 1], &[1, 0]])));
        let l = certified_min_eigen_bound(&m(&[&[2, 1], &[1, 2]])).unwrap();
        assert!(l > Rational::new(9.into(), 10.into()) && l < rat_int(1));
    }
}
