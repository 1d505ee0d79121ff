//! Dense factorizations: Cholesky and symmetric eigenvalues.

use crate::error::{Error, Result};
use crate::geometry::{check_len, dot, Matrix};
use crate::scalar::Scalar;

/// Lower-triangular Cholesky factor `L` with `A = L Lᵀ`.
#[derive(Clone, Debug, PartialEq)]
pub struct Cholesky<T> {
    l: Matrix<T>,
}

impl<T: Scalar> Cholesky<T> {
    pub fn new(a: &Matrix<T>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::invalid("Cholesky needs a square matrix"));
        }
        let asym = a.max_asymmetry();
        if asym > T::tol(1e-12) * a.max_abs().max(T::one()) {
            return Err(Error::NotSymmetric(asym.to_f64_lossy()));
        }
        let n = a.rows();
        let mut l = Matrix::zeros(n, n);
        for j in 0..n {
            let mut diag = a[(j, j)];
            for k in 0..j {
                diag = diag - l[(j, k)] * l[(j, k)];
            }
            if !(diag > T::zero()) {
                return Err(Error::NotPositiveDefinite(format!(
                    "non-positive pivot {:e} at column {j}",
                    diag.to_f64_lossy()
                )));
            }
            let ljj = diag.sqrt();
            l[(j, j)] = ljj;
            for i in (j + 1)..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s = s - l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / ljj;
            }
        }
        Ok(Self { l })
    }

    pub fn factor(&self) -> &Matrix<T> {
        &self.l
    }

    /// `L z`, used to colour standard-normal draws.
    pub fn lower_mul(&self, z: &[T]) -> Vec<T> {
        (0..self.l.rows())
            .map(|i| dot(&self.l.row(i)[..=i], &z[..=i]))
            .collect()
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[T]) -> Result<Vec<T>> {
        let n = self.l.rows();
        check_len("Cholesky right-hand side", n, b.len())?;
        let mut y = b.to_vec();
        for i in 0..n {
            let s = y[i] - dot(&self.l.row(i)[..i], &y[..i]);
            y[i] = s / self.l[(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n {
                s = s - self.l[(k, i)] * y[k];
            }
            y[i] = s / self.l[(i, i)];
        }
        Ok(y)
    }

    pub fn inverse(&self) -> Matrix<T> {
        let n = self.l.rows();
        let mut inv = Matrix::zeros(n, n);
        let mut e = vec![T::zero(); n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = T::zero());
            e[j] = T::one();
            let col = self.solve(&e).expect("length checked");
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        // symmetrize rounding
        for i in 0..n {
            for j in (i + 1)..n {
                let m = (inv[(i, j)] + inv[(j, i)]) / (T::one() + T::one());
                inv[(i, j)] = m;
                inv[(j, i)] = m;
            }
        }
        inv
    }

    pub fn log_det(&self) -> T {
        let two = T::one() + T::one();
        (0..self.l.rows())
            .map(|i| self.l[(i, i)].ln())
            .fold(T::zero(), |a, b| a + b)
            * two
    }
}

/// Eigenvalues of a symmetric matrix, sorted in descending order.
///
/// Householder reduction to tridiagonal form followed by the implicit QL
/// iteration with Wilkinson shifts.
pub fn symmetric_eigenvalues<T: Scalar>(a: &Matrix<T>) -> Result<Vec<T>> {
    if !a.is_square() {
        return Err(Error::invalid("eigenvalues need a square matrix"));
    }
    let asym = a.max_asymmetry();
    if asym > T::tol(1e-10) * a.max_abs().max(T::one()) {
        return Err(Error::NotSymmetric(asym.to_f64_lossy()));
    }
    let (mut d, mut e) = tridiagonalize(a.clone());
    tridiagonal_ql(&mut d, &mut e)?;
    d.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
    Ok(d)
}

/// Returns the diagonal and sub-diagonal (`e[i] = T[i+1][i]`, `e[n-1] = 0`).
fn tridiagonalize<T: Scalar>(mut a: Matrix<T>) -> (Vec<T>, Vec<T>) {
    let n = a.rows();
    let two = T::one() + T::one();
    let mut v = vec![T::zero(); n];
    let mut p = vec![T::zero(); n];
    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        let col: Vec<T> = ((k + 1)..n).map(|i| a[(i, k)]).collect();
        let xnorm = col.iter().fold(T::zero(), |s, &x| s + x * x).sqrt();
        if xnorm == T::zero() {
            continue;
        }
        let alpha = if col[0] > T::zero() { -xnorm } else { xnorm };
        let v = &mut v[..m];
        v.copy_from_slice(&col);
        v[0] = v[0] - alpha;
        let vnorm = v.iter().fold(T::zero(), |s, &x| s + x * x).sqrt();
        if vnorm == T::zero() {
            continue;
        }
        v.iter_mut().for_each(|x| *x = *x / vnorm);

        // p = A_sub v, q = p - (vᵀp) v, A_sub -= 2 (v qᵀ + q vᵀ)
        let p = &mut p[..m];
        for (r, pr) in p.iter_mut().enumerate() {
            let row = &a.row(k + 1 + r)[k + 1..];
            *pr = dot(row, v);
        }
        let kk = dot(v, p);
        for (pr, &vr) in p.iter_mut().zip(v.iter()) {
            *pr = *pr - kk * vr;
        }
        for r in 0..m {
            let (vr, qr) = (v[r], p[r]);
            let row = &mut a.row_mut(k + 1 + r)[k + 1..];
            for c in 0..m {
                row[c] = row[c] - two * (vr * p[c] + qr * v[c]);
            }
        }
        a[(k + 1, k)] = alpha;
        a[(k, k + 1)] = alpha;
        for i in (k + 2)..n {
            a[(i, k)] = T::zero();
            a[(k, i)] = T::zero();
        }
    }
    let d = (0..n).map(|i| a[(i, i)]).collect();
    let mut e: Vec<T> = (0..n.saturating_sub(1)).map(|i| a[(i + 1, i)]).collect();
    e.push(T::zero());
    (d, e)
}

fn tridiagonal_ql<T: Scalar>(d: &mut [T], e: &mut [T]) -> Result<()> {
    let n = d.len();
    let two = T::one() + T::one();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= T::epsilon() * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 200 {
                return Err(Error::invalid("QL iteration failed to converge"));
            }
            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = g.hypot(T::one());
            let signed_r = if g >= T::zero() { r.abs() } else { -r.abs() };
            g = d[m] - d[l] + e[l] / (g + signed_r);
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] = d[i + 1] - p;
                    e[m] = T::zero();
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + two * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] = d[l] - p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
    Ok(())
}
