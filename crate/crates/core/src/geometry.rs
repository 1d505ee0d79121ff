//! Dense vector and matrix primitives plus linear-locus geometry.
//!
//! Vectors are plain slices; [`Matrix`] is a row-major dense matrix. A
//! [`LinearLocus`] is the set of points whose scalar projection onto a normal
//! axis equals a fixed signed offset, which covers the decision boundary and
//! both decision borders of a trained model.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Default relative tolerance used by geometric predicates.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Class label of a training point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    /// Class one, encoded as `+1`.
    Plus,
    /// Class two, encoded as `-1`.
    Minus,
}

impl Label {
    #[inline]
    pub fn sign<T: Scalar>(self) -> T {
        match self {
            Label::Plus => T::one(),
            Label::Minus => -T::one(),
        }
    }

    #[inline]
    pub fn as_i8(self) -> i8 {
        match self {
            Label::Plus => 1,
            Label::Minus => -1,
        }
    }

    #[inline]
    pub fn flipped(self) -> Label {
        match self {
            Label::Plus => Label::Minus,
            Label::Minus => Label::Plus,
        }
    }

    /// Sign rule with the exact-zero tie broken towards `Plus`.
    #[inline]
    pub fn from_score<T: Scalar>(score: T) -> Label {
        if score >= T::zero() {
            Label::Plus
        } else {
            Label::Minus
        }
    }

    pub fn from_i64(v: i64) -> Option<Label> {
        match v {
            1 => Some(Label::Plus),
            -1 => Some(Label::Minus),
            _ => None,
        }
    }
}

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::DimensionMismatch {
                context: "matrix entries",
                expected: rows * cols,
                got: data.len(),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("matrix entries must be finite"));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from equal-length rows.
    pub fn from_rows<R: AsRef<[T]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    context: "matrix row length",
                    expected: cols,
                    got: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Self::from_row_major(rows.len(), cols, data)
    }

    pub fn from_diagonal(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[T]> {
        // chunks_exact panics on a zero chunk size
        let cols = self.cols.max(1);
        self.data.chunks_exact(cols).take(self.rows)
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        self.row_iter().map(<[T]>::to_vec).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mat_vec(&self, v: &[T]) -> Result<Vec<T>> {
        check_len("matrix-vector product", self.cols, v.len())?;
        Ok(self.row_iter().map(|r| dot(r, v)).collect())
    }

    pub fn mat_mul(&self, other: &Matrix<T>) -> Result<Matrix<T>> {
        check_len("matrix product", self.cols, other.rows)?;
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                let orow = other.row(k);
                for (o, &b) in out.row_mut(i).iter_mut().zip(orow) {
                    *o = *o + a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn add_diagonal(&mut self, shift: T) {
        for i in 0..self.rows.min(self.cols) {
            self[(i, i)] = self[(i, i)] + shift;
        }
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn frobenius_norm(&self) -> T {
        norm(&self.data)
    }

    /// Largest `|A[i][j] - A[j][i]|`; infinite for non-square input.
    pub fn max_asymmetry(&self) -> T {
        if !self.is_square() {
            return T::infinity();
        }
        let mut worst = T::zero();
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }

    pub fn sub(&self, other: &Matrix<T>) -> Result<Matrix<T>> {
        check_len("matrix rows", self.rows, other.rows)?;
        check_len("matrix cols", self.cols, other.cols)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| a - b)
            .collect();
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn scaled(&self, s: T) -> Matrix<T> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| v * s).collect(),
        }
    }

    /// `xᵀ A x`.
    pub fn quadratic_form(&self, x: &[T]) -> Result<T> {
        let ax = self.mat_vec(x)?;
        Ok(dot(x, &ax))
    }

    pub fn cast<U: Scalar>(&self) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .map(|v| U::lit(v.to_f64_lossy()))
                .collect(),
        }
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

#[inline]
pub(crate) fn check_len(context: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            context,
            expected,
            got,
        })
    }
}

#[inline]
pub fn dot<T: Scalar>(u: &[T], v: &[T]) -> T {
    u.iter().zip(v).fold(T::zero(), |acc, (&a, &b)| acc + a * b)
}

#[inline]
pub fn norm_sq<T: Scalar>(v: &[T]) -> T {
    dot(v, v)
}

#[inline]
pub fn norm<T: Scalar>(v: &[T]) -> T {
    norm_sq(v).sqrt()
}

pub fn sub<T: Scalar>(u: &[T], v: &[T]) -> Vec<T> {
    u.iter().zip(v).map(|(&a, &b)| a - b).collect()
}

pub fn add<T: Scalar>(u: &[T], v: &[T]) -> Vec<T> {
    u.iter().zip(v).map(|(&a, &b)| a + b).collect()
}

pub fn scale<T: Scalar>(v: &[T], s: T) -> Vec<T> {
    v.iter().map(|&a| a * s).collect()
}

/// `acc += s·v`.
#[inline]
pub fn axpy<T: Scalar>(acc: &mut [T], s: T, v: &[T]) {
    for (a, &b) in acc.iter_mut().zip(v) {
        *a = *a + s * b;
    }
}

pub fn max_abs_diff<T: Scalar>(u: &[T], v: &[T]) -> T {
    u.iter()
        .zip(v)
        .fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()))
}

pub(crate) fn check_vector<T: Scalar>(v: &[T], what: &str) -> Result<()> {
    if v.is_empty() {
        return Err(Error::invalid(format!("{what} must have dimension > 0")));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid(format!("{what} has non-finite components")));
    }
    Ok(())
}

/// Signed Gram matrix `Q[i][j] = yᵢyⱼ xᵢᵀxⱼ + eps·δᵢⱼ`.
///
/// Only the upper triangle is computed; the lower triangle is mirrored so the
/// result is exactly symmetric.
pub fn gram_matrix<T: Scalar>(x: &Matrix<T>, y: &[Label], eps: T) -> Result<Matrix<T>> {
    check_len("labels vs data rows", x.rows(), y.len())?;
    if eps < T::zero() || !eps.is_finite() {
        return Err(Error::invalid("eps must be finite and >= 0"));
    }
    let n = x.rows();
    let mut q = Matrix::zeros(n, n);
    for i in 0..n {
        let xi = x.row(i);
        let yi: T = y[i].sign();
        for j in i..n {
            let v = yi * y[j].sign::<T>() * dot(xi, x.row(j));
            q[(i, j)] = v;
            q[(j, i)] = v;
        }
        q[(i, i)] = q[(i, i)] + eps;
    }
    Ok(q)
}

/// Pairwise inner-product statistics between two vectors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InnerProductStats<T> {
    pub dot: T,
    pub norm_u: T,
    pub norm_v: T,
    /// `None` when either operand has zero length.
    pub cos_angle: Option<T>,
    pub distance: T,
}

impl<T: Scalar> InnerProductStats<T> {
    /// Relative residual of `‖u−v‖² = ‖u‖² + ‖v‖² − 2‖u‖‖v‖cos φ`.
    pub fn law_of_cosines_residual(&self) -> T {
        let lhs = self.distance * self.distance;
        let rhs = self.norm_u * self.norm_u + self.norm_v * self.norm_v
            - (T::one() + T::one()) * self.dot;
        let scale = (self.norm_u * self.norm_u + self.norm_v * self.norm_v).max(T::one());
        (lhs - rhs).abs() / scale
    }
}

pub fn inner_product_stats<T: Scalar>(u: &[T], v: &[T]) -> Result<InnerProductStats<T>> {
    check_len("inner product operands", u.len(), v.len())?;
    let d = dot(u, v);
    let nu = norm(u);
    let nv = norm(v);
    let cos_angle = if nu > T::zero() && nv > T::zero() {
        Some((d / (nu * nv)).max(-T::one()).min(T::one()))
    } else {
        None
    };
    Ok(InnerProductStats {
        dot: d,
        norm_u: nu,
        norm_v: nv,
        cos_angle,
        distance: norm(&sub(u, v)),
    })
}

/// Signed length of the component of `x` along `axis`: `xᵀaxis/‖axis‖`.
pub fn scalar_projection<T: Scalar>(x: &[T], axis: &[T]) -> Result<T> {
    check_len("projection operands", axis.len(), x.len())?;
    let n = norm(axis);
    if n <= T::zero() {
        return Err(Error::ZeroAxis);
    }
    Ok(dot(x, axis) / n)
}

/// `{x : xᵀv/‖v‖ = offset}` for a nonzero normal axis `v`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinearLocus<T> {
    normal_eigenaxis: Vec<T>,
    offset: T,
}

impl<T: Scalar> LinearLocus<T> {
    pub fn new(normal_eigenaxis: Vec<T>, offset: T) -> Result<Self> {
        check_vector(&normal_eigenaxis, "normal axis")?;
        if norm(&normal_eigenaxis) <= T::zero() {
            return Err(Error::ZeroAxis);
        }
        Ok(Self {
            normal_eigenaxis,
            offset,
        })
    }

    /// The locus through the tip of `v`, i.e. every `x` with `xᵀv = ‖v‖²`.
    pub fn through_axis_tip(v: Vec<T>) -> Result<Self> {
        let n = norm(&v);
        Self::new(v, n)
    }

    /// `{x : wᵀx + b = 0}`.
    pub fn from_hyperplane(w: &[T], b: T) -> Result<Self> {
        let n = norm(w);
        if n <= T::zero() {
            return Err(Error::ZeroAxis);
        }
        Self::new(w.to_vec(), -b / n)
    }

    pub fn normal_eigenaxis(&self) -> &[T] {
        &self.normal_eigenaxis
    }

    /// Signed distance of the locus from the origin along the unit normal.
    pub fn offset(&self) -> T {
        self.offset
    }

    pub fn unit_normal(&self) -> Vec<T> {
        scale(&self.normal_eigenaxis, T::one() / norm(&self.normal_eigenaxis))
    }

    /// Signed distance of `x` from the locus, positive on the side the axis points to.
    pub fn signed_distance(&self, x: &[T]) -> Result<T> {
        Ok(scalar_projection(x, &self.normal_eigenaxis)? - self.offset)
    }

    /// The point of the locus closest to the origin.
    pub fn foot_point(&self) -> Vec<T> {
        scale(&self.unit_normal(), self.offset)
    }

    /// True when the two loci describe the same point set.
    pub fn same_locus(&self, other: &LinearLocus<T>, tol: T) -> bool {
        let (a, b) = (self.unit_normal(), other.unit_normal());
        if a.len() != b.len() {
            return false;
        }
        let same = max_abs_diff(&a, &b) <= tol && (self.offset - other.offset).abs() <= tol;
        let neg: Vec<T> = b.iter().map(|&v| -v).collect();
        let flipped = max_abs_diff(&a, &neg) <= tol && (self.offset + other.offset).abs() <= tol;
        same || flipped
    }
}

/// True iff `|xᵀv/‖v‖ − offset| ≤ tol`.
pub fn locus_membership<T: Scalar>(locus: &LinearLocus<T>, x: &[T], tol: T) -> Result<bool> {
    Ok(locus.signed_distance(x)?.abs() <= tol)
}
