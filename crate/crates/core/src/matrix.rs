//! Dense real matrices, the symmetric and skew-symmetric subtypes, the
//! Frobenius pairing on `Sym(n)`, a cyclic Jacobi eigensolver and numerical
//! rank by pivoted modified Gram–Schmidt.
//!
//! Arithmetic operators (`&a * &b`, `&a - &b`, ...) panic on shape mismatch,
//! the way `nalgebra` does. The named operations of this module (and every
//! module above it) validate their inputs and return [`Error::Dimension`]
//! instead.

use std::fmt;
use std::ops::{Add, AddAssign, Deref, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use serde::{Serialize, Serializer};

use crate::error::{dim_err, Error, Result};
use crate::tolerances;

/// Row-major dense real matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major data. Rejects ragged input, empty
    /// shapes and non-finite entries.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(dim_err("Matrix::from_row_major", "zero-sized matrix"));
        }
        if data.len() != rows * cols {
            return Err(dim_err(
                "Matrix::from_row_major",
                format!("{} entries for a {rows}x{cols} matrix", data.len()),
            ));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, |r| r.as_ref().len());
        if rows.iter().any(|r| r.as_ref().len() != n_cols) {
            return Err(dim_err("Matrix::from_rows", "ragged rows"));
        }
        let data = rows.iter().flat_map(|r| r.as_ref().iter().copied()).collect();
        Self::from_row_major(n_rows, n_cols, data)
    }

    pub fn diag(entries: &[f64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &v) in entries.iter().enumerate() {
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

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.cols.max(1)).map(<[f64]>::to_vec).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Largest absolute entry.
    pub fn norm_max(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    pub fn norm_fro(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    /// `self += s * other`.
    pub fn axpy(&mut self, s: f64, other: &Matrix) {
        assert_eq!(self.shape(), other.shape(), "axpy shape mismatch");
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    /// Copy of the `nr x nc` block whose top-left corner is `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Self {
        assert!(r0 + nr <= self.rows && c0 + nc <= self.cols, "block out of range");
        Self::from_fn(nr, nc, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Matrix) {
        assert!(r0 + b.rows <= self.rows && c0 + b.cols <= self.cols, "block out of range");
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(r0 + i, c0 + j)] = b[(i, j)];
            }
        }
    }

    /// Matrix product with a shape check.
    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(dim_err(
                "matmul",
                format!("{:?} x {:?}", self.shape(), other.shape()),
            ));
        }
        Ok(self * other)
    }

    pub fn mat_vec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if self.cols != v.len() {
            return Err(dim_err(
                "mat_vec",
                format!("{:?} x vector of length {}", self.shape(), v.len()),
            ));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    /// Integer power of a square matrix, `self^0 = I`.
    pub fn powi(&self, k: usize) -> Matrix {
        assert!(self.is_square(), "powi of non-square matrix");
        let mut out = Matrix::identity(self.rows);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// `‖A − Aᵀ‖_max`.
    pub fn symmetry_defect(&self) -> f64 {
        let mut d = 0.0_f64;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                d = d.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        d
    }

    /// `‖A + Aᵀ‖_max`.
    pub fn skew_defect(&self) -> f64 {
        let mut d = 0.0_f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                d = d.max((self[(i, j)] + self[(j, i)]).abs());
            }
        }
        d
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for row in self.data.chunks(self.cols.max(1)) {
            writeln!(f, "  {row:?}")?;
        }
        write!(f, "]")
    }
}

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl AsRef<[f64]> for Matrix {
    fn as_ref(&self) -> &[f64] {
        &self.data
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let (n, m, p) = (self.rows, self.cols, rhs.cols);
        let mut out = vec![0.0; n * p];
        for i in 0..n {
            let out_row = &mut out[i * p..(i + 1) * p];
            for k in 0..m {
                let a = self.data[i * m + k];
                if a == 0.0 {
                    continue;
                }
                let rhs_row = &rhs.data[k * p..(k + 1) * p];
                for (o, b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        Matrix {
            rows: n,
            cols: p,
            data: out,
        }
    }
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.shape(), rhs.shape(), "matrix sum shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.shape(), rhs.shape(), "matrix difference shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        self.scale(-1.0)
    }
}

impl AddAssign<&Matrix> for Matrix {
    fn add_assign(&mut self, rhs: &Matrix) {
        self.axpy(1.0, rhs);
    }
}

impl SubAssign<&Matrix> for Matrix {
    fn sub_assign(&mut self, rhs: &Matrix) {
        self.axpy(-1.0, rhs);
    }
}

/// Real symmetric `n x n` matrix. Construction symmetrizes exactly.
#[derive(Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct SymMatrix(Matrix);

/// Real skew-symmetric `n x n` matrix. Construction antisymmetrizes exactly.
#[derive(Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct SkewMatrix(Matrix);

fn check_square(op: &'static str, m: &Matrix) -> Result<()> {
    if !m.is_square() || m.rows() == 0 {
        return Err(dim_err(op, format!("expected a non-empty square matrix, got {:?}", m.shape())));
    }
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(())
}

impl SymMatrix {
    /// Accepts `m` if `‖m − mᵀ‖_max ≤ SYM_REJECT · max(1, ‖m‖_max)` and
    /// returns `(m + mᵀ)/2`.
    pub fn new(m: Matrix) -> Result<Self> {
        check_square("SymMatrix::new", &m)?;
        let defect = m.symmetry_defect();
        if defect > tolerances::SYM_REJECT * m.norm_max().max(1.0) {
            return Err(Error::NotSymmetric(defect));
        }
        Ok(Self::symmetrize(&m))
    }

    /// `(m + mᵀ)/2` without any acceptance check.
    pub fn symmetrize(m: &Matrix) -> Self {
        assert!(m.is_square(), "symmetrize of non-square matrix");
        let n = m.rows();
        Self(Matrix::from_fn(n, n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)])))
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        Self::new(Matrix::from_rows(rows)?)
    }

    pub fn zeros(n: usize) -> Self {
        Self(Matrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        Self(Matrix::identity(n))
    }

    pub fn diag(entries: &[f64]) -> Self {
        Self(Matrix::diag(entries))
    }

    pub fn n(&self) -> usize {
        self.0.rows()
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.scale(s))
    }

    pub fn add(&self, other: &SymMatrix) -> Self {
        Self(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &SymMatrix) -> Self {
        Self(&self.0 - &other.0)
    }

    /// `Q X Qᵀ` for a square `Q` of matching size.
    pub fn conjugate(&self, q: &Matrix) -> Result<Self> {
        if q.shape() != (self.n(), self.n()) {
            return Err(dim_err("SymMatrix::conjugate", "Q does not match X"));
        }
        Ok(Self::symmetrize(&(&(q * &self.0) * &q.transpose())))
    }
}

impl SkewMatrix {
    /// Accepts `m` if `‖m + mᵀ‖_max ≤ SYM_REJECT · max(1, ‖m‖_max)` and
    /// returns `(m − mᵀ)/2`.
    pub fn new(m: Matrix) -> Result<Self> {
        check_square("SkewMatrix::new", &m)?;
        let defect = m.skew_defect();
        if defect > tolerances::SYM_REJECT * m.norm_max().max(1.0) {
            return Err(Error::NotSkew(defect));
        }
        Ok(Self::antisymmetrize(&m))
    }

    pub fn antisymmetrize(m: &Matrix) -> Self {
        assert!(m.is_square(), "antisymmetrize of non-square matrix");
        let n = m.rows();
        Self(Matrix::from_fn(n, n, |i, j| 0.5 * (m[(i, j)] - m[(j, i)])))
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        Self::new(Matrix::from_rows(rows)?)
    }

    pub fn zeros(n: usize) -> Self {
        Self(Matrix::zeros(n, n))
    }

    /// The 2x2 symplectic unit `[[0, 1], [-1, 0]]`.
    pub fn j2() -> Self {
        Self(Matrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 1) => 1.0,
            (1, 0) => -1.0,
            _ => 0.0,
        }))
    }

    pub fn n(&self) -> usize {
        self.0.rows()
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.scale(s))
    }

    pub fn conjugate(&self, q: &Matrix) -> Result<Self> {
        if q.shape() != (self.n(), self.n()) {
            return Err(dim_err("SkewMatrix::conjugate", "Q does not match N"));
        }
        Ok(Self::antisymmetrize(&(&(q * &self.0) * &q.transpose())))
    }
}

impl Deref for SymMatrix {
    type Target = Matrix;
    fn deref(&self) -> &Matrix {
        &self.0
    }
}

impl Deref for SkewMatrix {
    type Target = Matrix;
    fn deref(&self) -> &Matrix {
        &self.0
    }
}

impl fmt::Debug for SymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Sym{:?}", self.0)
    }
}

impl fmt::Debug for SkewMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Skew{:?}", self.0)
    }
}

pub(crate) fn same_square(op: &'static str, a: &Matrix, b: &Matrix) -> Result<()> {
    if !a.is_square() || a.shape() != b.shape() {
        return Err(dim_err(op, format!("{:?} vs {:?}", a.shape(), b.shape())));
    }
    Ok(())
}

/// `[A, B] = AB − BA`.
pub fn commutator(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    same_square("commutator", a, b)?;
    Ok(&(a * b) - &(b * a))
}

/// `XN + NX`, which is skew-symmetric.
pub fn anticommutator_with_n(x: &SymMatrix, n: &SkewMatrix) -> Result<SkewMatrix> {
    same_square("anticommutator_with_n", x, n)?;
    Ok(SkewMatrix::antisymmetrize(&(&(&**x * &**n) + &(&**n * &**x))))
}

/// `⟨⟨A, B⟩⟩ = trace(AB)` for symmetric matrices, computed as the
/// entrywise sum `Σ a_ij b_ij`.
pub fn frobenius(a: &SymMatrix, b: &SymMatrix) -> Result<f64> {
    same_square("frobenius", a, b)?;
    Ok(pair(a, b))
}

/// `trace(AᵀB)` without shape checks. Equals `trace(AB)` when `A` is symmetric.
pub(crate) fn pair(a: &Matrix, b: &Matrix) -> f64 {
    a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| x * y).sum()
}

/// Spectral decomposition `X = Q diag(values) Qᵀ`; eigenvectors are the
/// columns of `vectors`, values ascending.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: Matrix,
    pub sweeps: usize,
}

/// Cyclic Jacobi eigensolver. Iterates until the off-diagonal Frobenius mass
/// is below `1e-2 · tol · ‖X‖_F`.
pub fn eig_sym(x: &SymMatrix, tol: f64) -> Result<SymEigen> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("eig_sym tolerance must be positive, got {tol}")));
    }
    let n = x.n();
    let mut a = x.as_matrix().clone();
    let mut v = Matrix::identity(n);
    let target = 1e-2 * tol * a.norm_fro();
    let off = |a: &Matrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += 2.0 * a[(i, j)] * a[(i, j)];
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    while off(&a) > target {
        if sweeps == tolerances::JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence(sweeps));
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let (app, aqq) = (a[(p, p)], a[(q, q)]);
                if apq.abs() <= f64::EPSILON * 1e-2 * (app.abs().min(aqq.abs())) {
                    a[(p, q)] = 0.0;
                    a[(q, p)] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = Matrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(SymEigen {
        values,
        vectors,
        sweeps,
    })
}

/// Outcome of a pivoted Gram–Schmidt rank computation.
#[derive(Debug, Clone, Serialize)]
pub struct RankReport {
    pub rank: usize,
    pub tol: f64,
    /// Accepted pivot norms divided by the largest input norm, in pivot order.
    pub pivots: Vec<f64>,
}

/// Index of the first maximal element.
pub(crate) fn argmax(values: impl Iterator<Item = f64>) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, v) in values.enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    best.0
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Numerical rank of a set of equal-length vectors by modified Gram–Schmidt
/// with column pivoting. A pivot is accepted while its residual norm exceeds
/// `tol` times the largest input norm.
pub fn numerical_rank<V: AsRef<[f64]>>(vectors: &[V], tol: f64) -> Result<RankReport> {
    if vectors.is_empty() {
        return Err(Error::EmptyInput("numerical_rank"));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("rank tolerance must be positive, got {tol}")));
    }
    let len = vectors[0].as_ref().len();
    if vectors.iter().any(|v| v.as_ref().len() != len) {
        return Err(dim_err("numerical_rank", "vectors of different lengths"));
    }
    let mut work: Vec<Vec<f64>> = vectors.iter().map(|v| v.as_ref().to_vec()).collect();
    if work.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    let scale = work.iter().map(|v| dot(v, v).sqrt()).fold(0.0, f64::max);
    let mut pivots = Vec::new();
    if scale == 0.0 {
        return Ok(RankReport { rank: 0, tol, pivots });
    }

    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut remaining: Vec<usize> = (0..work.len()).collect();
    while !remaining.is_empty() {
        let slot = argmax(remaining.iter().map(|&i| dot(&work[i], &work[i])));
        let idx = remaining.swap_remove(slot);
        let mut cand = std::mem::take(&mut work[idx]);
        // second orthogonalization pass against the accepted basis
        for q in &basis {
            let c = dot(q, &cand);
            cand.iter_mut().zip(q).for_each(|(x, qi)| *x -= c * qi);
        }
        let norm = dot(&cand, &cand).sqrt();
        if norm <= tol * scale {
            break;
        }
        cand.iter_mut().for_each(|x| *x /= norm);
        for &j in &remaining {
            let c = dot(&cand, &work[j]);
            work[j].iter_mut().zip(&cand).for_each(|(x, qi)| *x -= c * qi);
        }
        pivots.push(norm / scale);
        basis.push(cand);
    }
    Ok(RankReport {
        rank: basis.len(),
        tol,
        pivots,
    })
}

/// Rank at `tol`, cross-checked at `10 · tol`; disagreement is an error.
pub fn stable_rank<V: AsRef<[f64]>>(vectors: &[V], tol: f64) -> Result<usize> {
    let fine = numerical_rank(vectors, tol)?;
    let coarse = numerical_rank(vectors, 10.0 * tol)?;
    if fine.rank != coarse.rank {
        return Err(Error::RankUnstable {
            rank_at_tol: fine.rank,
            rank_at_coarse: coarse.rank,
        });
    }
    Ok(fine.rank)
}

/// Dimension of `Sym(n)`.
pub fn sym_dim(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Coordinates of `X` in the orthonormal basis returned by [`sym_basis`]:
/// the diagonal first, then `√2 · x_ij` for `i < j` in row order.
pub fn sym_coords(x: &Matrix) -> Vec<f64> {
    let n = x.rows();
    let mut out = Vec::with_capacity(sym_dim(n));
    out.extend((0..n).map(|i| x[(i, i)]));
    for i in 0..n {
        for j in (i + 1)..n {
            out.push(std::f64::consts::SQRT_2 * 0.5 * (x[(i, j)] + x[(j, i)]));
        }
    }
    out
}

/// Orthonormal basis of `Sym(n)` under the Frobenius pairing.
pub fn sym_basis(n: usize) -> Vec<SymMatrix> {
    let mut out = Vec::with_capacity(sym_dim(n));
    for i in 0..n {
        let mut m = Matrix::zeros(n, n);
        m[(i, i)] = 1.0;
        out.push(SymMatrix(m));
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..n {
        for j in (i + 1)..n {
            let mut m = Matrix::zeros(n, n);
            m[(i, j)] = h;
            m[(j, i)] = h;
            out.push(SymMatrix(m));
        }
    }
    out
}
