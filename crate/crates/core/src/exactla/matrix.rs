use std::fmt;

use thiserror::Error;

use crate::scalars::{FieldElem, Rational};
use crate::series::{Series, SeriesError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinAlgError {
    #[error("matrix is singular")]
    Singular,
    #[error("pivot not determined at the available precision")]
    InsufficientPrecision,
    #[error("shape mismatch: {0}")]
    Shape(String),
}

/// Ring operations needed by the dense matrix code.
pub trait Scalar: Clone + PartialEq + fmt::Debug + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    fn negate(&self) -> Self;
    fn from_field(c: FieldElem) -> Self;
}

impl Scalar for FieldElem {
    fn zero() -> Self {
        FieldElem::zero()
    }
    fn one() -> Self {
        FieldElem::one()
    }
    fn is_zero(&self) -> bool {
        FieldElem::is_zero(self)
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negate(&self) -> Self {
        -self
    }
    fn from_field(c: FieldElem) -> Self {
        c
    }
}

impl Scalar for Series {
    fn zero() -> Self {
        Series::zero()
    }
    fn one() -> Self {
        Series::one()
    }
    /// Exactly zero; a series that is only `O(t^p)` is not considered zero.
    fn is_zero(&self) -> bool {
        self.is_exact_zero()
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negate(&self) -> Self {
        -self
    }
    fn from_field(c: FieldElem) -> Self {
        Series::constant(c)
    }
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self, LinAlgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(LinAlgError::Shape("ragged rows".into()));
        }
        Ok(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<S>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn mul(&self, o: &Matrix<S>) -> Result<Matrix<S>, LinAlgError> {
        if self.cols != o.rows {
            return Err(LinAlgError::Shape(format!("{}x{} times {}x{}", self.rows, self.cols, o.rows, o.cols)));
        }
        let mut out: Matrix<S> = Matrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = &o[(k, j)];
                    if b.is_zero() {
                        continue;
                    }
                    out[(i, j)] = out[(i, j)].plus(&a.times(b));
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[S]) -> Result<Vec<S>, LinAlgError> {
        if self.cols != v.len() {
            return Err(LinAlgError::Shape("vector length".into()));
        }
        Ok((0..self.rows)
            .map(|i| {
                let mut acc = S::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc.plus(&a.times(b));
                    }
                }
                acc
            })
            .collect())
    }

    pub fn add(&self, o: &Matrix<S>) -> Result<Matrix<S>, LinAlgError> {
        if self.rows != o.rows || self.cols != o.cols {
            return Err(LinAlgError::Shape("add".into()));
        }
        Ok(Matrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].plus(&o[(i, j)])))
    }

    pub fn scale(&self, c: &S) -> Matrix<S> {
        Matrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].times(c))
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Matrix<T> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, o: &Matrix<S>) -> Matrix<S> {
        let mut out = Matrix::zeros(self.rows + o.rows, self.cols + o.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)].clone();
            }
        }
        for i in 0..o.rows {
            for j in 0..o.cols {
                out[(self.rows + i, self.cols + j)] = o[(i, j)].clone();
            }
        }
        out
    }

    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Matrix<S> {
        Matrix::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)].clone())
    }

    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Matrix<S> {
        Matrix::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])].clone())
    }

    /// Determinant by Laplace expansion along rows; meant for n <= 5.
    pub fn det(&self) -> Result<S, LinAlgError> {
        if !self.is_square() {
            return Err(LinAlgError::Shape("det of non-square".into()));
        }
        Ok(det_rec(self, &(0..self.cols).collect::<Vec<_>>(), 0))
    }
}

fn det_rec<S: Scalar>(m: &Matrix<S>, cols: &[usize], row: usize) -> S {
    if cols.is_empty() {
        return S::one();
    }
    let mut acc = S::zero();
    for (k, &c) in cols.iter().enumerate() {
        let a = &m[(row, c)];
        if a.is_zero() {
            continue;
        }
        let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let minor = det_rec(m, &rest, row + 1);
        let term = a.times(&minor);
        acc = if k % 2 == 0 { acc.plus(&term) } else { acc.minus(&term) };
    }
    acc
}

impl<S> std::ops::Index<(usize, usize)> for Matrix<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.cols + j]
    }
}

impl<S> std::ops::IndexMut<(usize, usize)> for Matrix<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for Matrix<FieldElem> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.rows {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str("[")?;
            for j in 0..self.cols {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{}", self[(i, j)])?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}

/// Result of row reduction.
#[derive(Debug, Clone, PartialEq)]
pub struct Rref {
    pub reduced: Matrix<FieldElem>,
    pub rank: usize,
    pub pivots: Vec<usize>,
    pub kernel: Vec<Vec<FieldElem>>,
}

pub fn rref(m: &Matrix<FieldElem>) -> Rref {
    let mut r = m.clone();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..r.cols {
        if row == r.rows {
            break;
        }
        let Some(p) = (row..r.rows).find(|&i| !r[(i, col)].is_zero()) else {
            continue;
        };
        if p != row {
            for j in 0..r.cols {
                let tmp = r[(p, j)].clone();
                r[(p, j)] = r[(row, j)].clone();
                r[(row, j)] = tmp;
            }
        }
        let inv = r[(row, col)].inv().expect("nonzero pivot");
        for j in col..r.cols {
            r[(row, j)] = &r[(row, j)] * &inv;
        }
        for i in 0..r.rows {
            if i == row || r[(i, col)].is_zero() {
                continue;
            }
            let f = r[(i, col)].clone();
            for j in col..r.cols {
                if r[(row, j)].is_zero() {
                    continue;
                }
                let d = &f * &r[(row, j)];
                r[(i, j)] -= &d;
            }
        }
        pivots.push(col);
        row += 1;
    }
    let rank = pivots.len();
    let mut kernel = Vec::new();
    for free in (0..r.cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![FieldElem::zero(); r.cols];
        v[free] = FieldElem::one();
        for (k, &pc) in pivots.iter().enumerate() {
            v[pc] = -&r[(k, free)];
        }
        kernel.push(v);
    }
    Rref { reduced: r, rank, pivots, kernel }
}

pub fn rank(m: &Matrix<FieldElem>) -> usize {
    rref(m).rank
}

/// Rank of the span of a list of vectors.
pub fn span_rank(vectors: &[Vec<FieldElem>], dim: usize) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let m = Matrix::from_fn(vectors.len(), dim, |i, j| vectors[i][j].clone());
    rank(&m)
}

/// A basis of the row space of the given vectors (rows of the reduced echelon form).
pub fn span_basis(vectors: &[Vec<FieldElem>], dim: usize) -> Vec<Vec<FieldElem>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let m = Matrix::from_fn(vectors.len(), dim, |i, j| vectors[i][j].clone());
    let r = rref(&m);
    (0..r.rank).map(|i| r.reduced.row(i).to_vec()).collect()
}

pub fn inverse(m: &Matrix<FieldElem>) -> Result<Matrix<FieldElem>, LinAlgError> {
    if !m.is_square() {
        return Err(LinAlgError::Shape("inverse of non-square".into()));
    }
    let n = m.rows;
    let aug = Matrix::from_fn(n, 2 * n, |i, j| {
        if j < n {
            m[(i, j)].clone()
        } else if j - n == i {
            FieldElem::one()
        } else {
            FieldElem::zero()
        }
    });
    let r = rref(&aug);
    if r.pivots.iter().take(n).enumerate().any(|(k, &p)| p != k) || r.rank < n {
        return Err(LinAlgError::Singular);
    }
    Ok(r.reduced.submatrix(0, n, n, n))
}

/// Some solution of `M x = b`, if one exists.
pub fn solve(m: &Matrix<FieldElem>, b: &[FieldElem]) -> Option<Vec<FieldElem>> {
    let n = m.cols;
    let aug = Matrix::from_fn(m.rows, n + 1, |i, j| if j < n { m[(i, j)].clone() } else { b[i].clone() });
    let r = rref(&aug);
    if r.pivots.last() == Some(&n) {
        return None;
    }
    let mut x = vec![FieldElem::zero(); n];
    for (k, &p) in r.pivots.iter().enumerate() {
        x[p] = r.reduced[(k, n)].clone();
    }
    Some(x)
}

/// Pivot choice over series: smallest leading exponent, ties by row index.
fn series_pivot(m: &Matrix<Series>, col: usize, from: usize) -> Result<usize, LinAlgError> {
    let mut best: Option<(usize, Rational)> = None;
    let mut undetermined = false;
    for i in from..m.rows {
        let x = &m[(i, col)];
        match x.leading() {
            Some((e, _)) => {
                if best.as_ref().is_none_or(|(_, be)| e < be) {
                    best = Some((i, e.clone()));
                }
            }
            None => {
                if !x.is_exact_zero() {
                    undetermined = true;
                }
            }
        }
    }
    match best {
        Some((i, _)) => Ok(i),
        None if undetermined => Err(LinAlgError::InsufficientPrecision),
        None => Err(LinAlgError::Singular),
    }
}

fn series_err(_: SeriesError) -> LinAlgError {
    LinAlgError::InsufficientPrecision
}

/// Gauss-Jordan elimination on `[M | B]` over series; returns `X` with `M X = B`.
pub fn solve_series_matrix(
    m: &Matrix<Series>,
    b: &Matrix<Series>,
    work: &Rational,
) -> Result<Matrix<Series>, LinAlgError> {
    if !m.is_square() || b.rows != m.rows {
        return Err(LinAlgError::Shape("solve_series".into()));
    }
    let n = m.rows;
    let k = b.cols;
    let mut a = Matrix::from_fn(n, n + k, |i, j| if j < n { m[(i, j)].clone() } else { b[(i, j - n)].clone() });
    for col in 0..n {
        let p = series_pivot(&a, col, col)?;
        if p != col {
            for j in 0..n + k {
                let tmp = a[(p, j)].clone();
                a[(p, j)] = a[(col, j)].clone();
                a[(col, j)] = tmp;
            }
        }
        let inv = a[(col, col)].inv(work).map_err(series_err)?;
        for j in 0..n + k {
            if j == col {
                a[(col, j)] = Series::one();
            } else if !a[(col, j)].is_exact_zero() {
                a[(col, j)] = &a[(col, j)] * &inv;
            }
        }
        for i in 0..n {
            if i == col || a[(i, col)].is_exact_zero() {
                continue;
            }
            let f = a[(i, col)].clone();
            for j in 0..n + k {
                if j == col {
                    a[(i, j)] = Series::zero();
                } else if !a[(col, j)].is_exact_zero() {
                    let d = &f * &a[(col, j)];
                    a[(i, j)] = &a[(i, j)] - &d;
                }
            }
        }
    }
    Ok(a.submatrix(0, n, n, k))
}

pub fn solve_series(m: &Matrix<Series>, b: &[Series], work: &Rational) -> Result<Vec<Series>, LinAlgError> {
    let bm = Matrix::from_fn(b.len(), 1, |i, _| b[i].clone());
    Ok(solve_series_matrix(m, &bm, work)?.col(0))
}

pub fn inverse_series(m: &Matrix<Series>, work: &Rational) -> Result<Matrix<Series>, LinAlgError> {
    solve_series_matrix(m, &Matrix::identity(m.rows), work)
}

/// Scalars whose square matrices can be inverted; `work` is the series working precision.
pub trait Invertible: Scalar {
    fn invert(m: &Matrix<Self>, work: &Rational) -> Result<Matrix<Self>, LinAlgError>;
}

impl Invertible for FieldElem {
    fn invert(m: &Matrix<Self>, _work: &Rational) -> Result<Matrix<Self>, LinAlgError> {
        inverse(m)
    }
}

impl Invertible for Series {
    fn invert(m: &Matrix<Self>, work: &Rational) -> Result<Matrix<Self>, LinAlgError> {
        inverse_series(m, work)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::rat_int;
    use crate::series::default_precision;

    fn fm(rows: &[&[i64]]) -> Matrix<FieldElem> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| FieldElem::from_int(x)).collect()).collect()).unwrap()
    }

    #[test]
    fn rref_examples() {
        let r = rref(&fm(&[&[1, 1], &[1, 1]]));
        assert_eq!(r.rank, 1);
        assert_eq!(r.kernel, vec![vec![FieldElem::from_int(-1), FieldElem::from_int(1)]]);
        let r = rref(&Matrix::identity(3));
        assert_eq!(r.rank, 3);
        assert!(r.kernel.is_empty());
        let r = rref(&Matrix::<FieldElem>::zeros(2, 3));
        assert_eq!(r.rank, 0);
        assert_eq!(r.kernel.len(), 3);
    }

    #[test]
    fn inverse_and_det() {
        let m = fm(&[&[2, 1], &[1, 1]]);
        let inv = inverse(&m).unwrap();
        assert_eq!(m.mul(&inv).unwrap(), Matrix::identity(2));
        assert_eq!(m.det().unwrap(), FieldElem::one());
        assert_eq!(inverse(&fm(&[&[1, 2], &[2, 4]])), Err(LinAlgError::Singular));
    }

    #[test]
    fn solve_series_examples() {
        let w = default_precision();
        let t = Series::t();
        let m = Matrix::from_rows(vec![vec![t.clone(), Series::zero()], vec![Series::zero(), Series::one()]]).unwrap();
        let x = solve_series(&m, &[Series::one(), Series::one()], &w).unwrap();
        assert_eq!(x[0], Series::monomial(FieldElem::one(), rat_int(-1)));
        assert_eq!(x[1], Series::one());
        let id = Matrix::<Series>::identity(3);
        let b = vec![t.clone(), Series::one(), Series::zero()];
        assert_eq!(solve_series(&id, &b, &w).unwrap(), b);
        let sing = Matrix::from_rows(vec![vec![t.clone(), t.clone()], vec![t.clone(), t.clone()]]).unwrap();
        assert_eq!(solve_series(&sing, &[Series::one(), Series::one()], &w), Err(LinAlgError::Singular));
    }
}
