//! Dense square matrices, tuples of them, and words over the tuple alphabet.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{contract, Error, Result};

/// A dense real square matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct Mat {
    dim: usize,
    data: Vec<f64>,
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

impl Mat {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        Mat {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Mat::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds a matrix from rows, checking squareness and finiteness.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(contract("matrix must have at least one row"));
        }
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            let row = row.as_ref();
            if row.len() != dim {
                return Err(contract("matrix must be square"));
            }
            if row.iter().any(|x| !x.is_finite()) {
                return Err(contract("matrix entries must be finite"));
            }
            data.extend_from_slice(row);
        }
        Ok(Mat { dim, data })
    }

    /// Builds a matrix from a row-major buffer of length `dim * dim`.
    pub fn from_vec(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 || data.len() != dim * dim {
            return Err(contract("buffer length must equal dim * dim"));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(contract("matrix entries must be finite"));
        }
        Ok(Mat { dim, data })
    }

    /// Scalar 1 x 1 matrix.
    pub fn scalar(x: f64) -> Self {
        Mat {
            dim: 1,
            data: vec![x],
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.dim)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(|r| r.to_vec()).collect()
    }

    /// Entrywise absolute sum `Σ |a_ij|`.
    pub fn norm(&self) -> f64 {
        self.data.iter().map(|x| x.abs()).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0.0)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.data.iter().all(|&x| x >= 0.0)
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let d = self.dim;
        let mut out = vec![0.0; d * d];
        for i in 0..d {
            let orow = &mut out[i * d..(i + 1) * d];
            for l in 0..d {
                let a = self.data[i * d + l];
                if a == 0.0 {
                    continue;
                }
                let brow = &other.data[l * d..(l + 1) * d];
                for (o, b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        Mat { dim: d, data: out }
    }

    pub fn add(&self, other: &Mat) -> Mat {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Mat {
            dim: self.dim,
            data,
        }
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Mat {
            dim: self.dim,
            data,
        }
    }

    pub fn add_assign(&mut self, other: &Mat) {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
    }

    pub fn scale(&self, c: f64) -> Mat {
        Mat {
            dim: self.dim,
            data: self.data.iter().map(|x| x * c).collect(),
        }
    }

    pub fn transpose(&self) -> Mat {
        let d = self.dim;
        let mut out = Mat::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    /// `A x` for a column vector `x`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim);
        self.rows()
            .map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `xᵀ A` for a row vector `x`.
    pub fn vec_mul(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim);
        let d = self.dim;
        let mut out = vec![0.0; d];
        for (i, xi) in x.iter().enumerate() {
            if *xi == 0.0 {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += xi * a;
            }
        }
        out
    }

    /// Standard Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Mat) -> Mat {
        let (p, q) = (self.dim, other.dim);
        let n = p * q;
        let mut out = Mat::zeros(n);
        for i in 0..p {
            for j in 0..p {
                let a = self[(i, j)];
                if a == 0.0 {
                    continue;
                }
                for k in 0..q {
                    for l in 0..q {
                        out[(i * q + k, j * q + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// Conjugation `T⁻¹ A T` by the permutation matrix whose `t`-th column is
    /// `e_{order[t]}`: entry `(s, t)` of the result is `A[order[s], order[t]]`.
    pub fn permuted(&self, order: &[usize]) -> Mat {
        assert_eq!(order.len(), self.dim);
        let mut out = Mat::zeros(self.dim);
        for (s, &i) in order.iter().enumerate() {
            for (t, &j) in order.iter().enumerate() {
                out[(s, t)] = self[(i, j)];
            }
        }
        out
    }

    /// Principal submatrix on the given index set (in the given order).
    pub fn principal(&self, idx: &[usize]) -> Mat {
        let mut out = Mat::zeros(idx.len());
        for (s, &i) in idx.iter().enumerate() {
            for (t, &j) in idx.iter().enumerate() {
                out[(s, t)] = self[(i, j)];
            }
        }
        out
    }

    /// Square of the matrix, rescaled to unit norm; returns the pre-scaling norm.
    pub(crate) fn square_normalized(&self) -> (Mat, f64) {
        let sq = self.mul(self);
        let n = sq.norm();
        if n == 0.0 {
            return (sq, 0.0);
        }
        (sq.scale(1.0 / n), n)
    }
}

impl core::ops::Index<(usize, usize)> for Mat {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.dim + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for Mat {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.dim + j]
    }
}

/// `q`-fold Kronecker power. The result has dimension `d^q`, which must not
/// exceed `cap`.
pub fn kron_power(a: &Mat, q: u32, cap: usize) -> Result<Mat> {
    if q == 0 {
        return Err(contract("Kronecker power must be positive"));
    }
    let needed = (a.dim() as u128).checked_pow(q).unwrap_or(u128::MAX);
    if needed > cap as u128 {
        return Err(Error::Resource {
            what: "Kronecker power dimension",
            needed,
            cap: cap as u128,
        });
    }
    let mut out = a.clone();
    for _ in 1..q {
        out = out.kron(a);
    }
    Ok(out)
}

/// A finite word over the alphabet `{0, ..., k-1}` (displayed 1-based).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(pub Vec<usize>);

impl Word {
    pub fn new(symbols: Vec<usize>) -> Self {
        Word(symbols)
    }

    /// Builds a word from 1-based symbols as written in the literature.
    pub fn from_one_based(symbols: &[usize]) -> Self {
        Word(symbols.iter().map(|s| s - 1).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[usize] {
        &self.0
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.0.iter().map(|s| s + 1).collect()
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word")?;
        f.debug_list().entries(self.one_based()).finish()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}", s + 1)?;
        }
        Ok(())
    }
}

/// A tuple `(M_1, ..., M_k)` of equal-dimension square matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct MatTuple {
    mats: Vec<Mat>,
}

impl MatTuple {
    /// Validates `k ≥ 1`, equal dimensions, and that not every matrix is zero.
    pub fn new(mats: Vec<Mat>) -> Result<Self> {
        let first = mats.first().ok_or_else(|| contract("tuple must contain at least one matrix"))?;
        let d = first.dim();
        if mats.iter().any(|m| m.dim() != d) {
            return Err(contract("all matrices in a tuple must share one dimension"));
        }
        if mats.iter().all(Mat::is_zero) {
            return Err(contract("tuple must contain a nonzero matrix"));
        }
        Ok(MatTuple { mats })
    }

    pub fn from_rows(mats: &[Vec<Vec<f64>>]) -> Result<Self> {
        let mats = mats.iter().map(|m| Mat::from_rows(m)).collect::<Result<Vec<_>>>()?;
        MatTuple::new(mats)
    }

    /// The 2 x 2 matrix units `(E11, E12, E21, E22)`.
    pub fn elementary_2x2() -> Self {
        let unit = |i: usize, j: usize| {
            let mut m = Mat::zeros(2);
            m[(i, j)] = 1.0;
            m
        };
        MatTuple {
            mats: vec![unit(0, 0), unit(0, 1), unit(1, 0), unit(1, 1)],
        }
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.mats.len()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.mats[0].dim()
    }

    pub fn mats(&self) -> &[Mat] {
        &self.mats
    }

    pub fn get(&self, symbol: usize) -> &Mat {
        &self.mats[symbol]
    }

    pub fn is_nonnegative(&self) -> bool {
        self.mats.iter().all(Mat::is_nonnegative)
    }

    pub fn sum(&self) -> Mat {
        let mut s = Mat::zeros(self.dim());
        for m in &self.mats {
            s.add_assign(m);
        }
        s
    }

    pub fn scaled(&self, c: f64) -> MatTuple {
        MatTuple {
            mats: self.mats.iter().map(|m| m.scale(c)).collect(),
        }
    }

    /// Conjugates every matrix by the same permutation (see [`Mat::permuted`]).
    pub fn permuted(&self, order: &[usize]) -> MatTuple {
        MatTuple {
            mats: self.mats.iter().map(|m| m.permuted(order)).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.mats.iter().fold(0.0, |m, a| m.max(a.max_abs()))
    }

    pub fn check_word(&self, word: &Word) -> Result<()> {
        if word.0.iter().any(|&s| s >= self.k()) {
            return Err(contract("word symbol out of range"));
        }
        Ok(())
    }

    /// Left-to-right product `M_{j_1} ... M_{j_n}`.
    pub fn word_product(&self, word: &Word) -> Result<Mat> {
        if word.is_empty() {
            return Err(contract("word product needs a nonempty word"));
        }
        self.check_word(word)?;
        let mut acc = self.mats[word.0[0]].clone();
        for &s in &word.0[1..] {
            acc = acc.mul(&self.mats[s]);
        }
        Ok(acc)
    }
}
