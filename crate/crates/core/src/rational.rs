//! Exact rational matrices: parsing, products, kernels, determinants, and
//! recognition of rational eigenvalues from floating-point estimates.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{contract, Error, Result};
use crate::matrix::{Mat, MatTuple, Word};

pub type Rat = BigRational;

/// Parses `"p/q"`, an integer, or a finite decimal such as `"-0.125"`.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let t = s.trim();
    let bad = || Error::InputData(format!("not a rational literal: {s:?}"));
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::InputData(format!("zero denominator in {s:?}")));
        }
        return Ok(Rat::new(p, q));
    }
    if let Some((int, frac)) = t.split_once('.') {
        let neg = int.starts_with('-');
        let digits = int.trim_start_matches(['-', '+']);
        if frac.is_empty() && digits.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let whole: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().map_err(|_| bad())? };
        let f: BigInt = if frac.is_empty() { BigInt::zero() } else { frac.parse().map_err(|_| bad())? };
        let den = num_traits::pow(BigInt::from(10), frac.len());
        let mag = Rat::new(whole * &den + f, den);
        return Ok(if neg { -mag } else { mag });
    }
    let n: BigInt = t.parse().map_err(|_| bad())?;
    Ok(Rat::from_integer(n))
}

/// Canonical text form: `"p/q"`, or `"p"` for integers.
pub fn format_rat(r: &Rat) -> String {
    if r.is_integer() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact value of a finite float.
pub fn from_f64(x: f64) -> Option<Rat> {
    Rat::from_float(x)
}

/// Continued-fraction convergents of `x` with denominators up to `max_den`.
pub fn convergents(x: f64, max_den: u64) -> Vec<Rat> {
    let mut out = Vec::new();
    if !x.is_finite() {
        return out;
    }
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut y = x;
    for _ in 0..64 {
        let a = libm::floor(y);
        let ai = BigInt::from(a as i64);
        let h2 = &ai * &h1 + &h0;
        let k2 = &ai * &k1 + &k0;
        if k2 > BigInt::from(max_den) {
            break;
        }
        out.push(Rat::new(h2.clone(), k2.clone()));
        h0 = core::mem::replace(&mut h1, h2);
        k0 = core::mem::replace(&mut k1, k2);
        let frac = y - a;
        if frac.abs() < 1e-15 {
            break;
        }
        y = 1.0 / frac;
    }
    out
}

/// Dense square matrix over the rationals.
#[derive(Clone, PartialEq, Eq)]
pub struct RatMat {
    dim: usize,
    data: Vec<Rat>,
}

impl fmt::Debug for RatMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = (0..self.dim)
            .map(|i| (0..self.dim).map(|j| format_rat(&self[(i, j)])).collect())
            .collect();
        f.debug_list().entries(rows).finish()
    }
}

impl core::ops::Index<(usize, usize)> for RatMat {
    type Output = Rat;
    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        &self.data[i * self.dim + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for RatMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        &mut self.data[i * self.dim + j]
    }
}

impl RatMat {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        RatMat {
            dim,
            data: vec![Rat::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = RatMat::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Rat::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(contract("rational matrix must be square and nonempty"));
        }
        Ok(RatMat {
            dim,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Exact image of a float matrix.
    pub fn from_mat(m: &Mat) -> Self {
        RatMat {
            dim: m.dim(),
            data: m.as_slice().iter().map(|&x| from_f64(x).expect("finite entry")).collect(),
        }
    }

    pub fn to_mat(&self) -> Mat {
        Mat::from_vec(self.dim, self.data.iter().map(to_f64).collect()).expect("finite rational entries")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn to_rows(&self) -> Vec<Vec<Rat>> {
        self.data.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.data.iter().all(|x| !x.is_negative())
    }

    pub fn mul(&self, other: &RatMat) -> RatMat {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let d = self.dim;
        let mut out = RatMat::zeros(d);
        for i in 0..d {
            for l in 0..d {
                let a = &self[(i, l)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..d {
                    let b = &other[(l, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &RatMat) -> RatMat {
        RatMat {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &RatMat) -> RatMat {
        RatMat {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, c: &Rat) -> RatMat {
        RatMat {
            dim: self.dim,
            data: self.data.iter().map(|a| a * c).collect(),
        }
    }

    pub fn transpose(&self) -> RatMat {
        let mut out = RatMat::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(j, i)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[Rat]) -> Vec<Rat> {
        (0..self.dim)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn column_sums(&self) -> Vec<Rat> {
        (0..self.dim)
            .map(|j| (0..self.dim).map(|i| self[(i, j)].clone()).sum())
            .collect()
    }

    pub fn principal(&self, idx: &[usize]) -> RatMat {
        let mut out = RatMat::zeros(idx.len());
        for (s, &i) in idx.iter().enumerate() {
            for (t, &j) in idx.iter().enumerate() {
                out[(s, t)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn permuted(&self, order: &[usize]) -> RatMat {
        self.principal(order)
    }

    /// Exact determinant by fraction-valued Gaussian elimination.
    pub fn det(&self) -> Rat {
        let d = self.dim;
        let mut m = self.to_rows();
        let mut det = Rat::one();
        for col in 0..d {
            let Some(piv) = (col..d).find(|&r| !m[r][col].is_zero()) else {
                return Rat::zero();
            };
            if piv != col {
                m.swap(piv, col);
                det = -det;
            }
            let p = m[col][col].clone();
            det *= &p;
            for r in col + 1..d {
                if m[r][col].is_zero() {
                    continue;
                }
                let f = &m[r][col] / &p;
                for c in col..d {
                    let t = &f * &m[col][c];
                    m[r][c] -= t;
                }
            }
        }
        det
    }

    /// Exact inverse, or `None` if the matrix is singular.
    pub fn inverse(&self) -> Option<RatMat> {
        let d = self.dim;
        let mut m = self.to_rows();
        let mut inv = RatMat::identity(d).to_rows();
        for col in 0..d {
            let piv = (col..d).find(|&r| !m[r][col].is_zero())?;
            m.swap(piv, col);
            inv.swap(piv, col);
            let p = m[col][col].clone();
            for x in m[col].iter_mut().chain(inv[col].iter_mut()) {
                *x /= &p;
            }
            let (prow, pinv) = (m[col].clone(), inv[col].clone());
            for r in 0..d {
                if r == col || m[r][col].is_zero() {
                    continue;
                }
                let f = m[r][col].clone();
                for (x, y) in m[r].iter_mut().zip(&prow) {
                    *x -= &f * y;
                }
                for (x, y) in inv[r].iter_mut().zip(&pinv) {
                    *x -= &f * y;
                }
            }
        }
        RatMat::from_rows(inv).ok()
    }

    /// Exact kernel basis of the matrix.
    pub fn kernel(&self) -> Vec<Vec<Rat>> {
        kernel(&self.to_rows(), self.dim)
    }
}

/// Exact kernel of a `rows x cols` rational system via reduced row echelon form.
pub fn kernel(rows: &[Vec<Rat>], cols: usize) -> Vec<Vec<Rat>> {
    let mut m: Vec<Vec<Rat>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row >= m.len() {
            break;
        }
        let Some(piv) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, piv);
        let p = m[row][col].clone();
        for x in m[row].iter_mut() {
            *x /= &p;
        }
        let prow = m[row].clone();
        for (i, r) in m.iter_mut().enumerate() {
            if i == row || r[col].is_zero() {
                continue;
            }
            let f = r[col].clone();
            for (x, y) in r.iter_mut().zip(&prow) {
                *x -= &f * y;
            }
        }
        pivots.push(col);
        row += 1;
    }
    (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![Rat::zero(); cols];
            v[free] = Rat::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[r][free].clone();
            }
            v
        })
        .collect()
}

/// Exact determinant of an integer matrix (Bareiss fraction-free elimination).
pub fn det_int(a: &[Vec<BigInt>]) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut m = a.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&r| !m[r][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v.div_floor(&prev);
            }
        }
        prev = m[k][k].clone();
    }
    sign * m[n - 1][n - 1].clone()
}

/// A rational eigenvalue of `a` within relative distance `rel` of `approx`,
/// found among the continued-fraction convergents of `approx` and confirmed
/// by an exact singularity test.
pub fn rational_eigenvalue_near(a: &RatMat, approx: f64, rel: f64, max_den: u64) -> Option<Rat> {
    let id = RatMat::identity(a.dim());
    for c in convergents(approx, max_den) {
        let cf = to_f64(&c);
        if (cf - approx).abs() > rel * approx.abs().max(1e-300) {
            continue;
        }
        if a.sub(&id.scale(&c)).det().is_zero() {
            return Some(c);
        }
    }
    None
}

/// A strictly positive vector spanning the kernel of `a`, if the kernel is
/// one-dimensional and its generator has constant nonzero sign.
pub fn positive_kernel_vector(a: &RatMat) -> Option<Vec<Rat>> {
    let ker = a.kernel();
    if ker.len() != 1 {
        return None;
    }
    let v = ker.into_iter().next().unwrap();
    if v.iter().all(Signed::is_positive) {
        Some(v)
    } else if v.iter().all(Signed::is_negative) {
        Some(v.into_iter().map(|x| -x).collect())
    } else {
        None
    }
}

/// Tuple of rational matrices sharing a dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatTuple {
    mats: Vec<RatMat>,
}

impl RatTuple {
    pub fn new(mats: Vec<RatMat>) -> Result<Self> {
        let Some(first) = mats.first() else {
            return Err(contract("a tuple needs at least one matrix"));
        };
        let d = first.dim();
        if mats.iter().any(|m| m.dim() != d) {
            return Err(contract("all matrices in a tuple must share a dimension"));
        }
        if mats.iter().all(RatMat::is_zero) {
            return Err(contract("at least one matrix must be nonzero"));
        }
        Ok(RatTuple { mats })
    }

    pub fn from_tuple(m: &MatTuple) -> Self {
        RatTuple {
            mats: m.mats().iter().map(RatMat::from_mat).collect(),
        }
    }

    pub fn to_tuple(&self) -> Result<MatTuple> {
        MatTuple::new(self.mats.iter().map(RatMat::to_mat).collect())
    }

    pub fn k(&self) -> usize {
        self.mats.len()
    }

    pub fn dim(&self) -> usize {
        self.mats[0].dim()
    }

    pub fn mats(&self) -> &[RatMat] {
        &self.mats
    }

    pub fn get(&self, symbol: usize) -> &RatMat {
        &self.mats[symbol]
    }

    pub fn is_nonnegative(&self) -> bool {
        self.mats.iter().all(RatMat::is_nonnegative)
    }

    pub fn sum(&self) -> RatMat {
        let mut s = RatMat::zeros(self.dim());
        for m in &self.mats {
            s = s.add(m);
        }
        s
    }

    pub fn scaled(&self, c: &Rat) -> RatTuple {
        RatTuple {
            mats: self.mats.iter().map(|m| m.scale(c)).collect(),
        }
    }

    pub fn word_product(&self, word: &Word) -> Result<RatMat> {
        let syms = word.symbols();
        let Some(&first) = syms.first() else {
            return Err(contract("word product of the empty word"));
        };
        if syms.iter().any(|&s| s >= self.k()) {
            return Err(contract("word symbol out of range"));
        }
        let mut p = self.mats[first].clone();
        for &s in &syms[1..] {
            p = p.mul(&self.mats[s]);
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> Rat {
        Rat::new(BigInt::from(p), BigInt::from(q))
    }

    #[test]
    fn parses_literals() {
        assert_eq!(parse_rat("3/6").unwrap(), r(1, 2));
        assert_eq!(parse_rat("-7").unwrap(), r(-7, 1));
        assert_eq!(parse_rat("-0.125").unwrap(), r(-1, 8));
        assert_eq!(parse_rat(".5").unwrap(), r(1, 2));
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("abc").is_err());
        assert!(parse_rat("1e-3").is_err());
        assert_eq!(format_rat(&r(6, 4)), "3/2");
        assert_eq!(format_rat(&r(4, 2)), "2");
    }

    #[test]
    fn convergents_recover_fractions() {
        let c = convergents(3.0 / 7.0, 1000);
        assert_eq!(c.last().unwrap(), &r(3, 7));
        let phi = convergents((1.0 + libm::sqrt(5.0)) / 2.0, 100);
        assert_eq!(phi.last().unwrap(), &r(144, 89));
    }

    #[test]
    fn determinants_agree() {
        let a = RatMat::from_rows(vec![vec![r(2, 1), r(1, 1)], vec![r(1, 1), r(3, 1)]]).unwrap();
        assert_eq!(a.det(), r(5, 1));
        let ints = vec![
            vec![BigInt::from(2), BigInt::from(0), BigInt::from(1)],
            vec![BigInt::from(1), BigInt::from(3), BigInt::from(2)],
            vec![BigInt::from(1), BigInt::from(1), BigInt::from(2)],
        ];
        assert_eq!(det_int(&ints), BigInt::from(6));
        let singular = vec![vec![BigInt::from(0), BigInt::from(1)], vec![BigInt::from(0), BigInt::from(2)]];
        assert_eq!(det_int(&singular), BigInt::zero());
    }

    #[test]
    fn kernel_and_eigenvalue() {
        let a = RatMat::from_rows(vec![vec![r(1, 2), r(1, 2)], vec![r(1, 3), r(2, 3)]]).unwrap();
        let lam = rational_eigenvalue_near(&a, 1.0 + 1e-13, 1e-9, 1_000_000).unwrap();
        assert_eq!(lam, r(1, 1));
        let v = positive_kernel_vector(&a.sub(&RatMat::identity(2))).unwrap();
        assert_eq!(v[0], v[1]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), RatMat::identity(2));
        assert!(RatMat::zeros(2).inverse().is_none());
        let golden = RatMat::from_rows(vec![vec![r(1, 1), r(1, 1)], vec![r(1, 1), r(0, 1)]]).unwrap();
        assert!(rational_eigenvalue_near(&golden, 1.618033988749895, 1e-9, 1_000_000).is_none());
    }

    #[test]
    fn float_round_trip_is_exact() {
        let m = Mat::from_rows(&[[0.5, -0.25], [3.0, 0.0]]).unwrap();
        let q = RatMat::from_mat(&m);
        assert_eq!(q[(0, 1)], r(-1, 4));
        assert_eq!(q.to_mat(), m);
    }
}
