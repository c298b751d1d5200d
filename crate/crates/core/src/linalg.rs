//! Small dense linear algebra: Gaussian elimination, numeric null spaces,
//! incremental orthonormal bases and affine hulls.

use alloc::vec;
use alloc::vec::Vec;

use crate::matrix::Mat;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
/// Returns `None` when a pivot vanishes exactly.
pub fn solve(a: &Mat, b: &[f64]) -> Option<Vec<f64>> {
    let d = a.dim();
    let mut m: Vec<Vec<f64>> = a.to_rows();
    let mut rhs = b.to_vec();
    for col in 0..d {
        let piv = (col..d).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col] == 0.0 {
            return None;
        }
        m.swap(col, piv);
        rhs.swap(col, piv);
        for r in col + 1..d {
            let f = m[r][col] / m[col][col];
            if f == 0.0 {
                continue;
            }
            for c in col..d {
                m[r][c] -= f * m[col][c];
            }
            rhs[r] -= f * rhs[col];
        }
    }
    let mut x = vec![0.0; d];
    for r in (0..d).rev() {
        let s: f64 = (r + 1..d).map(|c| m[r][c] * x[c]).sum();
        x[r] = (rhs[r] - s) / m[r][r];
    }
    Some(x)
}

pub fn inverse(a: &Mat) -> Option<Mat> {
    let d = a.dim();
    let mut out = Mat::zeros(d);
    for j in 0..d {
        let mut e = vec![0.0; d];
        e[j] = 1.0;
        let col = solve(a, &e)?;
        for i in 0..d {
            out[(i, j)] = col[i];
        }
    }
    Some(out)
}

/// Numeric null space of a `rows x cols` system given row by row.
///
/// Uses reduced row echelon form with full column scans; a pivot is accepted
/// when its magnitude exceeds `rel_tol` times the largest entry of the input.
pub fn null_space(rows: &[Vec<f64>], cols: usize, rel_tol: f64) -> Vec<Vec<f64>> {
    let mut m: Vec<Vec<f64>> = rows.to_vec();
    let scale = m
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |s, x| s.max(x.abs()));
    let eps = if scale == 0.0 { 0.0 } else { rel_tol * scale };
    let mut pivots: Vec<usize> = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row >= m.len() {
            break;
        }
        let (piv, val) = (row..m.len())
            .map(|i| (i, m[i][col].abs()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if val <= eps {
            for r in m.iter_mut().skip(row) {
                r[col] = 0.0;
            }
            continue;
        }
        m.swap(row, piv);
        let p = m[row][col];
        for c in 0..cols {
            m[row][c] /= p;
        }
        let prow = m[row].clone();
        for (i, r) in m.iter_mut().enumerate() {
            if i != row {
                let f = r[col];
                if f != 0.0 {
                    axpy(-f, &prow, r);
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![0.0; cols];
            v[f] = 1.0;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[r][f];
            }
            let n = norm2(&v);
            v.iter_mut().for_each(|x| *x /= n);
            v
        })
        .collect()
}

/// Outcome of trying to extend an orthonormal basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extension {
    /// The vector was independent and has been added.
    Added,
    /// The vector lies in the current span.
    Dependent,
    /// The relative residual fell between the two thresholds.
    Ambiguous,
}

/// Incrementally built orthonormal basis of a subspace of `R^n`.
#[derive(Debug, Clone)]
pub struct OrthoBasis {
    n: usize,
    vecs: Vec<Vec<f64>>,
    /// Residuals below `dep_tol * |v|` count as dependent.
    dep_tol: f64,
    /// Residuals above `ind_tol * |v|` count as independent.
    ind_tol: f64,
}

impl OrthoBasis {
    pub fn new(n: usize, tol: f64) -> Self {
        OrthoBasis {
            n,
            vecs: Vec::new(),
            dep_tol: tol,
            ind_tol: tol,
        }
    }

    /// A basis with a gray band `[dep_tol, ind_tol]` reported as ambiguous.
    pub fn with_band(n: usize, dep_tol: f64, ind_tol: f64) -> Self {
        OrthoBasis {
            n,
            vecs: Vec::new(),
            dep_tol,
            ind_tol,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.vecs.len()
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vecs
    }

    /// Component of `v` orthogonal to the span (two Gram-Schmidt passes).
    pub fn residual(&self, v: &[f64]) -> Vec<f64> {
        let mut w = v.to_vec();
        for _ in 0..2 {
            for q in &self.vecs {
                let c = dot(q, &w);
                axpy(-c, q, &mut w);
            }
        }
        w
    }

    /// Residual relative to a reference scale.
    pub fn relative_residual(&self, v: &[f64], scale: f64) -> f64 {
        if scale == 0.0 {
            return 0.0;
        }
        norm2(&self.residual(v)) / scale
    }

    /// Adds `v` if it is independent relative to `scale` (usually `|v|`).
    pub fn try_add_scaled(&mut self, v: &[f64], scale: f64) -> Extension {
        assert_eq!(v.len(), self.n);
        if self.vecs.len() == self.n || scale == 0.0 {
            return Extension::Dependent;
        }
        let w = self.residual(v);
        let r = norm2(&w);
        let rel = r / scale;
        if rel <= self.dep_tol {
            Extension::Dependent
        } else if rel > self.ind_tol {
            self.vecs.push(w.iter().map(|x| x / r).collect());
            Extension::Added
        } else {
            Extension::Ambiguous
        }
    }

    pub fn try_add(&mut self, v: &[f64]) -> Extension {
        let s = norm2(v);
        self.try_add_scaled(v, s)
    }

    pub fn contains(&self, v: &[f64], scale: f64) -> bool {
        self.relative_residual(v, scale) <= self.dep_tol
    }
}

/// Affine hull of finitely many points, stored as a base point plus an
/// orthonormal basis of the direction space.
#[derive(Debug, Clone)]
pub struct AffineHull {
    base: Option<Vec<f64>>,
    dirs: OrthoBasis,
    generators: Vec<Vec<f64>>,
}

impl AffineHull {
    pub fn empty(n: usize, rank_tol: f64) -> Self {
        AffineHull {
            base: None,
            dirs: OrthoBasis::new(n, rank_tol),
            generators: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.base.is_none()
    }

    /// Dimension of the hull; `None` for the empty set.
    pub fn dim(&self) -> Option<usize> {
        self.base.as_ref().map(|_| self.dirs.dim())
    }

    pub fn base(&self) -> Option<&[f64]> {
        self.base.as_deref()
    }

    pub fn directions(&self) -> &[Vec<f64>] {
        self.dirs.vectors()
    }

    /// Points that enlarged the hull when inserted; their affine hull is the
    /// whole set.
    pub fn generators(&self) -> &[Vec<f64>] {
        &self.generators
    }

    /// Inserts a point; returns `true` if the hull grew.
    pub fn insert(&mut self, x: &[f64]) -> bool {
        match &self.base {
            None => {
                self.base = Some(x.to_vec());
                self.generators.push(x.to_vec());
                true
            }
            Some(b) => {
                let diff: Vec<f64> = x.iter().zip(b).map(|(p, q)| p - q).collect();
                let scale = norm2(x).max(norm2(b));
                if self.dirs.try_add_scaled(&diff, scale) == Extension::Added {
                    self.generators.push(x.to_vec());
                    true
                } else {
                    false
                }
            }
        }
    }
}

/// Cholesky test for positive definiteness of a symmetric matrix given as
/// rows. Pivots at or below `eps` fail the test.
pub fn is_positive_definite(a: &[Vec<f64>], eps: f64) -> bool {
    let n = a.len();
    let mut l = vec![vec![0.0; n]; n];
    for j in 0..n {
        let mut s = a[j][j];
        for k in 0..j {
            s -= l[j][k] * l[j][k];
        }
        if s <= eps {
            return false;
        }
        let d = libm::sqrt(s);
        l[j][j] = d;
        for i in j + 1..n {
            let mut t = a[i][j];
            for k in 0..j {
                t -= l[i][k] * l[j][k];
            }
            l[i][j] = t / d;
        }
    }
    true
}
