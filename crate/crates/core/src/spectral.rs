//! Spectral radii by scaled repeated squaring, Perron pairs of irreducible
//! nonnegative matrices, symmetric tensor powers, and real eigenvalues of
//! small matrices.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{contract, Error, Result};
use crate::graph;
use crate::linalg;
use crate::matrix::Mat;

const MAX_SQUARINGS: u32 = 60;

/// `log ρ(A)`, or `None` when `A` is nilpotent.
///
/// Tracks `2^{-m} log ‖A^{2^m}‖` in log space: `A^{2^m} = e^{L_m} C_m` with
/// `‖C_m‖ = 1`, so each squaring adds `log ‖C_m²‖ / 2^{m+1}` to the estimate.
/// Iteration stops once that increment drops below `tol / 1000` or after
/// 60 squarings.
pub fn log_spectral_radius(a: &Mat, tol: f64) -> Result<Option<f64>> {
    let n0 = a.norm();
    if n0 == 0.0 {
        return Ok(None);
    }
    if !n0.is_finite() {
        return Err(Error::Numeric("non-finite matrix norm".into()));
    }
    let mut est = libm::log(n0);
    let mut c = a.scale(1.0 / n0);
    let mut weight = 0.5;
    for _ in 0..MAX_SQUARINGS {
        let (next, n) = c.square_normalized();
        if n == 0.0 {
            return Ok(None);
        }
        if !n.is_finite() {
            return Err(Error::Numeric("non-finite intermediate in repeated squaring".into()));
        }
        let delta = weight * libm::log(n);
        est += delta;
        c = next;
        weight *= 0.5;
        if delta.abs() < tol * 1e-3 {
            break;
        }
    }
    if !est.is_finite() {
        return Err(Error::Numeric("non-finite spectral radius estimate".into()));
    }
    Ok(Some(est))
}

/// Spectral radius `ρ(A)` to relative accuracy `tol`.
pub fn spectral_radius(a: &Mat, tol: f64) -> Result<f64> {
    Ok(log_spectral_radius(a, tol)?.map_or(0.0, libm::exp))
}

/// Perron root and positive eigenvectors of an irreducible nonnegative block.
#[derive(Debug, Clone, PartialEq)]
pub struct PerronData {
    pub rho: f64,
    /// Right eigenvector, scaled so that its largest entry is 1.
    pub u: Vec<f64>,
    /// Left eigenvector, scaled so that `vᵀu = 1`.
    pub v: Vec<f64>,
}

impl PerronData {
    pub fn right_residual(&self, b: &Mat) -> f64 {
        let bu = b.mul_vec(&self.u);
        bu.iter().zip(&self.u).map(|(x, y)| (x - self.rho * y).abs()).sum()
    }

    pub fn left_residual(&self, b: &Mat) -> f64 {
        let vb = b.vec_mul(&self.v);
        vb.iter().zip(&self.v).map(|(x, y)| (x - self.rho * y).abs()).sum()
    }

    pub fn pairing(&self) -> f64 {
        linalg::dot(&self.u, &self.v)
    }
}

/// Dominant eigenvector by shifted inverse iteration around `rho`.
fn perron_vector(b: &Mat, rho: f64) -> Result<Vec<f64>> {
    let d = b.dim();
    let mut x = vec![1.0; d];
    let mut shift = rho * (1.0 + 1e-10) + f64::MIN_POSITIVE;
    let mut shifted = b.sub(&Mat::identity(d).scale(shift));
    for _ in 0..8 {
        let y = match linalg::solve(&shifted, &x) {
            Some(y) if y.iter().all(|v| v.is_finite()) => y,
            _ => {
                // The shift hit an eigenvalue exactly; nudge it.
                shift = rho * (1.0 + 1e-8) + 1e-300;
                shifted = b.sub(&Mat::identity(d).scale(shift));
                continue;
            }
        };
        let s: f64 = y.iter().sum();
        let sign = if s < 0.0 { -1.0 } else { 1.0 };
        let m = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if m == 0.0 {
            return Err(Error::Numeric("inverse iteration collapsed".into()));
        }
        let next: Vec<f64> = y.iter().map(|v| sign * v / m).collect();
        let change: f64 = next.iter().zip(&x).map(|(a, b)| (a - b).abs()).sum();
        x = next;
        if change < 1e-15 * d as f64 {
            break;
        }
    }
    Ok(x)
}

/// Perron root with right/left positive eigenvectors normalized so that
/// `max u = 1` and `vᵀu = 1`.
///
/// The root comes from [`spectral_radius`]; the vectors from inverse
/// iteration shifted just above it, which is insensitive to periodicity.
pub fn perron_pair(b: &Mat, tol: f64) -> Result<PerronData> {
    if !b.is_nonnegative() {
        return Err(contract("Perron pair requires a nonnegative matrix"));
    }
    if !graph::is_irreducible_support(&graph::support(b)) {
        return Err(contract("Perron pair requires a positively irreducible matrix"));
    }
    let rho = spectral_radius(b, tol * 1e-3)?;
    let u = perron_vector(b, rho)?;
    let mut v = perron_vector(&b.transpose(), rho)?;
    if u.iter().chain(&v).any(|&x| x <= 0.0 || !x.is_finite()) {
        return Err(contract("Perron iterate hit a nonpositive coordinate; matrix is not irreducible"));
    }
    let pairing = linalg::dot(&u, &v);
    v.iter_mut().for_each(|x| *x /= pairing);
    Ok(PerronData { rho, u, v })
}

/// Monomials of total degree `q` in `d` variables, in lexicographic order.
pub fn monomials(d: usize, q: u32) -> Vec<Vec<u8>> {
    fn rec(d: usize, left: u32, prefix: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if prefix.len() == d - 1 {
            prefix.push(left as u8);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=left).rev() {
            prefix.push(e as u8);
            rec(d, left - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(d, q, &mut Vec::with_capacity(d), &mut out);
    out
}

/// Number of monomials of degree `q` in `d` variables, `C(d + q - 1, q)`.
pub fn sym_dim(d: usize, q: u32) -> u128 {
    let mut num: u128 = 1;
    for i in 0..q as u128 {
        num = num * (d as u128 + i) / (i + 1);
    }
    num
}

/// Matrix of the `q`-th symmetric power of `A`: the action `p(x) ↦ p(Aᵀx)` on
/// homogeneous polynomials of degree `q`, in the basis [`monomials`]`(d, q)`.
/// This is `A^{⊗q}` restricted to symmetric tensors.
pub fn sym_power(a: &Mat, q: u32, basis: &[Vec<u8>], index: &BTreeMap<Vec<u8>, usize>) -> Mat {
    let d = a.dim();
    let n = basis.len();
    let mut out = Mat::zeros(n);
    for (col, alpha) in basis.iter().enumerate() {
        // poly as map exponent -> coefficient
        let mut poly: BTreeMap<Vec<u8>, f64> = BTreeMap::new();
        poly.insert(vec![0u8; d], 1.0);
        for (j, &e) in alpha.iter().enumerate() {
            for _ in 0..e {
                let mut next: BTreeMap<Vec<u8>, f64> = BTreeMap::new();
                for (mono, c) in &poly {
                    for i in 0..d {
                        let aij = a[(i, j)];
                        if aij == 0.0 {
                            continue;
                        }
                        let mut m2 = mono.clone();
                        m2[i] += 1;
                        *next.entry(m2).or_insert(0.0) += c * aij;
                    }
                }
                poly = next;
            }
        }
        for (mono, c) in poly {
            if c != 0.0 {
                out[(index[&mono], col)] = c;
            }
        }
        debug_assert!(q > 0);
    }
    let _ = n;
    out
}

/// Characteristic polynomial coefficients `[c_0, ..., c_d]` of
/// `det(xI - A) = Σ c_i x^i` (Faddeev-LeVerrier; fine for small `d`).
pub fn char_poly(a: &Mat) -> Vec<f64> {
    let d = a.dim();
    let mut coeffs = vec![0.0; d + 1];
    coeffs[d] = 1.0;
    let mut m = Mat::zeros(d);
    for k in 1..=d {
        // M_k = A M_{k-1} + c_{d-k+1} I
        let mut next = a.mul(&m);
        for i in 0..d {
            next[(i, i)] += coeffs[d - k + 1];
        }
        m = next;
        coeffs[d - k] = -a.mul(&m).trace() / k as f64;
    }
    coeffs
}

fn poly_eval(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci)
}

fn poly_derivative(c: &[f64]) -> Vec<f64> {
    c.iter().enumerate().skip(1).map(|(i, &ci)| ci * i as f64).collect()
}

/// Real roots of a polynomial given by ascending coefficients, isolated
/// between the real roots of its derivative and refined by bisection.
pub fn poly_real_roots(c: &[f64]) -> Vec<f64> {
    let mut c = c.to_vec();
    while c.len() > 1 && *c.last().unwrap() == 0.0 {
        c.pop();
    }
    let deg = c.len() - 1;
    if deg == 0 {
        return Vec::new();
    }
    if deg == 1 {
        return vec![-c[0] / c[1]];
    }
    let lead = c[deg];
    let bound = 1.0 + c[..deg].iter().fold(0.0f64, |m, x| m.max((x / lead).abs()));
    let mut crit = poly_real_roots(&poly_derivative(&c));
    crit.retain(|x| x.abs() < bound);
    let mut pts = vec![-bound];
    pts.extend(crit);
    pts.push(bound);
    pts.sort_by(f64::total_cmp);
    let mut roots: Vec<f64> = Vec::new();
    let scale = c.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    for w in pts.windows(2) {
        let (mut lo, mut hi) = (w[0], w[1]);
        let (flo, fhi) = (poly_eval(&c, lo), poly_eval(&c, hi));
        if flo == 0.0 {
            roots.push(lo);
            continue;
        }
        if flo.signum() == fhi.signum() {
            // Possible double root touching zero at a critical point.
            if fhi.abs() < 1e-10 * scale {
                roots.push(hi);
            }
            continue;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let fm = poly_eval(&c, mid);
            if fm == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if fm.signum() == flo.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        roots.push(0.5 * (lo + hi));
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * (1.0 + b.abs()));
    roots
}

/// Real eigenvalues of a small matrix.
pub fn real_eigenvalues(a: &Mat) -> Vec<f64> {
    poly_real_roots(&char_poly(a))
}

/// Basis of the numeric kernel of `A - λI`.
pub fn eigenspace(a: &Mat, lambda: f64, rel_tol: f64) -> Vec<Vec<f64>> {
    let d = a.dim();
    let shifted = a.sub(&Mat::identity(d).scale(lambda));
    linalg::null_space(&shifted.to_rows(), d, rel_tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectral_radius_examples() {
        assert!((spectral_radius(&Mat::scalar(3.0), 1e-12).unwrap() - 3.0).abs() < 1e-12);
        let nil = Mat::from_rows(&[[0.0, 1.0], [0.0, 0.0]]).unwrap();
        assert_eq!(spectral_radius(&nil, 1e-12).unwrap(), 0.0);
        let fib = Mat::from_rows(&[[1.0, 1.0], [1.0, 0.0]]).unwrap();
        let phi = (1.0 + libm::sqrt(5.0)) / 2.0;
        assert!((spectral_radius(&fib, 1e-12).unwrap() - phi).abs() < 1e-9);
    }

    #[test]
    fn spectral_radius_of_rotation_and_jordan_block() {
        let rot = Mat::from_rows(&[[0.0, -2.0], [2.0, 0.0]]).unwrap();
        assert!((spectral_radius(&rot, 1e-12).unwrap() - 2.0).abs() < 1e-12);
        let jordan = Mat::from_rows(&[[3.0, 1.0], [0.0, 3.0]]).unwrap();
        assert!((spectral_radius(&jordan, 1e-12).unwrap() - 3.0).abs() < 1e-10);
    }

    #[test]
    fn perron_examples() {
        let p = perron_pair(&Mat::scalar(1.0), 1e-10).unwrap();
        assert!((p.rho - 1.0).abs() < 1e-12);
        assert!((p.u[0] - 1.0).abs() < 1e-12 && (p.v[0] - 1.0).abs() < 1e-12);

        let swap = Mat::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        let p = perron_pair(&swap, 1e-10).unwrap();
        assert!((p.rho - 1.0).abs() < 1e-10);
        for i in 0..2 {
            assert!((p.u[i] - 1.0).abs() < 1e-10);
            assert!((p.v[i] - 0.5).abs() < 1e-10);
        }

        let ones = Mat::from_rows(&[[1.0, 1.0], [1.0, 1.0]]).unwrap();
        let p = perron_pair(&ones, 1e-10).unwrap();
        assert!((p.rho - 2.0).abs() < 1e-10);
        assert!((p.u[0] - p.u[1]).abs() < 1e-12);
        assert!((p.pairing() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn perron_rejects_reducible() {
        let upper = Mat::from_rows(&[[1.0, 1.0], [0.0, 1.0]]).unwrap();
        assert!(matches!(perron_pair(&upper, 1e-10), Err(Error::Contract(_))));
    }

    #[test]
    fn symmetric_power_dimension_and_scalar() {
        assert_eq!(sym_dim(3, 6), 28);
        assert_eq!(monomials(3, 6).len(), 28);
        let basis = monomials(1, 4);
        let index = basis.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let s = sym_power(&Mat::scalar(2.0), 4, &basis, &index);
        assert_eq!(s, Mat::scalar(16.0));
    }

    #[test]
    fn char_poly_and_real_roots() {
        let a = Mat::from_rows(&[[2.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 5.0]]).unwrap();
        let roots = real_eigenvalues(&a);
        assert_eq!(roots.len(), 3);
        for (r, e) in roots.iter().zip([-1.0, 2.0, 5.0]) {
            assert!((r - e).abs() < 1e-9);
        }
        let rot = Mat::from_rows(&[[0.0, -1.0], [1.0, 0.0]]).unwrap();
        assert!(real_eigenvalues(&rot).is_empty());
    }
}
