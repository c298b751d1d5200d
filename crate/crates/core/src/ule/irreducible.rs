use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::linalg::{self, Extension, OrthoBasis};
use crate::matrix::{Mat, MatTuple};
use crate::spectral;

/// Outcome of the real irreducibility test.
#[derive(Debug, Clone, PartialEq)]
pub enum Irreducibility {
    /// No nonzero proper subspace of `R^d` is invariant under every matrix.
    Irreducible,
    /// Some nonzero proper subspace is invariant. The witness, when found, is
    /// an orthonormal basis of one such subspace.
    Reducible { witness: Option<Vec<Vec<f64>>> },
    /// A rank or definiteness decision fell inside the numerical gray band.
    Inconclusive { reason: String },
}

const DEP_TOL: f64 = 1e-10;
const IND_TOL: f64 = 1e-7;
const GRAY: f64 = 1e-8;

fn flat(m: &Mat) -> Vec<f64> {
    m.as_slice().to_vec()
}

fn unflat(d: usize, v: &[f64]) -> Mat {
    Mat::from_vec(d, v.to_vec()).expect("finite")
}

fn frob(a: &Mat, b: &Mat) -> f64 {
    linalg::dot(a.as_slice(), b.as_slice())
}

/// Kernel dimension at two tolerances; `None` if they disagree.
fn stable_kernel(rows: &[Vec<f64>], cols: usize) -> Option<Vec<Vec<f64>>> {
    let tight = linalg::null_space(rows, cols, 1e-12);
    let loose = linalg::null_space(rows, cols, 1e-7);
    (tight.len() == loose.len()).then_some(loose)
}

/// Orthonormal basis of the unital algebra generated by the matrices.
fn algebra_basis(gens: &[Mat]) -> Result<Vec<Mat>, String> {
    let d = gens[0].dim();
    let mut basis = OrthoBasis::with_band(d * d, DEP_TOL, IND_TOL);
    basis.try_add(&flat(&Mat::identity(d)));
    let mut next = 0;
    while next < basis.dim() {
        let x = unflat(d, &basis.vectors()[next]);
        next += 1;
        for g in gens {
            match basis.try_add(&flat(&x.mul(g))) {
                Extension::Ambiguous => return Err("algebra rank is numerically ambiguous".into()),
                Extension::Added | Extension::Dependent => {}
            }
            if basis.dim() == d * d {
                break;
            }
        }
    }
    Ok(basis.vectors().iter().map(|v| unflat(d, v)).collect())
}

/// Checks that `span(w)` is a nonzero proper subspace mapped into itself.
fn verify_invariant(gens: &[Mat], w: &[Vec<f64>]) -> bool {
    let d = gens[0].dim();
    if w.is_empty() || w.len() >= d {
        return false;
    }
    let mut basis = OrthoBasis::new(d, 1e-7);
    for v in w {
        basis.try_add(v);
    }
    if basis.dim() != w.len() {
        return false;
    }
    gens.iter().all(|g| {
        let s = g.max_abs().max(f64::MIN_POSITIVE);
        basis.vectors().iter().all(|v| basis.relative_residual(&g.mul_vec(v), s) < 1e-7)
    })
}

fn orthonormal(vectors: impl IntoIterator<Item = Vec<f64>>, d: usize) -> Vec<Vec<f64>> {
    let mut basis = OrthoBasis::new(d, 1e-9);
    for v in vectors {
        basis.try_add(&v);
    }
    basis.vectors().to_vec()
}

/// Nonzero proper eigenspaces of `y`, which are invariant whenever `y`
/// commutes with every generator.
fn eigenspaces(y: &Mat) -> Vec<Vec<Vec<f64>>> {
    let d = y.dim();
    spectral::real_eigenvalues(y)
        .into_iter()
        .map(|lam| spectral::eigenspace(y, lam, 1e-8))
        .filter(|e| !e.is_empty() && e.len() < d)
        .collect()
}

fn random_combination(basis: &[Mat], rng: &mut ChaCha8Rng) -> Mat {
    let d = basis[0].dim();
    let mut y = Mat::zeros(d);
    for b in basis {
        let c = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
        y.add_assign(&b.scale(c));
    }
    y
}

/// Searches for an invariant subspace: closures of standard basis vectors
/// under the algebra, eigenspaces of the supplied commutant elements, and
/// eigenvectors of pseudo-random algebra and commutant elements.
fn find_witness(gens: &[Mat], algebra: &[Mat], commutant: &[Mat], hints: &[Mat]) -> Option<Vec<Vec<f64>>> {
    let d = gens[0].dim();
    let closure = |v: &[f64]| orthonormal(algebra.iter().map(|x| x.mul_vec(v)), d);
    for j in 0..d {
        let mut e = vec![0.0; d];
        e[j] = 1.0;
        let w = closure(&e);
        if verify_invariant(gens, &w) {
            return Some(w);
        }
    }
    for y in hints {
        for w in eigenspaces(y) {
            if verify_invariant(gens, &w) {
                return Some(w);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_1234);
    for _ in 0..8 {
        if commutant.len() > 1 {
            for w in eigenspaces(&random_combination(commutant, &mut rng)) {
                if verify_invariant(gens, &w) {
                    return Some(w);
                }
            }
        }
        let x = random_combination(algebra, &mut rng);
        for lam in spectral::real_eigenvalues(&x) {
            for v in spectral::eigenspace(&x, lam, 1e-8) {
                let w = closure(&v);
                if verify_invariant(gens, &w) {
                    return Some(w);
                }
            }
        }
    }
    None
}

/// Decides whether some nonzero proper subspace of `R^d` is invariant under
/// every matrix of the tuple.
///
/// The unital algebra `A` generated by the tuple is computed first. If it is
/// all of `M_d(R)` the tuple is irreducible. A nonzero radical (kernel of
/// the trace form on `A`) makes the tuple reducible. Otherwise `R^d` is a
/// semisimple module, irreducible exactly when its commutant is a division
/// algebra; that is decided from the dimension of the commutant (1, 2 or 4)
/// and the definiteness of `Y ↦ tr L_{Y²}` on its trace-zero part.
pub fn irreducibility_test(m: &MatTuple, _tol: f64) -> Irreducibility {
    let d = m.dim();
    if d == 1 {
        return Irreducibility::Irreducible;
    }
    let gens: Vec<Mat> = m
        .mats()
        .iter()
        .filter(|g| !g.is_zero())
        .map(|g| g.scale(1.0 / g.max_abs()))
        .collect();
    let inconclusive = |reason: String| Irreducibility::Inconclusive { reason };
    let algebra = match algebra_basis(&gens) {
        Ok(a) => a,
        Err(reason) => return inconclusive(reason),
    };
    if algebra.len() == d * d {
        return Irreducibility::Irreducible;
    }

    // Radical: kernel of the trace form.
    let gram: Vec<Vec<f64>> = algebra
        .iter()
        .map(|a| algebra.iter().map(|b| a.mul(b).trace()).collect())
        .collect();
    let Some(radical) = stable_kernel(&gram, algebra.len()) else {
        return inconclusive("trace form rank is numerically ambiguous".into());
    };
    if !radical.is_empty() {
        let elems: Vec<Mat> = radical
            .iter()
            .map(|c| {
                let mut r = Mat::zeros(d);
                for (x, ci) in algebra.iter().zip(c) {
                    r.add_assign(&x.scale(*ci));
                }
                r
            })
            .collect();
        let cols = elems.iter().flat_map(|r| (0..d).map(move |j| (0..d).map(|i| r[(i, j)]).collect::<Vec<_>>()));
        let w = orthonormal(cols, d);
        let witness = if verify_invariant(&gens, &w) { Some(w) } else { find_witness(&gens, &algebra, &[], &[]) };
        return Irreducibility::Reducible { witness };
    }

    // Commutant: Y with Y G = G Y for every generator.
    let mut rows = Vec::with_capacity(gens.len() * d * d);
    for g in &gens {
        for i in 0..d {
            for j in 0..d {
                let mut row = vec![0.0; d * d];
                for l in 0..d {
                    row[i * d + l] += g[(l, j)];
                    row[l * d + j] -= g[(i, l)];
                }
                rows.push(row);
            }
        }
    }
    let Some(kernel) = stable_kernel(&rows, d * d) else {
        return inconclusive("commutant dimension is numerically ambiguous".into());
    };
    let commutant: Vec<Mat> = orthonormal(kernel, d * d).iter().map(|v| unflat(d, v)).collect();
    let c = commutant.len();
    if c == 1 {
        return Irreducibility::Irreducible;
    }
    if !matches!(c, 2 | 4) {
        return Irreducibility::Reducible {
            witness: find_witness(&gens, &algebra, &commutant, &[]),
        };
    }

    // Regular trace t(Y) = tr L_Y and the form Q(Y) = tr L_{Y²} on C.
    let reg_trace: Vec<f64> = commutant
        .iter()
        .map(|a| commutant.iter().map(|b| frob(b, &a.mul(b))).sum())
        .collect();
    let mut q = vec![vec![0.0; c]; c];
    for a in 0..c {
        for b in 0..c {
            let prod = commutant[a].mul(&commutant[b]).add(&commutant[b].mul(&commutant[a])).scale(0.5);
            q[a][b] = commutant.iter().map(|e| frob(e, &prod.mul(e))).sum();
        }
    }
    let zero_trace = linalg::null_space(&[reg_trace], c, 1e-12);
    let restricted: Vec<Vec<f64>> = zero_trace
        .iter()
        .map(|x| {
            zero_trace
                .iter()
                .map(|y| (0..c).map(|a| (0..c).map(|b| x[a] * q[a][b] * y[b]).sum::<f64>()).sum())
                .collect()
        })
        .collect();
    let scale = restricted.iter().flatten().fold(0.0f64, |s, x| s.max(x.abs())).max(1.0);
    let shifted = |delta: f64| -> Vec<Vec<f64>> {
        restricted
            .iter()
            .enumerate()
            .map(|(i, r)| r.iter().enumerate().map(|(j, x)| -x - if i == j { delta * scale } else { 0.0 }).collect())
            .collect()
    };
    if linalg::is_positive_definite(&shifted(GRAY), 0.0) {
        return Irreducibility::Irreducible;
    }
    if linalg::is_positive_definite(&shifted(-GRAY), 0.0) {
        return inconclusive(format!("commutant of dimension {c} is numerically close to a division algebra"));
    }
    // Elements of the trace-zero part with Q(Y) > 0 are not invertible-like;
    // their eigenspaces are the natural witnesses.
    let mut hints = Vec::new();
    for (i, x) in zero_trace.iter().enumerate() {
        for (j, y) in zero_trace.iter().enumerate().skip(i) {
            for sign in [1.0, -1.0] {
                let coeffs: Vec<f64> = x.iter().zip(y).map(|(a, b)| a + if i == j { 0.0 } else { sign * b }).collect();
                let mut e = Mat::zeros(d);
                for (cm, ci) in commutant.iter().zip(&coeffs) {
                    e.add_assign(&cm.scale(*ci));
                }
                hints.push(e);
            }
        }
    }
    Irreducibility::Reducible {
        witness: find_witness(&gens, &algebra, &commutant, &hints),
    }
}
