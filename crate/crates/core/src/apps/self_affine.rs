//! Integral self-affine measures `μ = Σ_j p_j μ ∘ S_j^{-1}` with
//! `S_j(x) = A^{-1}(x + d_j)` for an expanding integer matrix `A`.
//!
//! Given tile data (`n0`, tile digits `c_1..c_ℓ` with `ℓ = |det A|^{n0}`, and
//! translations `e_1..e_N`), the measure is absolutely continuous iff the
//! tuple `(M_k)_{ij} = p_J` for `c_k + A^{n0} e_i - e_j = d_J` has a uniform
//! Lyapunov exponent (no product ever vanishes, and the modulo-0 property).

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{contract, Error, Result};
use crate::linalg;
use crate::matrix::{Mat, MatTuple};
use crate::rational::{self, Rat, RatMat, RatTuple};
use crate::spectral;
use crate::symdyn::SupportAutomaton;
use crate::ule::{self, Config, Decision, UleVerdict};

/// Cap on `m^{n0}` digit words in the construction.
pub const DEFAULT_DIGIT_WORD_CAP: u64 = 1 << 22;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelfAffineInput {
    pub a: Vec<Vec<i64>>,
    pub digits: Vec<Vec<i64>>,
    pub weights: Vec<Rat>,
    pub n0: u32,
    pub tile_digits: Vec<Vec<i64>>,
    pub translations: Vec<Vec<i64>>,
}

type IVec = Vec<BigInt>;

fn to_big(v: &[i64]) -> IVec {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

fn mat_vec(a: &[Vec<BigInt>], v: &[BigInt]) -> IVec {
    a.iter().map(|r| r.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

fn mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<IVec> {
    let d = a.len();
    (0..d)
        .map(|i| (0..d).map(|j| (0..d).map(|l| &a[i][l] * &b[l][j]).sum()).collect())
        .collect()
}

fn mat_pow(a: &[Vec<BigInt>], n: u32) -> Vec<IVec> {
    let d = a.len();
    let mut out: Vec<IVec> = (0..d)
        .map(|i| (0..d).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    for _ in 0..n {
        out = mat_mul(&out, a);
    }
    out
}

impl SelfAffineInput {
    pub fn dim(&self) -> usize {
        self.a.len()
    }

    /// Checks shapes, weights, expansiveness and `ℓ = |det A|^{n0}`.
    pub fn validate(&self) -> Result<()> {
        let d = self.dim();
        if d == 0 || self.a.iter().any(|r| r.len() != d) {
            return Err(contract("A must be a nonempty square integer matrix"));
        }
        let vec_ok = |vs: &[Vec<i64>]| vs.iter().all(|v| v.len() == d);
        if !vec_ok(&self.digits) || !vec_ok(&self.tile_digits) || !vec_ok(&self.translations) {
            return Err(contract("every digit, tile digit and translation must have length d"));
        }
        if self.digits.is_empty() || self.translations.is_empty() {
            return Err(contract("digits and translations must be nonempty"));
        }
        if self.weights.len() != self.digits.len() {
            return Err(contract("one weight per digit is required"));
        }
        if self.weights.iter().any(|p| !p.is_positive()) {
            return Err(Error::InputData("weights must be positive".into()));
        }
        if self.weights.iter().sum::<Rat>() != Rat::one() {
            return Err(Error::InputData("weights must sum to 1".into()));
        }
        if self.n0 == 0 {
            return Err(contract("n0 must be positive"));
        }
        let det = rational::det_int(&self.a.iter().map(|r| to_big(r)).collect::<Vec<_>>());
        if det.is_zero() {
            return Err(Error::InputData("A is singular".into()));
        }
        let ell = num_traits::pow(det.abs(), self.n0 as usize);
        if BigInt::from(self.tile_digits.len()) != ell {
            return Err(Error::InputData(format!(
                "expected |det A|^n0 = {ell} tile digits, got {}",
                self.tile_digits.len()
            )));
        }
        let af = Mat::from_rows(&self.a.iter().map(|r| r.iter().map(|&x| x as f64).collect::<Vec<_>>()).collect::<Vec<_>>())?;
        let inv = linalg::inverse(&af).ok_or_else(|| Error::InputData("A is singular".into()))?;
        if spectral::spectral_radius(&inv, 1e-12)? >= 1.0 - 1e-12 {
            return Err(Error::InputData("A is not expanding".into()));
        }
        Ok(())
    }
}

/// Builds the tuple `M_1, ..., M_ℓ` of `N x N` matrices in exact arithmetic
/// and checks that `Σ_k M_k` has all column sums equal to 1. Several digit
/// words `J` with the same `d_J` contribute the sum of their weights.
pub fn self_affine_build(input: &SelfAffineInput) -> Result<RatTuple> {
    input.validate()?;
    let d = input.dim();
    let m = input.digits.len();
    let words = (m as u64).checked_pow(input.n0).filter(|&w| w <= DEFAULT_DIGIT_WORD_CAP).ok_or(Error::Resource {
        what: "digit words of length n0",
        needed: (m as u128).saturating_pow(input.n0),
        cap: DEFAULT_DIGIT_WORD_CAP as u128,
    })?;
    let a: Vec<IVec> = input.a.iter().map(|r| to_big(r)).collect();
    let digits: Vec<IVec> = input.digits.iter().map(|v| to_big(v)).collect();

    // d_J = Σ_k A^{n0-k} d_{j_k} = A(...A(A d_{j_1} + d_{j_2})...) + d_{j_{n0}}.
    let mut weight_of: BTreeMap<IVec, Rat> = BTreeMap::new();
    for code in 0..words {
        let mut c = code;
        let mut js = vec![0usize; input.n0 as usize];
        for slot in js.iter_mut().rev() {
            *slot = (c % m as u64) as usize;
            c /= m as u64;
        }
        let mut acc: IVec = vec![BigInt::zero(); d];
        let mut p = Rat::one();
        for &j in &js {
            acc = mat_vec(&a, &acc).into_iter().zip(&digits[j]).map(|(x, y)| x + y).collect();
            p *= &input.weights[j];
        }
        *weight_of.entry(acc).or_insert_with(Rat::zero) += p;
    }

    let an0 = mat_pow(&a, input.n0);
    let trans: Vec<IVec> = input.translations.iter().map(|v| to_big(v)).collect();
    let images: Vec<IVec> = trans.iter().map(|e| mat_vec(&an0, e)).collect();
    let big_n = trans.len();
    let mut mats = Vec::with_capacity(input.tile_digits.len());
    for c in &input.tile_digits {
        let c = to_big(c);
        let mut mk = RatMat::zeros(big_n);
        for i in 0..big_n {
            for j in 0..big_n {
                let key: IVec = (0..d).map(|t| &c[t] + &images[i][t] - &trans[j][t]).collect();
                if let Some(p) = weight_of.get(&key) {
                    mk[(i, j)] = p.clone();
                }
            }
        }
        mats.push(mk);
    }
    let tuple = RatTuple::new(mats).map_err(|_| Error::InputData("every constructed matrix vanishes".into()))?;
    let sums = tuple.sum().column_sums();
    if let Some(j) = sums.iter().position(|s| *s != Rat::one()) {
        return Err(Error::InputData(format!(
            "column {} of the summed matrix adds up to {} instead of 1; the tile digits or translations are inconsistent",
            j + 1,
            rational::format_rat(&sums[j])
        )));
    }
    Ok(tuple)
}

/// Absolute-continuity verdict and which condition decided it.
#[derive(Debug, Clone, PartialEq)]
pub struct SelfAffineVerdict {
    pub decision: Decision,
    /// No product of the tuple vanishes.
    pub no_zero_products: bool,
    pub criterion: UleVerdict,
    pub reason: String,
}

/// `Yes` iff no product vanishes and criterion A returns `Yes`.
pub fn self_affine_check(m: &MatTuple, cfg: &Config) -> Result<SelfAffineVerdict> {
    let aut = SupportAutomaton::build_capped(m, cfg.max_states)?;
    let no_zero_products = aut.is_complete();
    let criterion = ule::criterion_a(m, cfg).or_else(|err| match err {
        Error::Resource { .. } => ule::criterion_a_fast(m, cfg),
        other => Err(other),
    })?;
    let (decision, reason) = match (no_zero_products, criterion.decision) {
        (false, _) => (
            Decision::No,
            String::from("some product vanishes (zero product), so the attractor has empty interior"),
        ),
        (true, Decision::Yes) => (Decision::Yes, String::from("no zero products and uniform exponent")),
        (true, Decision::No) => (Decision::No, String::from("product norms are not uniformly comparable")),
        (true, Decision::Inconclusive) => (Decision::Inconclusive, String::from("criterion A is inconclusive")),
    };
    Ok(SelfAffineVerdict {
        decision,
        no_zero_products,
        criterion,
        reason,
    })
}

pub const DEFAULT_ZERO_TOL: f64 = 1e-10;
pub const DEFAULT_N_MAX: usize = 50;
pub const DEFAULT_BOX_RADIUS: i64 = 20;

/// Result of scanning the mask along the orbits `(Aᵀ)^{-n} m`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierReport {
    pub box_radius: i64,
    pub n_max: usize,
    pub zero_tol: f64,
    /// Each scanned `m` with the first `n` at which `|P| < zero_tol`.
    pub first_zero: Vec<(Vec<i64>, Option<usize>)>,
    /// The `m` for which no near-zero was found (evidence against absolute
    /// continuity).
    pub without_zero: Vec<Vec<i64>>,
}

impl FourierReport {
    pub const LABEL: &'static str = "heuristic: finite scan of the mask, not a verdict";
}

/// `|P(ξ)|` for the mask `P(ξ) = Σ_j p_j e^{-2πi⟨ξ, d_j⟩}` at a rational point.
fn mask_modulus(xi: &[Rat], digits: &[IVec], weights: &[f64]) -> f64 {
    let (mut re, mut im) = (0.0, 0.0);
    for (dj, &p) in digits.iter().zip(weights) {
        let t: Rat = xi.iter().zip(dj).map(|(x, y)| x * Rat::from_integer(y.clone())).sum();
        let frac = t.clone() - t.floor();
        let angle = -2.0 * core::f64::consts::PI * rational::to_f64(&frac);
        re += p * libm::cos(angle);
        im += p * libm::sin(angle);
    }
    libm::sqrt(re * re + im * im)
}

/// Scans every nonzero integer `m` with `‖m‖_∞ ≤ box_radius` for a mask zero
/// `|P((Aᵀ)^{-n} m)| < zero_tol` with `1 ≤ n ≤ n_max`.
pub fn fourier_diagnostic(input: &SelfAffineInput, box_radius: i64, n_max: usize, zero_tol: f64) -> Result<FourierReport> {
    let d = input.dim();
    if d == 0 || input.a.iter().any(|r| r.len() != d) || input.digits.iter().any(|v| v.len() != d) {
        return Err(contract("A must be square and digits must have length d"));
    }
    let at = RatMat::from_rows(
        (0..d)
            .map(|i| (0..d).map(|j| Rat::from_integer(BigInt::from(input.a[j][i]))).collect())
            .collect(),
    )?;
    let at_inv = at.inverse().ok_or_else(|| Error::InputData("A is singular".into()))?;
    let digits: Vec<IVec> = input.digits.iter().map(|v| to_big(v)).collect();
    let weights: Vec<f64> = input.weights.iter().map(rational::to_f64).collect();
    let side = (2 * box_radius + 1) as u64;
    let total = side.checked_pow(d as u32).ok_or(Error::Resource {
        what: "Fourier scan box",
        needed: u128::MAX,
        cap: u64::MAX as u128,
    })?;
    let mut first_zero = Vec::new();
    let mut without_zero = Vec::new();
    for code in 0..total {
        let mut c = code;
        let mut mv = vec![0i64; d];
        for slot in mv.iter_mut().rev() {
            *slot = (c % side) as i64 - box_radius;
            c /= side;
        }
        if mv.iter().all(|&x| x == 0) {
            continue;
        }
        let mut xi: Vec<Rat> = mv.iter().map(|&x| Rat::from_integer(BigInt::from(x))).collect();
        let mut hit = None;
        for n in 1..=n_max {
            xi = at_inv.mul_vec(&xi);
            if mask_modulus(&xi, &digits, &weights) < zero_tol {
                hit = Some(n);
                break;
            }
        }
        if hit.is_none() {
            without_zero.push(mv.clone());
        }
        first_zero.push((mv, hit));
    }
    Ok(FourierReport {
        box_radius,
        n_max,
        zero_tol,
        first_zero,
        without_zero,
    })
}
