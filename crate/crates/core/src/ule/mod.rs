//! Deciding the uniform Lyapunov exponent property modulo 0.
//!
//! * [`criterion_a`], [`criterion_a_fast`] and [`criterion_a_exact`] apply to
//!   positively irreducible nonnegative tuples: they normalize `M` by `r(M)`,
//!   average the products `N_J` over the words with positive `(1,1)` entry,
//!   decompose the average into irreducible blocks and test whether the
//!   Perron vectors of some block give `v_iᵀ N_J^{(i)} u_i = 1` for every such
//!   word.
//! * [`criterion_b`] applies to irreducible tuples of any sign and tests
//!   whether the pressure is affine on `{2, 4, 6}`.

mod criterion_a;
mod irreducible;
mod pressure;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub use criterion_a::{
    criterion_a, criterion_a_exact, criterion_a_fast, criterion_a_with, decompose, enumerate_j, enumerate_j_with,
    IrredDecomposition,
};
pub use irreducible::{irreducibility_test, Irreducibility};
pub use pressure::{
    criterion_b, empirical_constant, norm_profile, norm_profile_with, pressure_estimate, pressure_estimate_with,
    pressure_even, pressure_even_kron, pressure_report, ProfileRow,
};

use crate::error::{contract, Error, Result};
use crate::graph;
use crate::matrix::{MatTuple, Word};
use crate::spectral;
use crate::symdyn::{self, Entropy, SupportAutomaton};

/// Three-way outcome of a decision procedure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Decision {
    Yes,
    No,
    /// The deciding quantity fell in the gray band between the acceptance
    /// and rejection thresholds, or a hypothesis could not be confirmed.
    Inconclusive,
}

impl Decision {
    /// `Yes` at or below `tol`, `No` above `10 * tol`, `Inconclusive` between.
    pub fn from_residual(residual: f64, tol: f64) -> Decision {
        if !residual.is_finite() {
            Decision::Inconclusive
        } else if residual <= tol {
            Decision::Yes
        } else if residual > 10.0 * tol {
            Decision::No
        } else {
            Decision::Inconclusive
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Decision::Yes => "yes",
            Decision::No => "no",
            Decision::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which procedure produced a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Criterion {
    /// Perron identity checked word by word.
    A,
    /// Perron identity checked on a stabilized affine hull.
    AFast,
    /// Perron identity checked in exact rational arithmetic.
    AExact,
    /// Affinity of the pressure on `{2, 4, 6}`.
    B,
}

impl Criterion {
    pub fn as_str(self) -> &'static str {
        match self {
            Criterion::A => "A",
            Criterion::AFast => "A-fast",
            Criterion::AExact => "A-exact",
            Criterion::B => "B",
        }
    }
}

/// Worst deviation `|v_iᵀ N_J^{(i)} u_i - 1|` found for one block.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockResidual {
    pub block: usize,
    pub max_residual: f64,
    /// A word attaining the maximum, when known.
    pub worst_word: Option<Word>,
}

/// Pressure values at `q = 2, 4, 6` and the convexity defect.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PressureReport {
    pub p2: f64,
    pub p4: f64,
    pub p6: f64,
    /// `p2 + p6 - 2 p4`, nonnegative up to rounding.
    pub defect: f64,
}

/// Outcome of one criterion.
#[derive(Debug, Clone, PartialEq)]
pub struct UleVerdict {
    pub criterion: Criterion,
    pub decision: Decision,
    /// Growth rate `λ`, present iff the decision is `Yes`.
    pub lambda: Option<f64>,
    /// Block whose Perron identity holds (criterion A, `Yes` only).
    pub witness_block: Option<usize>,
    /// Per-block worst residuals (criterion A).
    pub residuals: Vec<BlockResidual>,
    /// Pressures and defect (criterion B).
    pub pressure: Option<PressureReport>,
    pub r_value: Option<f64>,
    /// `r(M)` as an exact fraction when the exact path was taken.
    pub r_exact: Option<String>,
    pub notes: Vec<String>,
}

impl UleVerdict {
    pub(crate) fn new(criterion: Criterion, decision: Decision) -> Self {
        UleVerdict {
            criterion,
            decision,
            lambda: None,
            witness_block: None,
            residuals: Vec::new(),
            pressure: None,
            r_value: None,
            r_exact: None,
            notes: Vec::new(),
        }
    }

    /// Largest residual of the best block (criterion A) or the defect (B).
    pub fn deciding_residual(&self) -> Option<f64> {
        if let Some(p) = &self.pressure {
            return Some(p.defect);
        }
        self.residuals.iter().map(|r| r.max_residual).min_by(f64::total_cmp)
    }
}

/// Tunables shared by the decision procedures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Config {
    /// Relative tolerance; residuals in `(tol, 10 tol]` are inconclusive.
    pub tol: f64,
    /// Cap on visited nodes of any word-tree enumeration.
    pub max_words: u64,
    /// Cap on the dimension of tensor-power matrices.
    pub kron_cap: usize,
    /// Cap on support automaton states.
    pub max_states: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            tol: crate::DEFAULT_TOL,
            max_words: symdyn::DEFAULT_WORD_CAP,
            kron_cap: 20_000,
            max_states: symdyn::DEFAULT_MAX_STATES,
        }
    }
}

impl Config {
    pub fn with_tol(tol: f64) -> Self {
        Config {
            tol,
            ..Config::default()
        }
    }
}

pub(crate) fn require_positively_irreducible(m: &MatTuple) -> Result<()> {
    if !m.is_nonnegative() {
        return Err(contract("criterion requires a nonnegative tuple"));
    }
    if !graph::is_positively_irreducible(m)? {
        return Err(contract("criterion requires a positively irreducible tuple"));
    }
    Ok(())
}

/// Shortest length at which every product vanishes (for a nilpotent automaton).
fn dead_length(aut: &SupportAutomaton) -> usize {
    (1..=aut.n_states() + 1)
        .find(|&n| symdyn::language_count_automaton(aut, n).is_ok_and(|c| c == 0))
        .unwrap_or(aut.n_states() + 1)
}

/// `log r(M) = log ρ(Σ M_i) - h_top(Y_M)` and the entropy used.
pub fn log_r_of(m: &MatTuple, cfg: &Config) -> Result<(f64, f64)> {
    require_positively_irreducible(m)?;
    let inner_tol = cfg.tol * 1e-3;
    let log_rho = spectral::log_spectral_radius(&m.sum(), inner_tol)?
        .ok_or_else(|| Error::Internal("positively irreducible sum has zero spectral radius".into()))?;
    let aut = SupportAutomaton::build_capped(m, cfg.max_states)?;
    match symdyn::sofic_entropy(&aut, inner_tol)? {
        Entropy::Empty => Err(Error::Degenerate(dead_length(&aut))),
        Entropy::Finite(h) => Ok((log_rho - h, h)),
    }
}

/// `r(M) = exp(log ρ(M_1 + ... + M_k) - h_top(Y_M))`.
pub fn r_of(m: &MatTuple, tol: f64) -> Result<f64> {
    Ok(libm::exp(log_r_of(m, &Config::with_tol(tol))?.0))
}

/// `M / r(M)`, a tuple with `r = 1`.
pub fn normalize(m: &MatTuple, tol: f64) -> Result<MatTuple> {
    Ok(m.scaled(1.0 / r_of(m, tol)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn scalar_pair(a: f64, b: f64) -> MatTuple {
        MatTuple::from_rows(&[vec![vec![a]], vec![vec![b]]]).unwrap()
    }

    #[test]
    fn r_examples() {
        assert!((r_of(&MatTuple::elementary_2x2(), 1e-10).unwrap() - 1.0).abs() < 1e-9);
        assert!((r_of(&scalar_pair(2.0, 1.0), 1e-10).unwrap() - 1.5).abs() < 1e-9);
        let e = MatTuple::elementary_2x2();
        assert!((r_of(&e.scaled(3.5), 1e-10).unwrap() - 3.5).abs() < 1e-8);
    }

    #[test]
    fn normalize_examples() {
        let single = MatTuple::from_rows(&[vec![vec![2.0]]]).unwrap();
        let n = normalize(&single, 1e-10).unwrap();
        assert!((n.get(0)[(0, 0)] - 1.0).abs() < 1e-12);
        let m = scalar_pair(2.0, 1.0);
        let once = normalize(&m, 1e-10).unwrap();
        let twice = normalize(&once, 1e-10).unwrap();
        for i in 0..2 {
            assert!((once.get(i)[(0, 0)] - twice.get(i)[(0, 0)]).abs() < 1e-10);
        }
    }

    #[test]
    fn r_requires_positive_irreducibility() {
        let m = scalar_pair(0.0, 1.0);
        assert!(r_of(&m, 1e-10).is_ok());
        let upper = MatTuple::from_rows(&[vec![vec![1.0, 1.0], vec![0.0, 1.0]]]).unwrap();
        assert!(matches!(r_of(&upper, 1e-10), Err(Error::Contract(_))));
    }

    #[test]
    fn decision_bands() {
        assert_eq!(Decision::from_residual(1e-9, 1e-8), Decision::Yes);
        assert_eq!(Decision::from_residual(5e-8, 1e-8), Decision::Inconclusive);
        assert_eq!(Decision::from_residual(2e-7, 1e-8), Decision::No);
        assert_eq!(Decision::from_residual(f64::NAN, 1e-8), Decision::Inconclusive);
    }
}
