//! Finite-type self-similar measures on the line.
//!
//! The input is the tuple `M` describing the measure through
//! `μ(Δ_I) ≈ ‖M_I‖` together with the contraction ratio `ρ`. Then
//! `μ ≪ ℋ^s` on the attractor iff `M` has a uniform Lyapunov exponent modulo
//! 0, and `μ` is absolutely continuous iff additionally
//! `h_top(Y_M) = log(1/ρ)`.

use alloc::vec::Vec;

use crate::error::{contract, Error, Result};
use crate::matrix::MatTuple;
use crate::symdyn::{self, SupportAutomaton};
use crate::ule::{self, Config, Decision, UleVerdict};

pub const CAVEAT: &str = "verdicts are properties of the supplied matrices; they describe a measure only if the matrices come from a finite-type construction for it";

#[derive(Debug, Clone, PartialEq)]
pub struct SelfSimilarInput {
    pub m: MatTuple,
    pub rho: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelfSimilarReport {
    /// `h_top(Y_M)`.
    pub entropy: f64,
    /// `s = h / log(1/ρ)`.
    pub s: f64,
    pub r_value: Option<f64>,
    pub lambda: Option<f64>,
    /// `μ ≪ ℋ^s` (criterion A).
    pub verdict_hs: UleVerdict,
    /// `μ ≪` Lebesgue.
    pub verdict_leb: Decision,
    pub notes: Vec<&'static str>,
}

pub fn self_similar_check(input: &SelfSimilarInput, cfg: &Config) -> Result<SelfSimilarReport> {
    if !(input.rho > 0.0 && input.rho < 1.0) {
        return Err(contract("contraction ratio must lie in (0, 1)"));
    }
    let aut = SupportAutomaton::build_capped(&input.m, cfg.max_states)?;
    let entropy = symdyn::sofic_entropy(&aut, cfg.tol * 1e-3)?
        .value()
        .ok_or_else(|| Error::Degenerate(aut.n_states() + 1))?;
    let log_inv_rho = -libm::log(input.rho);
    let verdict_hs = ule::criterion_a(&input.m, cfg).or_else(|err| match err {
        Error::Resource { .. } => ule::criterion_a_fast(&input.m, cfg),
        other => Err(other),
    })?;
    let entropy_match = Decision::from_residual((entropy - log_inv_rho).abs(), cfg.tol);
    let verdict_leb = match (verdict_hs.decision, entropy_match) {
        (Decision::No, _) | (_, Decision::No) => Decision::No,
        (Decision::Yes, Decision::Yes) => Decision::Yes,
        _ => Decision::Inconclusive,
    };
    Ok(SelfSimilarReport {
        entropy,
        s: entropy / log_inv_rho,
        r_value: verdict_hs.r_value,
        lambda: verdict_hs.lambda,
        verdict_hs,
        verdict_leb,
        notes: alloc::vec![CAVEAT],
    })
}
