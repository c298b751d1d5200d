//! Projections of Parry measures on sofic carpets.
//!
//! A carpet is given by an irreducible 0-1 transition matrix `A` on symbols
//! `{1..n}` and a labelling `τ : {1..n} → {1..m}`. With
//! `(E_ℓ)_{ij} = a_ij` when `τ(j) = ℓ` (and 0 otherwise), the Parry measure of
//! `Σ_A` projects to the Parry measure of the label shift iff the tuple
//! `(E_1, ..., E_m)` has a uniform Lyapunov exponent modulo 0.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{contract, Error, Result};
use crate::graph;
use crate::matrix::{Mat, MatTuple};
use crate::symdyn::{self, SupportAutomaton};
use crate::ule::{self, Config, Decision, UleVerdict};

/// Default longest label word in the fiber-count cross-check.
pub const DEFAULT_FIBER_LEN: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CarpetInput {
    pub adjacency: Vec<Vec<bool>>,
    /// 0-based label of each symbol.
    pub tau: Vec<usize>,
    /// Size of the label alphabet; defaults to `max τ + 1`.
    pub m: Option<usize>,
}

/// Outcome of the fiber-count sandwich `N(J) ≤ ‖E_J‖ ≤ n² N(J)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SandwichCheck {
    pub max_len: usize,
    /// Label words examined (including those with `N(J) = 0`).
    pub words_checked: u64,
    pub holds: bool,
    /// First label word (compacted labels, 0-based) violating the bounds.
    pub violation: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CarpetReport {
    pub e: MatTuple,
    /// Original label of each compacted label index.
    pub labels: Vec<usize>,
    pub warnings: Vec<String>,
    pub verdict: UleVerdict,
    /// Criterion B on the same tuple, when its tensor dimension fits the cap.
    pub cross_check: Option<UleVerdict>,
    /// `h_top(Σ_A) = log α`.
    pub log_alpha: f64,
    /// `h_top` of the label shift, `log β`.
    pub log_beta: f64,
    pub sandwich: SandwichCheck,
    pub parry_projects_to_parry: bool,
}

impl CarpetReport {
    pub fn conclusion(&self) -> &'static str {
        match self.verdict.decision {
            Decision::Yes => "Parry measure projects to Parry measure (dimensions coincide)",
            Decision::No => "Parry measure does not project to Parry measure",
            Decision::Inconclusive => "undecided",
        }
    }
}

/// Builds `E_1, ..., E_m`. Labels not taken by `τ` are dropped (with a
/// warning) and the remaining ones renumbered in increasing order.
pub fn build_e(input: &CarpetInput) -> Result<(MatTuple, Vec<usize>, Vec<String>)> {
    let n = input.adjacency.len();
    if n == 0 || input.adjacency.iter().any(|r| r.len() != n) {
        return Err(contract("carpet transition matrix must be square and nonempty"));
    }
    if input.tau.len() != n {
        return Err(contract("carpet labelling must assign a label to every symbol"));
    }
    let m = input.m.unwrap_or_else(|| input.tau.iter().max().map_or(0, |x| x + 1));
    if input.tau.iter().any(|&t| t >= m) {
        return Err(contract("carpet label out of range"));
    }
    let mut used = vec![false; m];
    for &t in &input.tau {
        used[t] = true;
    }
    let labels: Vec<usize> = (0..m).filter(|&l| used[l]).collect();
    let mut warnings = Vec::new();
    if labels.len() < m {
        let missing: Vec<usize> = (0..m).filter(|&l| !used[l]).map(|l| l + 1).collect();
        warnings.push(format!("labels {missing:?} are never used and were dropped"));
    }
    let compact: BTreeMap<usize, usize> = labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
    let mut mats = vec![Mat::zeros(n); labels.len()];
    for i in 0..n {
        for j in 0..n {
            if input.adjacency[i][j] {
                mats[compact[&input.tau[j]]][(i, j)] = 1.0;
            }
        }
    }
    let e = MatTuple::new(mats)?;
    Ok((e, labels, warnings))
}

/// Number of admissible paths `x_1 ... x_k` in `Σ_A` with each label word of
/// length `k ≤ max_len`, indexed by length and then by the label word read as
/// a base-`m` number.
pub fn fiber_counts(adj: &[Vec<bool>], tau: &[usize], m: usize, max_len: usize, cap: u64) -> Result<Vec<Vec<u64>>> {
    let n = adj.len();
    let mut size: u64 = 1;
    let mut table = Vec::with_capacity(max_len);
    for _ in 0..max_len {
        size = size.saturating_mul(m as u64);
        if size > cap {
            return Err(Error::Resource {
                what: "fiber count table",
                needed: size as u128,
                cap: cap as u128,
            });
        }
        table.push(vec![0u64; size as usize]);
    }
    let mut visited = 0u64;
    // Iterative DFS over paths: (symbol, depth, label code).
    let mut stack: Vec<(usize, usize, usize)> = (0..n).rev().map(|x| (x, 1, tau[x])).collect();
    while let Some((x, depth, code)) = stack.pop() {
        visited += 1;
        if visited > cap {
            return Err(Error::Resource {
                what: "fiber path enumeration",
                needed: visited as u128,
                cap: cap as u128,
            });
        }
        table[depth - 1][code] += 1;
        if depth < max_len {
            for y in (0..n).rev() {
                if adj[x][y] {
                    stack.push((y, depth + 1, code * m + tau[y]));
                }
            }
        }
    }
    Ok(table)
}

/// Checks `N(J) ≤ ‖E_J‖ ≤ n² N(J)` (in particular `E_J = 0` iff `N(J) = 0`)
/// for all label words of length `≤ max_len`.
pub fn sandwich_check(input: &CarpetInput, e: &MatTuple, tau_compact: &[usize], max_len: usize, cap: u64) -> Result<SandwichCheck> {
    let n = input.adjacency.len();
    let m = e.k();
    let counts = fiber_counts(&input.adjacency, tau_compact, m, max_len, cap)?;
    let n2 = (n * n) as f64;
    let mut check = SandwichCheck {
        max_len,
        words_checked: 0,
        holds: true,
        violation: None,
    };
    // Walk label words; a vanishing product has no nonzero extensions, so
    // only its own count needs checking.
    let mut stack: Vec<(Vec<usize>, Mat, usize)> = (0..m).rev().map(|l| (vec![l], e.get(l).clone(), l)).collect();
    while let Some((word, p, code)) = stack.pop() {
        check.words_checked += 1;
        let big_n = counts[word.len() - 1][code] as f64;
        let norm = p.norm();
        if !(big_n <= norm && norm <= n2 * big_n) {
            check.holds = false;
            check.violation.get_or_insert(word.clone());
        }
        if norm == 0.0 || word.len() == max_len {
            continue;
        }
        for l in (0..m).rev() {
            let mut w = word.clone();
            w.push(l);
            stack.push((w, p.mul(e.get(l)), code * m + l));
        }
    }
    Ok(check)
}

/// Runs the full carpet pipeline.
pub fn carpet_check(input: &CarpetInput, cfg: &Config, fiber_len: usize) -> Result<CarpetReport> {
    if !graph::is_irreducible_support(&input.adjacency) {
        return Err(contract("carpet transition matrix must be irreducible"));
    }
    let (e, labels, warnings) = build_e(input)?;
    if e.sum().as_slice().iter().zip(input.adjacency.iter().flatten()).any(|(&x, &a)| x != if a { 1.0 } else { 0.0 }) {
        return Err(Error::Internal("label matrices do not sum to the transition matrix".into()));
    }
    let compact: BTreeMap<usize, usize> = labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
    let tau_compact: Vec<usize> = input.tau.iter().map(|t| compact[t]).collect();
    let verdict = ule::criterion_a(&e, cfg).or_else(|err| match err {
        Error::Resource { .. } => ule::criterion_a_fast(&e, cfg),
        other => Err(other),
    })?;
    let cross_check = match ule::criterion_b(&e, cfg) {
        Ok(v) => Some(v),
        Err(Error::Resource { .. }) => None,
        Err(other) => return Err(other),
    };
    let inner = cfg.tol * 1e-3;
    let log_alpha = symdyn::sft_entropy(&input.adjacency, inner)?
        .value()
        .ok_or_else(|| Error::Internal("irreducible shift has empty language".into()))?;
    let aut = SupportAutomaton::build_capped(&e, cfg.max_states)?;
    let log_beta = symdyn::sofic_entropy(&aut, inner)?
        .value()
        .ok_or_else(|| Error::Internal("label shift has empty language".into()))?;
    let sandwich = sandwich_check(input, &e, &tau_compact, fiber_len, cfg.max_words)?;
    let parry_projects_to_parry = verdict.decision == Decision::Yes;
    Ok(CarpetReport {
        e,
        labels,
        warnings,
        verdict,
        cross_check,
        log_alpha,
        log_beta,
        sandwich,
        parry_projects_to_parry,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn full(n: usize) -> Vec<Vec<bool>> {
        vec![vec![true; n]; n]
    }

    #[test]
    fn mcmullen_uniform_fibers() {
        let input = CarpetInput {
            adjacency: full(6),
            tau: (0..6).map(|s| s % 2).collect(),
            m: None,
        };
        let r = carpet_check(&input, &Config::default(), 4).unwrap();
        assert_eq!(r.verdict.decision, Decision::Yes);
        assert!(r.sandwich.holds);
        let counts = fiber_counts(&input.adjacency, &input.tau, 2, 3, 1 << 20).unwrap();
        assert!(counts[2].iter().all(|&c| c == 27));
        assert!((r.log_alpha - libm::log(6.0)).abs() < 1e-9);
        assert!((r.log_beta - libm::log(2.0)).abs() < 1e-9);
    }

    #[test]
    fn skewed_fibers() {
        let input = CarpetInput {
            adjacency: full(3),
            tau: vec![0, 0, 1],
            m: None,
        };
        let r = carpet_check(&input, &Config::default(), 5).unwrap();
        assert_eq!(r.verdict.decision, Decision::No);
        assert!(r.sandwich.holds);
    }

    #[test]
    fn identity_labels() {
        let adj = vec![vec![true, true], vec![true, false]];
        let input = CarpetInput {
            adjacency: adj,
            tau: vec![0, 1],
            m: None,
        };
        let r = carpet_check(&input, &Config::default(), 6).unwrap();
        assert_eq!(r.verdict.decision, Decision::Yes);
        assert!(r.verdict.lambda.unwrap().abs() < 1e-8);
    }

    #[test]
    fn unused_labels_are_compacted() {
        let input = CarpetInput {
            adjacency: full(2),
            tau: vec![0, 2],
            m: Some(4),
        };
        let (e, labels, warnings) = build_e(&input).unwrap();
        assert_eq!(e.k(), 2);
        assert_eq!(labels, vec![0, 2]);
        assert_eq!(warnings.len(), 1);
    }
}
