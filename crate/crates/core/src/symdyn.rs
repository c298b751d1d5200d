//! The sofic shift of nonzero products as a deterministic support automaton,
//! topological entropy, language counts, and Parry chains.

use alloc::collections::BTreeMap;
use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;


use crate::error::{contract, Error, Result};
use crate::exec::{self, Executor, Sequential};
use crate::graph;
use crate::matrix::{Mat, MatTuple};
use crate::rational::{RatMat, RatTuple};
use crate::spectral;

/// Default cap on the number of automaton states.
pub const DEFAULT_MAX_STATES: usize = 1 << 20;
/// Default cap on enumerated word-tree nodes.
pub const DEFAULT_WORD_CAP: u64 = 1 << 24;

/// Boolean support of a `d x d` matrix (`d ≤ 64`), one bitset per row.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SupportPattern {
    rows: Vec<u64>,
}

impl core::fmt::Debug for SupportPattern {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let d = self.dim();
        let rows: Vec<alloc::string::String> = self
            .rows
            .iter()
            .map(|r| (0..d).map(|j| if r >> j & 1 == 1 { '1' } else { '0' }).collect())
            .collect();
        f.debug_list().entries(rows).finish()
    }
}

impl SupportPattern {
    pub fn from_mat(m: &Mat) -> Self {
        let rows = m
            .rows()
            .map(|r| r.iter().enumerate().filter(|(_, &x)| x != 0.0).fold(0u64, |acc, (j, _)| acc | 1 << j))
            .collect();
        SupportPattern { rows }
    }

    pub fn from_bools(adj: &[Vec<bool>]) -> Self {
        let rows = adj
            .iter()
            .map(|r| r.iter().enumerate().filter(|(_, &b)| b).fold(0u64, |acc, (j, _)| acc | 1 << j))
            .collect();
        SupportPattern { rows }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i] >> j & 1 == 1
    }

    pub fn row_bits(&self, i: usize) -> u64 {
        self.rows[i]
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|&r| r == 0)
    }

    /// Boolean matrix product.
    pub fn mul(&self, other: &SupportPattern) -> SupportPattern {
        let rows = self
            .rows
            .iter()
            .map(|&r| {
                let mut acc = 0u64;
                let mut bits = r;
                while bits != 0 {
                    let l = bits.trailing_zeros() as usize;
                    acc |= other.rows[l];
                    bits &= bits - 1;
                }
                acc
            })
            .collect();
        SupportPattern { rows }
    }

    pub fn to_bools(&self) -> Vec<Vec<bool>> {
        let d = self.dim();
        (0..d).map(|i| (0..d).map(|j| self.get(i, j)).collect()).collect()
    }

    pub fn count_ones(&self) -> u32 {
        self.rows.iter().map(|r| r.count_ones()).sum()
    }
}

fn check_dim(d: usize) -> Result<()> {
    if d > 64 {
        return Err(contract("support patterns are limited to dimension 64"));
    }
    Ok(())
}

/// Deterministic automaton whose states are the distinct nonzero supports of
/// products `M_J`, `J` nonempty. A word is in the language of nonzero
/// products iff it is read from the initial state of its first symbol.
///
/// For tuples with negative entries the support product over-approximates
/// the true support, so the automaton is only meaningful for nonnegative
/// tuples.
#[derive(Debug, Clone)]
pub struct SupportAutomaton {
    k: usize,
    states: Vec<SupportPattern>,
    initial: Vec<Option<usize>>,
    transitions: Vec<Vec<Option<usize>>>,
}

impl SupportAutomaton {
    /// Breadth-first closure of the generator supports under right
    /// multiplication, dropping zero products.
    pub fn build(m: &MatTuple) -> Result<Self> {
        Self::build_capped(m, DEFAULT_MAX_STATES)
    }

    pub fn build_capped(m: &MatTuple, max_states: usize) -> Result<Self> {
        check_dim(m.dim())?;
        let gens: Vec<SupportPattern> = m.mats().iter().map(SupportPattern::from_mat).collect();
        Self::from_generators(gens, max_states)
    }

    pub fn from_generators(gens: Vec<SupportPattern>, max_states: usize) -> Result<Self> {
        if gens.iter().all(SupportPattern::is_zero) {
            return Err(contract("support automaton needs a nonzero generator"));
        }
        let k = gens.len();
        let mut index: BTreeMap<SupportPattern, usize> = BTreeMap::new();
        let mut states: Vec<SupportPattern> = Vec::new();
        let mut queue = VecDeque::new();
        let mut intern = |p: SupportPattern,
                          states: &mut Vec<SupportPattern>,
                          queue: &mut VecDeque<usize>|
         -> Result<usize> {
            if let Some(&i) = index.get(&p) {
                return Ok(i);
            }
            if states.len() >= max_states {
                return Err(Error::Resource {
                    what: "support automaton states",
                    needed: states.len() as u128 + 1,
                    cap: max_states as u128,
                });
            }
            let i = states.len();
            index.insert(p.clone(), i);
            states.push(p);
            queue.push_back(i);
            Ok(i)
        };
        let mut initial = Vec::with_capacity(k);
        for g in &gens {
            initial.push(if g.is_zero() { None } else { Some(intern(g.clone(), &mut states, &mut queue)?) });
        }
        let mut transitions: Vec<Vec<Option<usize>>> = Vec::new();
        while let Some(s) = queue.pop_front() {
            let mut row = Vec::with_capacity(k);
            for g in &gens {
                let p = states[s].mul(g);
                row.push(if p.is_zero() { None } else { Some(intern(p, &mut states, &mut queue)?) });
            }
            if transitions.len() <= s {
                transitions.resize(s + 1, Vec::new());
            }
            transitions[s] = row;
        }
        Ok(SupportAutomaton {
            k,
            states,
            initial,
            transitions,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[SupportPattern] {
        &self.states
    }

    pub fn initial(&self, symbol: usize) -> Option<usize> {
        self.initial[symbol]
    }

    pub fn transition(&self, state: usize, symbol: usize) -> Option<usize> {
        self.transitions[state][symbol]
    }

    /// State reached by reading `word`, or `None` if the product vanishes.
    pub fn run(&self, word: &[usize]) -> Option<usize> {
        let (&first, rest) = word.split_first()?;
        let mut s = self.initial(first)?;
        for &j in rest {
            s = self.transition(s, j)?;
        }
        Some(s)
    }

    pub fn accepts(&self, word: &[usize]) -> bool {
        self.run(word).is_some()
    }

    /// `true` iff no product of generators ever vanishes.
    pub fn is_complete(&self) -> bool {
        self.initial.iter().all(Option::is_some) && self.transitions.iter().all(|r| r.iter().all(Option::is_some))
    }

    /// Edge-count matrix between states (multi-edges counted).
    pub fn adjacency_counts(&self) -> Vec<Vec<u64>> {
        let n = self.n_states();
        let mut a = vec![vec![0u64; n]; n];
        for (s, row) in self.transitions.iter().enumerate() {
            for t in row.iter().flatten() {
                a[s][*t] += 1;
            }
        }
        a
    }

    pub fn adjacency(&self) -> Mat {
        let counts = self.adjacency_counts();
        let n = self.n_states();
        Mat::from_vec(n, counts.into_iter().flatten().map(|c| c as f64).collect()).expect("finite counts")
    }

    /// Number of initial symbols landing in each state.
    pub fn initial_counts(&self) -> Vec<u64> {
        let mut c = vec![0u64; self.n_states()];
        for s in self.initial.iter().flatten() {
            c[*s] += 1;
        }
        c
    }
}

/// Topological entropy, with a marker for shifts that are empty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Entropy {
    /// Only finitely many words are admissible (`ρ = 0`).
    Empty,
    Finite(f64),
}

impl Entropy {
    pub fn value(self) -> Option<f64> {
        match self {
            Entropy::Empty => None,
            Entropy::Finite(h) => Some(h),
        }
    }
}

/// `h_top(Y_M) = log ρ(adjacency)` for the (right-resolving) support automaton.
pub fn sofic_entropy(aut: &SupportAutomaton, tol: f64) -> Result<Entropy> {
    Ok(match spectral::log_spectral_radius(&aut.adjacency(), tol)? {
        None => Entropy::Empty,
        Some(h) => Entropy::Finite(h.max(0.0)),
    })
}

/// `log ρ(A)` for the subshift of finite type with 0-1 transition matrix `A`.
pub fn sft_entropy(adj: &[Vec<bool>], tol: f64) -> Result<Entropy> {
    let n = adj.len();
    if n == 0 || adj.iter().any(|r| r.len() != n) {
        return Err(contract("transition matrix must be square and nonempty"));
    }
    let a = Mat::from_vec(n, adj.iter().flatten().map(|&b| if b { 1.0 } else { 0.0 }).collect())?;
    Ok(match spectral::log_spectral_radius(&a, tol)? {
        None => Entropy::Empty,
        Some(h) => Entropy::Finite(h.max(0.0)),
    })
}

fn overflow(n: usize) -> Error {
    Error::Resource {
        what: "language count bits",
        needed: n as u128,
        cap: 128,
    }
}

/// `#{J ∈ 𝒜ⁿ : M_J ≠ 0}` by counting automaton paths: the initial-symbol
/// vector times the `(n-1)`-th power of the adjacency counts.
pub fn language_count_automaton(aut: &SupportAutomaton, n: usize) -> Result<u128> {
    if n == 0 {
        return Err(contract("language counts are defined for n ≥ 1"));
    }
    let adj = aut.adjacency_counts();
    let mut v: Vec<u128> = aut.initial_counts().into_iter().map(u128::from).collect();
    for _ in 1..n {
        let mut next = vec![0u128; v.len()];
        for (s, &vs) in v.iter().enumerate() {
            if vs == 0 {
                continue;
            }
            for (t, &c) in adj[s].iter().enumerate() {
                if c == 0 {
                    continue;
                }
                let add = vs.checked_mul(c as u128).ok_or_else(|| overflow(n))?;
                next[t] = next[t].checked_add(add).ok_or_else(|| overflow(n))?;
            }
        }
        v = next;
    }
    v.iter().try_fold(0u128, |acc, &x| acc.checked_add(x)).ok_or_else(|| overflow(n))
}

/// `#{J ∈ 𝒜ⁿ : M_J ≠ 0}` by walking the word tree. Nonnegative tuples walk
/// boolean supports; tuples with negative entries multiply exactly in
/// rational arithmetic so that cancellations are detected.
pub fn language_count_enum(m: &MatTuple, n: usize, cap: u64) -> Result<u128> {
    language_count_enum_with(&Sequential, m, n, cap)
}

pub fn language_count_enum_with<E: Executor>(exec: &E, m: &MatTuple, n: usize, cap: u64) -> Result<u128> {
    if n == 0 {
        return Err(contract("language counts are defined for n ≥ 1"));
    }
    let k = m.k();
    let parts: Vec<Result<(u64, u128)>> = if m.is_nonnegative() {
        check_dim(m.dim())?;
        let gens: Vec<SupportPattern> = m.mats().iter().map(SupportPattern::from_mat).collect();
        exec.map(k, |first| {
            if gens[first].is_zero() {
                return Ok((0, 0));
            }
            let mut count = 0u128;
            let step = |p: &SupportPattern, s: usize| {
                let q = p.mul(&gens[s]);
                (!q.is_zero()).then_some(q)
            };
            let visited = exec::walk_words(
                k,
                first,
                n,
                gens[first].clone(),
                &step,
                &mut |w: &[usize], _: &SupportPattern| {
                    if w.len() == n {
                        count += 1;
                    }
                },
                cap,
            )?;
            Ok((visited, count))
        })
    } else {
        let exact = RatTuple::from_tuple(m);
        exec.map(k, |first| {
            if exact.get(first).is_zero() {
                return Ok((0, 0));
            }
            let mut count = 0u128;
            let step = |p: &RatMat, s: usize| {
                let q = p.mul(exact.get(s));
                (!q.is_zero()).then_some(q)
            };
            let visited = exec::walk_words(
                k,
                first,
                n,
                exact.get(first).clone(),
                &step,
                &mut |w: &[usize], _: &RatMat| {
                    if w.len() == n {
                        count += 1;
                    }
                },
                cap,
            )?;
            Ok((visited, count))
        })
    };
    let counts = exec::merge_counts(parts, cap)?;
    Ok(counts.into_iter().sum())
}

/// Language count through the automaton for nonnegative tuples (no cap) and
/// through exact enumeration otherwise.
pub fn language_count(m: &MatTuple, n: usize, cap: u64) -> Result<u128> {
    if m.is_nonnegative() {
        language_count_automaton(&SupportAutomaton::build(m)?, n)
    } else {
        language_count_enum(m, n, cap)
    }
}

/// Row-stochastic chain with its stationary distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovChain {
    pub p: Mat,
    pub pi: Vec<f64>,
}

impl MarkovChain {
    /// Entropy rate `-Σ π_i P_ij log P_ij`.
    pub fn entropy(&self) -> f64 {
        let n = self.p.dim();
        let mut h = 0.0;
        for i in 0..n {
            for j in 0..n {
                let pij = self.p[(i, j)];
                if pij > 0.0 {
                    h -= self.pi[i] * pij * libm::log(pij);
                }
            }
        }
        h
    }

    pub fn max_row_sum_error(&self) -> f64 {
        self.p.rows().map(|r| (r.iter().sum::<f64>() - 1.0).abs()).fold(0.0, f64::max)
    }

    /// `max_j |(πP)_j - π_j|`.
    pub fn stationarity_residual(&self) -> f64 {
        let pp = self.p.vec_mul(&self.pi);
        pp.iter().zip(&self.pi).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// Parry chain of an irreducible 0-1 matrix: `P_ij = A_ij u_j / (ρ u_i)`,
/// `π_i ∝ v_i u_i`.
pub fn parry_chain(adj: &[Vec<bool>], tol: f64) -> Result<MarkovChain> {
    let n = adj.len();
    if n == 0 || adj.iter().any(|r| r.len() != n) {
        return Err(contract("transition matrix must be square and nonempty"));
    }
    if !graph::is_irreducible_support(adj) {
        return Err(contract("Parry chain requires an irreducible transition matrix"));
    }
    let a = Mat::from_vec(n, adj.iter().flatten().map(|&b| if b { 1.0 } else { 0.0 }).collect())?;
    let perron = spectral::perron_pair(&a, tol)?;
    let mut p = Mat::zeros(n);
    for i in 0..n {
        for j in 0..n {
            if adj[i][j] {
                p[(i, j)] = perron.u[j] / (perron.rho * perron.u[i]);
            }
        }
    }
    // Rows sum to one up to the accuracy of u; renormalize to machine precision.
    for i in 0..n {
        let s: f64 = p.row(i).iter().sum();
        for j in 0..n {
            p[(i, j)] /= s;
        }
    }
    let mut pi: Vec<f64> = perron.u.iter().zip(&perron.v).map(|(u, v)| u * v).collect();
    let total: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|x| *x /= total);
    if pi.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numeric(format!("non-finite stationary vector for {n} states")));
    }
    Ok(MarkovChain { p, pi })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tuple(mats: &[&[&[f64]]]) -> MatTuple {
        MatTuple::from_rows(&mats.iter().map(|m| m.iter().map(|r| r.to_vec()).collect()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn elementary_automaton() {
        let aut = SupportAutomaton::build(&MatTuple::elementary_2x2()).unwrap();
        assert_eq!(aut.n_states(), 4);
        for s in 0..4 {
            assert_eq!((0..4).filter(|&j| aut.transition(s, j).is_some()).count(), 2);
        }
        let h = sofic_entropy(&aut, 1e-12).unwrap().value().unwrap();
        assert!((h - libm::log(2.0)).abs() < 1e-10);
        assert_eq!(language_count_automaton(&aut, 3).unwrap(), 16);
        assert!(!aut.is_complete());
    }

    #[test]
    fn trivial_automata() {
        let aut = SupportAutomaton::build(&tuple(&[&[&[1.0]]])).unwrap();
        assert_eq!(aut.n_states(), 1);
        assert_eq!(aut.adjacency_counts(), vec![vec![1]]);
        let full = tuple(&[&[&[1.0, 1.0], &[1.0, 1.0]], &[&[1.0, 1.0], &[1.0, 1.0]]]);
        let aut = SupportAutomaton::build(&full).unwrap();
        assert_eq!(aut.n_states(), 1);
        assert_eq!(aut.adjacency_counts(), vec![vec![2]]);
        assert_eq!(language_count_automaton(&aut, 5).unwrap(), 32);
        assert!(aut.is_complete());
    }

    #[test]
    fn zero_generator_language() {
        let m = tuple(&[&[&[1.0]], &[&[0.0]]]);
        assert_eq!(language_count(&m, 2, 1 << 20).unwrap(), 1);
        assert_eq!(language_count_enum(&m, 2, 1 << 20).unwrap(), 1);
    }

    #[test]
    fn sft_entropy_examples() {
        let ones = vec![vec![true; 3]; 3];
        assert!((sft_entropy(&ones, 1e-12).unwrap().value().unwrap() - libm::log(3.0)).abs() < 1e-10);
        let golden = vec![vec![true, true], vec![true, false]];
        let phi = (1.0 + libm::sqrt(5.0)) / 2.0;
        assert!((sft_entropy(&golden, 1e-12).unwrap().value().unwrap() - libm::log(phi)).abs() < 1e-10);
        let nil = vec![vec![false, true], vec![false, false]];
        assert_eq!(sft_entropy(&nil, 1e-12).unwrap(), Entropy::Empty);
    }

    #[test]
    fn parry_examples() {
        let c = parry_chain(&[vec![true, true], vec![true, true]], 1e-12).unwrap();
        for i in 0..2 {
            assert!((c.pi[i] - 0.5).abs() < 1e-12);
            for j in 0..2 {
                assert!((c.p[(i, j)] - 0.5).abs() < 1e-12);
            }
        }
        let phi = (1.0 + libm::sqrt(5.0)) / 2.0;
        let c = parry_chain(&[vec![true, true], vec![true, false]], 1e-12).unwrap();
        assert!((c.p[(0, 0)] - 1.0 / phi).abs() < 1e-10);
        assert!((c.p[(0, 1)] - 1.0 / (phi * phi)).abs() < 1e-10);
        assert!((c.p[(1, 0)] - 1.0).abs() < 1e-12);
        // π ∝ (φ², 1)
        assert!((c.pi[0] / c.pi[1] - phi * phi).abs() < 1e-9);
        assert!(c.stationarity_residual() < 1e-10);
        assert!((c.entropy() - libm::log(phi)).abs() < 1e-9);
        let c = parry_chain(&[vec![true]], 1e-12).unwrap();
        assert_eq!(c.p, Mat::scalar(1.0));
        assert_eq!(c.pi, vec![1.0]);
        assert!(parry_chain(&[vec![true, true], vec![false, true]], 1e-12).is_err());
    }
}
