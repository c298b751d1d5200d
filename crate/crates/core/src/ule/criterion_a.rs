use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use super::{log_r_of, require_positively_irreducible, BlockResidual, Config, Criterion, Decision, UleVerdict};
use crate::error::{Error, Result};
use crate::exec::{self, Executor, Sequential};
use crate::graph::{self, Condensation};
use crate::linalg::{self, AffineHull};
use crate::matrix::{Mat, MatTuple, Word};
use crate::rational::{self, Rat, RatMat, RatTuple};
use crate::spectral::{self, PerronData};
use crate::symdyn::{SupportAutomaton, SupportPattern};

/// Block structure of the averaged product matrix `B`.
#[derive(Debug, Clone, PartialEq)]
pub struct IrredDecomposition {
    /// The average `B` in the original coordinates.
    pub b: Mat,
    /// Number of words averaged.
    pub j_count: u128,
    /// Vertex order making `B` block upper triangular.
    pub permutation: Vec<usize>,
    pub block_sizes: Vec<usize>,
    /// Original indices of each block, in block order.
    pub components: Vec<Vec<usize>>,
    /// Diagonal blocks `B^{(i)}`.
    pub blocks: Vec<Mat>,
    /// Blocks with `B^{(i)} ≠ 0`.
    pub lambda_set: Vec<usize>,
    /// Perron data of each block in `lambda_set` (`None` elsewhere).
    pub perron: Vec<Option<PerronData>>,
}

impl IrredDecomposition {
    fn from_average(b: Mat, j_count: u128, tol: f64) -> Result<Self> {
        let cond = graph::condense(&graph::support(&b));
        let components = cond.components.clone();
        let blocks: Vec<Mat> = components.iter().map(|c| b.principal(c)).collect();
        let lambda_set: Vec<usize> = (0..cond.len()).filter(|&i| !cond.trivial_zero[i]).collect();
        if lambda_set.is_empty() {
            return Err(Error::Internal("averaged product matrix has no nonzero diagonal block".into()));
        }
        let mut perron = vec![None; cond.len()];
        for &i in &lambda_set {
            perron[i] = Some(spectral::perron_pair(&blocks[i], tol)?);
        }
        Ok(IrredDecomposition {
            b,
            j_count,
            permutation: cond.order(),
            block_sizes: cond.block_sizes(),
            components,
            blocks,
            lambda_set,
            perron,
        })
    }

    fn condensation_order(&self) -> (&[usize], &[usize]) {
        (&self.permutation, &self.block_sizes)
    }

    /// `true` iff the support of `p` is block upper triangular in this order.
    pub fn is_compatible(&self, p: &SupportPattern) -> bool {
        let (order, sizes) = self.condensation_order();
        graph::is_block_upper_triangular(&p.to_bools(), order, sizes)
    }

    /// `v_iᵀ P^{(i)} u_i` for a matrix `P` in original coordinates.
    pub fn pairing(&self, block: usize, p: &Mat) -> f64 {
        let pd = self.perron[block].as_ref().expect("block in lambda set");
        let idx = &self.components[block];
        let mut acc = 0.0;
        for (s, &i) in idx.iter().enumerate() {
            let mut row = 0.0;
            for (t, &j) in idx.iter().enumerate() {
                row += p[(i, j)] * pd.u[t];
            }
            acc += pd.v[s] * row;
        }
        acc
    }

    /// `E_i u_i`: the block's right Perron vector embedded in `R^d`.
    fn embedded_u(&self, block: usize, d: usize) -> Vec<f64> {
        let pd = self.perron[block].as_ref().expect("block in lambda set");
        let mut x = vec![0.0; d];
        for (t, &j) in self.components[block].iter().enumerate() {
            x[j] = pd.u[t];
        }
        x
    }

    fn embedded_v(&self, block: usize, d: usize) -> Vec<f64> {
        let pd = self.perron[block].as_ref().expect("block in lambda set");
        let mut x = vec![0.0; d];
        for (t, &j) in self.components[block].iter().enumerate() {
            x[j] = pd.v[t];
        }
        x
    }
}

fn first_row_empty(p: &Mat) -> bool {
    p.row(0).iter().all(|&x| x == 0.0)
}

fn max_len(m: &MatTuple) -> usize {
    m.dim() * m.dim()
}

/// The words `J` with `1 ≤ |J| ≤ d²` and `(M_J)_{1,1} > 0`, in
/// lexicographic (depth-first) order.
pub fn enumerate_j(m: &MatTuple, cap: u64) -> Result<Vec<Word>> {
    enumerate_j_with(&Sequential, m, cap)
}

pub fn enumerate_j_with<E: Executor>(exec: &E, m: &MatTuple, cap: u64) -> Result<Vec<Word>> {
    require_positively_irreducible(m)?;
    check_tree_size(
        m,
        &Config {
            max_words: cap,
            ..Config::default()
        },
    )?;
    let gens: Vec<SupportPattern> = m.mats().iter().map(SupportPattern::from_mat).collect();
    let step = |p: &SupportPattern, s: usize| {
        let q = p.mul(&gens[s]);
        (q.row_bits(0) != 0).then_some(q)
    };
    let parts = exec.map(m.k(), |first| {
        let mut words = Vec::new();
        if gens[first].row_bits(0) == 0 {
            return Ok((0, words));
        }
        let n = exec::walk_words(
            m.k(),
            first,
            max_len(m),
            gens[first].clone(),
            &step,
            &mut |w: &[usize], p: &SupportPattern| {
                if p.get(0, 0) {
                    words.push(Word::new(w.to_vec()));
                }
            },
            cap,
        )
        .map_err(suggest_fast_path)?;
        Ok((n, words))
    });
    Ok(exec::merge_counts(parts, cap).map_err(suggest_fast_path)?.into_iter().flatten().collect())
}

/// Number of nodes the pruned depth-first walk visits: words of length
/// `≤ d²` whose product has a nonzero first row. A vanishing first row stays
/// vanishing under extension, so this is a path count in the automaton.
fn word_tree_size(aut: &SupportAutomaton, max_len: usize) -> u128 {
    let live = |s: usize| aut.states()[s].row_bits(0) != 0;
    let mut layer = vec![0u128; aut.n_states()];
    for j in 0..aut.k() {
        if let Some(s) = aut.initial(j).filter(|&s| live(s)) {
            layer[s] += 1;
        }
    }
    let mut total = 0u128;
    for len in 1..=max_len {
        total = total.saturating_add(layer.iter().fold(0u128, |a, &c| a.saturating_add(c)));
        if len == max_len {
            break;
        }
        let mut next = vec![0u128; aut.n_states()];
        for (s, &c) in layer.iter().enumerate().filter(|(_, &c)| c > 0) {
            for j in 0..aut.k() {
                if let Some(t) = aut.transition(s, j).filter(|&t| live(t)) {
                    next[t] = next[t].saturating_add(c);
                }
            }
        }
        layer = next;
    }
    total
}

/// Fails early when the word tree of criterion A exceeds the cap.
fn check_tree_size(m: &MatTuple, cfg: &Config) -> Result<()> {
    let aut = SupportAutomaton::build_capped(m, cfg.max_states)?;
    let needed = word_tree_size(&aut, max_len(m));
    if needed > cfg.max_words as u128 {
        return Err(suggest_fast_path(Error::Resource {
            what: "",
            needed,
            cap: cfg.max_words as u128,
        }));
    }
    Ok(())
}

fn suggest_fast_path(e: Error) -> Error {
    match e {
        Error::Resource { needed, cap, .. } => Error::Resource {
            what: "criterion A word enumeration (use the fast path)",
            needed,
            cap,
        },
        other => other,
    }
}

/// Averages `M_J` over `words`, condenses the support of the average and
/// computes Perron data of its nonzero diagonal blocks. Verifies that every
/// `M_J` is block upper triangular in the same order.
pub fn decompose(m: &MatTuple, words: &[Word], tol: f64) -> Result<IrredDecomposition> {
    if words.is_empty() {
        return Err(Error::Internal("empty word set".into()));
    }
    let mut sum = Mat::zeros(m.dim());
    let mut products = Vec::with_capacity(words.len());
    for w in words {
        let p = m.word_product(w)?;
        sum.add_assign(&p);
        products.push(p);
    }
    let dec = IrredDecomposition::from_average(sum.scale(1.0 / words.len() as f64), words.len() as u128, tol)?;
    for (w, p) in words.iter().zip(&products) {
        check_lemma(&dec, &SupportPattern::from_mat(p), w)?;
    }
    Ok(dec)
}

fn check_lemma(dec: &IrredDecomposition, p: &SupportPattern, w: &Word) -> Result<()> {
    if dec.is_compatible(p) {
        Ok(())
    } else {
        Err(Error::Internal(format!(
            "product of word [{w}] is not block upper triangular in the order of its average"
        )))
    }
}

fn yes_no_verdict(
    criterion: Criterion,
    residuals: Vec<BlockResidual>,
    log_r: f64,
    tol: f64,
) -> UleVerdict {
    let best = residuals
        .iter()
        .min_by(|a, b| a.max_residual.total_cmp(&b.max_residual))
        .expect("lambda set is nonempty");
    let decision = Decision::from_residual(best.max_residual, tol);
    let mut v = UleVerdict::new(criterion, decision);
    if decision == Decision::Yes {
        v.lambda = Some(log_r);
        v.witness_block = Some(best.block);
    }
    v.r_value = Some(libm::exp(log_r));
    v.residuals = residuals;
    v
}

/// Criterion A: Perron identity checked for every word of length `≤ d²`
/// with positive `(1,1)` entry, after normalizing by `r(M)`.
pub fn criterion_a(m: &MatTuple, cfg: &Config) -> Result<UleVerdict> {
    criterion_a_with(&Sequential, m, cfg)
}

pub fn criterion_a_with<E: Executor>(exec: &E, m: &MatTuple, cfg: &Config) -> Result<UleVerdict> {
    let (log_r, _) = log_r_of(m, cfg)?;
    check_tree_size(m, cfg)?;
    let n = m.scaled(libm::exp(-log_r));
    let k = n.k();
    let step = |p: &Mat, s: usize| {
        let q = p.mul(n.get(s));
        (!first_row_empty(&q)).then_some(q)
    };

    // Pass 1: the average B.
    let parts = exec.map(k, |first| {
        let mut sum = Mat::zeros(n.dim());
        let mut count = 0u128;
        if first_row_empty(n.get(first)) {
            return Ok((0, (sum, count)));
        }
        let visited = exec::walk_words(
            k,
            first,
            max_len(&n),
            n.get(first).clone(),
            &step,
            &mut |_: &[usize], p: &Mat| {
                if p[(0, 0)] > 0.0 {
                    sum.add_assign(p);
                    count += 1;
                }
            },
            cfg.max_words,
        )
        .map_err(suggest_fast_path)?;
        Ok((visited, (sum, count)))
    });
    let mut sum = Mat::zeros(n.dim());
    let mut count = 0u128;
    for (s, c) in exec::merge_counts(parts, cfg.max_words).map_err(suggest_fast_path)? {
        sum.add_assign(&s);
        count += c;
    }
    if count == 0 {
        return Err(Error::Internal("no word has a positive (1,1) entry".into()));
    }
    let dec = IrredDecomposition::from_average(sum.scale(1.0 / count as f64), count, cfg.tol)?;

    // Pass 2: residuals and block-triangularity of every product.
    let lambda = &dec.lambda_set;
    let parts = exec.map(k, |first| {
        let mut worst: Vec<(f64, Option<Word>)> = vec![(0.0, None); lambda.len()];
        let mut broken: Option<Word> = None;
        if first_row_empty(n.get(first)) {
            return Ok((0, (worst, broken)));
        }
        let visited = exec::walk_words(
            k,
            first,
            max_len(&n),
            n.get(first).clone(),
            &step,
            &mut |w: &[usize], p: &Mat| {
                if p[(0, 0)] <= 0.0 {
                    return;
                }
                if broken.is_none() && !dec.is_compatible(&SupportPattern::from_mat(p)) {
                    broken = Some(Word::new(w.to_vec()));
                }
                for (slot, &i) in worst.iter_mut().zip(lambda) {
                    let r = (dec.pairing(i, p) - 1.0).abs();
                    if r > slot.0 || !r.is_finite() {
                        *slot = (r, Some(Word::new(w.to_vec())));
                    }
                }
            },
            cfg.max_words,
        )?;
        Ok((visited, (worst, broken)))
    });
    let mut residuals: Vec<BlockResidual> = lambda
        .iter()
        .map(|&i| BlockResidual {
            block: i,
            max_residual: 0.0,
            worst_word: None,
        })
        .collect();
    for (worst, broken) in exec::merge_counts(parts, cfg.max_words)? {
        if let Some(w) = broken {
            return Err(Error::Internal(format!(
                "product of word [{w}] is not block upper triangular in the order of its average"
            )));
        }
        for (r, (val, word)) in residuals.iter_mut().zip(worst) {
            if val > r.max_residual || (val.is_nan() && !r.max_residual.is_nan()) {
                r.max_residual = val;
                r.worst_word = word;
            }
        }
    }
    let mut v = yes_no_verdict(Criterion::A, residuals, log_r, cfg.tol);
    v.notes.push(format!("{} words averaged", dec.j_count));
    Ok(v)
}

/// `B` by dynamic programming over support-automaton states: the sum of
/// `N_J` over words of each length is kept per support pattern, so the cost
/// is polynomial in the number of states rather than exponential in `d²`.
/// Also checks that every qualifying support is block upper triangular.
fn average_by_states(n: &MatTuple, aut: &SupportAutomaton) -> (Mat, u128, Vec<usize>) {
    let d = n.dim();
    let mut layer: BTreeMap<usize, (Mat, u128)> = BTreeMap::new();
    for j in 0..n.k() {
        if let Some(s) = aut.initial(j) {
            let e = layer.entry(s).or_insert_with(|| (Mat::zeros(d), 0));
            e.0.add_assign(n.get(j));
            e.1 += 1;
        }
    }
    let mut sum = Mat::zeros(d);
    let mut count = 0u128;
    let mut qualifying_states = Vec::new();
    for len in 1..=d * d {
        for (&s, (m, c)) in &layer {
            if aut.states()[s].get(0, 0) {
                sum.add_assign(m);
                count += c;
                qualifying_states.push(s);
            }
        }
        if len == d * d {
            break;
        }
        let mut next: BTreeMap<usize, (Mat, u128)> = BTreeMap::new();
        for (&s, (m, c)) in &layer {
            if aut.states()[s].row_bits(0) == 0 {
                continue;
            }
            for j in 0..n.k() {
                if let Some(t) = aut.transition(s, j) {
                    let e = next.entry(t).or_insert_with(|| (Mat::zeros(d), 0));
                    e.0.add_assign(&m.mul(n.get(j)));
                    e.1 += c;
                }
            }
        }
        layer = next;
    }
    qualifying_states.sort_unstable();
    qualifying_states.dedup();
    (sum, count, qualifying_states)
}

/// Criterion A through affine hulls: for each block `i`, the smallest family
/// of affine sets `W_s ⊆ R^d` with `N_j x ∈ W_s` whenever `x ∈ W_p` and
/// `(N_j)_{s,p} > 0`, seeded with `N_j E_i u_i` for `(N_j)_{s,1} > 0`. Then
/// `W_1` is the affine hull of `{N_J E_i u_i : (N_J)_{1,1} > 0}` and the
/// identity holds iff the functional `x ↦ (E_i v_i)ᵀ x` equals 1 on the
/// generators of `W_1`.
pub fn criterion_a_fast(m: &MatTuple, cfg: &Config) -> Result<UleVerdict> {
    let (log_r, _) = log_r_of(m, cfg)?;
    let n = m.scaled(libm::exp(-log_r));
    let d = n.dim();
    let aut = SupportAutomaton::build_capped(&n, cfg.max_states)?;
    let (sum, count, qualifying) = average_by_states(&n, &aut);
    if count == 0 {
        return Err(Error::Internal("no word has a positive (1,1) entry".into()));
    }
    let dec = IrredDecomposition::from_average(sum.scale(1.0 / count as f64), count, cfg.tol)?;
    for s in qualifying {
        if !dec.is_compatible(&aut.states()[s]) {
            return Err(Error::Internal(format!(
                "support {:?} of a qualifying product is not block upper triangular",
                aut.states()[s]
            )));
        }
    }

    let rank_tol = 1e-10;
    let mut residuals = Vec::with_capacity(dec.lambda_set.len());
    for &i in &dec.lambda_set {
        let x0 = dec.embedded_u(i, d);
        let v = dec.embedded_v(i, d);
        let mut hulls: Vec<AffineHull> = (0..d).map(|_| AffineHull::empty(d, rank_tol)).collect();
        let mut words: Vec<Vec<Word>> = vec![Vec::new(); d];
        for j in 0..n.k() {
            let y = n.get(j).mul_vec(&x0);
            for s in 0..d {
                if n.get(j)[(s, 0)] > 0.0 && hulls[s].insert(&y) {
                    words[s].push(Word::new(vec![j]));
                }
            }
        }
        let max_rounds = d * (d + 1) + 2;
        let mut stable = false;
        for _ in 0..max_rounds {
            let mut grew = false;
            for p in 0..d {
                let gens: Vec<(Vec<f64>, Word)> =
                    hulls[p].generators().iter().cloned().zip(words[p].iter().cloned()).collect();
                for j in 0..n.k() {
                    let nj = n.get(j);
                    for (g, w) in &gens {
                        let y = nj.mul_vec(g);
                        for s in 0..d {
                            if nj[(s, p)] > 0.0 && hulls[s].insert(&y) {
                                let mut word = vec![j];
                                word.extend_from_slice(w.symbols());
                                words[s].push(Word::new(word));
                                grew = true;
                            }
                        }
                    }
                }
            }
            if !grew {
                stable = true;
                break;
            }
        }
        if !stable {
            return Err(Error::Internal("affine hull iteration did not stabilize".into()));
        }
        let mut worst = (0.0, None);
        for (g, w) in hulls[0].generators().iter().zip(&words[0]) {
            let r = (linalg::dot(&v, g) - 1.0).abs();
            if r > worst.0 || !r.is_finite() {
                worst = (r, Some(w.clone()));
            }
        }
        residuals.push(BlockResidual {
            block: i,
            max_residual: worst.0,
            worst_word: worst.1,
        });
    }
    let mut v = yes_no_verdict(Criterion::AFast, residuals, log_r, cfg.tol);
    v.notes.push(format!("{} words averaged via {} automaton states", dec.j_count, aut.n_states()));
    Ok(v)
}

/// Largest automaton for which the exact entropy check is attempted.
const EXACT_MAX_STATES: usize = 64;
const EXACT_MAX_DEN: u64 = 1_000_000;

/// Criterion A in exact rational arithmetic. Applies when `ρ(Σ M_i)` is
/// rational and `e^{h_top}` is an integer, so that `r(M)` is rational; returns
/// `Ok(None)` otherwise. The verdict is then `Yes` or `No`, never
/// `Inconclusive`.
pub fn criterion_a_exact(m: &RatTuple, cfg: &Config) -> Result<Option<UleVerdict>> {
    let mf = m.to_tuple()?;
    require_positively_irreducible(&mf)?;
    let d = m.dim();
    let sum = m.sum();
    let rho_f = spectral::spectral_radius(&sum.to_mat(), cfg.tol * 1e-3)?;
    let Some(rho) = rational::rational_eigenvalue_near(&sum, rho_f, 1e-9, EXACT_MAX_DEN) else {
        return Ok(None);
    };
    // The Perron root is the only eigenvalue with a positive eigenvector.
    if rational::positive_kernel_vector(&sum.sub(&RatMat::identity(d).scale(&rho))).is_none() {
        return Ok(None);
    }
    let aut = SupportAutomaton::build_capped(&mf, cfg.max_states)?;
    if aut.n_states() > EXACT_MAX_STATES {
        return Ok(None);
    }
    let adj = RatMat::from_mat(&aut.adjacency());
    let eh_f = spectral::spectral_radius(&aut.adjacency(), cfg.tol * 1e-3)?;
    let eh = Rat::from_integer(num_bigint::BigInt::from(libm::round(eh_f) as i64));
    if eh.is_zero()
        || (rational::to_f64(&eh) - eh_f).abs() > 1e-9 * eh_f
        || !adj.sub(&RatMat::identity(aut.n_states()).scale(&eh)).det().is_zero()
    {
        return Ok(None);
    }
    let r = &rho / &eh;
    let n = m.scaled(&(Rat::one() / &r));

    // Exact products of every qualifying word.
    let k = n.k();
    let step = |p: &RatMat, s: usize| {
        let q = p.mul(n.get(s));
        q.row(0).iter().any(|x| !x.is_zero()).then_some(q)
    };
    let mut products: Vec<(Word, RatMat)> = Vec::new();
    let mut visited = 0u64;
    for first in 0..k {
        if n.get(first).row(0).iter().all(Zero::is_zero) {
            continue;
        }
        visited += exec::walk_words(
            k,
            first,
            d * d,
            n.get(first).clone(),
            &step,
            &mut |w: &[usize], p: &RatMat| {
                if !p[(0, 0)].is_zero() {
                    products.push((Word::new(w.to_vec()), p.clone()));
                }
            },
            cfg.max_words.saturating_sub(visited),
        )
        .map_err(suggest_fast_path)?;
    }
    let mut b = RatMat::zeros(d);
    for (_, p) in &products {
        b = b.add(p);
    }
    let b = b.scale(&Rat::new(1.into(), products.len().into()));
    let cond: Condensation = graph::condense(&graph::support(&b.to_mat()));
    let order = cond.order();
    let sizes = cond.block_sizes();
    for (w, p) in &products {
        if !graph::is_block_upper_triangular(&graph::support(&p.to_mat()), &order, &sizes) {
            return Err(Error::Internal(format!("product of word [{w}] is not block upper triangular")));
        }
    }

    let mut residuals = Vec::new();
    let mut witness = None;
    for (i, comp) in cond.components.iter().enumerate() {
        if cond.trivial_zero[i] {
            continue;
        }
        let bi = b.principal(comp);
        let id = RatMat::identity(comp.len());
        let u = rational::positive_kernel_vector(&bi.sub(&id));
        let v = rational::positive_kernel_vector(&bi.transpose().sub(&id));
        let (Some(u), Some(mut v)) = (u, v) else {
            // A block whose Perron root is not 1 cannot satisfy the identity:
            // averaging it over the words would force ρ(B^{(i)}) = 1.
            let rho_i = spectral::spectral_radius(&bi.to_mat(), cfg.tol)?;
            residuals.push(BlockResidual {
                block: i,
                max_residual: (rho_i - 1.0).abs().max(f64::MIN_POSITIVE),
                worst_word: None,
            });
            continue;
        };
        let pairing: Rat = u.iter().zip(&v).map(|(a, b)| a * b).sum();
        v.iter_mut().for_each(|x| *x /= &pairing);
        let mut failure: Option<(f64, Word)> = None;
        for (w, p) in &products {
            let pi = p.principal(comp);
            let val: Rat = v.iter().zip(pi.mul_vec(&u)).map(|(a, b)| a * b).sum();
            if val != Rat::one() {
                let r = rational::to_f64(&(val - Rat::one())).abs();
                if failure.as_ref().is_none_or(|f| r > f.0) {
                    failure = Some((r, w.clone()));
                }
            }
        }
        match failure {
            None => {
                witness.get_or_insert(i);
                residuals.push(BlockResidual {
                    block: i,
                    max_residual: 0.0,
                    worst_word: None,
                });
            }
            Some((r, w)) => residuals.push(BlockResidual {
                block: i,
                max_residual: r,
                worst_word: Some(w),
            }),
        }
    }
    let log_r = libm::log(rational::to_f64(&r));
    let decision = if witness.is_some() { Decision::Yes } else { Decision::No };
    let mut verdict = UleVerdict::new(Criterion::AExact, decision);
    verdict.residuals = residuals;
    verdict.r_value = Some(rational::to_f64(&r));
    verdict.r_exact = Some(rational::format_rat(&r));
    if decision == Decision::Yes {
        verdict.lambda = Some(log_r);
        verdict.witness_block = witness;
    }
    verdict.notes.push(format!("{} words checked exactly", products.len()));
    verdict.notes.push("identity verified in rational arithmetic".to_string());
    Ok(Some(verdict))
}
