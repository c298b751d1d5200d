//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ule_core::apps::carpet::{self, CarpetInput};
use ule_core::apps::self_affine::{self, SelfAffineInput};
use ule_core::apps::self_similar::{self_similar_check, SelfSimilarInput};
use ule_core::rational::{self, Rat, RatMat, RatTuple};
use ule_core::symdyn::{self, SupportAutomaton};
use ule_core::ule::{self, Config, ProfileRow};
use ule_core::{graph, Decision, Mat, MatTuple, UleVerdict, Word};

const SEED: u64 = 0x5eed_2024;
const CORPUS_SIZE: usize = 240;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn within_budget(elapsed: Duration, budget_s: f64) -> bool {
    elapsed.as_secs_f64() < budget_s
}

fn rat(p: i64, q: i64) -> Rat {
    rational::parse_rat(&format!("{p}/{q}")).unwrap()
}

fn cfg() -> Config {
    Config::default()
}

#[derive(Clone)]
struct Case {
    m: MatTuple,
    /// `(d, κ)` for planted tuples `D (c Q_i) D^{-1}`, `κ = max D / min D`.
    planted: Option<(usize, f64)>,
}

fn rat_tuple(mats: Vec<Vec<Vec<Rat>>>) -> Option<RatTuple> {
    RatTuple::new(mats.into_iter().map(|m| RatMat::from_rows(m).unwrap()).collect()).ok()
}

fn planted(rng: &mut ChaCha8Rng) -> Option<(RatTuple, usize, f64)> {
    let d = rng.gen_range(1..=3usize);
    let k = rng.gen_range(1..=3usize);
    let diag: Vec<i64> = (0..d).map(|_| rng.gen_range(1..=3)).collect();
    let (cp, cq) = [(1, 2), (1, 1), (2, 1), (3, 2), (2, 3)][rng.gen_range(0..5)];
    let mats = (0..k)
        .map(|_| {
            let mut m = vec![vec![rat(0, 1); d]; d];
            let mut used = vec![false; d];
            for row in m.iter_mut().enumerate() {
                let (i, row) = row;
                if rng.gen_bool(0.8) {
                    let j = rng.gen_range(0..d);
                    if !used[j] {
                        used[j] = true;
                        row[j] = rat(cp * diag[i], cq * diag[j]);
                    }
                }
            }
            m
        })
        .collect();
    let hi = *diag.iter().max().unwrap() as f64;
    let lo = *diag.iter().min().unwrap() as f64;
    Some((rat_tuple(mats)?, d, hi / lo))
}

fn random_rational(rng: &mut ChaCha8Rng) -> Option<RatTuple> {
    const LEVELS: [(i64, i64); 8] = [(0, 1), (0, 1), (0, 1), (1, 2), (1, 1), (3, 2), (2, 1), (3, 1)];
    let d = rng.gen_range(1..=3usize);
    let k = rng.gen_range(1..=3usize);
    let mats = (0..k)
        .map(|_| {
            (0..d)
                .map(|_| {
                    (0..d)
                        .map(|_| {
                            let (p, q) = LEVELS[rng.gen_range(0..LEVELS.len())];
                            rat(p, q)
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    rat_tuple(mats)
}

/// Positively irreducible rational tuples, one third planted with a uniform
/// exponent and the rest drawn at random.
fn corpus() -> Vec<Case> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut out = Vec::new();
    while out.len() < CORPUS_SIZE {
        let drawn = if out.len() % 3 == 0 {
            planted(&mut rng).map(|(t, d, kappa)| (t, Some((d, kappa))))
        } else {
            random_rational(&mut rng).map(|t| (t, None))
        };
        let Some((t, planted_info)) = drawn else {
            continue;
        };
        let m = t.to_tuple().unwrap();
        if graph::is_positively_irreducible(&m).unwrap() {
            out.push(Case { m, planted: planted_info });
        }
    }
    out
}

fn mixed_sign_corpus() -> Vec<MatTuple> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0xff);
    (0..120)
        .filter_map(|_| {
            let d = rng.gen_range(1..=3usize);
            let k = rng.gen_range(1..=3usize);
            let mats = (0..k)
                .map(|_| Mat::from_vec(d, (0..d * d).map(|_| rng.gen_range(-4i32..=4) as f64 / 2.0).collect()).unwrap())
                .collect();
            MatTuple::new(mats).ok()
        })
        .collect()
}

struct Verdicts {
    a: UleVerdict,
    fast: UleVerdict,
    b: UleVerdict,
}

fn verdicts(m: &MatTuple) -> Verdicts {
    Verdicts {
        a: ule::criterion_a(m, &cfg()).unwrap(),
        fast: ule::criterion_a_fast(m, &cfg()).unwrap(),
        b: ule::criterion_b(m, &cfg()).unwrap(),
    }
}

/// Final decision of the three criteria: the first non-inconclusive one.
fn decided(v: &Verdicts) -> Decision {
    [v.a.decision, v.fast.decision, v.b.decision]
        .into_iter()
        .find(|&d| d != Decision::Inconclusive)
        .unwrap_or(Decision::Inconclusive)
}

// 1. Elementary matrices: every product of length n is an elementary matrix
// or zero, so r = 1 and every nonzero norm is 1.
fn criterion_1() -> Outcome {
    let start = Instant::now();
    let m = MatTuple::elementary_2x2();
    let v = verdicts(&m);
    let all_yes = [&v.a, &v.fast, &v.b]
        .iter()
        .all(|x| x.decision == Decision::Yes && x.lambda.is_some_and(|l| l.abs() <= 1e-8));
    let r = ule::r_of(&m, 1e-10).unwrap();
    let profile = ule::norm_profile(&m, 12, 1 << 24).unwrap();
    let unit = profile.iter().all(|row| row.range == Some((1.0, 1.0)) && row.nonzero == 1u128 << (row.n + 1));
    let elapsed = start.elapsed();
    let pass = all_yes && (r - 1.0).abs() <= 1e-8 && unit && within_budget(elapsed, 1.0);
    outcome(
        pass,
        format!(
            "A/A-fast/B yes with |λ| ≤ 1e-8: {all_yes}; |r - 1| = {:.1e} (tol 1e-8); profile n ≤ 12 min = max = 1: {unit}; {:.3} s (budget 1 s)",
            (r - 1.0).abs(),
            elapsed.as_secs_f64()
        ),
    )
}

struct Corpus2 {
    cases: Vec<Case>,
    decisions: Vec<Verdicts>,
}

// 2. Agreement of the three criteria on the random corpus.
fn criterion_2(c: &Corpus2, elapsed: Duration) -> Outcome {
    let mut disagreements = 0;
    let mut inconclusive = 0;
    let mut total = 0;
    let mut counts = BTreeMap::new();
    for v in &c.decisions {
        let ds = [v.a.decision, v.fast.decision, v.b.decision];
        total += ds.len();
        inconclusive += ds.iter().filter(|&&d| d == Decision::Inconclusive).count();
        let firm: Vec<Decision> = ds.into_iter().filter(|&d| d != Decision::Inconclusive).collect();
        if firm.windows(2).any(|w| w[0] != w[1]) {
            disagreements += 1;
        }
        *counts.entry(decided(v).as_str()).or_insert(0usize) += 1;
    }
    let rate = inconclusive as f64 / total as f64;
    let pass = c.cases.len() >= 200 && disagreements == 0 && rate < 0.02 && within_budget(elapsed, 60.0);
    outcome(
        pass,
        format!(
            "{} tuples {:?}; disagreements {disagreements}; inconclusive {inconclusive}/{total} = {:.2}% (limit 2%); {:.2} s (budget 60 s)",
            c.cases.len(),
            counts,
            100.0 * rate,
            elapsed.as_secs_f64()
        ),
    )
}

/// `max_{m ≤ n} max ‖N_J‖ / min_{m ≤ n} min ‖N_J‖` over a profile of the
/// normalized tuple `N = e^{-λ} M`.
fn cumulative_ratio(rows: &[ProfileRow], lambda: f64, n: usize) -> f64 {
    ule::empirical_constant(&rows[..n], lambda)
}

// 3. Profiles agree with the verdicts.
fn criterion_3(c: &Corpus2) -> Outcome {
    let start = Instant::now();
    let mut yes = 0;
    let mut no = 0;
    let mut failures = Vec::new();
    let mut planted_over_bound = 0;
    for (i, (case, v)) in c.cases.iter().zip(&c.decisions).enumerate() {
        let rows = ule::norm_profile(&case.m, 12, 1 << 24).unwrap();
        match decided(v) {
            Decision::Yes => {
                yes += 1;
                let lambda = v.a.lambda.or(v.b.lambda).unwrap();
                let c_emp = ule::empirical_constant(&rows, lambda);
                if !(c_emp.is_finite() && cumulative_ratio(&rows, lambda, 10) <= c_emp) {
                    failures.push(i);
                }
                // Planted products are c^n D P D^{-1} with P a partial
                // permutation: norms lie in [c^n / κ, d κ c^n].
                if let Some((d, kappa)) = case.planted {
                    if c_emp > d as f64 * kappa * kappa * (1.0 + 1e-9) {
                        planted_over_bound += 1;
                    }
                }
            }
            Decision::No => {
                no += 1;
                let (log_r, _) = ule::log_r_of(&case.m, &cfg()).unwrap();
                if cumulative_ratio(&rows, log_r, 10) <= cumulative_ratio(&rows, log_r, 4) {
                    failures.push(i);
                }
            }
            Decision::Inconclusive => {}
        }
    }
    let elapsed = start.elapsed();
    let pass = failures.is_empty() && planted_over_bound == 0 && within_budget(elapsed, 120.0);
    outcome(
        pass,
        format!(
            "yes {yes}, no {no}; violations {} {:?}; planted C_emp above d·κ²: {planted_over_bound}; {:.2} s (budget 120 s)",
            failures.len(),
            &failures[..failures.len().min(8)],
            elapsed.as_secs_f64()
        ),
    )
}

// 4. Scalars 2 and 1: ρ = 3, h = log 2, P(q) = log(2^q + 1).
fn criterion_4() -> Outcome {
    let m = MatTuple::from_rows(&[vec![vec![2.0]], vec![vec![1.0]]]).unwrap();
    let r = ule::r_of(&m, 1e-12).unwrap();
    let a = ule::criterion_a(&m, &cfg()).unwrap();
    let b = ule::criterion_b(&m, &cfg()).unwrap();
    let p = |q: i32| (2f64.powi(q) + 1.0).ln();
    let oracle = p(2) + p(6) - 2.0 * p(4);
    let defect = b.pressure.unwrap().defect;
    let expected = (325.0f64 / 289.0).ln();
    let pass = (r - 1.5).abs() <= 1e-9
        && a.decision == Decision::No
        && (defect - expected).abs() <= 1e-9
        && (oracle - expected).abs() <= 1e-12;
    outcome(
        pass,
        format!(
            "|r - 3/2| = {:.1e}; A {}; |defect - log(325/289)| = {:.1e} (tol 1e-9)",
            (r - 1.5).abs(),
            a.decision.as_str(),
            (defect - expected).abs()
        ),
    )
}

// 5. Entropies and language counts.
fn criterion_5(c: &Corpus2) -> Outcome {
    let golden = vec![vec![true, true], vec![true, false]];
    let h = symdyn::sft_entropy(&golden, 1e-13).unwrap().value().unwrap();
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let golden_err = (h - phi.ln()).abs();
    let mut worst_gap = 0.0f64;
    let mut worst_case = None;
    let mut count_mismatch = 0;
    for (i, case) in c.cases.iter().enumerate() {
        let aut = SupportAutomaton::build(&case.m).unwrap();
        let h = symdyn::sofic_entropy(&aut, 1e-12).unwrap().value().unwrap();
        let c14 = symdyn::language_count_automaton(&aut, 14).unwrap();
        let gap = ((c14 as f64).ln() / 14.0 - h).abs();
        if gap > worst_gap {
            worst_gap = gap;
            worst_case = Some(i);
        }
        for n in 1..=10 {
            if symdyn::language_count_enum(&case.m, n, 1 << 24).unwrap() != symdyn::language_count_automaton(&aut, n).unwrap() {
                count_mismatch += 1;
            }
        }
    }
    let pass = golden_err <= 1e-9 && worst_gap <= 0.08 && count_mismatch == 0;
    outcome(
        pass,
        format!(
            "golden mean error {golden_err:.1e} (tol 1e-9); max |(1/14) log count - h| = {worst_gap:.4} at tuple {worst_case:?} (tol 0.08); enumeration/automaton mismatches {count_mismatch}"
        ),
    )
}

// 6. Convexity of the pressure and partial sums above the limit.
fn criterion_6(c: &Corpus2, mixed: &[MatTuple]) -> Outcome {
    let start = Instant::now();
    let mut min_defect = f64::INFINITY;
    let mut tested = 0;
    for m in c.cases.iter().map(|x| &x.m).chain(mixed) {
        if let Ok(p) = ule::pressure_report(m, &cfg()) {
            tested += 1;
            min_defect = min_defect.min(p.defect);
        }
    }
    let mut worst = f64::INFINITY;
    for case in &c.cases {
        for q in [2u32, 4, 6] {
            let p = ule::pressure_even(&case.m, q, 20_000, 1e-12).unwrap();
            for n in 1..=12 {
                let e = ule::pressure_estimate(&case.m, q as f64, n, 1 << 24).unwrap();
                worst = worst.min(e - p);
            }
        }
    }
    let pass = min_defect >= -1e-8 && worst >= -1e-8;
    outcome(
        pass,
        format!(
            "min defect {min_defect:.2e} over {tested} tuples incl. mixed signs (tol -1e-8); min estimate - pressure over n ≤ 12, q ∈ {{2,4,6}}: {worst:.2e} (tol -1e-8); {:.2} s",
            start.elapsed().as_secs_f64()
        ),
    )
}

/// Number of admissible words of the shift with label word `labels`.
fn fiber_count(adj: &[Vec<bool>], tau: &[usize], labels: &[usize]) -> u64 {
    let n = adj.len();
    let mut counts: Vec<u64> = (0..n).map(|s| u64::from(tau[s] == labels[0])).collect();
    for &l in &labels[1..] {
        counts = (0..n)
            .map(|t| if tau[t] == l { (0..n).filter(|&s| adj[s][t]).map(|s| counts[s]).sum() } else { 0 })
            .collect();
    }
    counts.iter().sum()
}

// 7. Carpets.
fn criterion_7() -> Outcome {
    let start = Instant::now();
    let full = |n: usize| vec![vec![true; n]; n];
    let mcmullen = CarpetInput { adjacency: full(6), tau: (0..6).map(|s| s % 2).collect(), m: None };
    let skewed = CarpetInput { adjacency: full(3), tau: vec![0, 0, 1], m: None };
    let r1 = carpet::carpet_check(&mcmullen, &cfg(), 8).unwrap();
    let r2 = carpet::carpet_check(&skewed, &cfg(), 8).unwrap();
    // Independent sandwich: N(J) by transfer counts, ‖E_J‖ from the tuple.
    let mut sandwich_ok = true;
    let mut words = 0u64;
    for (input, report) in [(&mcmullen, &r1), (&skewed, &r2)] {
        let n = input.adjacency.len() as f64;
        let k = report.e.k();
        for len in 1..=8u32 {
            for idx in 0..(k as u64).pow(len) {
                let mut x = idx;
                let compact: Vec<usize> = (0..len)
                    .map(|_| {
                        let s = (x % k as u64) as usize;
                        x /= k as u64;
                        s
                    })
                    .collect();
                let labels: Vec<usize> = compact.iter().map(|&s| report.labels[s]).collect();
                let count = fiber_count(&input.adjacency, &input.tau, &labels) as f64;
                let norm = report.e.word_product(&Word::new(compact)).unwrap().norm();
                words += 1;
                if !(count <= norm && norm <= n * n * count) {
                    sandwich_ok = false;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = r1.verdict.decision == Decision::Yes
        && r2.verdict.decision == Decision::No
        && r1.sandwich.holds
        && r2.sandwich.holds
        && sandwich_ok
        && within_budget(elapsed, 10.0);
    outcome(
        pass,
        format!(
            "uniform fibers {}; skewed fibers {}; sandwich (library) {} / {}; independent sandwich over {words} label words: {sandwich_ok}; {:.2} s (budget 10 s)",
            r1.verdict.decision.as_str(),
            r2.verdict.decision.as_str(),
            r1.sandwich.holds,
            r2.sandwich.holds,
            elapsed.as_secs_f64()
        ),
    )
}

fn scalar_family(p: Rat, q: Rat) -> SelfAffineInput {
    SelfAffineInput {
        a: vec![vec![2]],
        digits: vec![vec![0], vec![1]],
        weights: vec![p, q],
        n0: 1,
        tile_digits: vec![vec![0], vec![1]],
        translations: vec![vec![0]],
    }
}

/// 2-adic valuation.
fn v2(m: i64) -> usize {
    m.unsigned_abs().trailing_zeros() as usize
}

// 8. Scalar self-affine family. The mask (1 + e^{-2πiξ})/2 vanishes iff
// ξ ∈ 1/2 + Z, so along m / 2^n the first zero is at n = 1 + v₂(m).
fn criterion_8() -> (Outcome, Outcome) {
    let check = |input: &SelfAffineInput| {
        let t = self_affine::self_affine_build(input).unwrap().to_tuple().unwrap();
        self_affine::self_affine_check(&t, &cfg()).unwrap()
    };
    let lebesgue = scalar_family(rat(1, 2), rat(1, 2));
    let biased = scalar_family(rat(1, 3), rat(2, 3));
    let v1 = check(&lebesgue);
    let v2_ = check(&biased);
    let f1 = self_affine::fourier_diagnostic(&lebesgue, 20, 50, 1e-10).unwrap();
    let f2 = self_affine::fourier_diagnostic(&biased, 1, 50, 1e-10).unwrap();
    let derived_ok = f1.first_zero.len() == 40 && f1.first_zero.iter().all(|(m, n)| *n == Some(1 + v2(m[0])));
    let at_one = f1.first_zero.iter().filter(|(_, n)| *n == Some(1)).count();
    let m1_clear = f2.first_zero.iter().any(|(m, n)| m == &vec![1] && n.is_none());
    let pass = v1.decision == Decision::Yes && v2_.decision == Decision::No && derived_ok && m1_clear;
    let main = outcome(
        pass,
        format!(
            "p = (1/2,1/2) {}; p = (1/3,2/3) {}; first mask zero at n = 1 + v₂(m) for all 40 m with 0 < |m| ≤ 20: {derived_ok}; m = 1 without zero for n ≤ 50 under (1/3,2/3): {m1_clear}",
            v1.decision.as_str(),
            v2_.decision.as_str()
        ),
    );
    let literal = outcome(
        at_one == f1.first_zero.len(),
        format!(
            "literal wording \"zero at n = 1 for every |m| ≤ 20\": {at_one}/40 m have their first zero at n = 1; even m cannot (mask at m/2 ∈ Z equals 1); informational, not counted"
        ),
    );
    (main, literal)
}

// 9. Self-similar suite on the elementary tuple, h = log 2.
fn criterion_9() -> Outcome {
    let m = MatTuple::elementary_2x2();
    let half = self_similar_check(&SelfSimilarInput { m: m.clone(), rho: 0.5 }, &cfg()).unwrap();
    let third = self_similar_check(&SelfSimilarInput { m, rho: 1.0 / 3.0 }, &cfg()).unwrap();
    let s3 = 2f64.ln() / 3f64.ln();
    let pass = half.verdict_hs.decision == Decision::Yes
        && half.verdict_leb == Decision::Yes
        && (half.s - 1.0).abs() <= 1e-9
        && third.verdict_hs.decision == Decision::Yes
        && third.verdict_leb == Decision::No
        && (third.s - s3).abs() <= 1e-9;
    outcome(
        pass,
        format!(
            "ρ = 1/2: Hs {}, Leb {}, |s - 1| = {:.1e}; ρ = 1/3: Hs {}, Leb {}, |s - log 2/log 3| = {:.1e} (tol 1e-9)",
            half.verdict_hs.decision.as_str(),
            half.verdict_leb.as_str(),
            (half.s - 1.0).abs(),
            third.verdict_hs.decision.as_str(),
            third.verdict_leb.as_str(),
            (third.s - s3).abs()
        ),
    )
}

fn decisions_of(v: &Verdicts) -> [Decision; 3] {
    [v.a.decision, v.fast.decision, v.b.decision]
}

fn lambdas_of(v: &Verdicts) -> [Option<f64>; 3] {
    [v.a.lambda, v.fast.lambda, v.b.lambda]
}

// 10. Scaling and permutation invariance over the corpus.
fn criterion_10(c: &Corpus2) -> Outcome {
    let start = Instant::now();
    let mut changed = 0;
    let mut worst_shift = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x10);
    for (case, base) in c.cases.iter().zip(&c.decisions) {
        for s in [1.0 / 3.0, 2.0, 7.0] {
            let v = verdicts(&case.m.scaled(s));
            if decisions_of(&v) != decisions_of(base) {
                changed += 1;
            }
            for (l0, l1) in lambdas_of(base).into_iter().zip(lambdas_of(&v)) {
                if let (Some(l0), Some(l1)) = (l0, l1) {
                    worst_shift = worst_shift.max((l1 - l0 - s.ln()).abs());
                }
            }
        }
        let d = case.m.dim();
        let mut order: Vec<usize> = (0..d).collect();
        for i in (1..d).rev() {
            order.swap(i, rng.gen_range(0..=i));
        }
        if decisions_of(&verdicts(&case.m.permuted(&order))) != decisions_of(base) {
            changed += 1;
        }
    }
    let pass = changed == 0 && worst_shift <= 1e-8;
    outcome(
        pass,
        format!(
            "decision changes {changed} over {} tuples × (3 scalings + 1 permutation); max |Δλ - log c| = {worst_shift:.1e} (tol 1e-8); {:.2} s",
            c.cases.len(),
            start.elapsed().as_secs_f64()
        ),
    )
}

fn example(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("../../docs/examples");
    p.push(name);
    p.to_string_lossy().into_owned()
}

/// Report bytes with the `"timing": {...}` member cut out.
fn strip_timing(bytes: &[u8]) -> Vec<u8> {
    let text = String::from_utf8(bytes.to_vec()).unwrap();
    let Some(start) = text.find("\"timing\"") else {
        return bytes.to_vec();
    };
    let close = start + text[start..].find('}').unwrap() + 1;
    let mut out = text[..start].to_string();
    out.push_str(&text[close..]);
    out.into_bytes()
}

// 11. Byte-identical CLI reports across runs and worker counts.
fn criterion_11() -> Outcome {
    let runs: [&[&str]; 8] = [
        &["check", "--method", "all"],
        &["entropy", "-n", "12"],
        &["pressure", "-n", "10"],
        &["profile", "-n", "12"],
        &["carpet"],
        &["self-affine"],
        &["self-similar"],
        &["check", "--mode", "rational"],
    ];
    let files = [
        "elementary.json",
        "rotation.json",
        "elementary.json",
        "scalar.json",
        "mcmullen.json",
        "lebesgue.json",
        "self_similar.json",
        "scalar.json",
    ];
    let mut compared = 0;
    let mut mismatches = Vec::new();
    for (args, file) in runs.iter().zip(files) {
        let mut outputs = Vec::new();
        for threads in ["1", "4", "1", "4"] {
            let out = Command::new(env!("CARGO_BIN_EXE_ule"))
                .args(*args)
                .arg(example(file))
                .env("ULE_THREADS", threads)
                .output()
                .unwrap();
            outputs.push(strip_timing(&out.stdout));
        }
        compared += outputs.len();
        if outputs.iter().any(|o| o != &outputs[0] || o.is_empty()) {
            mismatches.push(format!("{} {file}", args[0]));
        }
    }
    outcome(
        mismatches.is_empty(),
        format!("{compared} reports from {} commands under ULE_THREADS ∈ {{1, 4}}; mismatches {mismatches:?}", runs.len()),
    )
}

fn main() {
    let mut failed = 0;
    let mut print = |id: &str, o: Outcome, counted: bool| {
        let status = if o.pass { "PASS" } else { "FAIL" };
        println!("acceptance {id:<10} {status}  {}", o.detail);
        if counted && !o.pass {
            failed += 1;
        }
    };

    print("1", criterion_1(), true);

    let start = Instant::now();
    let cases = corpus();
    let decisions: Vec<Verdicts> = cases.iter().map(|c| verdicts(&c.m)).collect();
    let c2 = Corpus2 { cases, decisions };
    print("2", criterion_2(&c2, start.elapsed()), true);
    print("3", criterion_3(&c2), true);
    print("4", criterion_4(), true);
    print("5", criterion_5(&c2), true);
    print("6", criterion_6(&c2, &mixed_sign_corpus()), true);
    print("7", criterion_7(), true);
    let (eight, literal) = criterion_8();
    print("8", eight, true);
    print("8-literal", literal, false);
    print("9", criterion_9(), true);
    print("10", criterion_10(&c2), true);
    print("11", criterion_11(), true);

    if failed > 0 {
        println!("acceptance: {failed} criteria failed");
        std::process::exit(1);
    }
    println!("acceptance: all criteria passed");
}
