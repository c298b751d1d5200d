//! Subcommand implementations.

use std::fmt::Write as _;

use serde_json::{json, Value};
use ule_core::apps::carpet::{self, CarpetInput};
use ule_core::apps::self_affine::{self, SelfAffineInput};
use ule_core::apps::self_similar::{self, SelfSimilarInput};
use ule_core::graph;
use ule_core::rational::{self, RatMat, RatTuple};
use ule_core::symdyn::{self, Entropy, SupportAutomaton};
use ule_core::ule::{self, Criterion};
use ule_core::{Decision, Error, Mat, MatTuple, UleVerdict};

use crate::input::{Document, Method, Mode, Payload, RatMatrix};
use crate::report::{self, num, opt};
use crate::threads::Threaded;
use crate::{decision_exit, Command, Failure, Outcome, Settings, EXIT_INTERNAL};

pub fn dispatch(cmd: &Command, doc: &Document, s: &Settings, exec: &Threaded) -> Result<Outcome, Failure> {
    match cmd {
        Command::Check { .. } => check(doc, s, exec),
        Command::Entropy { n, .. } => entropy(doc, s, *n),
        Command::Pressure { sweep, n, .. } => pressure(doc, s, exec, sweep.as_deref(), *n),
        Command::Profile { n, .. } => profile(doc, s, exec, *n),
        Command::Carpet { fiber_len, .. } => carpet_cmd(doc, s, *fiber_len),
        Command::SelfAffine {
            box_radius,
            n_max,
            zero_tol,
            ..
        } => self_affine_cmd(doc, s, *box_radius, *n_max, *zero_tol),
        Command::SelfSimilar { .. } => self_similar_cmd(doc, s),
    }
}

fn rat_tuple_of(mats: &[RatMatrix]) -> Result<RatTuple, Failure> {
    let ms = mats
        .iter()
        .map(|m| RatMat::from_rows(m.clone()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RatTuple::new(ms)?)
}

fn float_tuple_of(mats: &[RatMatrix]) -> Result<MatTuple, Failure> {
    let ms = mats
        .iter()
        .map(|m| {
            let rows: Vec<Vec<f64>> = m.iter().map(|r| r.iter().map(rational::to_f64).collect()).collect();
            Mat::from_rows(&rows)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(MatTuple::new(ms)?)
}

fn carpet_input(adjacency: &[Vec<bool>], tau: &[usize], m: Option<usize>) -> CarpetInput {
    CarpetInput {
        adjacency: adjacency.to_vec(),
        tau: tau.iter().map(|l| l - 1).collect(),
        m,
    }
}

fn self_affine_input(p: &Payload) -> Option<SelfAffineInput> {
    match p {
        Payload::SelfAffine {
            a,
            digits,
            weights,
            n0,
            tile_digits,
            translations,
        } => Some(SelfAffineInput {
            a: a.clone(),
            digits: digits.clone(),
            weights: weights.clone(),
            n0: *n0,
            tile_digits: tile_digits.clone(),
            translations: translations.clone(),
        }),
        _ => None,
    }
}

/// The matrix tuple a document describes, exactly when available.
fn tuple_of(doc: &Document) -> Result<(MatTuple, Option<RatTuple>), Failure> {
    match &doc.payload {
        Payload::Tuple { matrices } | Payload::SelfSimilar { matrices, .. } => {
            Ok((float_tuple_of(matrices)?, Some(rat_tuple_of(matrices)?)))
        }
        Payload::Carpet { adjacency, tau, m } => {
            let (e, _, _) = carpet::build_e(&carpet_input(adjacency, tau, *m))?;
            let exact = RatTuple::from_tuple(&e);
            Ok((e, Some(exact)))
        }
        Payload::SelfAffine { .. } => {
            let input = self_affine_input(&doc.payload).expect("self-affine payload");
            let exact = self_affine::self_affine_build(&input)?;
            Ok((exact.to_tuple()?, Some(exact)))
        }
    }
}

fn verdict_line(v: &UleVerdict) -> String {
    let mut line = format!("  {:<7} {}", v.criterion.as_str(), v.decision);
    if let Some(l) = v.lambda {
        let _ = write!(line, "  lambda = {l:.10}");
    }
    if let Some(r) = &v.r_exact {
        let _ = write!(line, "  r = {r}");
    } else if let Some(r) = v.r_value {
        let _ = write!(line, "  r = {r:.10}");
    }
    if let Some(p) = &v.pressure {
        let _ = write!(line, "  defect = {:.3e}", p.defect);
    } else if let Some(res) = v.deciding_residual() {
        let _ = write!(line, "  residual = {res:.3e}");
    }
    line.push('\n');
    line
}

/// Combined decision of several verdicts: disagreement between decided
/// verdicts is an internal inconsistency.
fn combine(verdicts: &[UleVerdict]) -> (Option<Decision>, i32) {
    let yes = verdicts.iter().any(|v| v.decision == Decision::Yes);
    let no = verdicts.iter().any(|v| v.decision == Decision::No);
    match (yes, no) {
        (true, true) => (None, EXIT_INTERNAL),
        (true, false) => (Some(Decision::Yes), decision_exit(Decision::Yes)),
        (false, true) => (Some(Decision::No), decision_exit(Decision::No)),
        (false, false) => (Some(Decision::Inconclusive), decision_exit(Decision::Inconclusive)),
    }
}

fn check(doc: &Document, s: &Settings, exec: &Threaded) -> Result<Outcome, Failure> {
    let (m, exact) = tuple_of(doc)?;
    let cfg = &s.config;
    let nonneg = m.is_nonnegative();
    let pi = nonneg && graph::is_positively_irreducible(&m)?;
    let mut notes: Vec<String> = Vec::new();
    let mut verdicts = Vec::new();
    let all = s.method == Method::All;
    let want_a = matches!(s.method, Method::A | Method::All);
    let want_fast = matches!(s.method, Method::AFast | Method::All);
    let want_b = matches!(s.method, Method::B | Method::All);
    if all && !pi {
        notes.push("criterion A skipped: it needs a positively irreducible nonnegative tuple".into());
    }
    if want_a && (pi || !all) {
        match ule::criterion_a_with(exec, &m, cfg) {
            Ok(v) => verdicts.push(v),
            Err(e @ Error::Resource { .. }) if all => notes.push(format!("criterion A skipped: {e}")),
            Err(e) => return Err(e.into()),
        }
        if s.mode == Mode::Rational {
            let exact = exact.as_ref().expect("tuples carry exact entries");
            match ule::criterion_a_exact(exact, cfg) {
                Ok(Some(v)) => verdicts.push(v),
                Ok(None) => notes.push("exact criterion A not applicable: r(M) is not recognized as rational".into()),
                Err(e @ Error::Resource { .. }) => notes.push(format!("exact criterion A skipped: {e}")),
                Err(e) => return Err(e.into()),
            }
        }
    }
    if want_fast && (pi || !all) {
        verdicts.push(ule::criterion_a_fast(&m, cfg)?);
    }
    if want_b {
        match ule::criterion_b(&m, cfg) {
            Ok(v) => verdicts.push(v),
            Err(e @ Error::Resource { .. }) if all => notes.push(format!("criterion B skipped: {e}")),
            Err(e) => return Err(e.into()),
        }
    }
    if verdicts.is_empty() {
        return Err(Failure {
            code: crate::EXIT_RESOURCE,
            kind: "resource",
            message: notes.join("; "),
            pointer: None,
        });
    }
    let (decision, exit) = combine(&verdicts);
    if decision.is_none() {
        notes.push("criteria disagree".into());
    }
    let (r, h) = if pi {
        let (log_r, h) = ule::log_r_of(&m, cfg)?;
        (Some(log_r.exp()), Some(h))
    } else {
        (None, None)
    };
    let mut summary = format!("  d = {}, k = {}\n", m.dim(), m.k());
    for v in &verdicts {
        summary.push_str(&verdict_line(v));
    }
    for n in &notes {
        let _ = writeln!(summary, "  note: {n}");
    }
    let result = json!({
        "d": m.dim(),
        "k": m.k(),
        "nonnegative": nonneg,
        "positively_irreducible": pi,
        "r": opt(r),
        "entropy": opt(h),
        "verdicts": verdicts.iter().map(report::verdict).collect::<Vec<_>>(),
        "agreement": decision.is_some(),
        "notes": notes,
    });
    Ok(Outcome {
        result,
        decision,
        exit,
        summary,
        csv: None,
    })
}

fn entropy(doc: &Document, s: &Settings, n_max: usize) -> Result<Outcome, Failure> {
    let (m, _) = tuple_of(doc)?;
    let cfg = &s.config;
    let inner = cfg.tol * 1e-3;
    let mut summary = String::new();
    let mut obj = serde_json::Map::new();
    let mut counts = Vec::new();
    if m.is_nonnegative() {
        let aut = SupportAutomaton::build_capped(&m, cfg.max_states)?;
        let h = symdyn::sofic_entropy(&aut, inner)?;
        obj.insert("automaton_states".into(), json!(aut.n_states()));
        obj.insert("entropy".into(), opt(h.value()));
        obj.insert("empty".into(), json!(h == Entropy::Empty));
        let _ = writeln!(summary, "  automaton states = {}", aut.n_states());
        match h {
            Entropy::Finite(h) => {
                let _ = writeln!(summary, "  h_top = {h:.12}");
            }
            Entropy::Empty => summary.push_str("  h_top: empty language\n"),
        }
        for n in 1..=n_max {
            counts.push((n, symdyn::language_count_automaton(&aut, n)?));
        }
    } else {
        obj.insert("entropy".into(), Value::Null);
        summary.push_str("  mixed signs: counts by exact enumeration\n");
        for n in 1..=n_max {
            counts.push((n, symdyn::language_count_enum(&m, n, cfg.max_words)?));
        }
    }
    obj.insert(
        "language_counts".into(),
        Value::Array(
            counts
                .iter()
                .map(|&(n, c)| {
                    let rate = if c > 0 { (c as f64).ln() / n as f64 } else { f64::NEG_INFINITY };
                    json!({ "n": n, "count": c.to_string(), "rate": num(rate) })
                })
                .collect(),
        ),
    );
    if let Payload::Carpet { adjacency, .. } = &doc.payload {
        let h = symdyn::sft_entropy(adjacency, inner)?;
        obj.insert("sft_entropy".into(), opt(h.value()));
        if graph::is_irreducible_support(adjacency) {
            let chain = symdyn::parry_chain(adjacency, inner)?;
            obj.insert(
                "parry".into(),
                json!({ "p": report::mat(&chain.p), "pi": chain.pi.iter().map(|&x| num(x)).collect::<Vec<_>>(), "entropy": num(chain.entropy()) }),
            );
        }
        if let Some(h) = h.value() {
            let _ = writeln!(summary, "  h_top(Sigma_A) = {h:.12}");
        }
    }
    Ok(Outcome {
        result: Value::Object(obj),
        decision: None,
        exit: 0,
        summary,
        csv: None,
    })
}

fn parse_sweep(arg: &str) -> Result<Vec<f64>, Failure> {
    let bad = || Failure::usage(format!("--sweep expects Q_START:Q_END:Q_STEP, got {arg:?}"));
    let parts: Vec<f64> = arg.split(':').map(|p| p.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|_| bad())?;
    let [a, b, step] = parts[..] else {
        return Err(bad());
    };
    if !(a.is_finite() && b.is_finite() && step.is_finite() && step > 0.0 && a > 0.0 && b >= a) {
        return Err(bad());
    }
    let count = ((b - a) / step + 1e-9).floor() as usize + 1;
    if count > 100_000 {
        return Err(Failure::usage("--sweep has too many points"));
    }
    Ok((0..count).map(|i| a + i as f64 * step).collect())
}

fn even_integer(q: f64) -> Option<u32> {
    let r = q.round();
    ((q - r).abs() < 1e-12 && r >= 2.0 && (r as u32).is_multiple_of(2)).then_some(r as u32)
}

fn pressure(doc: &Document, s: &Settings, exec: &Threaded, sweep: Option<&str>, n: usize) -> Result<Outcome, Failure> {
    let (m, _) = tuple_of(doc)?;
    let cfg = &s.config;
    if n == 0 {
        return Err(Failure::usage("-n must be positive"));
    }
    if let Some(arg) = sweep {
        let qs = parse_sweep(arg)?;
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Failure {
            code: crate::EXIT_IO,
            kind: "io",
            message: e.to_string(),
            pointer: None,
        };
        w.write_record(["q", "estimate_n", "pressure_even_if_available"]).map_err(io)?;
        let mut summary = String::new();
        for &q in &qs {
            let est = ule::pressure_estimate_with(exec, &m, q, n, cfg.max_words)?;
            let exact = match even_integer(q) {
                Some(qi) => match ule::pressure_even(&m, qi, cfg.kron_cap, cfg.tol * 1e-3) {
                    Ok(p) => Some(p),
                    Err(Error::Resource { .. } | Error::Degenerate(_)) => None,
                    Err(e) => return Err(e.into()),
                },
                None => None,
            };
            w.write_record([q.to_string(), est.to_string(), exact.map(|p| p.to_string()).unwrap_or_default()])
                .map_err(io)?;
            let _ = writeln!(summary, "  q = {q}: estimate {est:.10}");
        }
        let bytes = w.into_inner().map_err(|e| Failure {
            code: crate::EXIT_IO,
            kind: "io",
            message: e.to_string(),
            pointer: None,
        })?;
        return Ok(Outcome {
            result: Value::Null,
            decision: None,
            exit: 0,
            summary,
            csv: Some(String::from_utf8(bytes).expect("csv output is UTF-8")),
        });
    }
    let mut summary = String::new();
    let report = match ule::pressure_report(&m, cfg) {
        Ok(p) => {
            let _ = writeln!(summary, "  P(2) = {:.12}\n  P(4) = {:.12}\n  P(6) = {:.12}\n  defect = {:.3e}", p.p2, p.p4, p.p6, p.defect);
            report::pressure(&p)
        }
        Err(e @ (Error::Resource { .. } | Error::Degenerate(_))) => {
            let _ = writeln!(summary, "  pressures unavailable: {e}");
            Value::Null
        }
        Err(e) => return Err(e.into()),
    };
    let mut estimates = Vec::new();
    for q in [2.0, 4.0, 6.0] {
        let est = ule::pressure_estimate_with(exec, &m, q, n, cfg.max_words)?;
        estimates.push(json!({ "q": q, "n": n, "estimate": num(est) }));
    }
    Ok(Outcome {
        result: json!({ "pressure": report, "estimates": estimates }),
        decision: None,
        exit: 0,
        summary,
        csv: None,
    })
}

fn profile(doc: &Document, s: &Settings, exec: &Threaded, n: usize) -> Result<Outcome, Failure> {
    let (m, _) = tuple_of(doc)?;
    let cfg = &s.config;
    let rows = ule::norm_profile_with(exec, &m, n, cfg.max_words)?;
    let lambda = if m.is_nonnegative() && graph::is_positively_irreducible(&m)? {
        Some(ule::log_r_of(&m, cfg)?.0)
    } else {
        None
    };
    let ratio = lambda.map(|l| ule::empirical_constant(&rows, l));
    let mut summary = String::new();
    for r in &rows {
        match r.range {
            Some((lo, hi)) => {
                let _ = writeln!(summary, "  n = {:>2}: min {lo:.6e}  max {hi:.6e}", r.n);
            }
            None => {
                let _ = writeln!(summary, "  n = {:>2}: all products vanish", r.n);
            }
        }
    }
    if let Some(c) = ratio {
        let _ = writeln!(summary, "  normalized max/min ratio = {c:.6}");
    }
    Ok(Outcome {
        result: json!({ "rows": report::profile(&rows), "log_r": opt(lambda), "ratio": opt(ratio) }),
        decision: None,
        exit: 0,
        summary,
        csv: None,
    })
}

fn wrong_kind(cmd: &str, want: &str, doc: &Document) -> Failure {
    Failure {
        code: crate::EXIT_USAGE,
        kind: "schema",
        message: format!("{cmd} needs a {want:?} document, got {:?}", doc.payload.kind()),
        pointer: Some("/kind".into()),
    }
}

fn carpet_cmd(doc: &Document, s: &Settings, fiber_len: usize) -> Result<Outcome, Failure> {
    let Payload::Carpet { adjacency, tau, m } = &doc.payload else {
        return Err(wrong_kind("carpet", "carpet", doc));
    };
    let input = carpet_input(adjacency, tau, *m);
    let r = carpet::carpet_check(&input, &s.config, fiber_len)?;
    let mut summary = String::new();
    for w in &r.warnings {
        let _ = writeln!(summary, "  warning: {w}");
    }
    summary.push_str(&verdict_line(&r.verdict));
    if let Some(b) = &r.cross_check {
        summary.push_str(&verdict_line(b));
    }
    let _ = writeln!(
        summary,
        "  log alpha = {:.12}\n  log beta = {:.12}\n  sandwich up to length {}: {}\n  {}",
        r.log_alpha,
        r.log_beta,
        r.sandwich.max_len,
        if r.sandwich.holds { "holds" } else { "VIOLATED" },
        r.conclusion()
    );
    let mut verdicts = vec![r.verdict.clone()];
    verdicts.extend(r.cross_check.clone().filter(|v| v.criterion == Criterion::B));
    let (decision, mut exit) = combine(&verdicts);
    let decision = decision.map(|_| r.verdict.decision);
    if decision.is_some() {
        exit = decision_exit(r.verdict.decision);
    }
    if !r.sandwich.holds {
        exit = EXIT_INTERNAL;
    }
    Ok(Outcome {
        result: report::carpet(&r),
        decision,
        exit,
        summary,
        csv: None,
    })
}

fn self_affine_cmd(doc: &Document, s: &Settings, box_radius: i64, n_max: usize, zero_tol: f64) -> Result<Outcome, Failure> {
    let Some(input) = self_affine_input(&doc.payload) else {
        return Err(wrong_kind("self-affine", "self_affine", doc));
    };
    if box_radius < 0 {
        return Err(Failure::usage("--box-radius must be nonnegative"));
    }
    let exact = self_affine::self_affine_build(&input)?;
    let m = exact.to_tuple()?;
    let v = self_affine::self_affine_check(&m, &s.config)?;
    let mut exact_verdict = None;
    if s.mode == Mode::Rational {
        exact_verdict = ule::criterion_a_exact(&exact, &s.config).ok().flatten();
    }
    let fourier = self_affine::fourier_diagnostic(&input, box_radius, n_max, zero_tol)?;
    let mut summary = format!("  {} matrices of size {}\n", m.k(), m.dim());
    let _ = writeln!(summary, "  absolutely continuous: {} ({})", v.decision, v.reason);
    summary.push_str(&verdict_line(&v.criterion));
    if let Some(e) = &exact_verdict {
        summary.push_str(&verdict_line(e));
    }
    let _ = writeln!(
        summary,
        "  Fourier scan ({}): {} of {} points without a mask zero",
        ule_core::apps::self_affine::FourierReport::LABEL,
        fourier.without_zero.len(),
        fourier.first_zero.len()
    );
    Ok(Outcome {
        result: json!({
            "matrices": report::rat_tuple(&exact),
            "verdict": report::self_affine(&v),
            "exact": exact_verdict.as_ref().map(report::verdict),
            "fourier": report::fourier(&fourier),
        }),
        decision: Some(v.decision),
        exit: decision_exit(v.decision),
        summary,
        csv: None,
    })
}

fn self_similar_cmd(doc: &Document, s: &Settings) -> Result<Outcome, Failure> {
    let Payload::SelfSimilar { matrices, rho } = &doc.payload else {
        return Err(wrong_kind("self-similar", "self_similar", doc));
    };
    let m = float_tuple_of(matrices)?;
    let r = self_similar::self_similar_check(
        &SelfSimilarInput {
            m,
            rho: rational::to_f64(rho),
        },
        &s.config,
    )?;
    let mut summary = String::new();
    let _ = writeln!(summary, "  h_top = {:.12}\n  s = {:.12}", r.entropy, r.s);
    summary.push_str(&verdict_line(&r.verdict_hs));
    let _ = writeln!(summary, "  absolutely continuous w.r.t. H^s: {}", r.verdict_hs.decision);
    let _ = writeln!(summary, "  absolutely continuous w.r.t. Lebesgue: {}", r.verdict_leb);
    let _ = writeln!(summary, "  note: {}", self_similar::CAVEAT);
    Ok(Outcome {
        result: report::self_similar(&r),
        decision: Some(r.verdict_hs.decision),
        exit: decision_exit(r.verdict_hs.decision),
        summary,
        csv: None,
    })
}
