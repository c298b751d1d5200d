use std::path::PathBuf;
use std::process::{Command, Output};

use proptest::prelude::*;
use serde_json::Value;
use ule_cli::input::{self, Document, Method, Mode, Options, Payload};
use ule_core::rational::{self, Rat};

fn example(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("../../docs/examples");
    p.push(name);
    p.to_string_lossy().into_owned()
}

fn ule(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ule"))
        .args(args)
        .env_remove("ULE_THREADS")
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

#[test]
fn check_all_on_elementary_tuple() {
    let out = ule(&["check", "--method", "all", &example("elementary.json")]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["decision"], "yes");
    assert!((r["result"]["r"].as_f64().unwrap() - 1.0).abs() < 1e-8);
    let verdicts = r["result"]["verdicts"].as_array().unwrap();
    let names: Vec<&str> = verdicts.iter().map(|v| v["criterion"].as_str().unwrap()).collect();
    assert_eq!(names, ["A", "A-fast", "B"]);
    for v in verdicts {
        assert_eq!(v["decision"], "yes");
        assert!(v["lambda"].as_f64().unwrap().abs() < 1e-8);
    }
    assert!(String::from_utf8_lossy(&out.stderr).contains("decision: yes"));
}

#[test]
fn check_on_scalar_pair_is_no_with_residuals() {
    let out = ule(&["check", &example("scalar.json")]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert_eq!(r["decision"], "no");
    let verdicts = r["result"]["verdicts"].as_array().unwrap();
    let a = verdicts.iter().find(|v| v["criterion"] == "A").unwrap();
    let res = a["residuals"].as_array().unwrap();
    assert!(!res.is_empty());
    assert!((res[0]["max_residual"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-9);
    let exact = verdicts.iter().find(|v| v["criterion"] == "A-exact").unwrap();
    assert_eq!(exact["r_exact"], "3/2");
}

#[test]
fn single_methods() {
    for (m, code) in [("A", 0), ("A-fast", 0), ("B", 0)] {
        let out = ule(&["check", "--method", m, &example("elementary.json")]);
        assert_eq!(out.status.code(), Some(code), "{m}");
        assert_eq!(report(&out)["result"]["verdicts"].as_array().unwrap().len(), 1);
    }
    // Criterion A is not defined for mixed signs.
    let out = ule(&["check", "--method", "A", &example("rotation.json")]);
    assert_eq!(out.status.code(), Some(65));
    let out = ule(&["check", &example("rotation.json")]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn pressure_sweep_csv() {
    let out = ule(&["pressure", "--sweep", "0.5:6:0.5", "-n", "10", &example("elementary.json")]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(rdr.headers().unwrap(), vec!["q", "estimate_n", "pressure_even_if_available"]);
    let rows: Vec<(f64, f64, Option<f64>)> = rdr
        .records()
        .map(|r| {
            let r = r.unwrap();
            (r[0].parse().unwrap(), r[1].parse().unwrap(), r[2].parse().ok())
        })
        .collect();
    assert_eq!(rows.len(), 12);
    // Convexity of the partial-sum estimates in q.
    for w in rows.windows(3) {
        assert!(w[0].1 + w[2].1 - 2.0 * w[1].1 >= -1e-12);
    }
    for &(q, est, p) in &rows {
        let even = (q - q.round()).abs() < 1e-12 && (q as u32).is_multiple_of(2);
        assert_eq!(p.is_some(), even, "q = {q}");
        if let Some(p) = p {
            assert!(est >= p - 1e-8);
        }
    }
    // Elementary products have unit norm: the estimate is (1/n) log #words.
    assert!((rows[3].1 - (2f64.ln() + 2f64.ln() / 10.0)).abs() < 1e-12);
}

#[test]
fn apps_commands() {
    let out = ule(&["carpet", &example("mcmullen.json")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["result"]["sandwich"]["holds"], true);
    let out = ule(&["carpet", &example("skewed_carpet.json")]);
    assert_eq!(out.status.code(), Some(1));

    let out = ule(&["self-affine", &example("lebesgue.json")]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["fourier"]["without_zero"].as_array().unwrap().len(), 0);
    assert_eq!(r["result"]["matrices"], serde_json::json!([[["1/2"]], [["1/2"]]]));
    let out = ule(&["self-affine", "--n-max", "30", &example("biased.json")]);
    assert_eq!(out.status.code(), Some(1));

    let out = ule(&["self-similar", &example("self_similar.json")]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["verdict_leb"], "no");
    assert!((r["result"]["s"].as_f64().unwrap() - 2f64.ln() / 3f64.ln()).abs() < 1e-9);
}

#[test]
fn entropy_and_profile() {
    let out = ule(&["entropy", "-n", "3", &example("elementary.json")]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["automaton_states"], 4);
    assert_eq!(r["result"]["language_counts"][2]["count"], "16");
    let out = ule(&["profile", "-n", "4", &example("scalar.json")]);
    let r = report(&out);
    assert_eq!(r["result"]["rows"][3]["min"], 1.0);
    assert_eq!(r["result"]["rows"][3]["max"], 16.0);
}

#[test]
fn error_exit_codes() {
    let out = ule(&["check", "/nonexistent/input.json"]);
    assert_eq!(out.status.code(), Some(66));
    let out = ule(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(64));
    let out = ule(&["check", "--method", "C", &example("elementary.json")]);
    assert_eq!(out.status.code(), Some(64));

    let dir = std::env::temp_dir().join(format!("ule-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, r#"{"kind":"tuple","matrices":[[[1,0],[0,1]],[[1]]]}"#).unwrap();
    let out = ule(&["check", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(64));
    assert_eq!(report(&out)["error"]["pointer"], "/matrices/1");

    let reducible = dir.join("reducible.json");
    std::fs::write(&reducible, r#"{"kind":"tuple","matrices":[[[1,1],[0,1]]]}"#).unwrap();
    let out = ule(&["check", "--method", "A", reducible.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(65));

    let inconsistent = dir.join("inconsistent.json");
    std::fs::write(
        &inconsistent,
        r#"{"kind":"self_affine","a":[[2]],"digits":[[0],[1]],"weights":["1/2","1/2"],"n0":1,"tile_digits":[[0],[1]],"translations":[[0],[5]]}"#,
    )
    .unwrap();
    let out = ule(&["self-affine", inconsistent.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(65));

    let out = ule(&["--max-words", "3", "check", "--method", "A", &example("elementary.json")]);
    assert_eq!(out.status.code(), Some(69));

    let wrong = ule(&["carpet", &example("elementary.json")]);
    assert_eq!(wrong.status.code(), Some(64));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn out_file_and_text_format() {
    let dir = std::env::temp_dir().join(format!("ule-cli-out-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let out = ule(&["--out", path.to_str().unwrap(), "check", &example("elementary.json")]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(r["decision"], "yes");
    let out = ule(&["--format", "text", "check", &example("elementary.json")]);
    assert!(String::from_utf8(out.stdout).unwrap().contains("decision: yes"));
    std::fs::remove_dir_all(&dir).unwrap();
}

fn strip_timing(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timing");
    v
}

#[test]
fn reports_are_deterministic() {
    let a = ule(&["check", &example("elementary.json")]);
    let b = ule(&["check", &example("elementary.json")]);
    assert_eq!(strip_timing(report(&a)), strip_timing(report(&b)));
    let sha = report(&a)["input"]["sha256"].as_str().unwrap().to_string();
    assert_eq!(sha.len(), 64);
}

#[test]
fn exit_code_matches_decision_field() {
    for name in ["elementary.json", "scalar.json", "rotation.json"] {
        let out = ule(&["check", &example(name)]);
        let r = report(&out);
        let want = match r["decision"].as_str().unwrap() {
            "yes" => 0,
            "no" => 1,
            _ => 2,
        };
        assert_eq!(out.status.code(), Some(want), "{name}");
        assert_eq!(r["exit_code"], want);
    }
}

fn rat_strategy() -> impl Strategy<Value = Rat> {
    (-50i64..50, 1i64..20).prop_map(|(p, q)| rational::parse_rat(&format!("{p}/{q}")).unwrap())
}

fn matrices_strategy() -> impl Strategy<Value = Vec<Vec<Vec<Rat>>>> {
    (1usize..=3, 1usize..=3)
        .prop_flat_map(|(d, k)| prop::collection::vec(prop::collection::vec(prop::collection::vec(rat_strategy(), d), d), k))
        .prop_filter("some matrix is nonzero", |ms| ms.iter().flatten().flatten().any(|x| *x != Rat::from_integer(0.into())))
}

fn options_strategy() -> impl Strategy<Value = Options> {
    (
        prop::option::of(prop::sample::select(vec![1e-6, 1e-8, 1e-10])),
        prop::option::of(1u64..1 << 30),
        prop::option::of(1usize..100_000),
        prop::option::of(prop::sample::select(vec![Method::A, Method::AFast, Method::B, Method::All])),
        prop::option::of(prop::sample::select(vec![Mode::Float, Mode::Rational])),
    )
        .prop_map(|(tol, max_words, kron_cap, method, mode)| Options {
            tol,
            max_words,
            kron_cap,
            method,
            mode,
        })
}

fn payload_strategy() -> impl Strategy<Value = Payload> {
    let tuple = matrices_strategy().prop_map(|matrices| Payload::Tuple { matrices });
    let similar = (matrices_strategy(), 1i64..9).prop_map(|(matrices, q)| Payload::SelfSimilar {
        matrices,
        rho: rational::parse_rat(&format!("1/{}", q + 1)).unwrap(),
    });
    let carpet = (1usize..=4).prop_flat_map(|n| {
        (
            prop::collection::vec(prop::collection::vec(any::<bool>(), n), n),
            prop::collection::vec(1usize..=3, n),
            prop::option::of(3usize..5),
        )
            .prop_map(|(adjacency, tau, m)| Payload::Carpet { adjacency, tau, m })
    });
    let affine = (1usize..=2).prop_flat_map(|d| {
        let vecs = move |len: std::ops::Range<usize>| prop::collection::vec(prop::collection::vec(-5i64..5, d), len);
        (
            prop::collection::vec(prop::collection::vec(-4i64..4, d), d),
            vecs(1..4),
            1u32..3,
            vecs(1..5),
            vecs(1..4),
        )
            .prop_flat_map(|(a, digits, n0, tile_digits, translations)| {
                let m = digits.len();
                prop::collection::vec(rat_strategy(), m).prop_map(move |weights| Payload::SelfAffine {
                    a: a.clone(),
                    digits: digits.clone(),
                    weights,
                    n0,
                    tile_digits: tile_digits.clone(),
                    translations: translations.clone(),
                })
            })
    });
    prop_oneof![tuple, similar, carpet, affine]
}

proptest! {
    #[test]
    fn parse_serialize_round_trip(payload in payload_strategy(), options in options_strategy()) {
        let doc = Document { payload, options };
        let text = input::to_string(&doc);
        let parsed = input::parse_document(&text).unwrap();
        prop_assert_eq!(&parsed, &doc);
        let again = input::parse_document(&input::to_string(&parsed)).unwrap();
        prop_assert_eq!(again, parsed);
    }
}

#[test]
fn carpet_with_unused_label_warns() {
    let dir = std::env::temp_dir().join(format!("ule-cli-carpet-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("gap.json");
    std::fs::write(&path, r#"{"kind":"carpet","m":3,"adjacency":[[1,1],[1,1]],"tau":[1,3]}"#).unwrap();
    let out = ule(&["carpet", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["labels"], serde_json::json!([1, 3]));
    assert!(r["result"]["warnings"][0].as_str().unwrap().contains("[2]"));
    std::fs::remove_dir_all(&dir).unwrap();
}
