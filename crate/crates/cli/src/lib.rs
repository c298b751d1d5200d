//! Command-line front end: parses input documents, runs the requested
//! checks and writes a JSON (or text) report.
//!
//! Exit codes: 0 yes, 1 no, 2 inconclusive, 64 usage or schema error,
//! 65 input data violating a hypothesis, 66 missing input, 69 resource cap,
//! 70 internal inconsistency or disagreeing criteria, 74 I/O failure.

pub mod commands;
pub mod input;
pub mod report;
pub mod threads;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};
use ule_core::ule::Config;
use ule_core::{Decision, Error};

use crate::input::{Method, Mode};

pub const EXIT_YES: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;
pub const EXIT_NO_INPUT: i32 = 66;
pub const EXIT_RESOURCE: i32 = 69;
pub const EXIT_INTERNAL: i32 = 70;
pub const EXIT_IO: i32 = 74;

pub fn decision_exit(d: Decision) -> i32 {
    match d {
        Decision::Yes => EXIT_YES,
        Decision::No => EXIT_NO,
        Decision::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

#[derive(Debug, Parser)]
#[command(name = "ule", version, about = "Decide whether a matrix tuple has a uniform Lyapunov exponent modulo 0")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Global {
    /// Relative tolerance; residuals in (tol, 10 tol] are inconclusive [default: 1e-8]
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Cap on visited nodes of word enumerations [default: 16777216]
    #[arg(long, global = true)]
    pub max_words: Option<u64>,
    /// Cap on the dimension of tensor-power matrices [default: 20000]
    #[arg(long, global = true)]
    pub kron_cap: Option<usize>,
    /// Arithmetic for exact checks
    #[arg(long, global = true, value_enum)]
    pub mode: Option<ModeArg>,
    /// Primary output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the primary output to a file instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Float,
    Rational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    #[value(name = "A")]
    A,
    #[value(name = "A-fast")]
    AFast,
    #[value(name = "B")]
    B,
    #[value(name = "all")]
    All,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run criterion A, its fast path, and/or criterion B on a tuple
    Check {
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
        /// Input document, or `-` for stdin
        input: String,
    },
    /// Topological entropy and language counts
    Entropy {
        /// Longest word length counted
        #[arg(short = 'n', default_value_t = 10)]
        n: usize,
        input: String,
    },
    /// Pressures at q = 2, 4, 6 and partial-sum estimates
    Pressure {
        /// Emit a CSV sweep over Q_START:Q_END:Q_STEP
        #[arg(long, value_name = "Q_START:Q_END:Q_STEP")]
        sweep: Option<String>,
        /// Word length of the partial-sum estimates
        #[arg(short = 'n', default_value_t = 10)]
        n: usize,
        input: String,
    },
    /// Per-length minimum and maximum of product norms
    Profile {
        #[arg(short = 'n', default_value_t = 10)]
        n: usize,
        input: String,
    },
    /// Parry-measure projection check for a sofic carpet
    Carpet {
        /// Longest label word in the fiber-count cross-check
        #[arg(long, default_value_t = ule_core::apps::carpet::DEFAULT_FIBER_LEN)]
        fiber_len: usize,
        input: String,
    },
    /// Absolute continuity of an integral self-affine measure
    SelfAffine {
        #[arg(long, default_value_t = ule_core::apps::self_affine::DEFAULT_BOX_RADIUS)]
        box_radius: i64,
        #[arg(long, default_value_t = ule_core::apps::self_affine::DEFAULT_N_MAX)]
        n_max: usize,
        #[arg(long, default_value_t = ule_core::apps::self_affine::DEFAULT_ZERO_TOL)]
        zero_tol: f64,
        input: String,
    },
    /// Hausdorff and Lebesgue absolute continuity of a finite-type self-similar measure
    SelfSimilar { input: String },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Check { .. } => "check",
            Command::Entropy { .. } => "entropy",
            Command::Pressure { .. } => "pressure",
            Command::Profile { .. } => "profile",
            Command::Carpet { .. } => "carpet",
            Command::SelfAffine { .. } => "self-affine",
            Command::SelfSimilar { .. } => "self-similar",
        }
    }

    fn input(&self) -> &str {
        match self {
            Command::Check { input, .. }
            | Command::Entropy { input, .. }
            | Command::Pressure { input, .. }
            | Command::Profile { input, .. }
            | Command::Carpet { input, .. }
            | Command::SelfAffine { input, .. }
            | Command::SelfSimilar { input } => input,
        }
    }
}

/// Failure of a run, with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub kind: &'static str,
    pub message: String,
    pub pointer: Option<String>,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            kind: "usage",
            message: message.into(),
            pointer: None,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (code, kind) = match &e {
            Error::Contract(_) => (EXIT_DATA, "hypothesis"),
            Error::InputData(_) => (EXIT_DATA, "input_data"),
            Error::Degenerate(_) => (EXIT_DATA, "degenerate"),
            Error::Resource { .. } => (EXIT_RESOURCE, "resource"),
            Error::Numeric(_) => (EXIT_INTERNAL, "numeric"),
            Error::Internal(_) => (EXIT_INTERNAL, "internal"),
        };
        Failure {
            code,
            kind,
            message: e.to_string(),
            pointer: None,
        }
    }
}

/// What a command produced.
pub struct Outcome {
    pub result: Value,
    pub decision: Option<Decision>,
    pub exit: i32,
    /// Human-readable lines.
    pub summary: String,
    /// Replaces the JSON report on the primary stream.
    pub csv: Option<String>,
}

/// Settings after merging flags over document options over defaults.
#[derive(Debug, Clone, Copy)]
pub struct Settings {
    pub config: Config,
    pub mode: Mode,
    pub method: Method,
}

fn settings(global: &Global, method: Option<MethodArg>, doc: &input::Options) -> Result<Settings, Failure> {
    let mut config = Config::default();
    if let Some(t) = global.tol.or(doc.tol) {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Failure::usage("--tol must be a positive number"));
        }
        config.tol = t;
    }
    if let Some(w) = global.max_words.or(doc.max_words) {
        config.max_words = w;
    }
    if let Some(c) = global.kron_cap.or(doc.kron_cap) {
        config.kron_cap = c;
    }
    let mode = match global.mode {
        Some(ModeArg::Float) => Mode::Float,
        Some(ModeArg::Rational) => Mode::Rational,
        None => doc.mode.unwrap_or(Mode::Float),
    };
    let method = match method {
        Some(MethodArg::A) => Method::A,
        Some(MethodArg::AFast) => Method::AFast,
        Some(MethodArg::B) => Method::B,
        Some(MethodArg::All) => Method::All,
        None => doc.method.unwrap_or(Method::All),
    };
    Ok(Settings { config, mode, method })
}

fn read_input(path: &str) -> Result<Vec<u8>, Failure> {
    let mut buf = Vec::new();
    let res = if path == "-" {
        std::io::stdin().read_to_end(&mut buf).map(|_| ())
    } else {
        std::fs::read(path).map(|b| buf = b)
    };
    res.map_err(|e| Failure {
        code: if e.kind() == std::io::ErrorKind::NotFound { EXIT_NO_INPUT } else { EXIT_IO },
        kind: "io",
        message: format!("cannot read {path}: {e}"),
        pointer: None,
    })?;
    Ok(buf)
}

fn failure_report(command: &str, sha: Option<&str>, f: &Failure) -> Value {
    let mut obj = Map::new();
    obj.insert("tool".into(), json!("ule"));
    obj.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    obj.insert("command".into(), json!(command));
    if let Some(sha) = sha {
        obj.insert("input".into(), json!({ "sha256": sha }));
    }
    obj.insert(
        "error".into(),
        json!({ "kind": f.kind, "message": f.message, "pointer": f.pointer }),
    );
    obj.insert("exit_code".into(), json!(f.code));
    Value::Object(obj)
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    let res = match out {
        Some(path) => std::fs::write(path, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush())
        }
    };
    res.map_err(|e| Failure {
        code: EXIT_IO,
        kind: "io",
        message: format!("cannot write output: {e}"),
        pointer: None,
    })
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
        }
    };
    let start = Instant::now();
    let name = cli.command.name();
    let mut sha = None;
    let result: Result<_, Failure> = (|| {
        let exec = threads::from_env().map_err(Failure::usage)?;
        let bytes = read_input(cli.command.input())?;
        sha = Some(format!("{:x}", Sha256::digest(&bytes)));
        let text = String::from_utf8(bytes).map_err(|_| Failure {
            code: EXIT_USAGE,
            kind: "schema",
            message: "input is not valid UTF-8".into(),
            pointer: Some(String::new()),
        })?;
        let doc = input::parse_document(&text).map_err(|e| Failure {
            code: EXIT_USAGE,
            kind: "schema",
            message: e.to_string(),
            pointer: Some(e.pointer.clone()),
        })?;
        let method = match &cli.command {
            Command::Check { method, .. } => *method,
            _ => None,
        };
        let s = settings(&cli.global, method, &doc.options)?;
        let outcome = commands::dispatch(&cli.command, &doc, &s, &exec)?;
        Ok((doc, s, outcome))
    })();
    match result {
        Err(f) => {
            eprintln!("ule {name}: error: {}", f.message);
            let body = serde_json::to_string_pretty(&failure_report(name, sha.as_deref(), &f)).expect("serializable");
            if cli.global.format == Format::Json {
                if let Err(io) = emit(&cli.global.out, &(body + "\n")) {
                    eprintln!("ule {name}: error: {}", io.message);
                    return io.code;
                }
            }
            f.code
        }
        Ok((doc, s, outcome)) => {
            let mut report = Map::new();
            report.insert("tool".into(), json!("ule"));
            report.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
            report.insert("command".into(), json!(name));
            report.insert(
                "input".into(),
                json!({ "sha256": sha, "kind": doc.payload.kind() }),
            );
            report.insert(
                "config".into(),
                json!({
                    "tol": s.config.tol,
                    "max_words": s.config.max_words,
                    "kron_cap": s.config.kron_cap,
                    "mode": s.mode.as_str(),
                    "method": s.method.as_str(),
                }),
            );
            report.insert("decision".into(), json!(outcome.decision.map(|d| d.as_str())));
            report.insert("exit_code".into(), json!(outcome.exit));
            report.insert("result".into(), outcome.result);
            report.insert(
                "timing".into(),
                json!({ "elapsed_ms": start.elapsed().as_secs_f64() * 1e3 }),
            );
            let mut summary = String::new();
            let _ = writeln!(summary, "ule {name} ({})", doc.payload.kind());
            summary.push_str(&outcome.summary);
            if let Some(d) = outcome.decision {
                let _ = writeln!(summary, "decision: {d}");
            }
            let primary = match (&outcome.csv, cli.global.format) {
                (Some(csv), _) => csv.clone(),
                (None, Format::Json) => serde_json::to_string_pretty(&Value::Object(report)).expect("serializable") + "\n",
                (None, Format::Text) => summary.clone(),
            };
            if cli.global.format == Format::Json || outcome.csv.is_some() {
                eprint!("{summary}");
            }
            if let Err(f) = emit(&cli.global.out, &primary) {
                eprintln!("ule {name}: error: {}", f.message);
                return f.code;
            }
            outcome.exit
        }
    }
}
