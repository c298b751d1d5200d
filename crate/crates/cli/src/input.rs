//! Input documents: parsing with JSON-pointer diagnostics and canonical
//! serialization.

use std::fmt;

use serde_json::{json, Map, Value};
use ule_core::rational::{self, Rat};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Float,
    Rational,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Float => "float",
            Mode::Rational => "rational",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    A,
    AFast,
    B,
    All,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::A => "A",
            Method::AFast => "A-fast",
            Method::B => "B",
            Method::All => "all",
        }
    }

    pub fn parse(s: &str) -> Option<Method> {
        match s {
            "A" | "a" => Some(Method::A),
            "A-fast" | "a-fast" => Some(Method::AFast),
            "B" | "b" => Some(Method::B),
            "all" => Some(Method::All),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Options {
    pub tol: Option<f64>,
    pub max_words: Option<u64>,
    pub kron_cap: Option<usize>,
    pub method: Option<Method>,
    pub mode: Option<Mode>,
}

pub type RatMatrix = Vec<Vec<Rat>>;

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    Tuple {
        matrices: Vec<RatMatrix>,
    },
    Carpet {
        adjacency: Vec<Vec<bool>>,
        /// Labels as written, 1-based.
        tau: Vec<usize>,
        m: Option<usize>,
    },
    SelfAffine {
        a: Vec<Vec<i64>>,
        digits: Vec<Vec<i64>>,
        weights: Vec<Rat>,
        n0: u32,
        tile_digits: Vec<Vec<i64>>,
        translations: Vec<Vec<i64>>,
    },
    SelfSimilar {
        matrices: Vec<RatMatrix>,
        rho: Rat,
    },
}

impl Payload {
    pub fn kind(&self) -> &'static str {
        match self {
            Payload::Tuple { .. } => "tuple",
            Payload::Carpet { .. } => "carpet",
            Payload::SelfAffine { .. } => "self_affine",
            Payload::SelfSimilar { .. } => "self_similar",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub payload: Payload,
    pub options: Options,
}

/// Schema violation located by a JSON pointer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaError {
    pub pointer: String,
    pub message: String,
}

impl fmt::Display for SchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let at = if self.pointer.is_empty() { "/" } else { &self.pointer };
        write!(f, "at {at}: {}", self.message)
    }
}

impl std::error::Error for SchemaError {}

type Res<T> = Result<T, SchemaError>;

fn err<T>(pointer: &str, message: impl Into<String>) -> Res<T> {
    Err(SchemaError {
        pointer: pointer.to_string(),
        message: message.into(),
    })
}

fn child(pointer: &str, key: impl fmt::Display) -> String {
    let key = key.to_string().replace('~', "~0").replace('/', "~1");
    format!("{pointer}/{key}")
}

fn field<'a>(obj: &'a Map<String, Value>, ptr: &str, key: &str) -> Res<&'a Value> {
    match obj.get(key) {
        Some(v) => Ok(v),
        None => err(ptr, format!("missing field {key:?}")),
    }
}

fn array<'a>(v: &'a Value, ptr: &str) -> Res<&'a [Value]> {
    match v {
        Value::Array(a) => Ok(a),
        _ => err(ptr, "expected an array"),
    }
}

fn rat(v: &Value, ptr: &str, mode: Mode) -> Res<Rat> {
    match v {
        Value::String(s) => match rational::parse_rat(s) {
            Ok(r) => Ok(r),
            Err(_) => err(ptr, format!("{s:?} is not a rational literal (expected \"p/q\", an integer or a decimal)")),
        },
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                return Ok(Rat::from_integer(i.into()));
            }
            if mode == Mode::Rational {
                return err(ptr, "non-integer JSON numbers are not exact; give rationals as \"p/q\" strings");
            }
            let text = n.to_string();
            let parsed = if text.contains(['e', 'E']) {
                n.as_f64().and_then(rational::from_f64)
            } else {
                rational::parse_rat(&text).ok()
            };
            match parsed {
                Some(r) => Ok(r),
                None => err(ptr, "number is not finite"),
            }
        }
        _ => err(ptr, "expected a number or a rational string"),
    }
}

fn integer(v: &Value, ptr: &str) -> Res<i64> {
    match v.as_i64() {
        Some(i) => Ok(i),
        None => err(ptr, "expected an integer"),
    }
}

fn positive(v: &Value, ptr: &str) -> Res<u64> {
    match v.as_u64() {
        Some(i) if i > 0 => Ok(i),
        _ => err(ptr, "expected a positive integer"),
    }
}

fn int_vectors(v: &Value, ptr: &str, len: Option<usize>) -> Res<Vec<Vec<i64>>> {
    let rows = array(v, ptr)?;
    let mut out = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let p = child(ptr, i);
        let entries = array(row, &p)?;
        if let Some(n) = len {
            if entries.len() != n {
                return err(&p, format!("expected {n} entries, found {}", entries.len()));
            }
        }
        out.push(entries.iter().enumerate().map(|(j, x)| integer(x, &child(&p, j))).collect::<Res<_>>()?);
    }
    Ok(out)
}

/// A square matrix of rationals; `d` is enforced when given.
fn rat_matrix(v: &Value, ptr: &str, d: Option<usize>, mode: Mode) -> Res<RatMatrix> {
    let rows = array(v, ptr)?;
    let n = d.unwrap_or(rows.len());
    if rows.len() != n {
        return err(ptr, format!("expected a {n}x{n} matrix, found {} rows", rows.len()));
    }
    if n == 0 {
        return err(ptr, "matrices must be nonempty");
    }
    let mut out = Vec::with_capacity(n);
    for (i, row) in rows.iter().enumerate() {
        let p = child(ptr, i);
        let entries = array(row, &p)?;
        if entries.len() != n {
            return err(&p, format!("expected {n} entries, found {}", entries.len()));
        }
        out.push(entries.iter().enumerate().map(|(j, x)| rat(x, &child(&p, j), mode)).collect::<Res<_>>()?);
    }
    Ok(out)
}

fn matrices(obj: &Map<String, Value>, mode: Mode) -> Res<Vec<RatMatrix>> {
    let list = array(field(obj, "", "matrices")?, "/matrices")?;
    if list.is_empty() {
        return err("/matrices", "at least one matrix is required");
    }
    let declared_d = match obj.get("d") {
        Some(v) => Some(positive(v, "/d")? as usize),
        None => None,
    };
    if let Some(k) = obj.get("k") {
        let k = positive(k, "/k")? as usize;
        if k != list.len() {
            return err("/matrices", format!("k = {k} but {} matrices were given", list.len()));
        }
    }
    let mut out = Vec::with_capacity(list.len());
    let mut d = declared_d;
    for (i, m) in list.iter().enumerate() {
        let mat = rat_matrix(m, &child("/matrices", i), d, mode)?;
        d = Some(mat.len());
        out.push(mat);
    }
    if out.iter().all(|m| m.iter().flatten().all(|x| *x == Rat::from_integer(0.into()))) {
        return err("/matrices", "at least one matrix must be nonzero");
    }
    Ok(out)
}

fn options(v: Option<&Value>) -> Res<Options> {
    let mut o = Options::default();
    let Some(v) = v else {
        return Ok(o);
    };
    let Value::Object(obj) = v else {
        return err("/options", "expected an object");
    };
    for (key, val) in obj {
        let p = child("/options", key);
        match key.as_str() {
            "tol" => match val.as_f64() {
                Some(t) if t > 0.0 && t.is_finite() => o.tol = Some(t),
                _ => return err(&p, "expected a positive number"),
            },
            "max_words" => o.max_words = Some(positive(val, &p)?),
            "kron_cap" => o.kron_cap = Some(positive(val, &p)? as usize),
            "method" => match val.as_str().and_then(Method::parse) {
                Some(m) => o.method = Some(m),
                None => return err(&p, "expected one of \"A\", \"A-fast\", \"B\", \"all\""),
            },
            "mode" => match val.as_str() {
                Some("float") => o.mode = Some(Mode::Float),
                Some("rational") => o.mode = Some(Mode::Rational),
                _ => return err(&p, "expected \"float\" or \"rational\""),
            },
            other => return err(&p, format!("unknown option {other:?}")),
        }
    }
    Ok(o)
}

fn check_keys(obj: &Map<String, Value>, allowed: &[&str]) -> Res<()> {
    for key in obj.keys() {
        if key != "kind" && key != "options" && !allowed.contains(&key.as_str()) {
            return err(&child("", key), format!("unknown field {key:?}"));
        }
    }
    Ok(())
}

/// Parses and schema-checks a document.
pub fn parse_document(text: &str) -> Res<Document> {
    let value: Value = match serde_json::from_str(text) {
        Ok(v) => v,
        Err(e) => return err("", format!("malformed JSON at line {} column {}: {e}", e.line(), e.column())),
    };
    parse_value(&value)
}

pub fn parse_value(value: &Value) -> Res<Document> {
    let Value::Object(obj) = value else {
        return err("", "expected a JSON object");
    };
    let options = options(obj.get("options"))?;
    let mode = options.mode.unwrap_or(Mode::Float);
    let kind = match field(obj, "", "kind")? {
        Value::String(s) => s.as_str(),
        _ => return err("/kind", "expected a string"),
    };
    let payload = match kind {
        "tuple" => {
            check_keys(obj, &["d", "k", "matrices"])?;
            Payload::Tuple {
                matrices: matrices(obj, mode)?,
            }
        }
        "self_similar" => {
            check_keys(obj, &["d", "k", "matrices", "rho"])?;
            let matrices = matrices(obj, mode)?;
            let rho = rat(field(obj, "", "rho")?, "/rho", mode)?;
            let zero = Rat::from_integer(0.into());
            let one = Rat::from_integer(1.into());
            if rho <= zero || rho >= one {
                return err("/rho", "contraction ratio must lie in (0, 1)");
            }
            Payload::SelfSimilar { matrices, rho }
        }
        "carpet" => {
            check_keys(obj, &["n", "m", "adjacency", "tau"])?;
            let rows = array(field(obj, "", "adjacency")?, "/adjacency")?;
            let n = rows.len();
            if n == 0 {
                return err("/adjacency", "the transition matrix must be nonempty");
            }
            if let Some(v) = obj.get("n") {
                if positive(v, "/n")? as usize != n {
                    return err("/adjacency", format!("n = {} but the matrix has {n} rows", v));
                }
            }
            let mut adjacency = Vec::with_capacity(n);
            for (i, row) in rows.iter().enumerate() {
                let p = child("/adjacency", i);
                let entries = array(row, &p)?;
                if entries.len() != n {
                    return err(&p, format!("expected {n} entries, found {}", entries.len()));
                }
                let mut out = Vec::with_capacity(n);
                for (j, x) in entries.iter().enumerate() {
                    out.push(match x {
                        Value::Bool(b) => *b,
                        Value::Number(v) if v.as_u64() == Some(0) => false,
                        Value::Number(v) if v.as_u64() == Some(1) => true,
                        _ => return err(&child(&p, j), "expected 0, 1, true or false"),
                    });
                }
                adjacency.push(out);
            }
            let m = match obj.get("m") {
                Some(v) => Some(positive(v, "/m")? as usize),
                None => None,
            };
            let labels = array(field(obj, "", "tau")?, "/tau")?;
            if labels.len() != n {
                return err("/tau", format!("expected {n} labels, found {}", labels.len()));
            }
            let mut tau = Vec::with_capacity(n);
            for (i, l) in labels.iter().enumerate() {
                let p = child("/tau", i);
                let l = positive(l, &p)? as usize;
                if m.is_some_and(|m| l > m) {
                    return err(&p, format!("label {l} exceeds m"));
                }
                tau.push(l);
            }
            Payload::Carpet { adjacency, tau, m }
        }
        "self_affine" => {
            check_keys(obj, &["d", "a", "digits", "weights", "n0", "tile_digits", "translations"])?;
            let a = int_vectors(field(obj, "", "a")?, "/a", None)?;
            let d = a.len();
            if d == 0 {
                return err("/a", "A must be nonempty");
            }
            if let Some(v) = obj.get("d") {
                if positive(v, "/d")? as usize != d {
                    return err("/a", format!("d = {v} but A has {d} rows"));
                }
            }
            for (i, row) in a.iter().enumerate() {
                if row.len() != d {
                    return err(&child("/a", i), format!("expected {d} entries, found {}", row.len()));
                }
            }
            let digits = int_vectors(field(obj, "", "digits")?, "/digits", Some(d))?;
            if digits.is_empty() {
                return err("/digits", "at least one digit is required");
            }
            let wv = array(field(obj, "", "weights")?, "/weights")?;
            if wv.len() != digits.len() {
                return err("/weights", format!("expected {} weights, found {}", digits.len(), wv.len()));
            }
            let weights = wv.iter().enumerate().map(|(i, w)| rat(w, &child("/weights", i), mode)).collect::<Res<Vec<_>>>()?;
            let n0 = positive(field(obj, "", "n0")?, "/n0")?;
            let n0 = match u32::try_from(n0) {
                Ok(n) => n,
                Err(_) => return err("/n0", "n0 is too large"),
            };
            let tile_digits = int_vectors(field(obj, "", "tile_digits")?, "/tile_digits", Some(d))?;
            let translations = int_vectors(field(obj, "", "translations")?, "/translations", Some(d))?;
            if translations.is_empty() {
                return err("/translations", "at least one translation is required");
            }
            Payload::SelfAffine {
                a,
                digits,
                weights,
                n0,
                tile_digits,
                translations,
            }
        }
        other => return err("/kind", format!("unknown kind {other:?} (expected tuple, carpet, self_affine or self_similar)")),
    };
    Ok(Document { payload, options })
}

fn rat_value(r: &Rat) -> Value {
    Value::String(rational::format_rat(r))
}

fn matrices_value(ms: &[RatMatrix]) -> Value {
    Value::Array(
        ms.iter()
            .map(|m| Value::Array(m.iter().map(|r| Value::Array(r.iter().map(rat_value).collect())).collect()))
            .collect(),
    )
}

/// Canonical JSON form; parsing it gives back the same document.
pub fn to_value(doc: &Document) -> Value {
    let mut obj = Map::new();
    obj.insert("kind".into(), json!(doc.payload.kind()));
    match &doc.payload {
        Payload::Tuple { matrices } => {
            obj.insert("d".into(), json!(matrices[0].len()));
            obj.insert("k".into(), json!(matrices.len()));
            obj.insert("matrices".into(), matrices_value(matrices));
        }
        Payload::SelfSimilar { matrices, rho } => {
            obj.insert("d".into(), json!(matrices[0].len()));
            obj.insert("k".into(), json!(matrices.len()));
            obj.insert("matrices".into(), matrices_value(matrices));
            obj.insert("rho".into(), rat_value(rho));
        }
        Payload::Carpet { adjacency, tau, m } => {
            let adj: Vec<Vec<u8>> = adjacency.iter().map(|r| r.iter().map(|&b| b as u8).collect()).collect();
            obj.insert("adjacency".into(), json!(adj));
            obj.insert("tau".into(), json!(tau));
            if let Some(m) = m {
                obj.insert("m".into(), json!(m));
            }
        }
        Payload::SelfAffine {
            a,
            digits,
            weights,
            n0,
            tile_digits,
            translations,
        } => {
            obj.insert("a".into(), json!(a));
            obj.insert("digits".into(), json!(digits));
            obj.insert("weights".into(), Value::Array(weights.iter().map(rat_value).collect()));
            obj.insert("n0".into(), json!(n0));
            obj.insert("tile_digits".into(), json!(tile_digits));
            obj.insert("translations".into(), json!(translations));
        }
    }
    let o = &doc.options;
    let mut opts = Map::new();
    if let Some(t) = o.tol {
        opts.insert("tol".into(), json!(t));
    }
    if let Some(w) = o.max_words {
        opts.insert("max_words".into(), json!(w));
    }
    if let Some(c) = o.kron_cap {
        opts.insert("kron_cap".into(), json!(c));
    }
    if let Some(m) = o.method {
        opts.insert("method".into(), json!(m.as_str()));
    }
    if let Some(m) = o.mode {
        opts.insert("mode".into(), json!(m.as_str()));
    }
    if !opts.is_empty() {
        obj.insert("options".into(), Value::Object(opts));
    }
    Value::Object(obj)
}

pub fn to_string(doc: &Document) -> String {
    serde_json::to_string_pretty(&to_value(doc)).expect("document values serialize")
}
