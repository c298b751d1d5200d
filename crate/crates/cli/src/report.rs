//! JSON renderings of core results.

use serde_json::{json, Map, Value};
use ule_core::apps::carpet::CarpetReport;
use ule_core::apps::self_affine::{FourierReport, SelfAffineVerdict};
use ule_core::apps::self_similar::SelfSimilarReport;
use ule_core::rational::{self, RatTuple};
use ule_core::ule::{PressureReport, ProfileRow};
use ule_core::{Mat, MatTuple, UleVerdict};

/// Non-finite floats become `null`.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

pub fn opt(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

pub fn mat(m: &Mat) -> Value {
    Value::Array(m.rows().map(|r| Value::Array(r.iter().map(|&x| num(x)).collect())).collect())
}

pub fn tuple(t: &MatTuple) -> Value {
    Value::Array(t.mats().iter().map(mat).collect())
}

pub fn rat_tuple(t: &RatTuple) -> Value {
    Value::Array(
        t.mats()
            .iter()
            .map(|m| {
                Value::Array(
                    m.to_rows()
                        .iter()
                        .map(|r| Value::Array(r.iter().map(|x| json!(rational::format_rat(x))).collect()))
                        .collect(),
                )
            })
            .collect(),
    )
}

pub fn pressure(p: &PressureReport) -> Value {
    json!({ "p2": num(p.p2), "p4": num(p.p4), "p6": num(p.p6), "defect": num(p.defect) })
}

pub fn verdict(v: &UleVerdict) -> Value {
    let residuals: Vec<Value> = v
        .residuals
        .iter()
        .map(|r| {
            json!({
                "block": r.block + 1,
                "max_residual": num(r.max_residual),
                "worst_word": r.worst_word.as_ref().map(|w| w.one_based()),
            })
        })
        .collect();
    let mut obj = Map::new();
    obj.insert("criterion".into(), json!(v.criterion.as_str()));
    obj.insert("decision".into(), json!(v.decision.as_str()));
    obj.insert("lambda".into(), opt(v.lambda));
    obj.insert("r".into(), opt(v.r_value));
    if let Some(r) = &v.r_exact {
        obj.insert("r_exact".into(), json!(r));
    }
    obj.insert("witness_block".into(), json!(v.witness_block.map(|b| b + 1)));
    obj.insert("residuals".into(), Value::Array(residuals));
    if let Some(p) = &v.pressure {
        obj.insert("pressure".into(), pressure(p));
    }
    obj.insert("notes".into(), json!(v.notes));
    Value::Object(obj)
}

pub fn profile(rows: &[ProfileRow]) -> Value {
    Value::Array(
        rows.iter()
            .map(|r| {
                json!({
                    "n": r.n,
                    "min": opt(r.range.map(|x| x.0)),
                    "max": opt(r.range.map(|x| x.1)),
                    "nonzero": r.nonzero.to_string(),
                })
            })
            .collect(),
    )
}

pub fn carpet(r: &CarpetReport) -> Value {
    json!({
        "labels": r.labels.iter().map(|l| l + 1).collect::<Vec<_>>(),
        "warnings": r.warnings,
        "e": tuple(&r.e),
        "verdict": verdict(&r.verdict),
        "cross_check": r.cross_check.as_ref().map(verdict),
        "log_alpha": num(r.log_alpha),
        "log_beta": num(r.log_beta),
        "sandwich": {
            "max_len": r.sandwich.max_len,
            "words_checked": r.sandwich.words_checked,
            "holds": r.sandwich.holds,
            "violation": r.sandwich.violation.as_ref().map(|w| w.iter().map(|l| r.labels[*l] + 1).collect::<Vec<_>>()),
        },
        "parry_projects_to_parry": r.parry_projects_to_parry,
        "conclusion": r.conclusion(),
    })
}

pub fn self_affine(v: &SelfAffineVerdict) -> Value {
    json!({
        "decision": v.decision.as_str(),
        "no_zero_products": v.no_zero_products,
        "reason": v.reason,
        "criterion": verdict(&v.criterion),
    })
}

pub fn fourier(r: &FourierReport) -> Value {
    json!({
        "label": FourierReport::LABEL,
        "box_radius": r.box_radius,
        "n_max": r.n_max,
        "zero_tol": r.zero_tol,
        "scanned": r.first_zero.len(),
        "first_zero": r.first_zero.iter().map(|(m, n)| json!({ "m": m, "n": n })).collect::<Vec<_>>(),
        "without_zero": r.without_zero,
    })
}

pub fn self_similar(r: &SelfSimilarReport) -> Value {
    json!({
        "entropy": num(r.entropy),
        "s": num(r.s),
        "r": opt(r.r_value),
        "lambda": opt(r.lambda),
        "verdict_hs": verdict(&r.verdict_hs),
        "verdict_leb": r.verdict_leb.as_str(),
        "notes": r.notes,
    })
}
