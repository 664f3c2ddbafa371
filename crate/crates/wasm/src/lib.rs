//! Browser bindings. Every export takes a scenario as JSON text and returns a
//! JSON string; errors come back as plain messages.

use hodgelim::asymptotics::verify_main_limit;
use hodgelim::io::{parse_document, parse_sequence, ScenarioDocument};
use hodgelim::matrix::Matrix;
use hodgelim::normal_functions::{z_of_s, zero_test_point, NormalFunctionData};
use hodgelim::orbits::{check_admissible_orbit, default_probe_grid};
use hodgelim::scalar::{format_exact, Exact, Float};
use hodgelim::splitting::CksRecursion;
use hodgelim::weight::{default_cone_samples, kashiwara_checks};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

const EXAMPLES: &[(&str, &str)] = &[
    ("sl2_pure", include_str!("../../core/fixtures/sl2_pure.json")),
    ("rank4_mixed", include_str!("../../core/fixtures/rank4_mixed.json")),
    ("nf_acceptance", include_str!("../../core/fixtures/nf_acceptance.json")),
    ("diagonal_locus", include_str!("../../core/fixtures/diagonal_locus.json")),
    ("split_extension", include_str!("../../core/fixtures/split_extension.json")),
];

fn document(text: &str) -> Result<ScenarioDocument, String> {
    parse_document(text).map_err(|e| e.to_string())
}

fn float_rows(m: &Matrix<Float>) -> Value {
    let c = m.cols();
    m.entries()
        .chunks(c.max(1))
        .map(|row| row.iter().map(|v| json!([v.re, v.im])).collect::<Vec<_>>())
        .collect()
}

fn exact_rows(m: &Matrix<Exact>) -> Value {
    let c = m.cols();
    m.entries()
        .chunks(c.max(1))
        .map(|row| row.iter().map(format_exact).collect::<Vec<_>>())
        .collect()
}

/// Names of the bundled example scenarios.
#[wasm_bindgen]
pub fn example_names() -> String {
    json!(EXAMPLES.iter().map(|e| e.0).collect::<Vec<_>>()).to_string()
}

#[wasm_bindgen]
pub fn example(name: &str) -> Result<String, String> {
    EXAMPLES
        .iter()
        .find(|e| e.0 == name)
        .map(|e| e.1.to_string())
        .ok_or_else(|| format!("no example named {name}"))
}

/// Admissibility and relative weight checks.
#[wasm_bindgen]
pub fn validate(scenario: &str, seed: u32) -> Result<String, String> {
    let doc = document(scenario)?;
    let s = &doc.scenario;
    let adm = check_admissible_orbit(s, &default_probe_grid(s));
    let mut checks: Vec<Value> = adm
        .checks
        .iter()
        .map(|c| json!({"name": c.name, "passed": c.passed, "detail": c.detail}))
        .collect();
    let mut ok = adm.passed();
    if s.r() > 0 {
        let samples = default_cone_samples::<Exact>(s.r(), 12, seed as u64);
        match kashiwara_checks(&s.ns, &s.w, &samples) {
            Ok(k) => {
                ok &= k.all_pass();
                checks.push(json!({"name": "relative weight checks", "passed": k.all_pass(), "detail": format!("{} samples", k.samples)}));
            }
            Err(e) => {
                ok = false;
                checks.push(json!({"name": "relative weight checks", "passed": false, "detail": e.to_string()}));
            }
        }
    }
    Ok(json!({"name": s.name, "dim": s.dim(), "r": s.r(), "valid": ok, "checks": checks}).to_string())
}

/// Error table for e^{-N(x)} Ŷ(z(m)) against the limiting grading, m = 1..=m_max.
#[wasm_bindgen]
pub fn limit_table(scenario: &str, sequence: &str, m_max: u32, tol: f64) -> Result<String, String> {
    let doc = document(scenario)?;
    let spec = match doc.sequence(sequence) {
        Some(spec) => spec.map_err(|e| e.to_string())?,
        None => parse_sequence(sequence).map_err(|e| e.to_string())?,
    };
    let ms: Vec<usize> = (1..=m_max.max(1) as usize).collect();
    let rep = verify_main_limit(&doc.scenario, &spec, &CksRecursion, &ms, tol).map_err(|e| e.to_string())?;
    let rows: Vec<Value> = rep
        .rows
        .iter()
        .map(|r| json!({"m": r.m, "y": r.y, "error": r.error, "norm": r.norm}))
        .collect();
    Ok(json!({
        "converged": rep.converged,
        "final_error": rep.final_error(),
        "limit": rep.rhs_exact.as_ref().map_or_else(|| float_rows(&rep.rhs), exact_rows),
        "rows": rows,
    })
    .to_string())
}

/// Zero test of the normal function at the punctured-disc point s, given as
/// interleaved (re, im) pairs.
#[wasm_bindgen]
pub fn zero_test(scenario: &str, s: &[f64], tol: f64) -> Result<String, String> {
    let doc = document(scenario)?;
    if s.len() != 2 * doc.scenario.r() {
        return Err(format!("expected {} coordinates, got {} numbers", doc.scenario.r(), s.len()));
    }
    let sv: Vec<Float> = s.chunks(2).map(|p| Float::new(p[0], p[1])).collect();
    if sv.iter().any(|v| v.norm() == 0.0 || v.norm() >= 1.0) {
        return Err("every s_j must satisfy 0 < |s_j| < 1".into());
    }
    let nf = NormalFunctionData::new(doc.scenario).map_err(|e| e.to_string())?;
    let t = zero_test_point(&nf, &z_of_s(&sv), tol).map_err(|e| e.to_string())?;
    Ok(json!({
        "zero": t.is_zero(),
        "residual": t.residual,
        "grading": float_rows(&t.grading),
        "integral": t.integral.as_ref().map(exact_rows),
    })
    .to_string())
}
