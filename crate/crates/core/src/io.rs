//! Scenario files: JSON with exact scalars written as strings.
//!
//! `save` produces a canonical form, so `save(load(save(x)))` is
//! byte-identical to `save(x)`.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::filtration::{Decreasing, Increasing};
use crate::matrix::Matrix;
use crate::orbits::{Convergent, GammaTerm, Growth, OrbitScenario, Sl2SequenceSpec};
use crate::scalar::{format_exact, parse_exact, Exact, Scalar};
use crate::subspace::Subspace;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for IoError {
    fn from(e: serde_json::Error) -> Self {
        if e.is_io() {
            return IoError::Io(std::io::Error::other(e.to_string()));
        }
        let msg = e.to_string();
        // serde_json appends " at line L column C"; keep only the message
        let message = match msg.rfind(" at line ") {
            Some(k) => msg[..k].to_string(),
            None => msg,
        };
        IoError::Parse { line: e.line(), column: e.column(), message }
    }
}

/// An exact scalar stored as a string such as "1/2-3*i".
#[derive(Clone, Debug, PartialEq)]
pub struct Sc(pub Exact);

impl Serialize for Sc {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_exact(&self.0))
    }
}

impl<'de> Deserialize<'de> for Sc {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl de::Visitor<'_> for V {
            type Value = Sc;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a scalar string like \"1/2-3*i\" or an integer")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Sc, E> {
                parse_exact(v).map(Sc).map_err(E::custom)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Sc, E> {
                Ok(Sc(Exact::from_i64(v)))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Sc, E> {
                i64::try_from(v).map(|x| Sc(Exact::from_i64(x))).map_err(E::custom)
            }
        }
        d.deserialize_any(V)
    }
}

type Rows = Vec<Vec<Sc>>;

fn to_rows(m: &Matrix<Exact>) -> Rows {
    (0..m.rows()).map(|i| m.row(i).into_iter().map(Sc).collect()).collect()
}

fn to_vecs(vs: &[Vec<Exact>]) -> Rows {
    vs.iter().map(|v| v.iter().cloned().map(Sc).collect()).collect()
}

fn from_vecs(rows: &Rows) -> Vec<Vec<Exact>> {
    rows.iter().map(|r| r.iter().map(|x| x.0.clone()).collect()).collect()
}

fn matrix_from_rows(rows: &Rows, n: usize, what: &str) -> Result<Matrix<Exact>, IoError> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(IoError::Invalid(format!("{what} must be a {n}×{n} matrix")));
    }
    Ok(Matrix::from_rows(from_vecs(rows)))
}

fn check_vectors(rows: &Rows, n: usize, what: &str) -> Result<(), IoError> {
    if rows.iter().any(|r| r.len() != n) {
        return Err(IoError::Invalid(format!("{what}: every vector must have {n} entries")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightStep {
    pub weight: i32,
    pub gens: Rows,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HodgeStep {
    pub p: i32,
    pub gens: Rows,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GammaEntry {
    pub exponents: Vec<u32>,
    pub matrix: Rows,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolarizationEntry {
    pub weight: i32,
    pub matrix: Rows,
}

/// Serialized sl2-sequence: y = T v(m) + b(m), x = x(m).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceFile {
    #[serde(rename = "T")]
    pub t: Rows,
    pub v: Vec<Growth>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub b: Vec<Convergent>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub x: Vec<Convergent>,
}

impl SequenceFile {
    pub fn to_spec(&self) -> Result<Sl2SequenceSpec, IoError> {
        let r = self.t.len();
        let d = self.t.first().map_or(0, |row| row.len());
        if r == 0 || self.t.iter().any(|row| row.len() != d) {
            return Err(IoError::Invalid("sequence T must be a non-empty r×d matrix".into()));
        }
        let fill = |v: &[Convergent]| if v.is_empty() { vec![Convergent::default(); r] } else { v.to_vec() };
        let spec = Sl2SequenceSpec {
            t: Matrix::from_rows(from_vecs(&self.t)),
            v: self.v.clone(),
            b: fill(&self.b),
            x: fill(&self.x),
        };
        spec.validate().map_err(|e| IoError::Invalid(e.to_string()))?;
        Ok(spec)
    }

    pub fn from_spec(spec: &Sl2SequenceSpec) -> Self {
        let trivial = |v: &[Convergent]| v.iter().all(|c| *c == Convergent::default());
        SequenceFile {
            t: to_rows(&spec.t),
            v: spec.v.clone(),
            b: if trivial(&spec.b) { vec![] } else { spec.b.clone() },
            x: if trivial(&spec.x) { vec![] } else { spec.x.clone() },
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    /// command -> expected outcome, for regression runs
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub expected: BTreeMap<String, String>,
    /// named sl2-sequences usable with `--sequence NAME`
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub sequences: BTreeMap<String, SequenceFile>,
}

impl Metadata {
    pub fn is_empty(&self) -> bool {
        *self == Metadata::default()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub schema_version: u32,
    pub name: String,
    pub dim: usize,
    #[serde(rename = "W")]
    pub w: Vec<WeightStep>,
    #[serde(rename = "F")]
    pub f: Vec<HodgeStep>,
    #[serde(rename = "N")]
    pub n: Vec<Rows>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub gamma: Vec<GammaEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub polarizations: Vec<PolarizationEntry>,
    /// integral basis, one vector per entry
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<Rows>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_bound: Option<f64>,
    #[serde(default, skip_serializing_if = "Metadata::is_empty")]
    pub metadata: Metadata,
}

/// A scenario together with its file metadata.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioDocument {
    pub scenario: OrbitScenario,
    pub metadata: Metadata,
}

impl ScenarioDocument {
    pub fn sequence(&self, name: &str) -> Option<Result<Sl2SequenceSpec, IoError>> {
        self.metadata.sequences.get(name).map(|s| s.to_spec())
    }
}

impl ScenarioFile {
    pub fn into_document(self) -> Result<ScenarioDocument, IoError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(IoError::Invalid(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        let n = self.dim;
        if n == 0 {
            return Err(IoError::Invalid("dim must be positive".into()));
        }
        let mut wg = Vec::new();
        for s in &self.w {
            check_vectors(&s.gens, n, &format!("W weight {}", s.weight))?;
            wg.push((s.weight, from_vecs(&s.gens)));
        }
        let mut fg = Vec::new();
        for s in &self.f {
            check_vectors(&s.gens, n, &format!("F^{}", s.p))?;
            fg.push((s.p, from_vecs(&s.gens)));
        }
        let w = Increasing::from_generators(n, &wg).map_err(|e| IoError::Invalid(format!("W: {e}")))?;
        let f = Decreasing::from_generators(n, &fg).map_err(|e| IoError::Invalid(format!("F: {e}")))?;
        if w.get(w.highest()).dim() != n {
            return Err(IoError::Invalid("W does not exhaust V".into()));
        }
        if f.get(f.lowest()).dim() != n {
            return Err(IoError::Invalid("F does not exhaust V".into()));
        }
        let ns = self
            .n
            .iter()
            .enumerate()
            .map(|(j, m)| matrix_from_rows(m, n, &format!("N_{}", j + 1)))
            .collect::<Result<Vec<_>, _>>()?;
        let r = ns.len();
        let mut gamma = Vec::new();
        for (k, g) in self.gamma.iter().enumerate() {
            if g.exponents.len() != r {
                return Err(IoError::Invalid(format!("gamma[{k}]: expected {r} exponents")));
            }
            gamma.push(GammaTerm {
                exponents: g.exponents.clone(),
                coeff: matrix_from_rows(&g.matrix, n, &format!("gamma[{k}]"))?,
            });
        }
        let mut polarizations = BTreeMap::new();
        for p in &self.polarizations {
            let m = matrix_from_rows(&p.matrix, n, &format!("polarization of weight {}", p.weight))?;
            if polarizations.insert(p.weight, m).is_some() {
                return Err(IoError::Invalid(format!("duplicate polarization for weight {}", p.weight)));
            }
        }
        let lattice = match &self.lattice {
            None => None,
            Some(cols) => {
                check_vectors(cols, n, "lattice")?;
                if cols.len() != n {
                    return Err(IoError::Invalid(format!("lattice needs {n} basis vectors")));
                }
                let b = Matrix::from_columns(&from_vecs(cols), n);
                if b.inverse().is_none() {
                    return Err(IoError::Invalid("lattice vectors are linearly dependent".into()));
                }
                Some(b)
            }
        };
        for (name, s) in &self.metadata.sequences {
            let spec = s.to_spec().map_err(|e| IoError::Invalid(format!("sequence {name:?}: {e}")))?;
            if spec.r() != r {
                return Err(IoError::Invalid(format!("sequence {name:?} has {} rows, expected {r}", spec.r())));
            }
        }
        let scenario = OrbitScenario {
            name: self.name,
            w,
            f_inf: f,
            ns,
            gamma,
            polarizations,
            lattice,
            k_bound: self.k_bound.unwrap_or(1.0),
        };
        Ok(ScenarioDocument { scenario, metadata: self.metadata })
    }

    pub fn from_document(doc: &ScenarioDocument) -> Self {
        let s = &doc.scenario;
        let n = s.dim();
        let mut w = Vec::new();
        let mut prev = Subspace::zero(n);
        for k in s.w.lowest()..=s.w.highest() {
            let cur = s.w.get(k);
            let gens = extend_basis(&prev, &cur);
            if !gens.is_empty() {
                w.push(WeightStep { weight: k, gens: to_vecs(&gens) });
            }
            prev = cur;
        }
        let mut f = Vec::new();
        let mut prev = Subspace::zero(n);
        for p in (s.f_inf.lowest()..=s.f_inf.highest()).rev() {
            let cur = s.f_inf.get(p);
            let gens = extend_basis(&prev, &cur);
            if !gens.is_empty() {
                f.push(HodgeStep { p, gens: to_vecs(&gens) });
            }
            prev = cur;
        }
        ScenarioFile {
            schema_version: SCHEMA_VERSION,
            name: s.name.clone(),
            dim: n,
            w,
            f,
            n: s.ns.iter().map(to_rows).collect(),
            gamma: s
                .gamma
                .iter()
                .map(|g| GammaEntry { exponents: g.exponents.clone(), matrix: to_rows(&g.coeff) })
                .collect(),
            polarizations: s
                .polarizations
                .iter()
                .map(|(&weight, m)| PolarizationEntry { weight, matrix: to_rows(m) })
                .collect(),
            lattice: s.lattice.as_ref().map(|b| (0..n).map(|j| b.column(j).into_iter().map(Sc).collect()).collect()),
            k_bound: if s.k_bound == 1.0 { None } else { Some(s.k_bound) },
            metadata: doc.metadata.clone(),
        }
    }
}

/// Canonical basis vectors of `big` that extend `small`.
fn extend_basis(small: &Subspace<Exact>, big: &Subspace<Exact>) -> Vec<Vec<Exact>> {
    let mut acc = small.clone();
    let mut out = Vec::new();
    for v in big.vectors() {
        if !acc.contains(&v) {
            acc = acc.sum(&Subspace::span(v.len(), std::slice::from_ref(&v)));
            out.push(v);
        }
    }
    out
}

pub fn parse_document(text: &str) -> Result<ScenarioDocument, IoError> {
    let file: ScenarioFile = serde_json::from_str(text)?;
    file.into_document()
}

pub fn parse_scenario(text: &str) -> Result<OrbitScenario, IoError> {
    Ok(parse_document(text)?.scenario)
}

/// Canonical pretty-printed JSON with a trailing newline.
pub fn to_canonical_json(doc: &ScenarioDocument) -> String {
    let mut s = serde_json::to_string_pretty(&ScenarioFile::from_document(doc)).expect("scenario serializes");
    s.push('\n');
    s
}

pub fn load(path: &std::path::Path) -> Result<ScenarioDocument, IoError> {
    parse_document(&std::fs::read_to_string(path)?)
}

pub fn save(doc: &ScenarioDocument, path: &std::path::Path) -> Result<(), IoError> {
    std::fs::write(path, to_canonical_json(doc))?;
    Ok(())
}

/// Parses a sequence either as JSON (a `SequenceFile`) or as the shorthand
/// "m^3, m" (strict, powers of m) with optional "; x = 0.1, 0.2".
pub fn parse_sequence(text: &str) -> Result<Sl2SequenceSpec, IoError> {
    let t = text.trim();
    if t.starts_with('{') {
        let f: SequenceFile = serde_json::from_str(t)?;
        return f.to_spec();
    }
    let bad = |m: String| IoError::Invalid(format!("sequence {t:?}: {m}"));
    let (growth, xs) = match t.split_once(';') {
        Some((g, x)) => (g, Some(x)),
        None => (t, None),
    };
    let mut v = Vec::new();
    for part in growth.split(',') {
        v.push(parse_growth(part.trim()).map_err(bad)?);
    }
    let r = v.len();
    let x = match xs {
        None => vec![0.0; r],
        Some(x) => {
            let x = x.trim();
            let x = x.strip_prefix("x").map(|s| s.trim_start()).and_then(|s| s.strip_prefix('=')).ok_or_else(|| bad("expected x = ...".into()))?;
            let vals = x
                .split(',')
                .map(|p| p.trim().parse::<f64>().map_err(|e| bad(e.to_string())))
                .collect::<Result<Vec<_>, _>>()?;
            if vals.len() != r {
                return Err(bad(format!("expected {r} x values")));
            }
            vals
        }
    };
    let spec = Sl2SequenceSpec::strict(v, x);
    spec.validate().map_err(|e| bad(e.to_string()))?;
    Ok(spec)
}

/// "c*m^p*exp(a*m)" with every factor optional, e.g. "m^3", "2*m", "exp(m)".
fn parse_growth(s: &str) -> Result<Growth, String> {
    let mut g = Growth { coef: 1.0, power: 0.0, rate: 0.0 };
    let mut depth = 0;
    let mut parts = vec![String::new()];
    for c in s.chars() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            '*' if depth == 0 => {
                parts.push(String::new());
                continue;
            }
            _ => {}
        }
        parts.last_mut().unwrap().push(c);
    }
    for f in &parts {
        let f = f.trim();
        if f == "m" {
            g.power += 1.0;
        } else if let Some(p) = f.strip_prefix("m^") {
            g.power += p.parse::<f64>().map_err(|e| format!("{f:?}: {e}"))?;
        } else if let Some(a) = f.strip_prefix("exp(").and_then(|x| x.strip_suffix(')')) {
            let a = a.trim();
            g.rate += if a == "m" {
                1.0
            } else {
                a.strip_suffix('m').map(|c| c.trim().trim_end_matches('*')).unwrap_or("").parse::<f64>().map_err(|e| format!("{f:?}: {e}"))?
            };
        } else {
            g.coef *= f.parse::<f64>().map_err(|e| format!("{f:?}: {e}"))?;
        }
    }
    Ok(g)
}
