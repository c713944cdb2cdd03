//! JSON file formats for spectra, operators and Dirichlet data.
//!
//! Every spectrum and operator document carries an explicit group
//! descriptor. Character payloads depend on the group:
//!
//! ```text
//! z_lex      [n_1, ..., n_d]
//! z_inf_lex  [[index, value], ...]        (1-based indices, any order)
//! rationals  [numer, denom]               (integers, or strings when large)
//! ```
//!
//! Parse failures are reported as [`IoError::Invalid`] with a field path;
//! domain errors from validation pass through unchanged.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::automorphism::{Automorphism, IntMatrix};
use crate::dirichlet::{DirichletPolynomial, LIMIT};
use crate::dual_group::{Character, DualGroup};
use crate::error::Error;
use crate::hausdorff::{HausdorffOperator, Provenance, Term};
use crate::spectrum::Spectrum;

#[derive(Debug)]
pub enum IoError {
    /// Unreadable or unwritable file.
    File { path: String, message: String },
    /// Malformed document; `field` is a path such as `terms[2].re`.
    Invalid { field: String, message: String },
    /// Well-formed document rejected by the domain layer.
    Domain { field: String, source: Error },
}

impl fmt::Display for IoError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IoError::File { path, message } => write!(f, "{path}: {message}"),
            IoError::Invalid { field, message } => write!(f, "invalid field `{field}`: {message}"),
            IoError::Domain { field, source } => write!(f, "field `{field}`: {source}"),
        }
    }
}

impl std::error::Error for IoError {}

pub type IoResult<T> = std::result::Result<T, IoError>;

fn invalid(field: impl Into<String>, message: impl Into<String>) -> IoError {
    IoError::Invalid { field: field.into(), message: message.into() }
}

fn domain(field: impl Into<String>) -> impl FnOnce(Error) -> IoError {
    let field = field.into();
    move |source| IoError::Domain { field, source }
}

pub fn read_json(path: &Path) -> IoResult<Value> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| IoError::File { path: path.display().to_string(), message: e.to_string() })?;
    serde_json::from_str(&text).map_err(|e| invalid("<document>", e.to_string()))
}

pub fn write_json(path: &Path, value: &Value) -> IoResult<()> {
    let mut text = serde_json::to_string_pretty(value).expect("values are serializable");
    text.push('\n');
    std::fs::write(path, text).map_err(|e| IoError::File { path: path.display().to_string(), message: e.to_string() })
}

fn field<'a>(obj: &'a Value, path: &str, name: &str) -> IoResult<&'a Value> {
    obj.get(name).ok_or_else(|| invalid(format!("{path}.{name}"), "missing"))
}

fn as_array<'a>(v: &'a Value, path: &str) -> IoResult<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| invalid(path, "expected an array"))
}

fn as_f64(v: &Value, path: &str) -> IoResult<f64> {
    v.as_f64().ok_or_else(|| invalid(path, "expected a number"))
}

fn as_i64(v: &Value, path: &str) -> IoResult<i64> {
    v.as_i64().ok_or_else(|| invalid(path, "expected an integer"))
}

fn as_u64(v: &Value, path: &str) -> IoResult<u64> {
    v.as_u64().ok_or_else(|| invalid(path, "expected a nonnegative integer"))
}

fn as_bool_or(v: Option<&Value>, path: &str, default: bool) -> IoResult<bool> {
    match v {
        None => Ok(default),
        Some(b) => b.as_bool().ok_or_else(|| invalid(path, "expected a boolean")),
    }
}

fn i64_list(v: &Value, path: &str) -> IoResult<Vec<i64>> {
    as_array(v, path)?.iter().enumerate().map(|(i, x)| as_i64(x, &format!("{path}[{i}]"))).collect()
}

fn coefficient(obj: &Value, path: &str) -> IoResult<Complex64> {
    let re = as_f64(field(obj, path, "re")?, &format!("{path}.re"))?;
    let im = match obj.get("im") {
        None => 0.0,
        Some(v) => as_f64(v, &format!("{path}.im"))?,
    };
    Ok(Complex64::new(re, im))
}

// ---- groups and characters ----

pub fn group_to_json(g: DualGroup) -> Value {
    match g {
        DualGroup::ZLex(d) => json!({"kind": "z_lex", "dim": d}),
        DualGroup::ZInfLex => json!({"kind": "z_inf_lex"}),
        DualGroup::Rationals => json!({"kind": "rationals"}),
    }
}

pub fn group_from_json(v: &Value, path: &str) -> IoResult<DualGroup> {
    let kind = field(v, path, "kind")?.as_str().ok_or_else(|| invalid(format!("{path}.kind"), "expected a string"))?;
    match kind {
        "z_lex" => {
            let dim = as_u64(field(v, path, "dim")?, &format!("{path}.dim"))? as usize;
            DualGroup::z_lex(dim).map_err(domain(format!("{path}.dim")))
        }
        "z_inf_lex" => Ok(DualGroup::ZInfLex),
        "rationals" => Ok(DualGroup::Rationals),
        other => Err(invalid(format!("{path}.kind"), format!("unknown group kind {other:?}"))),
    }
}

fn bigint_to_json(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) => json!(v),
        None => json!(x.to_string()),
    }
}

fn bigint_from_json(v: &Value, path: &str) -> IoResult<BigInt> {
    if let Some(i) = v.as_i64() {
        return Ok(BigInt::from(i));
    }
    v.as_str()
        .and_then(|s| s.parse::<BigInt>().ok())
        .ok_or_else(|| invalid(path, "expected an integer or a decimal integer string"))
}

fn rational_to_json(q: &BigRational) -> Value {
    json!([bigint_to_json(q.numer()), bigint_to_json(q.denom())])
}

fn rational_from_json(v: &Value, path: &str) -> IoResult<BigRational> {
    let parts = as_array(v, path)?;
    if parts.len() != 2 {
        return Err(invalid(path, "expected [numer, denom]"));
    }
    let n = bigint_from_json(&parts[0], &format!("{path}[0]"))?;
    let d = bigint_from_json(&parts[1], &format!("{path}[1]"))?;
    if d.is_zero() {
        return Err(invalid(format!("{path}[1]"), "zero denominator"));
    }
    Ok(BigRational::new(n, d))
}

pub fn character_to_json(chi: &Character) -> Value {
    match chi {
        Character::Lex(v) => json!(v),
        Character::Sparse(pairs) => Value::Array(pairs.iter().map(|&(i, x)| json!([i, x])).collect()),
        Character::Rational(q) => rational_to_json(q),
    }
}

pub fn character_from_json(v: &Value, group: DualGroup, path: &str) -> IoResult<Character> {
    match group {
        DualGroup::ZLex(d) => {
            let coords = i64_list(v, path)?;
            if coords.len() != d {
                return Err(IoError::Domain {
                    field: path.into(),
                    source: Error::DimMismatch { expected: d, actual: coords.len() },
                });
            }
            Ok(Character::lex(coords))
        }
        DualGroup::ZInfLex => {
            let mut pairs = Vec::new();
            for (i, p) in as_array(v, path)?.iter().enumerate() {
                let p_path = format!("{path}[{i}]");
                let pair = i64_list(p, &p_path)?;
                if pair.len() != 2 || pair[0] < 1 {
                    return Err(invalid(p_path, "expected [index >= 1, value]"));
                }
                pairs.push((pair[0] as usize, pair[1]));
            }
            Character::sparse(pairs).map_err(domain(path))
        }
        DualGroup::Rationals => Ok(Character::Rational(rational_from_json(v, path)?)),
    }
}

// ---- spectra ----

pub fn spectrum_to_json(s: &Spectrum) -> Value {
    let terms: Vec<Value> = s
        .iter()
        .map(|(chi, c)| json!({"character": character_to_json(chi), "re": c.re, "im": c.im}))
        .collect();
    json!({"group": group_to_json(s.group()), "terms": terms})
}

pub fn spectrum_from_json(v: &Value) -> IoResult<Spectrum> {
    let group = group_from_json(field(v, "", "group")?, ".group")?;
    let mut s = Spectrum::empty(group);
    for (i, t) in as_array(field(v, "", "terms")?, ".terms")?.iter().enumerate() {
        let path = format!(".terms[{i}]");
        let chi = character_from_json(field(t, &path, "character")?, group, &format!("{path}.character"))?;
        s.add_term(chi, coefficient(t, &path)?).map_err(domain(path))?;
    }
    Ok(s)
}

// ---- automorphisms and operators ----

pub fn automorphism_to_json(a: &Automorphism) -> Value {
    match a {
        Automorphism::UnimodMatrix(m) => json!({"family": "unimod_matrix", "matrix": m.rows()}),
        Automorphism::LowerUnitriangular(m) => {
            let mut entries = Vec::new();
            for i in 0..m.dim() {
                for j in 0..i {
                    if m.get(i, j) != 0 {
                        entries.push(json!([i + 1, j + 1, m.get(i, j)]));
                    }
                }
            }
            json!({"family": "lower_unitriangular", "dim": m.dim(), "entries": entries})
        }
        Automorphism::TwoDiagonal { entries, inverted } => {
            let e: Vec<Value> = entries.iter().map(|(k, v)| json!([k, v])).collect();
            json!({"family": "two_diagonal", "entries": e, "inverted": inverted})
        }
        Automorphism::SigmaU { u, inverted } => json!({"family": "sigma_u", "u": u, "inverted": inverted}),
        Automorphism::RationalScale(q) => json!({"family": "rational_scale", "q": rational_to_json(q)}),
        Automorphism::CoordinateFlip(s) => json!({"family": "coordinate_flip", "signs": s}),
    }
}

fn matrix_from_json(v: &Value, path: &str) -> IoResult<Vec<Vec<i64>>> {
    as_array(v, path)?.iter().enumerate().map(|(i, r)| i64_list(r, &format!("{path}[{i}]"))).collect()
}

pub fn automorphism_from_json(v: &Value, path: &str) -> IoResult<Automorphism> {
    let family =
        field(v, path, "family")?.as_str().ok_or_else(|| invalid(format!("{path}.family"), "expected a string"))?;
    match family {
        "unimod_matrix" => {
            let rows = matrix_from_json(field(v, path, "matrix")?, &format!("{path}.matrix"))?;
            Automorphism::unimod_matrix(rows).map_err(domain(format!("{path}.matrix")))
        }
        "lower_unitriangular" => {
            let e_path = format!("{path}.entries");
            if let Some(rows) = v.get("matrix") {
                let rows = matrix_from_json(rows, &format!("{path}.matrix"))?;
                return Automorphism::lower_unitriangular_from_matrix(rows).map_err(domain(format!("{path}.matrix")));
            }
            let dim = as_u64(field(v, path, "dim")?, &format!("{path}.dim"))? as usize;
            let mut entries = Vec::new();
            for (i, e) in as_array(field(v, path, "entries")?, &e_path)?.iter().enumerate() {
                let triple = i64_list(e, &format!("{e_path}[{i}]"))?;
                if triple.len() != 3 || triple[0] < 1 || triple[1] < 1 {
                    return Err(invalid(format!("{e_path}[{i}]"), "expected [row >= 1, col >= 1, value]"));
                }
                entries.push((triple[0] as usize, triple[1] as usize, triple[2]));
            }
            Automorphism::lower_unitriangular(dim, &entries).map_err(domain(e_path))
        }
        "two_diagonal" => {
            let e_path = format!("{path}.entries");
            let mut entries = Vec::new();
            for (i, e) in as_array(field(v, path, "entries")?, &e_path)?.iter().enumerate() {
                let pair = i64_list(e, &format!("{e_path}[{i}]"))?;
                if pair.len() != 2 || pair[0] < 0 {
                    return Err(invalid(format!("{e_path}[{i}]"), "expected [k, value]"));
                }
                entries.push((pair[0] as usize, pair[1]));
            }
            let a = Automorphism::two_diagonal(entries).map_err(domain(e_path))?;
            let inverted = as_bool_or(v.get("inverted"), &format!("{path}.inverted"), false)?;
            Ok(if inverted { a.invert() } else { a })
        }
        "sigma_u" => {
            let u = i64_list(field(v, path, "u")?, &format!("{path}.u"))?;
            let a = Automorphism::sigma_u(u).map_err(domain(format!("{path}.u")))?;
            let inverted = as_bool_or(v.get("inverted"), &format!("{path}.inverted"), false)?;
            Ok(if inverted { a.invert() } else { a })
        }
        "rational_scale" => {
            let q = rational_from_json(field(v, path, "q")?, &format!("{path}.q"))?;
            Automorphism::rational_scale_big(q).map_err(domain(format!("{path}.q")))
        }
        "coordinate_flip" => {
            let s_path = format!("{path}.signs");
            let signs = i64_list(field(v, path, "signs")?, &s_path)?
                .into_iter()
                .map(|s| i8::try_from(s).map_err(|_| invalid(&s_path, "signs must be +1 or -1")))
                .collect::<IoResult<Vec<i8>>>()?;
            Automorphism::coordinate_flip(signs).map_err(domain(s_path))
        }
        other => Err(invalid(format!("{path}.family"), format!("unknown automorphism family {other:?}"))),
    }
}

/// Operator documents store the dual-side maps; terms built from a spatial
/// matrix are written back with `side: "dual"` and the derived map.
pub fn operator_to_json(h: &HausdorffOperator) -> Value {
    let terms: Vec<Value> = h
        .terms()
        .iter()
        .map(|t| {
            json!({
                "re": t.weight.re,
                "im": t.weight.im,
                "side": "dual",
                "automorphism": automorphism_to_json(&t.map),
            })
        })
        .collect();
    json!({"group": group_to_json(h.group()), "terms": terms})
}

pub fn operator_from_json(v: &Value) -> IoResult<HausdorffOperator> {
    let group = group_from_json(field(v, "", "group")?, ".group")?;
    let mut terms = Vec::new();
    for (i, t) in as_array(field(v, "", "terms")?, ".terms")?.iter().enumerate() {
        let path = format!(".terms[{i}]");
        let weight = coefficient(t, &path)?;
        let side = match t.get("side") {
            None => "dual",
            Some(s) => s.as_str().ok_or_else(|| invalid(format!("{path}.side"), "expected a string"))?,
        };
        let a_path = format!("{path}.automorphism");
        let map = automorphism_from_json(field(t, &path, "automorphism")?, &a_path)?;
        let term = match side {
            "dual" => Term { weight, map, provenance: Provenance::Dual },
            "spatial_matrix" => {
                let m: IntMatrix = map
                    .as_matrix()
                    .ok_or_else(|| invalid(&a_path, "side \"spatial_matrix\" needs a unimod_matrix or lower_unitriangular map"))?;
                Term::from_spatial_matrix(weight, &m).map_err(domain(&a_path))?
            }
            other => return Err(invalid(format!("{path}.side"), format!("expected \"dual\" or \"spatial_matrix\", got {other:?}"))),
        };
        terms.push(term);
    }
    HausdorffOperator::new(group, terms).map_err(domain(".terms"))
}

// ---- Dirichlet data ----

pub fn dirichlet_to_json(d: &DirichletPolynomial) -> Value {
    let coeffs: Vec<Value> = d.iter().map(|(n, a)| json!({"n": n, "re": a.re, "im": a.im})).collect();
    json!({"n_max": d.n_max(), "coeffs": coeffs})
}

pub fn dirichlet_from_json(v: &Value) -> IoResult<DirichletPolynomial> {
    let n_max = match v.get("n_max") {
        None => LIMIT,
        Some(x) => as_u64(x, ".n_max")?,
    };
    let mut d = DirichletPolynomial::new(n_max).map_err(domain(".n_max"))?;
    for (i, c) in as_array(field(v, "", "coeffs")?, ".coeffs")?.iter().enumerate() {
        let path = format!(".coeffs[{i}]");
        let n = as_u64(field(c, &path, "n")?, &format!("{path}.n"))?;
        d.add(n, coefficient(c, &path)?).map_err(domain(format!("{path}.n")))?;
    }
    Ok(d)
}

/// `sigma_u` weights from an operator document on `z_inf_lex` whose terms
/// are all forward `sigma_u` maps.
pub fn sigma_weights_from_json(v: &Value) -> IoResult<Vec<(Vec<i64>, Complex64)>> {
    let h = operator_from_json(v)?;
    if h.group() != DualGroup::ZInfLex {
        return Err(IoError::Domain {
            field: ".group".into(),
            source: Error::GroupMismatch { left: DualGroup::ZInfLex, right: h.group() },
        });
    }
    h.terms()
        .iter()
        .enumerate()
        .map(|(i, t)| match &t.map {
            Automorphism::SigmaU { u, inverted: false } => Ok((u.clone(), t.weight)),
            other => Err(invalid(
                format!(".terms[{i}].automorphism"),
                format!("expected a forward sigma_u map, got {}", other.family_name()),
            )),
        })
        .collect()
}

#[derive(Serialize, Deserialize)]
struct RootTerm {
    q: u64,
    re: f64,
    #[serde(default)]
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct RootConfig {
    terms: Vec<RootTerm>,
}

pub fn root_weights_from_json(v: &Value) -> IoResult<Vec<(u64, Complex64)>> {
    let cfg: RootConfig = serde_json::from_value(v.clone()).map_err(|e| invalid(".terms", e.to_string()))?;
    Ok(cfg.terms.into_iter().map(|t| (t.q, Complex64::new(t.re, t.im))).collect())
}

pub fn root_weights_to_json(weights: &[(u64, Complex64)]) -> Value {
    let merged: BTreeMap<u64, Complex64> = weights.iter().fold(BTreeMap::new(), |mut m, &(q, w)| {
        *m.entry(q).or_insert(Complex64::new(0.0, 0.0)) += w;
        m
    });
    let cfg = RootConfig { terms: merged.into_iter().map(|(q, w)| RootTerm { q, re: w.re, im: w.im }).collect() };
    serde_json::to_value(cfg).expect("serializable")
}
