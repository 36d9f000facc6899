//! JSON and CSV formats.
//!
//! Complex numbers are `[re, im]` pairs; vectors are arrays of pairs and
//! matrices are row-major arrays of rows. State files:
//!
//! ```text
//! E₂ state:       {"n": 2, "c": [re, im], "mu": [...], "A": [[...], ...], "Lambda": [[...], ...]}
//!                 ("n" may be omitted; "c" may be omitted for a normalized state)
//! E₂ operator:    the above plus "alpha", "beta" (instead of "mu") and "B"
//! covariance:     {"m": [[re, im], ...], "S": [[real, ...], ...]}
//! ```
//!
//! Numbers are written with 17 significant digits so that every `f64`
//! survives a write/read round trip exactly; non-finite values become `null`.

use std::io::Write;

use serde_json::{json, Map, Value};

use crate::fock::{Basis, TruncatedOperator, TruncatedVector};
use crate::params::{CovarianceParams, E2Params, GeneralE2Params};
use crate::tomography::{EstimationReport, MeasurementKind, MeasurementRecord, MeasurementSpec};
use crate::{C64, CMat, CVec, Error, RMat, Result};

fn parse_err(field: &str, message: impl Into<String>) -> Error {
    Error::Parse { field: field.to_string(), message: message.into() }
}

/// Parses JSON text; syntax errors name the line and column.
pub fn parse(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| parse_err("<document>", e.to_string()))
}

fn field<'a>(obj: &'a Value, name: &str) -> Result<&'a Value> {
    obj.get(name).ok_or_else(|| parse_err(name, "missing field"))
}

fn real(v: &Value, path: &str) -> Result<f64> {
    v.as_f64().ok_or_else(|| parse_err(path, format!("expected a number, found {v}")))
}

fn complex(v: &Value, path: &str) -> Result<C64> {
    match v {
        Value::Array(pair) if pair.len() == 2 => {
            Ok(C64::new(real(&pair[0], &format!("{path}[0]"))?, real(&pair[1], &format!("{path}[1]"))?))
        }
        Value::Number(_) => Ok(C64::new(real(v, path)?, 0.0)),
        _ => Err(parse_err(path, format!("expected [re, im], found {v}"))),
    }
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| parse_err(path, format!("expected an array, found {v}")))
}

fn complex_vector(v: &Value, path: &str, n: Option<usize>) -> Result<CVec> {
    let items = array(v, path)?;
    if let Some(n) = n {
        if items.len() != n {
            return Err(parse_err(path, format!("expected {n} entries, found {}", items.len())));
        }
    }
    let z = items.iter().enumerate().map(|(i, x)| complex(x, &format!("{path}[{i}]"))).collect::<Result<Vec<_>>>()?;
    Ok(CVec::from_vec(z))
}

fn matrix_rows<T>(v: &Value, path: &str, n: usize, m: usize, entry: impl Fn(&Value, &str) -> Result<T>) -> Result<Vec<Vec<T>>> {
    let rows = array(v, path)?;
    if rows.len() != n {
        return Err(parse_err(path, format!("expected {n} rows, found {}", rows.len())));
    }
    rows.iter()
        .enumerate()
        .map(|(i, row)| {
            let p = format!("{path}[{i}]");
            let cols = array(row, &p)?;
            if cols.len() != m {
                return Err(parse_err(&p, format!("expected {m} columns, found {}", cols.len())));
            }
            cols.iter().enumerate().map(|(j, x)| entry(x, &format!("{p}[{j}]"))).collect()
        })
        .collect()
}

fn complex_matrix(v: &Value, path: &str, n: usize) -> Result<CMat> {
    let rows = matrix_rows(v, path, n, n, complex)?;
    Ok(CMat::from_fn(n, n, |i, j| rows[i][j]))
}

fn real_matrix(v: &Value, path: &str, n: usize) -> Result<RMat> {
    let rows = matrix_rows(v, path, n, n, real)?;
    Ok(RMat::from_fn(n, n, |i, j| rows[i][j]))
}

fn mode_count(obj: &Value, fallback: &str) -> Result<usize> {
    match obj.get("n") {
        Some(v) => v.as_u64().map(|n| n as usize).ok_or_else(|| parse_err("n", format!("expected a nonnegative integer, found {v}"))),
        None => Ok(array(field(obj, fallback)?, fallback)?.len()),
    }
}

fn positive_c(obj: &Value) -> Result<f64> {
    let c = complex(field(obj, "c")?, "c")?;
    if c.im != 0.0 {
        return Err(parse_err("c", "must be real for a positive operator"));
    }
    Ok(c.re)
}

/// Reads `{"n", "c", "mu", "A", "Lambda"}`. When `c` is absent or `null`
/// the unit-trace normalization is used.
pub fn e2_from_json(obj: &Value) -> Result<E2Params> {
    let n = mode_count(obj, "mu")?;
    let mu = complex_vector(field(obj, "mu")?, "mu", Some(n))?;
    let a = complex_matrix(field(obj, "A")?, "A", n)?;
    let lambda = complex_matrix(field(obj, "Lambda")?, "Lambda", n)?;
    match obj.get("c") {
        None | Some(Value::Null) => E2Params::state(mu, a, lambda, crate::DEFAULT_TOL),
        Some(_) => E2Params::new(positive_c(obj)?, mu, a, lambda),
    }
}

/// Reads `{"n", "c", "alpha", "beta", "A", "Lambda", "B"}`.
pub fn general_from_json(obj: &Value) -> Result<GeneralE2Params> {
    let n = mode_count(obj, "alpha")?;
    GeneralE2Params::new(
        complex(field(obj, "c")?, "c")?,
        complex_vector(field(obj, "alpha")?, "alpha", Some(n))?,
        complex_vector(field(obj, "beta")?, "beta", Some(n))?,
        complex_matrix(field(obj, "A")?, "A", n)?,
        complex_matrix(field(obj, "Lambda")?, "Lambda", n)?,
        complex_matrix(field(obj, "B")?, "B", n)?,
    )
}

/// Reads `{"m", "S"}`, checking the uncertainty relation with `tol`.
pub fn cov_from_json(obj: &Value, tol: f64) -> Result<CovarianceParams> {
    let m = complex_vector(field(obj, "m")?, "m", None)?;
    let s = real_matrix(field(obj, "S")?, "S", 2 * m.len())?;
    CovarianceParams::new(m, s, tol)
}

/// Any of the three file kinds.
#[derive(Clone, Debug)]
pub enum ParamsFile {
    State(E2Params),
    Operator(GeneralE2Params),
    Covariance(CovarianceParams),
}

/// Detects the file kind from its keys (`S` → covariance, `B` → general
/// operator, otherwise E₂ state).
pub fn params_from_json(obj: &Value, tol: f64) -> Result<ParamsFile> {
    if !obj.is_object() {
        return Err(parse_err("<document>", "expected a JSON object"));
    }
    if obj.get("S").is_some() {
        Ok(ParamsFile::Covariance(cov_from_json(obj, tol)?))
    } else if obj.get("B").is_some() {
        Ok(ParamsFile::Operator(general_from_json(obj)?))
    } else {
        Ok(ParamsFile::State(e2_from_json(obj)?))
    }
}

fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

fn cnum(z: C64) -> Value {
    Value::Array(vec![num(z.re), num(z.im)])
}

fn cvec_json(v: &CVec) -> Value {
    Value::Array(v.iter().map(|z| cnum(*z)).collect())
}

fn cmat_json(m: &CMat) -> Value {
    Value::Array((0..m.nrows()).map(|i| Value::Array((0..m.ncols()).map(|j| cnum(m[(i, j)])).collect())).collect())
}

fn rmat_json(m: &RMat) -> Value {
    Value::Array((0..m.nrows()).map(|i| Value::Array((0..m.ncols()).map(|j| num(m[(i, j)])).collect())).collect())
}

pub fn e2_to_json(p: &E2Params) -> Value {
    json!({
        "n": p.n(),
        "c": cnum(C64::new(p.c, 0.0)),
        "mu": cvec_json(&p.mu),
        "A": cmat_json(&p.a),
        "Lambda": cmat_json(&p.lambda),
    })
}

pub fn general_to_json(p: &GeneralE2Params) -> Value {
    json!({
        "n": p.n(),
        "c": cnum(p.c),
        "alpha": cvec_json(&p.alpha),
        "beta": cvec_json(&p.beta),
        "A": cmat_json(&p.a),
        "Lambda": cmat_json(&p.lambda),
        "B": cmat_json(&p.b),
    })
}

pub fn cov_to_json(p: &CovarianceParams) -> Value {
    json!({ "m": cvec_json(&p.m), "S": rmat_json(&p.s) })
}

fn index_json(basis: &Basis) -> Value {
    Value::Array(basis.indices().iter().map(|t| json!(t.0)).collect())
}

/// `{"n", "cutoff", "index": [t, ...], "entries": [[[re, im], ...], ...]}`.
pub fn operator_to_json(op: &TruncatedOperator) -> Value {
    json!({
        "n": op.basis.n(),
        "cutoff": op.cutoff(),
        "index": index_json(&op.basis),
        "entries": cmat_json(&op.entries),
    })
}

/// `{"n", "cutoff", "index": [t, ...], "entries": [[re, im], ...]}`.
pub fn vector_to_json(v: &TruncatedVector) -> Value {
    json!({
        "n": v.basis.n(),
        "cutoff": v.basis.cutoff(),
        "index": index_json(&v.basis),
        "entries": cvec_json(&v.entries),
    })
}

fn tuple(t: &[usize]) -> String {
    format!("({})", t.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(","))
}

fn sig17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        String::new()
    }
}

/// CSV with header `t,tp,re,im`, one row per matrix entry in basis order.
pub fn operator_to_csv(op: &TruncatedOperator) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io_err = |e: csv::Error| Error::Domain(format!("csv: {e}"));
    w.write_record(["t", "tp", "re", "im"]).map_err(io_err)?;
    let idx: Vec<String> = op.basis.indices().iter().map(|t| tuple(&t.0)).collect();
    for (i, ti) in idx.iter().enumerate() {
        for (j, tj) in idx.iter().enumerate() {
            let z = op.entries[(i, j)];
            w.write_record([ti.as_str(), tj.as_str(), &sig17(z.re), &sig17(z.im)]).map_err(io_err)?;
        }
    }
    finish_csv(w)
}

/// CSV with header `t,re,im`.
pub fn vector_to_csv(v: &TruncatedVector) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io_err = |e: csv::Error| Error::Domain(format!("csv: {e}"));
    w.write_record(["t", "re", "im"]).map_err(io_err)?;
    for (t, z) in v.basis.indices().iter().zip(v.entries.iter()) {
        w.write_record([tuple(&t.0).as_str(), &sig17(z.re), &sig17(z.im)]).map_err(io_err)?;
    }
    finish_csv(w)
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Domain(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Domain(format!("csv: {e}")))
}

/// `{"n", "measurements": [{"spec": name, "counts": [...]}, ...]}`.
pub fn records_to_json(records: &[MeasurementRecord]) -> Value {
    json!({
        "n": records.first().map(|r| r.spec.n).unwrap_or(0),
        "measurements": records.iter().map(|r| json!({ "spec": r.spec.kind.name(), "counts": r.counts })).collect::<Vec<_>>(),
    })
}

/// Inverse of [`records_to_json`].
pub fn records_from_json(obj: &Value) -> Result<Vec<MeasurementRecord>> {
    let n = field(obj, "n")?.as_u64().ok_or_else(|| parse_err("n", "expected a nonnegative integer"))? as usize;
    let list = array(field(obj, "measurements")?, "measurements")?;
    list.iter()
        .enumerate()
        .map(|(i, m)| {
            let path = format!("measurements[{i}]");
            let name = m
                .get("spec")
                .and_then(Value::as_str)
                .ok_or_else(|| parse_err(&format!("{path}.spec"), "expected a measurement name"))?;
            let kind = MeasurementKind::parse(name).map_err(|_| parse_err(&format!("{path}.spec"), format!("unknown measurement `{name}`")))?;
            let spec = MeasurementSpec::new(kind, n).map_err(|e| parse_err(&format!("{path}.spec"), e.to_string()))?;
            let counts_path = format!("{path}.counts");
            let counts = array(m.get("counts").ok_or_else(|| parse_err(&counts_path, "missing field"))?, &counts_path)?
                .iter()
                .enumerate()
                .map(|(j, c)| c.as_u64().ok_or_else(|| parse_err(&format!("{counts_path}[{j}]"), "expected a count")))
                .collect::<Result<Vec<_>>>()?;
            if counts.len() != spec.outcomes() {
                return Err(parse_err(&counts_path, format!("expected {} counts, found {}", spec.outcomes(), counts.len())));
            }
            Ok(MeasurementRecord { spec, counts })
        })
        .collect()
}

/// `{"measurements", "estimates", "stderr": {name: se}, "unidentified": [...]}`.
pub fn report_to_json(report: &EstimationReport) -> Value {
    let mut stderr = Map::new();
    for s in &report.table {
        stderr.insert(s.name.clone(), num(s.stderr));
    }
    let estimates = match report.state_params() {
        Ok(p) => e2_to_json(&p),
        Err(_) => general_to_json(&report.estimates),
    };
    json!({
        "measurements": records_to_json(&report.records)["measurements"].clone(),
        "estimates": estimates,
        "stderr": Value::Object(stderr),
        "unidentified": report.unidentified,
    })
}

/// Emits `f64` values with 17 significant digits.
struct Sig17;

impl serde_json::ser::Formatter for Sig17 {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }
}

/// Serializes with 17 significant digits per number.
pub fn to_string(v: &Value) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Sig17);
    serde::Serialize::serialize(v, &mut ser).expect("serializing a Value cannot fail");
    String::from_utf8(out).expect("JSON output is UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let mu = CVec::from_vec(vec![C64::new(0.1, -1.0 / 3.0), C64::new(std::f64::consts::PI, 1e-300)]);
        let a = CMat::from_row_slice(2, 2, &[C64::new(0.1, 0.2), C64::new(0.05, 0.0), C64::new(0.05, 0.0), C64::new(-0.1, 0.0)]);
        let l = CMat::from_row_slice(2, 2, &[C64::new(0.2, 0.0), C64::new(0.01, 0.02), C64::new(0.01, -0.02), C64::new(0.3, 0.0)]);
        let p = E2Params::new(0.123_456_789_012_345_68, mu, a, l).unwrap();
        let text = to_string(&e2_to_json(&p));
        let back = e2_from_json(&parse(&text).unwrap()).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn diagnostics_name_the_field() {
        let v = parse(r#"{"n": 1, "c": [1, 0], "mu": [[0, 0]], "A": [[[0, "x"]]], "Lambda": [[[0, 0]]]}"#).unwrap();
        match e2_from_json(&v) {
            Err(Error::Parse { field, .. }) => assert_eq!(field, "A[0][0][1]"),
            other => panic!("unexpected {other:?}"),
        }
        let v = parse(r#"{"c": [1, 0], "mu": [[0, 0]], "A": [[[0, 0]]]}"#).unwrap();
        assert!(matches!(e2_from_json(&v), Err(Error::Parse { field, .. }) if field == "Lambda"));
    }

    #[test]
    fn non_finite_becomes_null() {
        assert_eq!(to_string(&json!({"x": num(f64::NAN)})), r#"{"x":null}"#);
        assert_eq!(to_string(&json!([0.5])), "[5.0000000000000000e-1]");
    }
}
