//! Canonical JSON and CSV forms of a generator set.
//!
//! Keys are sorted and every float is written as `{:.16e}` (17 significant
//! digits), so a parsed file re-serializes to the same bytes.

use std::io;

use num_complex::Complex64;
use serde_json::ser::Formatter;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::atypical::RotationRecord;
use crate::genrep::{Convention, GeneratorSet};
use crate::gzbasis::{enumerate_basis, GZPattern, TopRow};
use crate::qarith::{QKind, QPoint, UnityOrder};
use crate::sparse::SparseMatrix;
use crate::verify::VerificationReport;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("stored basis differs from the enumeration of its top row")]
    BasisMismatch,
}

fn schema(msg: impl Into<String>) -> IoError {
    IoError::Schema(msg.into())
}

/// Compact output with floats in fixed scientific notation.
struct CanonicalFormatter;

impl Formatter for CanonicalFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

/// Serialize any value canonically. Object keys come out sorted because
/// `serde_json::Map` is ordered.
pub fn canonical_string(value: &Value) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, CanonicalFormatter);
    serde::Serialize::serialize(value, &mut ser).expect("serializing a Value cannot fail");
    String::from_utf8(out).expect("JSON is UTF-8")
}

fn float(x: f64) -> Value {
    // integral floats must stay floats, not collapse to integers
    Value::Number(serde_json::Number::from_f64(x).expect("finite float"))
}

/// A generator set together with the free-form report stored next to it.
#[derive(Debug, Clone)]
pub struct Document {
    pub generators: GeneratorSet,
    pub report: Value,
}

impl Document {
    pub fn new(generators: GeneratorSet, report: Value) -> Self {
        Self { generators, report }
    }

    pub fn to_value(&self) -> Value {
        let g = &self.generators;
        let q = match g.q.kind() {
            QKind::RootOfUnity(m) => json!({"kind": "root", "m": m.get()}),
            QKind::Generic => json!({"kind": "generic", "m": null}),
        };
        let mut q = q.as_object().cloned().expect("object literal");
        q.insert("re".into(), float(g.q.value().re));
        q.insert("im".into(), float(g.q.value().im));

        let triplets = |m: &SparseMatrix| -> Value {
            Value::Array(
                m.iter()
                    .map(|(r, c, v)| Value::Array(vec![r.into(), c.into(), float(v.re), float(v.im)]))
                    .collect(),
            )
        };
        let mut gens = Map::new();
        for l in 0..g.levels() {
            gens.insert(format!("e{}", l + 1), triplets(&g.e[l]));
            gens.insert(format!("f{}", l + 1), triplets(&g.f[l]));
        }
        let k: Map<String, Value> = g
            .k_exponents
            .iter()
            .enumerate()
            .map(|(l, h)| (format!("k{}", l + 1), json!(h)))
            .collect();
        gens.insert("k_exponents".into(), Value::Object(k));

        json!({
            "algebra": format!("sl({})", g.basis.rank()),
            "q": Value::Object(q),
            "convention": g.convention.as_str(),
            "basis": g.basis.states().iter().map(|p| json!(p.rows())).collect::<Vec<_>>(),
            "generators": Value::Object(gens),
            "report": self.report,
        })
    }

    pub fn to_canonical_json(&self) -> String {
        canonical_string(&self.to_value())
    }

    pub fn from_json(text: &str) -> Result<Self, IoError> {
        Self::from_value(&serde_json::from_str(text)?)
    }

    pub fn from_value(v: &Value) -> Result<Self, IoError> {
        let obj = v.as_object().ok_or_else(|| schema("top level must be an object"))?;
        let field = |k: &str| obj.get(k).ok_or_else(|| schema(format!("missing key {k:?}")));

        let states: Vec<GZPattern> = serde_json::from_value(field("basis")?.clone())?;
        let first = states.first().ok_or_else(|| schema("empty basis"))?;
        let top = TopRow::new(first.top().to_vec()).map_err(|e| schema(e.to_string()))?;
        let basis = enumerate_basis(&top);
        if basis.states() != states.as_slice() {
            return Err(IoError::BasisMismatch);
        }
        let algebra = field("algebra")?.as_str().ok_or_else(|| schema("algebra must be a string"))?;
        if algebra != format!("sl({})", top.rank()) {
            return Err(schema(format!("algebra {algebra:?} does not match a top row of length {}", top.rank())));
        }

        let qv = field("q")?;
        let part = |k: &str| qv.get(k).and_then(Value::as_f64).ok_or_else(|| schema(format!("q.{k} must be a number")));
        let value = Complex64::new(part("re")?, part("im")?);
        let q = match qv.get("kind").and_then(Value::as_str) {
            Some("root") => {
                let m = qv
                    .get("m")
                    .and_then(Value::as_u64)
                    .and_then(|m| u32::try_from(m).ok())
                    .ok_or_else(|| schema("q.m must be an integer for a root"))?;
                let order = UnityOrder::new(m).map_err(|e| schema(e.to_string()))?;
                let q = QPoint::root_of_unity(order);
                if q.value() != value {
                    return Err(schema(format!("q value does not match the root of order {m}")));
                }
                q
            }
            Some("generic") => {
                if (value.norm() - 1.0).abs() > 1e-12 {
                    return Err(schema("generic q must lie on the unit circle"));
                }
                QPoint::generic_from_value(value).map_err(|e| schema(e.to_string()))?
            }
            _ => return Err(schema("q.kind must be \"root\" or \"generic\"")),
        };

        let convention = field("convention")?
            .as_str()
            .and_then(Convention::parse)
            .ok_or_else(|| schema("unknown convention"))?;

        let gens = field("generators")?;
        let n = basis.len();
        let levels = top.rank() - 1;
        let matrix = |key: String| -> Result<SparseMatrix, IoError> {
            let rows: Vec<(usize, usize, f64, f64)> = serde_json::from_value(
                gens.get(&key).cloned().ok_or_else(|| schema(format!("missing generator {key}")))?,
            )?;
            let mut m = SparseMatrix::zeros(n);
            for (r, c, re, im) in rows {
                if r >= n || c >= n {
                    return Err(schema(format!("{key} entry ({r}, {c}) outside dimension {n}")));
                }
                m.set(r, c, Complex64::new(re, im));
            }
            Ok(m)
        };
        let e = (1..=levels).map(|l| matrix(format!("e{l}"))).collect::<Result<Vec<_>, _>>()?;
        let f = (1..=levels).map(|l| matrix(format!("f{l}"))).collect::<Result<Vec<_>, _>>()?;
        let kx = gens.get("k_exponents").ok_or_else(|| schema("missing k_exponents"))?;
        let k_exponents = (1..=levels)
            .map(|l| -> Result<Vec<i64>, IoError> {
                let h: Vec<i64> = serde_json::from_value(
                    kx.get(format!("k{l}")).cloned().ok_or_else(|| schema(format!("missing k{l}")))?,
                )?;
                if h.len() != n {
                    return Err(schema(format!("k{l} has {} entries, expected {n}", h.len())));
                }
                Ok(h)
            })
            .collect::<Result<Vec<_>, _>>()?;

        Ok(Self {
            generators: GeneratorSet {
                basis,
                q,
                convention,
                e,
                f,
                k_exponents,
                rotation: None,
            },
            report: obj.get("report").cloned().unwrap_or(Value::Object(Map::new())),
        })
    }
}

fn complex_pair(z: Complex64) -> Value {
    Value::Array(vec![float(z.re), float(z.im)])
}

/// JSON form of a verification report.
pub fn report_value(r: &VerificationReport) -> Value {
    let residuals: Map<String, Value> = r.residuals.iter().map(|(k, v)| (k.clone(), float(*v))).collect();
    json!({
        "passed": r.passed,
        "tolerance": float(r.tolerance),
        "max_residual": float(r.max_residual()),
        "residuals": Value::Object(residuals),
        "invariant_dims": r.invariant_dims,
        "singular_vectors": r
            .singular_vectors
            .iter()
            .map(|v| Value::Array(v.iter().copied().map(complex_pair).collect()))
            .collect::<Vec<_>>(),
    })
}

/// JSON form of the rotation and orientation gauge of a modified basis.
pub fn gauge_value(g: &GeneratorSet, rec: &RotationRecord) -> Value {
    let pattern = |i: usize| json!(g.basis.state(i).rows());
    json!({
        "pairs": rec.pairs.iter().map(|p| json!({
            "lower": pattern(p.lower),
            "upper": pattern(p.upper),
            "center": p.center,
            "orientation": p.orientation,
        })).collect::<Vec<_>>(),
        "sign_choices_explored": rec.sign_choices_explored,
        "sign_budget": rec.sign_budget,
        "divergent_states": rec.divergent_states.iter().map(|(i, c)| json!({
            "pattern": pattern(*i),
            "case": c.to_string(),
        })).collect::<Vec<_>>(),
    })
}

/// Sparse triplets as CSV: `generator,row,col,re,im`; `k_l` is written as its diagonal.
pub fn to_csv(g: &GeneratorSet) -> String {
    let mut out = String::from("generator,row,col,re,im\n");
    let mut line = |name: &str, r: usize, c: usize, z: Complex64| {
        out.push_str(&format!("{name},{r},{c},{:.16e},{:.16e}\n", z.re, z.im));
    };
    for l in 0..g.levels() {
        for (r, c, v) in g.e[l].iter() {
            line(&format!("e{}", l + 1), r, c, v);
        }
        for (r, c, v) in g.f[l].iter() {
            line(&format!("f{}", l + 1), r, c, v);
        }
        for (s, z) in g.k_diagonal(l + 1).into_iter().enumerate() {
            line(&format!("k{}", l + 1), s, s, z);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atypical::build_atypical_sl3;
    use crate::genrep::{build_flat_sl3, build_generic_rep};
    use crate::verify::check_defining_relations;

    fn top(v: &[i64]) -> TopRow {
        TopRow::new(v.to_vec()).unwrap()
    }

    fn round_trip(doc: &Document) {
        let text = doc.to_canonical_json();
        let back = Document::from_json(&text).unwrap();
        assert_eq!(back.to_canonical_json(), text);
    }

    #[test]
    fn floats_use_seventeen_digits() {
        assert_eq!(canonical_string(&json!({"b": 1.0, "a": [0.1, -2.5]})),
            r#"{"a":[1.0000000000000001e-1,-2.5000000000000000e0],"b":1.0000000000000000e0}"#);
    }

    #[test]
    fn round_trips_are_byte_identical() {
        let q = QPoint::generic(0.37).unwrap();
        let g = build_generic_rep(&top(&[4, 2, 1, 0]), &q).unwrap();
        let report = report_value(&check_defining_relations(&g, 1e-9).unwrap());
        round_trip(&Document::new(g, report));
        let m3 = UnityOrder::new(3).unwrap();
        round_trip(&Document::new(build_flat_sl3(&top(&[4, 2, 0]), m3).unwrap(), json!({})));
        let a = build_atypical_sl3(&top(&[5, 2, 0]), m3).unwrap();
        let gauge = gauge_value(&a, a.rotation.as_ref().unwrap());
        round_trip(&Document::new(a, json!({ "gauge": gauge })));
    }

    #[test]
    fn schema_layout() {
        let g = build_flat_sl3(&top(&[4, 2, 0]), UnityOrder::new(3).unwrap()).unwrap();
        let v = Document::new(g, json!({})).to_value();
        assert_eq!(v["algebra"], "sl(3)");
        assert_eq!(v["q"]["kind"], "root");
        assert_eq!(v["q"]["m"], 3);
        assert_eq!(v["convention"], "flat_sl3");
        assert_eq!(v["basis"].as_array().unwrap().len(), 8);
        assert_eq!(v["generators"]["k_exponents"]["k2"].as_array().unwrap().len(), 8);
        assert_eq!(v["generators"]["e1"][0].as_array().unwrap().len(), 4);
    }

    #[test]
    fn rejects_tampered_documents() {
        let g = build_flat_sl3(&top(&[4, 2, 0]), UnityOrder::new(3).unwrap()).unwrap();
        let mut v = Document::new(g, json!({})).to_value();
        v["basis"].as_array_mut().unwrap().swap(0, 1);
        assert!(matches!(Document::from_value(&v), Err(IoError::BasisMismatch)));
        assert!(matches!(Document::from_json("{"), Err(IoError::Json(_))));
        assert!(matches!(Document::from_json("{}"), Err(IoError::Schema(_))));
    }

    #[test]
    fn csv_has_one_line_per_entry() {
        let g = build_flat_sl3(&top(&[4, 2, 0]), UnityOrder::new(3).unwrap()).unwrap();
        let nnz: usize = g.e.iter().chain(&g.f).map(SparseMatrix::nnz).sum();
        let csv = to_csv(&g);
        assert_eq!(csv.lines().count(), 1 + nnz + 2 * g.dim());
        assert!(csv.lines().nth(1).unwrap().starts_with("e1,"));
    }
}
