//! Canonical structured-text files.
//!
//! Documents are JSON with sorted keys, two-space indentation, scalar arrays
//! on one line, and every float written with 17 significant digits, so that
//! serialize, parse, serialize is byte-identical. Complex numbers are
//! `[re, im]` pairs.

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::approx::FittedPolynomial;
use crate::builder::{BudgetLedger, SearchLimits, SeriesTerm, Task, UniversalSeries, Witness};
use crate::curves::CurveFamily;
use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::verify::Certificate;

pub const FORMAT_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Serde adapter writing big naturals as decimal strings.
pub mod big_decimal {
    use num_bigint::BigUint;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(|_| D::Error::custom(format!("{text:?} is not a natural number")))
    }
}

/// Serde adapter for floats that may be infinite; non-finite values become
/// the strings `"inf"`, `"-inf"`, `"nan"`.
pub mod extended_float {
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                _ => Err(D::Error::custom(format!("unexpected float {t:?}"))),
            },
        }
    }
}

fn write_float(out: &mut String, x: f64) {
    out.push_str(&format!("{x:.16e}"));
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else {
                write_float(out, n.as_f64().expect("finite json number"));
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("string serializes")),
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) if items.iter().all(is_scalar) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_value(out, item, indent);
            }
            out.push(']');
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                push_indent(out, indent + 1);
                write_value(out, item, indent + 1);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            push_indent(out, indent);
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            // serde_json's default map is a BTreeMap, so keys come out sorted.
            out.push_str("{\n");
            for (i, (key, item)) in map.iter().enumerate() {
                push_indent(out, indent + 1);
                out.push_str(&serde_json::to_string(key).expect("key serializes"));
                out.push_str(": ");
                write_value(out, item, indent + 1);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            push_indent(out, indent);
            out.push('}');
        }
    }
}

fn push_indent(out: &mut String, level: usize) {
    for _ in 0..level {
        out.push_str("  ");
    }
}

/// Canonical text of a JSON value, newline-terminated.
pub fn canonical_value(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v, 0);
    out.push('\n');
    out
}

pub fn to_canonical<T: Serialize>(x: &T) -> Result<String> {
    Ok(canonical_value(&serde_json::to_value(x)?))
}

pub fn from_text<T: DeserializeOwned>(text: &str) -> Result<T> {
    Ok(serde_json::from_str(text)?)
}

/// SHA-256 of the canonical form of a config.
pub fn config_hash<T: Serialize>(config: &T) -> Result<String> {
    Ok(hex::encode(Sha256::digest(to_canonical(config)?.as_bytes())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Authority {
    /// Evaluate through the stored Arnoldi recurrence.
    Recurrence,
    /// Evaluate the monomial coefficients with Horner's rule.
    Monomial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recurrence {
    pub p0: f64,
    pub hessenberg: Vec<Vec<Complex64>>,
    pub coeffs: Vec<Complex64>,
}

/// A series term in both representations, with the authoritative one named.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermRecord {
    pub authority: Authority,
    pub degree: usize,
    pub monomial: Option<Vec<Complex64>>,
    pub monomial_reliable: bool,
    pub recurrence: Option<Recurrence>,
}

impl TermRecord {
    pub fn from_term(term: &SeriesTerm) -> Self {
        match term {
            SeriesTerm::Fitted(f) => TermRecord {
                authority: Authority::Recurrence,
                degree: f.degree(),
                monomial: f.monomial.clone(),
                monomial_reliable: f.monomial_reliable,
                recurrence: Some(Recurrence { p0: f.p0, hessenberg: f.hessenberg.clone(), coeffs: f.coeffs.clone() }),
            },
            SeriesTerm::Exact(p) => TermRecord {
                authority: Authority::Monomial,
                degree: p.degree(),
                monomial: Some(p.coeffs().to_vec()),
                monomial_reliable: true,
                recurrence: None,
            },
        }
    }

    pub fn to_term(&self) -> Result<SeriesTerm> {
        match self.authority {
            Authority::Recurrence => {
                let r = self
                    .recurrence
                    .as_ref()
                    .ok_or_else(|| Error::Format("recurrence-authoritative term without recurrence".into()))?;
                let f = FittedPolynomial {
                    p0: r.p0,
                    hessenberg: r.hessenberg.clone(),
                    coeffs: r.coeffs.clone(),
                    monomial: self.monomial.clone(),
                    monomial_reliable: self.monomial_reliable,
                };
                f.validate().map_err(|e| Error::Format(e.to_string()))?;
                Ok(SeriesTerm::Fitted(f))
            }
            Authority::Monomial => {
                let c = self
                    .monomial
                    .as_ref()
                    .ok_or_else(|| Error::Format("monomial-authoritative term without coefficients".into()))?;
                Ok(SeriesTerm::Exact(Polynomial::new(c.clone())))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesFile {
    pub format_version: u32,
    pub tool_version: String,
    pub config_hash: String,
    pub family: CurveFamily,
    pub core_radius: f64,
    pub search: SearchLimits,
    pub tasks: Vec<Task>,
    pub terms: Vec<TermRecord>,
    pub witnesses: Vec<Witness>,
    pub ledger: BudgetLedger,
}

impl SeriesFile {
    pub fn new(series: &UniversalSeries, config_hash: String) -> Self {
        SeriesFile {
            format_version: FORMAT_VERSION,
            tool_version: TOOL_VERSION.to_string(),
            config_hash,
            family: series.family.clone(),
            core_radius: series.core_radius,
            search: series.search,
            tasks: series.tasks.clone(),
            terms: series.terms.iter().map(TermRecord::from_term).collect(),
            witnesses: series.witnesses.clone(),
            ledger: series.ledger.clone(),
        }
    }

    pub fn to_series(&self) -> Result<UniversalSeries> {
        Ok(UniversalSeries {
            terms: self.terms.iter().map(TermRecord::to_term).collect::<Result<Vec<_>>>()?,
            witnesses: self.witnesses.clone(),
            ledger: self.ledger.clone(),
            family: self.family.clone(),
            tasks: self.tasks.clone(),
            core_radius: self.core_radius,
            search: self.search,
        })
    }

    /// Parses a series file; a different tool version is refused unless
    /// `allow_version_mismatch` is set.
    pub fn parse(text: &str, allow_version_mismatch: bool) -> Result<Self> {
        let file: SeriesFile = from_text(text)?;
        if file.format_version != FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported format version {}", file.format_version)));
        }
        if file.tool_version != TOOL_VERSION && !allow_version_mismatch {
            return Err(Error::Format(format!(
                "series written by tool version {}, this is {TOOL_VERSION}",
                file.tool_version
            )));
        }
        Ok(file)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateFile {
    pub format_version: u32,
    pub tool_version: String,
    pub config_hash: String,
    pub certificates: Vec<Certificate>,
}

impl CertificateFile {
    pub fn new(certificates: Vec<Certificate>, config_hash: String) -> Self {
        CertificateFile { format_version: FORMAT_VERSION, tool_version: TOOL_VERSION.to_string(), config_hash, certificates }
    }

    pub fn all_pass(&self) -> bool {
        self.certificates.iter().all(|c| c.pass)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn floats_carry_17_digits() {
        let text = canonical_value(&json!({"b": 0.1, "a": [1, -2.5], "c": {"z": null, "y": "x"}}));
        assert_eq!(
            text,
            "{\n  \"a\": [1, -2.5000000000000000e0],\n  \"b\": 1.0000000000000001e-1,\n  \"c\": {\n    \"y\": \"x\",\n    \"z\": null\n  }\n}\n"
        );
        let back: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(canonical_value(&back), text);
    }

    #[test]
    fn float_round_trip_is_exact() {
        for x in [std::f64::consts::PI, 1e-300, -0.0, 5e-324, f64::MAX, 1.0 / 3.0] {
            let text = canonical_value(&json!(x));
            let back: f64 = serde_json::from_str(&text).unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{x}");
        }
    }

    #[test]
    fn exact_term_round_trip() {
        let p = Polynomial::new(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, -0.5)]);
        let rec = TermRecord::from_term(&SeriesTerm::Exact(p.clone()));
        let text = to_canonical(&rec).unwrap();
        let back: TermRecord = from_text(&text).unwrap();
        assert_eq!(back.to_term().unwrap(), SeriesTerm::Exact(p));
        assert_eq!(to_canonical(&back).unwrap(), text);
    }

    #[test]
    fn infinite_errors_survive() {
        #[derive(Serialize, Deserialize)]
        struct W {
            #[serde(with = "extended_float")]
            x: f64,
        }
        let text = to_canonical(&W { x: f64::NEG_INFINITY }).unwrap();
        assert!(text.contains("\"-inf\""));
        let back: W = from_text(&text).unwrap();
        assert_eq!(back.x, f64::NEG_INFINITY);
    }
}
