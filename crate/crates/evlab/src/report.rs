//! Report documents. Field order is the serialization order; the timing block
//! is always last so that runs can be compared byte for byte without it.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A float that survives JSON: non-finite values become `"inf"`, `"-inf"` or `"nan"`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Real(pub f64);

impl From<f64> for Real {
    fn from(x: f64) -> Self {
        Real(x)
    }
}

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let x = self.0;
        if x.is_finite() {
            s.serialize_f64(x)
        } else if x.is_nan() {
            s.serialize_str("nan")
        } else if x > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }
}

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Real;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or one of \"inf\", \"-inf\", \"nan\"")
            }
            fn visit_f64<E: de::Error>(self, x: f64) -> Result<Real, E> {
                Ok(Real(x))
            }
            fn visit_i64<E: de::Error>(self, x: i64) -> Result<Real, E> {
                Ok(Real(x as f64))
            }
            fn visit_u64<E: de::Error>(self, x: u64) -> Result<Real, E> {
                Ok(Real(x as f64))
            }
            fn visit_str<E: de::Error>(self, s: &str) -> Result<Real, E> {
                match s {
                    "inf" => Ok(Real(f64::INFINITY)),
                    "-inf" => Ok(Real(f64::NEG_INFINITY)),
                    "nan" => Ok(Real(f64::NAN)),
                    _ => Err(E::invalid_value(de::Unexpected::Str(s), &self)),
                }
            }
        }
        d.deserialize_any(V)
    }
}

pub fn reals(xs: &[f64]) -> Vec<Real> {
    xs.iter().copied().map(Real).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdEcho {
    pub eps_cls: Real,
    pub uniform_low: Real,
    pub uniform_high: Real,
    pub divergent_growth: Real,
    pub proximity_fraction: Real,
    pub min_doublings: usize,
    pub singular_sigma: Real,
}

/// Everything that determines a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub command: String,
    pub op: Option<String>,
    pub params: BTreeMap<String, Real>,
    pub edges: Option<String>,
    pub n: Option<usize>,
    pub n_list: Option<Vec<usize>>,
    pub mu_min: Option<Real>,
    pub mu_max: Option<Real>,
    pub steps: Option<usize>,
    pub probe_mu: Option<Real>,
    pub mu: Option<Real>,
    pub suite: Option<String>,
    pub oracle: Option<String>,
    pub seed: Option<u64>,
    pub thresholds: ThresholdEcho,
}

/// One row of the per-μ table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MuRecord {
    pub mu: Real,
    pub sigma_min: Real,
    pub lower_margin: Option<Real>,
    pub upper_margin: Option<Real>,
    pub c_hat: Option<Real>,
    pub classification: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Windows {
    pub right: [Real; 2],
    pub left: [Real; 2],
}

/// A computed verdict next to the continuum prediction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictEntry {
    pub subject: String,
    pub computed: String,
    pub predicted: Option<String>,
    pub consistent: bool,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub elapsed_ms: Real,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub tool: String,
    pub version: String,
    pub config: ConfigEcho,
    pub operator: Option<OperatorInfo>,
    pub records: Vec<MuRecord>,
    pub windows: Option<Windows>,
    pub verdicts: Vec<VerdictEntry>,
    pub citations: Vec<String>,
    /// Command-specific payload.
    pub details: serde_json::Value,
    pub status: String,
    pub timing: Timing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorInfo {
    pub name: String,
    pub grid: String,
    pub n: usize,
    pub dim: usize,
    pub lambda0: Real,
    pub gap: Option<Real>,
    pub m1: u32,
    pub m2: u32,
    pub predicted_max: String,
    pub predicted_antimax: String,
    pub notes: String,
}

impl ReportDocument {
    pub fn new(config: ConfigEcho) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            operator: None,
            records: Vec::new(),
            windows: None,
            verdicts: Vec::new(),
            citations: Vec::new(),
            details: serde_json::Value::Null,
            status: "ok".to_string(),
            timing: Timing { elapsed_ms: Real(0.0) },
        }
    }

    pub fn all_consistent(&self) -> bool {
        self.verdicts.iter().all(|v| v.consistent)
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

/// The JSON text with the trailing timing block removed.
pub fn strip_timing(json: &str) -> &str {
    match json.rfind(",\n  \"timing\"") {
        Some(k) => &json[..k],
        None => json,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_round_trips() {
        let xs = [Real(1.5), Real(f64::INFINITY), Real(f64::NEG_INFINITY), Real(-0.1), Real(1e-300)];
        let s = serde_json::to_string(&xs).unwrap();
        assert_eq!(s, "[1.5,\"inf\",\"-inf\",-0.1,1e-300]");
        let back: Vec<Real> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, xs);
        let nan: Real = serde_json::from_str("\"nan\"").unwrap();
        assert!(nan.0.is_nan());
        assert!(serde_json::from_str::<Real>("\"big\"").is_err());
    }

    #[test]
    fn timing_is_stripped() {
        let s = "{\n  \"a\": 1,\n  \"timing\": {\n    \"elapsed_ms\": 3.0\n  }\n}\n";
        assert_eq!(strip_timing(s), "{\n  \"a\": 1");
    }
}
