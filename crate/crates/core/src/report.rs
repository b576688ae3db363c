//! The JSON envelope shared by every numerical report.

use serde::{Deserialize, Serialize};

use crate::{Error, Result, STRICT_MARGIN, SYM_TOL, WEIGHT_TOL};

pub const REPORT_SCHEMA: &str = "scalent-report-v1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub symmetry: f64,
    pub weight: f64,
    pub strict_margin: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { symmetry: SYM_TOL, weight: WEIGHT_TOL, strict_margin: STRICT_MARGIN }
    }
}

/// A report: what was computed, how, with which seed, and whether the
/// numbers are exact values or bounds/estimates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub kind: String,
    pub tool_version: String,
    pub method: String,
    pub seed: Option<u64>,
    pub exact: bool,
    pub unit: String,
    pub tolerances: Tolerances,
    pub result: serde_json::Value,
}

impl Report {
    pub fn new(kind: &str, method: &str, exact: bool, result: &impl Serialize) -> Result<Report> {
        Ok(Report {
            schema: REPORT_SCHEMA.into(),
            kind: kind.into(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            method: method.into(),
            seed: None,
            exact,
            unit: "nats".into(),
            tolerances: Tolerances::default(),
            result: serde_json::to_value(result).map_err(|e| Error::Value(format!("unserializable report: {e}")))?,
        })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_unit(mut self, unit: &str) -> Self {
        self.unit = unit.into();
        self
    }

    /// Pretty JSON with a trailing newline. Key order is fixed, so equal
    /// reports give equal bytes.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Report> {
        let r: Report = serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })?;
        if r.schema != REPORT_SCHEMA {
            return Err(Error::Value(format!("unsupported report schema '{}'", r.schema)));
        }
        Ok(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_keeps_schema() {
        let r = Report::new("entropy", "exact", true, &vec![1.5, 2.0]).unwrap().with_seed(7);
        let back = Report::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert!(r.to_json().contains("\"schema\": \"scalent-report-v1\""));
        assert!(Report::from_json(&r.to_json().replace("v1", "v0")).is_err());
    }
}
