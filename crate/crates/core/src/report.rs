//! Machine-readable verification outcomes and the CSV summary.

use crate::rational::{fmt_q, Rational};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    /// The check's hypotheses were not met; nothing was claimed.
    PreconditionUnmet,
    /// Empirical or asymptotic quantity, recorded without a verdict.
    ReportOnly,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::PreconditionUnmet => "precondition-unmet",
            Status::ReportOnly => "report-only",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quantity {
    pub name: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    /// Stable identifier of the claim being checked.
    pub anchor: String,
    /// Which instance of the claim (candidate index, trial number, ...).
    pub case: String,
    pub status: Status,
    pub quantities: Vec<Quantity>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<u64>,
}

impl VerificationReport {
    pub fn new(suite: &str, anchor: &str, case: impl Into<String>, status: Status) -> Self {
        VerificationReport {
            suite: suite.to_string(),
            anchor: anchor.to_string(),
            case: case.into(),
            status,
            quantities: Vec::new(),
            notes: Vec::new(),
            seed: None,
            runtime_ms: None,
        }
    }

    /// Records an exact quantity as `"p/q"`.
    pub fn q(mut self, name: &str, value: &Rational) -> Self {
        self.quantities.push(Quantity {
            name: name.to_string(),
            value: fmt_q(value),
        });
        self
    }

    /// Records a non-rational quantity (counts, flags, fractions as text).
    pub fn text(mut self, name: &str, value: impl fmt::Display) -> Self {
        self.quantities.push(Quantity {
            name: name.to_string(),
            value: value.to_string(),
        });
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.quantities
            .iter()
            .find(|q| q.name == name)
            .map(|q| q.value.as_str())
    }
}

/// Deterministic report order: suite name, then the order checks were made.
pub fn sort_reports(reports: &mut [VerificationReport]) {
    reports.sort_by(|a, b| a.suite.cmp(&b.suite));
}

pub fn any_failed(reports: &[VerificationReport]) -> bool {
    reports.iter().any(|r| r.status == Status::Fail)
}

pub const CSV_HEADER: &str = "suite,anchor,case,status,quantities";

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// One row per report; quantities joined as `name=value;...`.
pub fn summary_csv(reports: &[VerificationReport]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in reports {
        let qs: Vec<String> = r
            .quantities
            .iter()
            .map(|q| format!("{}={}", q.name, q.value))
            .collect();
        let row = [
            csv_field(&r.suite),
            csv_field(&r.anchor),
            csv_field(&r.case),
            r.status.to_string(),
            csv_field(&qs.join(";")),
        ];
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Reports as a pretty JSON array with a trailing newline.
pub fn reports_to_json(reports: &[VerificationReport]) -> String {
    let mut s = serde_json::to_string_pretty(reports).expect("reports serialize");
    s.push('\n');
    s
}

pub fn reports_from_json(text: &str) -> Result<Vec<VerificationReport>, serde_json::Error> {
    serde_json::from_str(text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn empty_summary_is_just_the_header() {
        assert_eq!(summary_csv(&[]), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn summary_rows_carry_exact_values() {
        let r = VerificationReport::new("kyfan", "ky-fan-metric", "0", Status::Pass)
            .q("d", &q(1, 8))
            .text("trials", 3);
        let csv = summary_csv(&[r]);
        assert!(csv.ends_with("kyfan,ky-fan-metric,0,pass,d=1/8;trials=3\n"));
    }

    #[test]
    fn json_round_trip() {
        let r = VerificationReport::new("s", "a", "c", Status::ReportOnly)
            .q("x", &q(-2, 3))
            .note("n")
            .with_seed(4);
        let text = reports_to_json(&[r.clone()]);
        assert!(text.contains("\"report-only\"") && text.contains("\"-2/3\""));
        assert_eq!(reports_from_json(&text).unwrap(), vec![r]);
    }
}
