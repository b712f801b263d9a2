//! Versioned run reports, as JSON and as text.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

pub const SCHEMA_VERSION: &str = "1.0.0";

/// The JSON schema every report validates against.
pub const SCHEMA: &str = include_str!("../schema/report.schema.json");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Undecided,
    /// The suite does not apply to this kind of structure.
    Skipped,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Undecided => "UNDECIDED",
            Verdict::Skipped => "SKIPPED",
        }
    }

    pub fn from_bool(ok: bool) -> Verdict {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    /// Fail dominates undecided, which dominates pass; skipped is neutral.
    pub fn and(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (Undecided, _) | (_, Undecided) => Undecided,
            (Skipped, x) | (x, Skipped) => x,
            _ => Pass,
        }
    }
}

impl From<shlie_core::shell::Status> for Verdict {
    fn from(s: shlie_core::shell::Status) -> Self {
        use shlie_core::shell::Status;
        match s {
            Status::Pass => Verdict::Pass,
            Status::Fail => Verdict::Fail,
            Status::Undecided => Verdict::Undecided,
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ConfigEcho {
    pub input: String,
    pub suites: Vec<String>,
    pub arity_cap: usize,
    pub jet_order: usize,
    pub ideal_degree: u32,
    pub jobs: Option<usize>,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct StructureEcho {
    pub kind: String,
    pub name: String,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct SuiteResult {
    pub suite: String,
    pub status: Verdict,
    pub summary: String,
    /// Wall time; the only field allowed to differ between equal runs.
    pub elapsed_ms: u64,
    pub details: Value,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Report {
    pub schema_version: String,
    pub tool: String,
    pub tool_version: String,
    pub config: ConfigEcho,
    pub structure: StructureEcho,
    pub suites: Vec<SuiteResult>,
    pub status: Verdict,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} ({})", self.structure.name, self.structure.kind);
        for s in &self.suites {
            let _ = writeln!(out, "  {:<13} {:<9} {}", s.suite, s.status.label(), s.summary);
        }
        let _ = writeln!(out, "overall: {}", self.status.label());
        out
    }

    /// 0 pass, 1 some failure, 2 nothing failed but something was undecided.
    pub fn exit_code(&self) -> i32 {
        match self.status {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Undecided | Verdict::Skipped => 2,
        }
    }
}

/// Drop timing fields so two runs can be compared byte for byte.
pub fn without_timing(json: &str) -> String {
    let mut v: Value = serde_json::from_str(json).expect("valid report");
    if let Some(suites) = v.get_mut("suites").and_then(Value::as_array_mut) {
        for s in suites {
            if let Some(o) = s.as_object_mut() {
                o.remove("elapsed_ms");
            }
        }
    }
    serde_json::to_string_pretty(&v).expect("valid json")
}
