//! Structured verdicts. A certificate records the inputs of a check, a
//! pass/fail/inconclusive verdict, witnesses, explicit assumptions, and an
//! ordered trace of sub-checks. Serialization is deterministic and
//! round-trips bit-exactly, so certificates can be re-checked byte for byte.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::Result;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

/// Status of a single sub-check. `Attested` marks facts taken as input with
/// provenance rather than computed; they are listed separately and never
/// silently merged with computed facts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Attested,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub id: String,
    pub status: CheckStatus,
    pub detail: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub schema_version: u32,
    pub check_id: String,
    pub inputs: Value,
    pub verdict: Verdict,
    pub witnesses: Vec<Value>,
    pub assumptions: Vec<String>,
    pub trace: Vec<TraceStep>,
    pub tool_version: String,
}

impl Certificate {
    pub fn new(check_id: impl Into<String>, inputs: Value) -> Self {
        Certificate {
            schema_version: SCHEMA_VERSION,
            check_id: check_id.into(),
            inputs,
            verdict: Verdict::Inconclusive,
            witnesses: Vec::new(),
            assumptions: Vec::new(),
            trace: Vec::new(),
            tool_version: crate::TOOL_VERSION.to_string(),
        }
    }

    pub fn step(&mut self, id: impl Into<String>, status: CheckStatus, detail: Value) {
        self.trace.push(TraceStep {
            id: id.into(),
            status,
            detail,
        });
    }

    pub fn pass_step(&mut self, id: impl Into<String>, ok: bool, detail: Value) {
        self.step(
            id,
            if ok { CheckStatus::Pass } else { CheckStatus::Fail },
            detail,
        );
    }

    pub fn witness(&mut self, w: Value) {
        self.witnesses.push(w);
    }

    pub fn assume(&mut self, a: impl Into<String>) {
        self.assumptions.push(a.into());
    }

    /// Overall verdict: fail if any sub-check failed, otherwise inconclusive
    /// if any sub-check was inconclusive, otherwise pass.
    pub fn finalize(mut self) -> Self {
        let any_fail = self.trace.iter().any(|t| t.status == CheckStatus::Fail);
        let any_inconclusive = self
            .trace
            .iter()
            .any(|t| t.status == CheckStatus::Inconclusive);
        self.verdict = if any_fail {
            Verdict::Fail
        } else if any_inconclusive {
            Verdict::Inconclusive
        } else {
            Verdict::Pass
        };
        self
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// One-line human summary.
    pub fn summary_line(&self) -> String {
        let v = match self.verdict {
            Verdict::Pass => "pass",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "inconclusive",
        };
        format!("[{v}] {}", self.check_id)
    }
}
