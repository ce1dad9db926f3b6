//! Machine-readable reports.

use std::time::Duration;

use serde::Serialize;
use sha2::{Digest, Sha256};

use csr_core::analysis::{analyze, AnalysisReport};
use csr_core::productivity::Verdict;
use csr_core::repmap::{canonical_map, mu_delta, ReplacementMap};
use csr_core::term::Trs;
use csr_core::termination::TerminationOutcome;

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Maps {
    pub canonical: ReplacementMap,
    pub delta: Option<ReplacementMap>,
    pub used: Option<ReplacementMap>,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Timings {
    pub total_ms: u128,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Report {
    pub tool_version: &'static str,
    pub command: String,
    pub input_digest: String,
    pub analysis: AnalysisReport,
    pub maps: Maps,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outcome: Option<TerminationOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
    #[serde(skip_serializing_if = "serde_json::Value::is_null")]
    pub details: serde_json::Value,
    pub timings: Timings,
}

pub fn digest(bytes: &[u8]) -> String {
    let h = Sha256::digest(bytes);
    format!("sha256:{}", h.iter().map(|b| format!("{b:02x}")).collect::<String>())
}

impl Report {
    pub fn new(command: &str, input: &[u8], trs: &Trs, used: Option<&ReplacementMap>, elapsed: Duration) -> Report {
        Report {
            tool_version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            input_digest: digest(input),
            analysis: analyze(trs),
            maps: Maps { canonical: canonical_map(trs), delta: mu_delta(trs).ok(), used: used.cloned() },
            outcome: None,
            verdict: None,
            details: serde_json::Value::Null,
            timings: Timings { total_ms: elapsed.as_millis() },
        }
    }
}
