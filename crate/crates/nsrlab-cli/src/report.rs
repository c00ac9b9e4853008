//! JSON report schema. Reports are deterministic given the container bytes
//! and the configuration; the timestamp is the only nondeterministic field
//! and can be suppressed.

use nsrlab::criteria::{AuditContext, ContractionTrace, CriterionVerdict, VerdictStatus};
use serde::Serialize;

use crate::config::RunConfig;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct ReportMeta {
    pub tool: &'static str,
    pub schema_version: u32,
    pub container_format_version: u16,
    pub container: String,
    pub container_crc32: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp_unix: Option<u64>,
}

impl ReportMeta {
    pub fn new(container: &str, crc: u32, with_timestamp: bool) -> Self {
        ReportMeta {
            tool: "nsrlab",
            schema_version: SCHEMA_VERSION,
            container_format_version: crate::container::FORMAT_VERSION,
            container: container.to_string(),
            container_crc32: format!("{crc:08x}"),
            timestamp_unix: with_timestamp.then(|| {
                std::time::SystemTime::now()
                    .duration_since(std::time::UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0)
            }),
        }
    }
}

fn status_label(s: VerdictStatus) -> &'static str {
    match s {
        VerdictStatus::Regular => "regular",
        VerdictStatus::Flagged => "flagged",
        VerdictStatus::Inconclusive => "inconclusive",
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerdictJson {
    pub kind: String,
    pub p: f64,
    pub q: f64,
    pub status: &'static str,
    pub threshold: f64,
    pub trend_slope: f64,
    pub evidence: Vec<EvidenceJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_r: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvidenceJson {
    pub r: f64,
    pub value: f64,
}

impl VerdictJson {
    pub fn from_verdict(kind: &str, p: f64, q: f64, v: &CriterionVerdict) -> Self {
        VerdictJson {
            kind: kind.to_string(),
            p,
            q,
            status: status_label(v.status),
            threshold: v.threshold_used,
            trend_slope: v.trend_slope,
            evidence: v
                .evidence
                .iter()
                .map(|&(r, value)| EvidenceJson { r, value })
                .collect(),
            witness_r: v.witness_r,
            warnings: v.warnings.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ContractionJson {
    pub theta: f64,
    pub epsilon: f64,
    pub entries: Vec<ContractionEntryJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_below: Option<usize>,
    pub truncated: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ContractionEntryJson {
    pub k: usize,
    pub r: f64,
    pub value: f64,
}

impl ContractionJson {
    pub fn from_trace(theta: f64, t: &ContractionTrace) -> Self {
        ContractionJson {
            theta,
            epsilon: t.epsilon,
            entries: t
                .entries
                .iter()
                .map(|e| ContractionEntryJson { k: e.k, r: e.r, value: e.value })
                .collect(),
            first_below: t.first_below,
            truncated: t.truncated,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagnoseReport {
    pub meta: ReportMeta,
    pub config: RunConfig,
    pub verdicts: Vec<VerdictJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub one_radius_check: Option<VerdictJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub contraction: Option<ContractionJson>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaJson {
    pub id: &'static str,
    pub applicable: bool,
    pub lhs: f64,
    pub rhs_terms: Vec<TermJson>,
    /// `null` when the right side vanishes while the left does not.
    pub fitted_constant: f64,
    pub trivially_satisfied: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub regime_notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TermJson {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditJsonReport {
    pub meta: ReportMeta,
    pub context: AuditContext,
    pub lemmas: Vec<LemmaJson>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScaleEntryJson {
    pub functional: &'static str,
    pub r: f64,
    pub scaled_value: f64,
    pub reference_value: f64,
    pub relative_mismatch: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScaleCheckReport {
    pub meta: ReportMeta,
    pub lambda: u32,
    pub center: [f64; 3],
    pub time: f64,
    pub q: f64,
    pub entries: Vec<ScaleEntryJson>,
    pub worst_relative_mismatch: f64,
}

/// Serialize any report deterministically.
pub fn to_json<T: Serialize>(report: &T) -> Result<String, crate::error::CliError> {
    serde_json::to_string_pretty(report).map_err(|e| crate::error::CliError::Report(e.to_string()))
}
