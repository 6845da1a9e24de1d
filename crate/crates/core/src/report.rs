//! Versioned JSON report written by the command-line tool.
//!
//! Numbers are serialized in shortest round-trip form, which preserves every
//! bit of the `f64`; re-parsing and re-serializing a report is the identity.

use serde::{Deserialize, Serialize};

use crate::b_dist::Condition;
use crate::eeb::EebResult;
use crate::error::{Error, Result};
use crate::montecarlo::SimReport;
use crate::procedure::ProcedureOutcome;
use crate::two_sample::{DistMode, TwoSampleResult};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_NAME: &str = "bvalue";

/// Echo of the options a command ran with.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub test: Option<DistMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub condition: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub groups: Option<(String, String)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub beta: f64,
    pub eeb: f64,
}

/// Smallest β at which the observed B-value falls inside the EEB interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaThreshold {
    pub condition: Condition,
    /// `None` when no β below 1 suffices.
    pub min_beta: Option<f64>,
}

/// One named comparison inside a multi-comparison report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub groups: (String, String),
    pub two_sample: TwoSampleResult,
    #[serde(default)]
    pub thresholds: Vec<BetaThreshold>,
    #[serde(default)]
    pub curves: Vec<(Condition, Vec<CurvePoint>)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportEnvelope {
    pub schema_version: u32,
    pub tool: String,
    pub version: String,
    pub command: String,
    #[serde(default)]
    pub argv: Vec<String>,
    pub config: ReportConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub two_sample: Option<TwoSampleResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_value: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub eeb: Vec<EebResult>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub curve: Vec<CurvePoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub procedure: Option<ProcedureOutcome>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulation: Option<SimReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub comparisons: Vec<ComparisonReport>,
}

impl ReportEnvelope {
    pub fn new(command: impl Into<String>, version: impl Into<String>, config: ReportConfig) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            tool: TOOL_NAME.to_string(),
            version: version.into(),
            command: command.into(),
            argv: Vec::new(),
            config,
            two_sample: None,
            b_value: None,
            eeb: Vec::new(),
            curve: Vec::new(),
            procedure: None,
            simulation: None,
            comparisons: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report values are always serializable")
    }
}

/// Parse a report, rejecting unknown schema versions.
pub fn parse_report(text: &str) -> Result<ReportEnvelope> {
    let r: ReportEnvelope = serde_json::from_str(text)
        .map_err(|e| Error::parse(e.line(), e.to_string()))?;
    if r.schema_version != SCHEMA_VERSION {
        return Err(Error::parse(
            0,
            format!("unsupported schema_version {}", r.schema_version),
        ));
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::parse_dataset;
    use crate::procedure::{run_two_stage, ProcedureConfig};

    #[test]
    fn round_trip_is_idempotent() {
        let ds = parse_dataset(crate::fixtures::PLANT_GROWTH_CSV).unwrap();
        let cfg = ProcedureConfig::new(0.05, 0.85, DistMode::T, None).unwrap();
        let out = run_two_stage(&ds.summary("trt1").unwrap(), &ds.summary("ctrl").unwrap(), &cfg)
            .unwrap();
        let mut env = ReportEnvelope::new(
            "procedure",
            "0.0.0",
            ReportConfig {
                alpha: Some(0.05),
                beta: Some(0.85),
                ..Default::default()
            },
        );
        env.two_sample = Some(out.result);
        env.b_value = Some(out.result.b_value);
        env.procedure = Some(out);
        let text = env.to_json();
        let back = parse_report(&text).unwrap();
        assert_eq!(back, env);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn rejects_other_schema_versions() {
        let env = ReportEnvelope::new("ttest", "0.0.0", ReportConfig::default());
        let text = env.to_json().replace("\"schema_version\": 1", "\"schema_version\": 99");
        assert!(parse_report(&text).is_err());
        assert!(parse_report("{").is_err());
    }
}
