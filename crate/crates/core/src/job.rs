//! Analysis jobs: configuration, the parse → validate → estimate → verdict
//! pipeline, and the report document.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::essential::{
    estimate_sups, extrapolate_and_verdict, BoundReport, DeltaLadder, EssentialError, EstimateConfig, SymbolPair,
    VerdictTolerances, MIN_BUDGET,
};
use crate::report::{SCHEMA_VERSION, TOOL_VERSION};
use crate::symbols::{parse_map, validate_self_map, ParseError, ValidationReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

fn default_ladder() -> Vec<f64> {
    DeltaLadder::default().deltas().to_vec()
}

fn default_budget() -> usize {
    100_000
}

fn default_refine_iters() -> usize {
    40
}

/// Everything that determines an analysis result. Thread count and output
/// location are deliberately absent from the result-bearing fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub dim: usize,
    pub phi_source: String,
    pub psi_source: String,
    #[serde(default = "default_ladder")]
    pub delta_ladder: Vec<f64>,
    #[serde(default = "default_budget")]
    pub sample_budget: usize,
    #[serde(default = "default_refine_iters")]
    pub refine_iters: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing)]
    pub output_path: Option<String>,
    #[serde(default)]
    pub format: OutputFormat,
}

impl JobConfig {
    pub fn new(dim: usize, phi: impl Into<String>, psi: impl Into<String>) -> Self {
        Self {
            dim,
            phi_source: phi.into(),
            psi_source: psi.into(),
            delta_ladder: default_ladder(),
            sample_budget: default_budget(),
            refine_iters: default_refine_iters(),
            seed: 0,
            output_path: None,
            format: OutputFormat::Json,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JobError {
    #[error("{which}: {source}")]
    Parse {
        which: &'static str,
        #[source]
        source: ParseError,
    },
    #[error("{which} does not map the polydisc into itself: {}", report.failure.as_deref().unwrap_or("unknown"))]
    Validation {
        which: &'static str,
        report: Box<ValidationReport>,
    },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Estimate(#[from] EssentialError),
}

/// The full analysis document.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisDocument {
    pub schema_version: u32,
    pub tool_version: &'static str,
    pub config: JobConfig,
    #[serde(flatten)]
    pub report: BoundReport,
    /// Wall-clock time; `None` unless timing was requested, which keeps
    /// repeated runs byte-identical by default.
    pub runtime_ms: Option<u64>,
}

/// Validation sample count applied to each symbol before estimation.
pub fn validation_budget(config: &JobConfig) -> usize {
    config.sample_budget.min(20_000)
}

/// Runs the whole pipeline for `config`.
pub fn run_analysis(config: &JobConfig, timing: bool) -> Result<AnalysisDocument, JobError> {
    let started = Instant::now();
    if config.dim == 0 {
        return Err(JobError::Config("dim must be at least 1".into()));
    }
    if config.sample_budget < MIN_BUDGET {
        return Err(JobError::Config(format!(
            "sample_budget {} is below the minimum of {MIN_BUDGET}",
            config.sample_budget
        )));
    }
    let ladder = DeltaLadder::new(config.delta_ladder.clone())?;
    let phi = parse_map(&config.phi_source, config.dim).map_err(|source| JobError::Parse { which: "phi", source })?;
    let psi = parse_map(&config.psi_source, config.dim).map_err(|source| JobError::Parse { which: "psi", source })?;
    for (which, m) in [("phi", &phi), ("psi", &psi)] {
        let report = validate_self_map(m, validation_budget(config), config.seed);
        if !report.passed {
            return Err(JobError::Validation {
                which,
                report: Box::new(report),
            });
        }
    }
    let pair = SymbolPair::trusted(phi, psi)?;
    let estimate = EstimateConfig::new(config.sample_budget, config.seed).with_refine_iters(config.refine_iters);
    let sups = estimate_sups(&pair, &ladder, &estimate)?;
    let report = extrapolate_and_verdict(sups, VerdictTolerances::default());
    Ok(AnalysisDocument {
        schema_version: SCHEMA_VERSION,
        tool_version: TOOL_VERSION,
        config: config.clone(),
        report,
        runtime_ms: timing.then(|| started.elapsed().as_millis() as u64),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::essential::Verdict;
    use crate::report::to_json;

    #[test]
    fn config_defaults_from_json() {
        let c: JobConfig = serde_json::from_str(r#"{"dim": 2, "phi_source": "z1;z2", "psi_source": "z1;z2"}"#).unwrap();
        assert_eq!(c, JobConfig::new(2, "z1;z2", "z1;z2"));
        let bad = serde_json::from_str::<JobConfig>(r#"{"dim": 2, "phi_source": "z1", "psi_source": "z1", "x": 1}"#);
        assert!(bad.is_err());
    }

    #[test]
    fn identity_pair() {
        let mut c = JobConfig::new(2, "z1;z2", "z1;z2");
        c.sample_budget = 2000;
        let doc = run_analysis(&c, false).unwrap();
        assert_eq!(doc.report.verdict, Verdict::Compact);
        assert_eq!(doc.report.upper_bound, 0.0);
        assert_eq!(doc.runtime_ms, None);
        let text = to_json(&doc).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        for key in ["schema_version", "config", "rows", "S_limit", "K_limit", "lower_bound", "upper_bound", "verdict", "boundedness_assumed", "runtime_ms"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        assert!(v["rows"][0].get("witness_S").is_some());
        assert_eq!(v["verdict"], "Compact");
    }

    #[test]
    fn errors_are_classified() {
        let mut c = JobConfig::new(2, "z1;z2 +", "z1;z2");
        c.sample_budget = 1000;
        assert!(matches!(run_analysis(&c, false), Err(JobError::Parse { which: "phi", .. })));
        c.phi_source = "z1;z2".into();
        c.psi_source = "z1 + 0.5; z2".into();
        match run_analysis(&c, false) {
            Err(JobError::Validation { which, report }) => {
                assert_eq!(which, "psi");
                assert!(report.witness.is_some());
            }
            other => panic!("{other:?}"),
        }
        c.psi_source = "z1;z2".into();
        c.sample_budget = 10;
        assert!(matches!(run_analysis(&c, false), Err(JobError::Config(_))));
        c.sample_budget = 1000;
        c.delta_ladder = vec![0.1, 0.2];
        assert!(matches!(run_analysis(&c, false), Err(JobError::Estimate(EssentialError::InvalidLadder(_)))));
    }
}
