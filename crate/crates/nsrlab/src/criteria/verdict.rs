//! Criterion configuration and verdict types.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fieldlab::CriterionKind;
use crate::normcore::LadderSpec;

/// Default smallness threshold. The theory only guarantees that *some*
/// threshold works; this default is calibrated empirically on the test-flow
/// suite, not derived.
pub const DEFAULT_EPSILON: f64 = 0.05;

/// Configuration of one interior-criterion evaluation.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CriterionConfig {
    pub kind: CriterionKind,
    pub p: f64,
    pub q: f64,
    pub epsilon: f64,
    /// Contraction ratio used by the iteration trace.
    pub theta: f64,
    pub ladder: LadderSpec,
    pub use_centered_velocity: bool,
    pub curl_for_vorticity_gradient: bool,
    pub subsamples: usize,
    /// Log-log slopes below this magnitude count as non-decaying.
    pub flat_slope_tolerance: f64,
}

impl CriterionConfig {
    /// Calibrated defaults per kind (exponents sit strictly inside or on the
    /// admissible regions).
    pub fn for_kind(kind: CriterionKind) -> Self {
        let (p, q) = match kind {
            CriterionKind::Velocity => (2.0, 4.0),
            CriterionKind::VelocityGradient => (2.0, 2.0),
            CriterionKind::Vorticity => (2.0, 2.0),
            CriterionKind::VorticityGradient => (1.2, 2.0),
        };
        CriterionConfig {
            kind,
            p,
            q,
            epsilon: DEFAULT_EPSILON,
            theta: 0.2,
            ladder: LadderSpec { r0: 1.6, ratio: 0.5f64.powf(1.0 / 3.0), count: 3 },
            use_centered_velocity: true,
            curl_for_vorticity_gradient: false,
            subsamples: 4,
            flat_slope_tolerance: 0.15,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "epsilon = {} must be positive",
                self.epsilon
            )));
        }
        if !(self.theta > 0.0 && self.theta < 0.25) {
            return Err(Error::InvalidParameter(format!(
                "theta = {} outside (0, 1/4)",
                self.theta
            )));
        }
        Ok(())
    }
}

/// Verdict vocabulary: the criteria are sufficient conditions only, so
/// failure to certify never claims singularity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictStatus {
    Regular,
    Flagged,
    Inconclusive,
}

/// Evidence and outcome of one criterion evaluation.
#[derive(Debug, Clone, Serialize)]
pub struct CriterionVerdict {
    pub status: VerdictStatus,
    /// Per-radius criterion quantities, largest radius first.
    pub evidence: Vec<(f64, f64)>,
    pub trend_slope: f64,
    pub threshold_used: f64,
    /// Radius certifying a one-radius criterion, when applicable.
    pub witness_r: Option<f64>,
    pub warnings: Vec<String>,
}

/// Raw contraction-iteration readings `C + D` down a geometric ladder.
#[derive(Debug, Clone, Serialize)]
pub struct ContractionTrace {
    pub entries: Vec<ContractionEntry>,
    pub first_below: Option<usize>,
    pub truncated: bool,
    pub epsilon: f64,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ContractionEntry {
    pub k: usize,
    pub r: f64,
    pub value: f64,
}
