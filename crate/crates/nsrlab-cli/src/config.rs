//! Run configuration: every knob of a diagnose run, round-trippable through
//! TOML so reports can echo the exact provenance.

use nsrlab::criteria::{CriterionConfig, DEFAULT_EPSILON};
use nsrlab::fieldlab::CriterionKind;
use nsrlab::normcore::LadderSpec;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderCfg {
    pub r0: f64,
    pub ratio: f64,
    pub count: usize,
}

impl From<LadderCfg> for LadderSpec {
    fn from(c: LadderCfg) -> Self {
        LadderSpec { r0: c.r0, ratio: c.ratio, count: c.count }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KindCfg {
    pub kind: CriterionKind,
    pub p: f64,
    pub q: f64,
    /// Per-criterion threshold override.
    pub epsilon: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub center: [f64; 3],
    pub time: f64,
    pub epsilon: f64,
    pub theta: f64,
    pub ladder: LadderCfg,
    pub gamma: f64,
    pub subsamples: usize,
    pub use_centered_velocity: bool,
    pub curl_for_vorticity_gradient: bool,
    pub flat_slope_tolerance: f64,
    pub kinds: Vec<KindCfg>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let base = CriterionConfig::for_kind(CriterionKind::Velocity);
        RunConfig {
            center: [0.0, 0.0, 0.0],
            time: 0.0,
            epsilon: DEFAULT_EPSILON,
            theta: base.theta,
            ladder: LadderCfg {
                r0: base.ladder.r0,
                ratio: base.ladder.ratio,
                count: base.ladder.count,
            },
            gamma: 1.0,
            subsamples: base.subsamples,
            use_centered_velocity: true,
            curl_for_vorticity_gradient: false,
            flat_slope_tolerance: base.flat_slope_tolerance,
            kinds: [
                CriterionKind::Velocity,
                CriterionKind::VelocityGradient,
                CriterionKind::Vorticity,
                CriterionKind::VorticityGradient,
            ]
            .into_iter()
            .map(|kind| {
                let c = CriterionConfig::for_kind(kind);
                KindCfg { kind, p: c.p, q: c.q, epsilon: None }
            })
            .collect(),
        }
    }
}

impl RunConfig {
    pub fn criterion_config(&self, kind_cfg: &KindCfg) -> CriterionConfig {
        CriterionConfig {
            kind: kind_cfg.kind,
            p: kind_cfg.p,
            q: kind_cfg.q,
            epsilon: kind_cfg.epsilon.unwrap_or(self.epsilon),
            theta: self.theta,
            ladder: self.ladder.clone().into(),
            use_centered_velocity: self.use_centered_velocity,
            curl_for_vorticity_gradient: self.curl_for_vorticity_gradient,
            subsamples: self.subsamples,
            flat_slope_tolerance: self.flat_slope_tolerance,
        }
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string_pretty(self).map_err(|e| CliError::Report(e.to_string()))
    }

    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("config parse: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_roundtrip_is_lossless() {
        let mut cfg = RunConfig::default();
        cfg.center = [3.14159, 2.71828, 1.41421];
        cfg.time = -0.125;
        cfg.epsilon = 0.0375;
        cfg.kinds[1].epsilon = Some(0.9e-2);
        let text = cfg.to_toml().unwrap();
        let back = RunConfig::from_toml(&text).unwrap();
        assert_eq!(cfg, back);
    }
}
