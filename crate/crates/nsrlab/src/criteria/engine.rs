//! Criterion evaluation: ladder scans, the one-radius smallness check, and
//! the contraction-iteration trace.

use crate::error::{Error, Result};
use crate::fieldlab::{cylinder_mask, ParabolicCylinder};
use crate::normcore::{
    criterion_quantity, functional, CriterionOptions, Functional, LadderSpec, Prepared,
};
use crate::util::loglog_slope;
use super::verdict::{
    ContractionEntry, ContractionTrace, CriterionConfig, CriterionVerdict, VerdictStatus,
};

fn tail_of(evidence: &[(f64, f64)]) -> &[(f64, f64)] {
    let n = evidence.len();
    &evidence[n.saturating_sub(3)..]
}

/// Evaluate one interior criterion at `z = (x, t)`: build the quantity down
/// the config's radius ladder, apply the small-radius proxy (maximum of the
/// last three feasible rungs) against the threshold, and report the decay
/// trend alongside.
pub fn evaluate_criterion(
    prep: &Prepared,
    x: [f64; 3],
    t: f64,
    config: &CriterionConfig,
) -> Result<CriterionVerdict> {
    config.validate()?;
    let grid = prep.grid();
    let (radii, truncated) = config.ladder.radii(grid.resolution_floor());
    if radii.is_empty() {
        return Err(Error::LadderInfeasible(format!(
            "no ladder rung above the resolution floor {}",
            grid.resolution_floor()
        )));
    }
    let mut warnings = Vec::new();
    if truncated {
        warnings.push("ladder truncated at the resolution floor".into());
    }
    let opts = CriterionOptions {
        centered_velocity: config.use_centered_velocity,
        curl_for_vorticity_gradient: config.curl_for_vorticity_gradient,
    };
    let mut evidence = Vec::with_capacity(radii.len());
    for &r in &radii {
        let quad = cylinder_mask(grid, &ParabolicCylinder::new(x, t, r), config.subsamples)?;
        let v = criterion_quantity(config.kind, prep, &quad, config.p, config.q, &opts)?;
        evidence.push((r, v));
    }
    let slope = loglog_slope(&evidence).unwrap_or(0.0);
    let tail = tail_of(&evidence);
    let tail_max = tail.iter().map(|e| e.1).fold(0.0, f64::max);
    let status = if tail_max < config.epsilon {
        VerdictStatus::Regular
    } else if evidence.len() >= 3
        && tail.iter().all(|e| e.1 > config.epsilon)
        && slope < config.flat_slope_tolerance
    {
        VerdictStatus::Flagged
    } else {
        VerdictStatus::Inconclusive
    };
    Ok(CriterionVerdict {
        status,
        evidence,
        trend_slope: slope,
        threshold_used: config.epsilon,
        witness_r: None,
        warnings,
    })
}

/// One-radius smallness check: regular as soon as `C(r) + D(r)` drops below
/// the threshold at *some* ladder radius; reports the witnessing radius.
pub fn ckn_check(
    prep: &Prepared,
    x: [f64; 3],
    t: f64,
    ladder: &LadderSpec,
    epsilon: f64,
    subsamples: usize,
) -> Result<CriterionVerdict> {
    prep.p()?;
    let grid = prep.grid();
    let (radii, truncated) = ladder.radii(grid.resolution_floor());
    if radii.is_empty() {
        return Err(Error::LadderInfeasible("no feasible ladder rung".into()));
    }
    let mut warnings = Vec::new();
    if truncated {
        warnings.push("ladder truncated at the resolution floor".into());
    }
    let mut evidence = Vec::with_capacity(radii.len());
    let mut witness: Option<(f64, f64)> = None;
    for &r in &radii {
        let quad = cylinder_mask(grid, &ParabolicCylinder::new(x, t, r), subsamples)?;
        let c = functional(Functional::C, prep, &quad, None)?;
        let d = functional(Functional::D, prep, &quad, None)?;
        let v = c + d;
        evidence.push((r, v));
        if v < epsilon && witness.map_or(true, |(_, best)| v < best) {
            witness = Some((r, v));
        }
    }
    let status = if witness.is_some() {
        VerdictStatus::Regular
    } else {
        VerdictStatus::Inconclusive
    };
    Ok(CriterionVerdict {
        status,
        trend_slope: loglog_slope(&evidence).unwrap_or(0.0),
        evidence,
        threshold_used: epsilon,
        witness_r: witness.map(|(r, _)| r),
        warnings,
    })
}

/// Measure `C + D` along `r_k = theta^k r0`; nothing is assumed about the
/// contraction, the sequence is simply recorded together with the first
/// index dropping below the threshold.
pub fn contraction_trace(
    prep: &Prepared,
    x: [f64; 3],
    t: f64,
    r0: f64,
    theta: f64,
    k_max: usize,
    epsilon: f64,
    subsamples: usize,
) -> Result<ContractionTrace> {
    if !(theta > 0.0 && theta < 0.25) {
        return Err(Error::InvalidParameter(format!("theta = {theta} outside (0, 1/4)")));
    }
    let grid = prep.grid();
    let floor = grid.resolution_floor();
    let mut entries = Vec::new();
    let mut truncated = false;
    let mut first_below = None;
    for k in 0..=k_max {
        let r = r0 * theta.powi(k as i32);
        if r < floor * (1.0 - 1e-12) {
            truncated = true;
            break;
        }
        let quad = cylinder_mask(grid, &ParabolicCylinder::new(x, t, r), subsamples)?;
        let c = functional(Functional::C, prep, &quad, None)?;
        let d = functional(Functional::D, prep, &quad, None)?;
        let value = c + d;
        if first_below.is_none() && value < epsilon {
            first_below = Some(k);
        }
        entries.push(ContractionEntry { k, r, value });
    }
    if entries.is_empty() {
        return Err(Error::LadderInfeasible(format!(
            "initial radius {r0} already below the resolution floor {floor}"
        )));
    }
    Ok(ContractionTrace { entries, first_below, truncated, epsilon })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldlab::{make_grid, CriterionKind, FieldStack, ScalarField, VectorField};
    use std::f64::consts::PI;

    fn zero_prep() -> Prepared {
        let g = make_grid(16, 12, 2.0 * PI, 0.3, -3.3).unwrap();
        let mut stack = FieldStack::new(g, VectorField::zeros(g)).unwrap();
        stack.p = Some(ScalarField::zeros(g));
        stack.w = Some(VectorField::zeros(g));
        Prepared::new(stack)
    }

    #[test]
    fn zero_field_is_regular_for_every_kind() {
        let prep = zero_prep();
        for kind in [
            CriterionKind::Velocity,
            CriterionKind::VelocityGradient,
            CriterionKind::Vorticity,
            CriterionKind::VorticityGradient,
        ] {
            let cfg = CriterionConfig::for_kind(kind);
            let v = evaluate_criterion(&prep, [PI, PI, PI], 0.0, &cfg).unwrap();
            assert_eq!(v.status, VerdictStatus::Regular, "{kind:?}");
            assert!(v.evidence.iter().all(|e| e.1 == 0.0));
        }
    }

    #[test]
    fn verdict_is_monotone_in_epsilon() {
        // raising the threshold can only move verdicts toward regular
        let g = make_grid(16, 12, 2.0 * PI, 0.3, -3.3).unwrap();
        let u = VectorField::from_fn(g, |x, y, _, _| [y.sin(), x.cos(), 0.2]);
        let mut stack = FieldStack::new(g, u).unwrap();
        stack.p = Some(ScalarField::zeros(g));
        stack.w = Some(VectorField::zeros(g));
        let prep = Prepared::new(stack);
        let mut cfg = CriterionConfig::for_kind(CriterionKind::Velocity);
        cfg.subsamples = 2;
        let mut last_regular = false;
        for eps in [1e-4, 1e-2, 1.0, 100.0] {
            cfg.epsilon = eps;
            let v = evaluate_criterion(&prep, [PI, PI, PI], 0.0, &cfg).unwrap();
            let regular = v.status == VerdictStatus::Regular;
            assert!(regular || !last_regular, "regular verdict lost when raising epsilon");
            last_regular = regular;
        }
        assert!(last_regular);
    }

    #[test]
    fn ckn_on_zero_field_witnesses_the_largest_rung() {
        let prep = zero_prep();
        let ladder = LadderSpec { r0: 1.8, ratio: 0.5, count: 3 };
        let v = ckn_check(&prep, [PI, PI, PI], 0.0, &ladder, 0.05, 2).unwrap();
        assert_eq!(v.status, VerdictStatus::Regular);
        assert_eq!(v.witness_r, Some(1.8));
    }

    #[test]
    fn ckn_above_threshold_is_inconclusive() {
        let g = make_grid(16, 12, 2.0 * PI, 0.3, -3.3).unwrap();
        let u = VectorField::from_fn(g, |_, _, _, _| [2.0, 0.0, 0.0]);
        let mut stack = FieldStack::new(g, u).unwrap();
        stack.p = Some(ScalarField::zeros(g));
        let prep = Prepared::new(stack);
        let ladder = LadderSpec { r0: 1.8, ratio: 0.5, count: 2 };
        let v = ckn_check(&prep, [PI, PI, PI], 0.0, &ladder, 0.05, 2).unwrap();
        assert_eq!(v.status, VerdictStatus::Inconclusive);
        assert_eq!(v.witness_r, None);
    }

    #[test]
    fn contraction_on_zero_field_is_immediately_below() {
        let prep = zero_prep();
        let trace =
            contraction_trace(&prep, [PI, PI, PI], 0.0, 1.8, 0.2, 4, 0.05, 2).unwrap();
        assert_eq!(trace.first_below, Some(0));
        assert!(trace.entries.iter().all(|e| e.value == 0.0));
    }

    #[test]
    fn missing_pressure_fails_ckn() {
        let g = make_grid(16, 12, 2.0 * PI, 0.3, -3.3).unwrap();
        let stack = FieldStack::new(g, VectorField::zeros(g)).unwrap();
        let prep = Prepared::new(stack);
        let ladder = LadderSpec { r0: 1.8, ratio: 0.5, count: 2 };
        assert!(matches!(
            ckn_check(&prep, [PI, PI, PI], 0.0, &ladder, 0.05, 2),
            Err(Error::MissingField("pressure"))
        ));
    }
}
