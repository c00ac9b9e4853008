//! Functional values across a geometric radius ladder at a fixed center.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fieldlab::{cylinder_mask, ParabolicCylinder};
use super::functionals::{functional, BorderlinePair, Functional};
use super::prepared::Prepared;

/// Radii `r_k = r0 * ratio^k`, truncated at the resolution floor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderSpec {
    pub r0: f64,
    pub ratio: f64,
    pub count: usize,
}

impl LadderSpec {
    pub fn new(r0: f64, ratio: f64, count: usize) -> Result<Self> {
        if !(r0 > 0.0) || !(ratio > 0.0 && ratio < 1.0) || count == 0 {
            return Err(Error::InvalidParameter(format!(
                "ladder r0 = {r0}, ratio = {ratio}, count = {count} invalid"
            )));
        }
        Ok(LadderSpec { r0, ratio, count })
    }

    /// Feasible radii above `floor`, and whether the ladder was truncated.
    pub fn radii(&self, floor: f64) -> (Vec<f64>, bool) {
        let mut out = Vec::with_capacity(self.count);
        let mut truncated = false;
        for k in 0..self.count {
            let r = self.r0 * self.ratio.powi(k as i32);
            if r < floor * (1.0 - 1e-12) {
                truncated = true;
                break;
            }
            out.push(r);
        }
        (out, truncated)
    }
}

/// Values of the cylinder functionals across a radius ladder.
#[derive(Debug, Clone, Serialize)]
pub struct FunctionalLadder {
    pub center: [f64; 3],
    pub t: f64,
    pub radii: Vec<f64>,
    pub values: Vec<BTreeMap<Functional, f64>>,
    pub omissions: Vec<(Functional, String)>,
    pub warnings: Vec<String>,
    pub exponents: BorderlinePair,
}

impl FunctionalLadder {
    /// Values of one functional down the ladder, where present.
    pub fn series(&self, name: Functional) -> Vec<(f64, f64)> {
        self.radii
            .iter()
            .zip(&self.values)
            .filter_map(|(&r, m)| m.get(&name).map(|&v| (r, v)))
            .collect()
    }

    /// Least-squares slope of `ln value` against `ln r`.
    pub fn loglog_slope(&self, name: Functional) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .series(name)
            .into_iter()
            .filter(|&(_, v)| v > 1e-300)
            .map(|(r, v)| (r.ln(), v.ln()))
            .collect();
        crate::util::lsq_slope(&pts)
    }
}

/// Evaluate every functional at each ladder radius; entries whose inputs are
/// absent are skipped and recorded, a ladder breaching the resolution floor
/// is truncated with a warning.
pub fn build_ladder(
    prep: &Prepared,
    center: [f64; 3],
    t: f64,
    spec: &LadderSpec,
    exps: &BorderlinePair,
    subsamples: usize,
) -> Result<FunctionalLadder> {
    if spec.ratio > 0.5 {
        return Err(Error::InvalidParameter(format!(
            "ladder ratio {} above 1/2; the functional table wants well-separated rungs",
            spec.ratio
        )));
    }
    let grid = prep.grid();
    let (radii, truncated) = spec.radii(grid.resolution_floor());
    if radii.is_empty() {
        return Err(Error::LadderInfeasible(format!(
            "r0 = {} already below the resolution floor {}",
            spec.r0,
            grid.resolution_floor()
        )));
    }
    let mut warnings = Vec::new();
    if truncated {
        warnings.push(format!(
            "ladder truncated at the resolution floor {} after {} rungs",
            grid.resolution_floor(),
            radii.len()
        ));
    }
    let mut omissions: Vec<(Functional, String)> = Vec::new();
    let mut values = Vec::with_capacity(radii.len());
    for &r in &radii {
        let quad = cylinder_mask(grid, &ParabolicCylinder::new(center, t, r), subsamples)?;
        let mut row = BTreeMap::new();
        for name in Functional::ALL {
            match functional(name, prep, &quad, Some(exps)) {
                Ok(v) => {
                    row.insert(name, v);
                }
                Err(Error::MissingField(which)) => {
                    if !omissions.iter().any(|(n, _)| *n == name) {
                        omissions.push((name, format!("missing input: {which}")));
                    }
                }
                Err(Error::ExponentRegime(why)) => {
                    if !omissions.iter().any(|(n, _)| *n == name) {
                        omissions.push((name, why));
                    }
                }
                Err(e) => return Err(e),
            }
        }
        values.push(row);
    }
    Ok(FunctionalLadder {
        center,
        t,
        radii,
        values,
        omissions,
        warnings,
        exponents: *exps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldlab::{make_grid, FieldStack, ScalarField, VectorField};
    use std::f64::consts::PI;

    #[test]
    fn zero_stack_gives_all_zero_ladder() {
        let g = make_grid(16, 12, 2.0 * PI, 0.3, -3.3).unwrap();
        let mut stack = FieldStack::new(g, VectorField::zeros(g)).unwrap();
        stack.p = Some(ScalarField::zeros(g));
        stack.w = Some(VectorField::zeros(g));
        let prep = Prepared::new(stack);
        let spec = LadderSpec::new(1.8, 0.5, 3).unwrap();
        let exps = BorderlinePair::from_q(2.0).unwrap();
        let ladder = build_ladder(&prep, [PI, PI, PI], 0.0, &spec, &exps, 2).unwrap();
        assert!(!ladder.radii.is_empty());
        for row in &ladder.values {
            for (_, v) in row {
                assert_eq!(*v, 0.0);
            }
        }
    }

    #[test]
    fn floor_breach_truncates_with_warning() {
        let g = make_grid(16, 12, 2.0 * PI, 0.3, -3.3).unwrap();
        let stack = FieldStack::new(g, VectorField::zeros(g)).unwrap();
        let prep = Prepared::new(stack);
        let spec = LadderSpec::new(1.8, 0.5, 6).unwrap();
        let exps = BorderlinePair::from_q(2.0).unwrap();
        let ladder = build_ladder(&prep, [PI, PI, PI], 0.0, &spec, &exps, 1).unwrap();
        assert!(ladder.radii.len() < 6);
        assert!(!ladder.warnings.is_empty());
        // missing pressure recorded as an omission, not an error
        assert!(ladder.omissions.iter().any(|(n, _)| *n == Functional::D));
    }
}
