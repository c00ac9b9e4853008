//! Exponent-pair algebra and admissible-region classification.
//!
//! Infinite exponents are carried explicitly as `f64::INFINITY`; the scale
//! dimension `s = 3/p + 2/q` then degrades gracefully (`3/inf == 0`).

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which field the exponent pair measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriterionKind {
    Velocity,
    VelocityGradient,
    Vorticity,
    VorticityGradient,
}

impl CriterionKind {
    /// Admissible range of `3/p + 2/q` for this kind.
    pub fn scale_bounds(&self) -> (f64, f64) {
        match self {
            CriterionKind::Velocity => (1.0, 2.0),
            CriterionKind::VelocityGradient | CriterionKind::Vorticity => (2.0, 3.0),
            CriterionKind::VorticityGradient => (3.0, 4.0),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            CriterionKind::Velocity => "velocity",
            CriterionKind::VelocityGradient => "velocity_gradient",
            CriterionKind::Vorticity => "vorticity",
            CriterionKind::VorticityGradient => "vorticity_gradient",
        }
    }
}

/// An exponent pair as used by one criterion kind. For the velocity kind `p`
/// plays the role of the Sobolev-shifted exponent, for the vorticity-gradient
/// kind the role of the down-shifted one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentPair {
    pub p: f64,
    pub q: f64,
    pub kind: CriterionKind,
}

impl ExponentPair {
    pub fn new(kind: CriterionKind, p: f64, q: f64) -> Self {
        ExponentPair { p, q, kind }
    }

    pub fn verdict(&self) -> RegionVerdict {
        classify_exponents(self.kind, self.p, self.q)
    }
}

/// Outcome of a region classification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionVerdict {
    pub admissible: bool,
    /// `3/p + 2/q` sits exactly on the lower edge (only the scaling exponent
    /// degenerates there).
    pub on_lower_boundary: bool,
    /// `3/p + 2/q` sits exactly on the critical upper edge.
    pub on_critical_boundary: bool,
    pub scale_dimension: f64,
    pub rejection_reason: Option<String>,
}

/// Total classification of `(p, q)` against the kind's admissible region,
/// including the excluded vorticity corner `(p, q) = (1, inf)`.
pub fn classify_exponents(kind: CriterionKind, p: f64, q: f64) -> RegionVerdict {
    let s = 3.0 / p + 2.0 / q;
    let (lo, hi) = kind.scale_bounds();
    let reject = |reason: String| RegionVerdict {
        admissible: false,
        on_lower_boundary: false,
        on_critical_boundary: false,
        scale_dimension: s,
        rejection_reason: Some(reason),
    };
    if p.is_nan() || q.is_nan() {
        return reject("exponents must not be NaN".into());
    }
    if p < 1.0 {
        return reject(format!("p = {p} below 1"));
    }
    if q < 1.0 {
        return reject(format!("q = {q} below 1"));
    }
    if s < lo || s > hi {
        return reject(format!(
            "3/p + 2/q = {s} outside [{lo}, {hi}] for kind {}",
            kind.label()
        ));
    }
    if kind == CriterionKind::Vorticity && p == 1.0 && q == f64::INFINITY {
        return reject("(p, q) = (1, inf) is excluded for the vorticity kind".into());
    }
    RegionVerdict {
        admissible: true,
        on_lower_boundary: s == lo,
        on_critical_boundary: s == hi,
        scale_dimension: s,
        rejection_reason: None,
    }
}

/// Conjugate exponents of `p`: the Sobolev shift `1/p* = 1/p - 1/3` and the
/// inverse shift `1/p = 1/p# - 1/3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Conjugates {
    /// Undefined for `p >= 3` (reported as `None`, never silently infinite).
    pub p_star: Option<f64>,
    pub p_sharp: f64,
}

/// `p* = 3p / (3 - p)` in exact rational arithmetic; `None` once `p >= 3`.
pub fn p_star_rational(p: Ratio<i64>) -> Option<Ratio<i64>> {
    let three = Ratio::from_integer(3);
    if p >= three {
        None
    } else {
        Some(three * p / (three - p))
    }
}

/// `p# = 3p / (3 + p)` in exact rational arithmetic.
pub fn p_sharp_rational(p: Ratio<i64>) -> Ratio<i64> {
    let three = Ratio::from_integer(3);
    three * p / (three + p)
}

/// Invert the Sobolev shift: recovers `p` from `p*` exactly.
pub fn p_from_star(p_star: Ratio<i64>) -> Ratio<i64> {
    let three = Ratio::from_integer(3);
    three * p_star / (three + p_star)
}

/// Invert the down shift: recovers `p` from `p#` exactly.
pub fn p_from_sharp(p_sharp: Ratio<i64>) -> Ratio<i64> {
    let three = Ratio::from_integer(3);
    three * p_sharp / (three - p_sharp)
}

/// Conjugates of a floating `p in [1, inf]`. Rational inputs go through exact
/// rational arithmetic; `p = inf` yields `p# = 3`.
pub fn conjugate_exponents(p: f64) -> Result<Conjugates> {
    if !(p >= 1.0) {
        return Err(Error::ExponentRegime(format!("p = {p} outside [1, inf]")));
    }
    if p == f64::INFINITY {
        return Ok(Conjugates { p_star: None, p_sharp: 3.0 });
    }
    if let Some(r) = Ratio::<i64>::approximate_float(p) {
        let star = p_star_rational(r).map(|v| *v.numer() as f64 / *v.denom() as f64);
        let sharp = p_sharp_rational(r);
        return Ok(Conjugates {
            p_star: star,
            p_sharp: *sharp.numer() as f64 / *sharp.denom() as f64,
        });
    }
    // Fallback for floats outside the rational range.
    let star = if p < 3.0 { Some(3.0 * p / (3.0 - p)) } else { None };
    Ok(Conjugates { p_star: star, p_sharp: 3.0 * p / (3.0 + p) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn velocity_lower_boundary_point() {
        let v = classify_exponents(CriterionKind::Velocity, 6.0, 4.0);
        assert!(v.admissible);
        assert!(v.on_lower_boundary);
        assert!(!v.on_critical_boundary);
        assert_eq!(v.scale_dimension, 1.0);
    }

    #[test]
    fn vorticity_excluded_corner() {
        let v = classify_exponents(CriterionKind::Vorticity, 1.0, f64::INFINITY);
        assert!(!v.admissible);
        assert!(v.rejection_reason.is_some());
        // the same corner is fine for the velocity-gradient kind
        let g = classify_exponents(CriterionKind::VelocityGradient, 1.0, f64::INFINITY);
        assert!(g.admissible);
        assert!(g.on_critical_boundary);
    }

    #[test]
    fn vorticity_interior_point() {
        let v = classify_exponents(CriterionKind::Vorticity, 2.0, 2.0);
        assert!(v.admissible);
        assert_eq!(v.scale_dimension, 2.5);
        assert!(!v.on_lower_boundary && !v.on_critical_boundary);
    }

    #[test]
    fn conjugates_match_shifts() {
        let c = conjugate_exponents(2.0).unwrap();
        assert_eq!(c.p_star, Some(6.0));
        assert!((c.p_sharp - 1.2).abs() < 1e-15);
        let c3 = conjugate_exponents(3.0).unwrap();
        assert_eq!(c3.p_star, None);
        assert_eq!(c3.p_sharp, 1.5);
    }

    #[test]
    fn rational_roundtrip_is_exact() {
        for (n, d) in [(3i64, 2i64), (5, 4), (7, 3), (12, 5), (1, 1), (11, 4)] {
            let p = Ratio::new(n, d);
            if let Some(star) = p_star_rational(p) {
                assert_eq!(p_from_star(star), p);
            }
            let sharp = p_sharp_rational(p);
            assert_eq!(p_from_sharp(sharp), p);
        }
    }
}
