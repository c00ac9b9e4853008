//! Radial plateau cutoff used by the localized decompositions.

use ndarray::Array3;

use crate::error::{Error, Result};
use super::grid::Grid;

/// Rising quintic step: 0 at 0, 1 at 1, with vanishing first and second
/// derivatives at both ends (globally C2 when extended by constants).
pub fn smoothstep_quintic(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else if s >= 1.0 {
        1.0
    } else {
        s * s * s * (10.0 - 15.0 * s + 6.0 * s * s)
    }
}

/// Derivative of [`smoothstep_quintic`].
pub fn smoothstep_quintic_deriv(s: f64) -> f64 {
    if s <= 0.0 || s >= 1.0 {
        0.0
    } else {
        30.0 * s * s * (1.0 - s) * (1.0 - s)
    }
}

/// Rising step with four vanishing derivatives at both ends (degree nine).
/// Time windows built from it keep quadrature errors at sixth order.
pub fn smoothstep_c4(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else if s >= 1.0 {
        1.0
    } else {
        let s2 = s * s;
        s2 * s2 * s * (126.0 + s * (-420.0 + s * (540.0 + s * (-315.0 + s * 70.0))))
    }
}

/// Derivative of [`smoothstep_c4`]: `630 s^4 (1-s)^4` on the transition.
pub fn smoothstep_c4_deriv(s: f64) -> f64 {
    if s <= 0.0 || s >= 1.0 {
        0.0
    } else {
        let a = s * (1.0 - s);
        630.0 * a * a * a * a
    }
}

/// Radial bump equal to 1 inside `plateau_fraction * rho`, 0 outside `rho`,
/// with a fixed polynomial transition so runs are reproducible.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cutoff {
    pub rho: f64,
    pub plateau_fraction: f64,
}

impl Cutoff {
    /// Plateau at the conventional 3/4 of the support radius.
    pub fn new(rho: f64) -> Result<Self> {
        Cutoff::with_plateau(rho, 0.75)
    }

    pub fn with_plateau(rho: f64, plateau_fraction: f64) -> Result<Self> {
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::InvalidParameter(format!("cutoff radius {rho} invalid")));
        }
        if !(plateau_fraction > 0.0 && plateau_fraction < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "plateau fraction {plateau_fraction} outside (0, 1)"
            )));
        }
        Ok(Cutoff { rho, plateau_fraction })
    }

    /// Radius inside which the profile is identically 1.
    pub fn plateau_radius(&self) -> f64 {
        self.plateau_fraction * self.rho
    }

    /// Profile value at distance `d` from the center.
    pub fn profile(&self, d: f64) -> f64 {
        let a = self.plateau_radius();
        if d <= a {
            1.0
        } else if d >= self.rho {
            0.0
        } else {
            1.0 - smoothstep_quintic((d - a) / (self.rho - a))
        }
    }

    /// Sample the profile around `center` on the periodic grid.
    pub fn sample(&self, grid: &Grid, center: [f64; 3]) -> Array3<f64> {
        let mut out = Array3::zeros((grid.nz, grid.ny, grid.nx));
        for iz in 0..grid.nz {
            for iy in 0..grid.ny {
                for ix in 0..grid.nx {
                    let d = grid.distance(center, grid.position(ix, iy, iz));
                    out[[iz, iy, ix]] = self.profile(d);
                }
            }
        }
        out
    }
}
