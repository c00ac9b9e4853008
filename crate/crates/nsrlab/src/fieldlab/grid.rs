//! Periodic space-time sampling grid.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Quadrature below this many cells per radius is meaningless; see
/// [`Grid::resolution_floor`].
pub const RESOLUTION_FLOOR_CELLS: f64 = 4.0;

/// A cubic periodic spatial grid carrying uniformly spaced time samples.
///
/// Spatial samples sit at `x_i = i * h` with `h = domain_length / nx` on each
/// axis; time samples at `t_j = t0 + j * dt`. The formal time extent is
/// `[t0, t0 + nt * dt]` (each sample covers one `dt` cell), while quadrature
/// only ever uses the sampled instants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub nt: usize,
    pub domain_length: f64,
    pub dt: f64,
    pub t0: f64,
}

/// Build a validated cubic periodic grid.
pub fn make_grid(nx: usize, nt: usize, domain_length: f64, dt: f64, t0: f64) -> Result<Grid> {
    if nx < 8 {
        return Err(Error::GridValidation(format!(
            "nx = {nx} too coarse, need at least 8 samples per axis"
        )));
    }
    if nt < 2 {
        return Err(Error::GridValidation(format!("nt = {nt}, need at least 2 time samples")));
    }
    if !(domain_length > 0.0) || !domain_length.is_finite() {
        return Err(Error::GridValidation(format!("domain_length = {domain_length} must be positive")));
    }
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::GridValidation(format!("dt = {dt} must be positive")));
    }
    if !t0.is_finite() {
        return Err(Error::GridValidation("t0 must be finite".into()));
    }
    Ok(Grid { nx, ny: nx, nz: nx, nt, domain_length, dt, t0 })
}

impl Grid {
    /// Spatial spacing, identical on all three axes.
    pub fn h(&self) -> f64 {
        self.domain_length / self.nx as f64
    }

    /// Smallest ball radius the quadrature accepts.
    pub fn resolution_floor(&self) -> f64 {
        RESOLUTION_FLOOR_CELLS * self.h()
    }

    /// Time of sample `j`.
    pub fn time_at(&self, j: usize) -> f64 {
        self.t0 + j as f64 * self.dt
    }

    /// Last sampled instant.
    pub fn last_time(&self) -> f64 {
        self.time_at(self.nt - 1)
    }

    /// Formal time extent `[t0, t0 + nt*dt]`.
    pub fn time_extent(&self) -> (f64, f64) {
        (self.t0, self.t0 + self.nt as f64 * self.dt)
    }

    /// Index of the sample nearest to `t`, clamped into range.
    pub fn nearest_slice(&self, t: f64) -> usize {
        let j = ((t - self.t0) / self.dt).round();
        (j.max(0.0) as usize).min(self.nt - 1)
    }

    /// Minimal-image displacement from `from` to `to` on the torus.
    pub fn min_image(&self, from: [f64; 3], to: [f64; 3]) -> [f64; 3] {
        let l = self.domain_length;
        let mut d = [0.0; 3];
        for a in 0..3 {
            let raw = (to[a] - from[a] + 0.5 * l).rem_euclid(l) - 0.5 * l;
            d[a] = raw;
        }
        d
    }

    /// Periodic distance between two points.
    pub fn distance(&self, a: [f64; 3], b: [f64; 3]) -> f64 {
        let d = self.min_image(a, b);
        (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
    }

    /// Coordinates of the spatial sample `(ix, iy, iz)`.
    pub fn position(&self, ix: usize, iy: usize, iz: usize) -> [f64; 3] {
        let h = self.h();
        [ix as f64 * h, iy as f64 * h, iz as f64 * h]
    }

    /// Index of the spatial sample nearest to `x`, per axis, wrapped.
    pub fn nearest_sample(&self, x: [f64; 3]) -> [usize; 3] {
        let h = self.h();
        let mut idx = [0usize; 3];
        let n = [self.nx, self.ny, self.nz];
        for a in 0..3 {
            let i = (x[a] / h).round() as i64;
            idx[a] = i.rem_euclid(n[a] as i64) as usize;
        }
        idx
    }

    /// Total number of spatial samples.
    pub fn spatial_len(&self) -> usize {
        self.nx * self.ny * self.nz
    }

    pub(crate) fn same_mesh(&self, other: &Grid) -> bool {
        self.nx == other.nx
            && self.ny == other.ny
            && self.nz == other.nz
            && self.nt == other.nt
            && self.domain_length == other.domain_length
            && self.dt == other.dt
            && self.t0 == other.t0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_spacing_and_extent() {
        let g = make_grid(64, 16, 2.0 * std::f64::consts::PI, 0.01, 0.0).unwrap();
        assert!((g.h() - 2.0 * std::f64::consts::PI / 64.0).abs() < 1e-15);
        assert_eq!(g.nt, 16);
    }

    #[test]
    fn rejects_too_coarse() {
        assert!(make_grid(4, 16, 2.0 * std::f64::consts::PI, 0.01, 0.0).is_err());
        assert!(make_grid(32, 1, 1.0, 0.1, 0.0).is_err());
        assert!(make_grid(32, 4, -1.0, 0.1, 0.0).is_err());
        assert!(make_grid(32, 4, 1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn time_extent_covers_nt_dt() {
        let g = make_grid(32, 2, 1.0, 0.5, -1.0).unwrap();
        let (a, b) = g.time_extent();
        assert!((a + 1.0).abs() < 1e-15);
        assert!(b.abs() < 1e-15);
        assert!((g.last_time() + 0.5).abs() < 1e-15);
    }

    #[test]
    fn min_image_wraps() {
        let g = make_grid(16, 2, 1.0, 0.1, 0.0).unwrap();
        let d = g.min_image([0.05, 0.0, 0.0], [0.95, 0.0, 0.0]);
        assert!((d[0] + 0.1).abs() < 1e-12);
    }
}
