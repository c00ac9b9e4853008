//! Backward parabolic cylinders and their quadrature on the sampling grid.

use crate::error::{Error, Result};
use super::grid::Grid;

/// The backward space-time neighborhood `B_{x,r} x (t - r^2, t)` of `(x, t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParabolicCylinder {
    pub center: [f64; 3],
    pub t: f64,
    pub r: f64,
}

impl ParabolicCylinder {
    pub fn new(center: [f64; 3], t: f64, r: f64) -> Self {
        ParabolicCylinder { center, t, r }
    }

    /// Spatial wraparound is fine; the time window must stay within the
    /// sampled instants (we never extrapolate in time).
    pub fn validate(&self, grid: &Grid) -> Result<()> {
        if !(self.r > 0.0) || !self.r.is_finite() {
            return Err(Error::InvalidParameter(format!("cylinder radius {} invalid", self.r)));
        }
        let tol = 1e-9 * grid.dt;
        if self.t - self.r * self.r < grid.t0 - tol {
            return Err(Error::CylinderOutOfRange(format!(
                "window ({}, {}) starts before first sample {}",
                self.t - self.r * self.r,
                self.t,
                grid.t0
            )));
        }
        if self.t > grid.last_time() + tol {
            return Err(Error::CylinderOutOfRange(format!(
                "anchor time {} beyond last sample {}",
                self.t,
                grid.last_time()
            )));
        }
        Ok(())
    }
}

/// One cell of a ball quadrature: wrapped indices plus the weight
/// `cell_volume * inside_fraction`.
#[derive(Debug, Clone, Copy)]
pub struct BallCell {
    pub iz: usize,
    pub iy: usize,
    pub ix: usize,
    pub weight: f64,
}

/// Midpoint-rule weights approximating the indicator of a periodic ball.
#[derive(Debug, Clone)]
pub struct BallQuadrature {
    pub center: [f64; 3],
    pub radius: f64,
    pub cells: Vec<BallCell>,
    pub weight_sum: f64,
}

/// Per-cell volume fractions estimated with `subsamples^3` stratified points.
pub fn ball_quadrature(
    grid: &Grid,
    center: [f64; 3],
    r: f64,
    subsamples: usize,
) -> Result<BallQuadrature> {
    if subsamples == 0 {
        return Err(Error::InvalidParameter("subsamples must be at least 1".into()));
    }
    let floor = grid.resolution_floor();
    if r < floor * (1.0 - 1e-12) {
        return Err(Error::ResolutionFloor { r, floor });
    }
    let h = grid.h();
    let l = grid.domain_length;
    let half_diag = 0.5 * h * 3f64.sqrt();
    let n = [grid.nx, grid.ny, grid.nz];

    // Index window per axis around the center; whole axis once it wraps.
    let axis_range = |c: f64, n: usize| -> Vec<usize> {
        let lo = ((c - r) / h).floor() as i64 - 1;
        let hi = ((c + r) / h).ceil() as i64 + 1;
        if hi - lo + 1 >= n as i64 {
            (0..n).collect()
        } else {
            (lo..=hi).map(|i| i.rem_euclid(n as i64) as usize).collect()
        }
    };
    let xs = axis_range(center[0], n[0]);
    let ys = axis_range(center[1], n[1]);
    let zs = axis_range(center[2], n[2]);

    let cell_vol = h * h * h;
    let s = subsamples;
    let inv_s = 1.0 / s as f64;
    let mut cells = Vec::new();
    let mut weight_sum = 0.0;
    let min_dist = |p: [f64; 3]| -> f64 {
        let mut d2 = 0.0;
        for a in 0..3 {
            let raw = (p[a] - center[a] + 0.5 * l).rem_euclid(l) - 0.5 * l;
            d2 += raw * raw;
        }
        d2.sqrt()
    };

    for &iz in &zs {
        for &iy in &ys {
            for &ix in &xs {
                let p = grid.position(ix, iy, iz);
                let d = min_dist(p);
                let frac = if d + half_diag <= r {
                    1.0
                } else if d - half_diag >= r {
                    continue;
                } else {
                    let mut inside = 0usize;
                    for az in 0..s {
                        for ay in 0..s {
                            for ax in 0..s {
                                let q = [
                                    p[0] + ((ax as f64 + 0.5) * inv_s - 0.5) * h,
                                    p[1] + ((ay as f64 + 0.5) * inv_s - 0.5) * h,
                                    p[2] + ((az as f64 + 0.5) * inv_s - 0.5) * h,
                                ];
                                if min_dist(q) < r {
                                    inside += 1;
                                }
                            }
                        }
                    }
                    inside as f64 / (s * s * s) as f64
                };
                if frac > 0.0 {
                    let weight = cell_vol * frac;
                    cells.push(BallCell { iz, iy, ix, weight });
                    weight_sum += weight;
                }
            }
        }
    }
    Ok(BallQuadrature { center, radius: r, cells, weight_sum })
}

/// Time-slice weights for one backward window `(t - r^2, t)`.
///
/// Integral weights come from the piecewise-linear interpolant clipped to the
/// exact window, so the weight total is exactly `r^2`. Sup-type norms use the
/// inclusive range between the slices nearest to both window endpoints.
#[derive(Debug, Clone)]
pub struct TimeWindow {
    pub j_first: usize,
    pub j_last: usize,
    pub weights: Vec<f64>,
    pub sup_first: usize,
    pub sup_last: usize,
}

impl TimeWindow {
    /// Slice indices paired with their integral weights.
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.j_first..=self.j_last).zip(self.weights.iter().copied())
    }

    pub fn sup_slices(&self) -> impl Iterator<Item = usize> {
        self.sup_first..=self.sup_last
    }
}

pub fn time_window(grid: &Grid, t_end: f64, r: f64) -> Result<TimeWindow> {
    let a = t_end - r * r;
    let b = t_end;
    let tol = 1e-9 * grid.dt;
    if a < grid.t0 - tol {
        return Err(Error::CylinderOutOfRange(format!(
            "window start {a} before first sample {}",
            grid.t0
        )));
    }
    if b > grid.last_time() + tol {
        return Err(Error::CylinderOutOfRange(format!(
            "window end {b} beyond last sample {}",
            grid.last_time()
        )));
    }
    let dt = grid.dt;
    let jf = (((a - grid.t0) / dt).floor().max(0.0)) as usize;
    let jl = ((((b - grid.t0) / dt).ceil()) as usize).min(grid.nt - 1).max(jf + 1);
    let mut weights = vec![0.0; jl - jf + 1];
    for j in jf..jl {
        let t_lo = grid.time_at(j);
        let t_hi = grid.time_at(j + 1);
        let lo = t_lo.max(a);
        let hi = t_hi.min(b);
        if hi <= lo {
            continue;
        }
        // Integrate the two linear hat weights over the clipped overlap.
        weights[j - jf] += ((t_hi - lo).powi(2) - (t_hi - hi).powi(2)) / (2.0 * dt);
        weights[j + 1 - jf] += ((hi - t_lo).powi(2) - (lo - t_lo).powi(2)) / (2.0 * dt);
    }
    let sup_first = grid.nearest_slice(a);
    let sup_last = grid.nearest_slice(b).max(sup_first);
    Ok(TimeWindow { j_first: jf, j_last: jl, weights, sup_first, sup_last })
}

/// Spatial ball weights plus the time window of one cylinder.
#[derive(Debug, Clone)]
pub struct CylinderQuadrature {
    pub grid: Grid,
    pub cylinder: ParabolicCylinder,
    pub ball: BallQuadrature,
    pub window: TimeWindow,
}

/// Quadrature weights for `Q` with `subsamples^3` stratified points per
/// boundary cell.
pub fn cylinder_mask(
    grid: &Grid,
    q: &ParabolicCylinder,
    subsamples: usize,
) -> Result<CylinderQuadrature> {
    q.validate(grid)?;
    let ball = ball_quadrature(grid, q.center, q.r, subsamples)?;
    let window = time_window(grid, q.t, q.r)?;
    Ok(CylinderQuadrature { grid: *grid, cylinder: *q, ball, window })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldlab::make_grid;
    use std::f64::consts::PI;

    #[test]
    fn whole_box_ball_has_full_weights() {
        let g = make_grid(8, 2, 1.0, 0.1, 0.0).unwrap();
        // radius beyond the torus diameter: every cell fully inside
        let ball = ball_quadrature(&g, [0.5, 0.5, 0.5], 2.0, 1).unwrap();
        assert_eq!(ball.cells.len(), 8 * 8 * 8);
        let cell_vol = g.h().powi(3);
        assert!(ball.cells.iter().all(|c| (c.weight - cell_vol).abs() < 1e-15));
        assert!((ball.weight_sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_radius_below_floor() {
        let g = make_grid(64, 4, 2.0 * PI, 0.1, 0.0).unwrap();
        let err = ball_quadrature(&g, [PI, PI, PI], 2.0 * g.h(), 2);
        assert!(matches!(err, Err(Error::ResolutionFloor { .. })));
    }

    #[test]
    fn ball_volume_within_one_percent() {
        // |B_0.5| = (4 pi / 3) * 0.125 on a 64^3 box of side 2 pi
        let g = make_grid(64, 4, 2.0 * PI, 0.1, 0.0).unwrap();
        let ball = ball_quadrature(&g, [PI, PI, PI], 0.5, 4).unwrap();
        let exact = 4.0 * PI / 3.0 * 0.125;
        assert!(
            (ball.weight_sum - exact).abs() / exact < 0.01,
            "got {} want {}",
            ball.weight_sum,
            exact
        );
    }

    #[test]
    fn ball_volume_error_improves_on_refinement_ladders() {
        let exact = 4.0 * PI / 3.0 * 0.8f64.powi(3);
        let centers = [
            [3.05, 2.9, 3.2],
            [2.7, 3.3, 3.0],
            [3.14, 3.14, 3.14],
            [2.95, 3.07, 2.83],
        ];
        // finer grids at fixed subsampling
        let mut grid_errs = Vec::new();
        for n in [32usize, 64, 128] {
            let g = make_grid(n, 4, 2.0 * PI, 0.1, 0.0).unwrap();
            let mean: f64 = centers
                .iter()
                .map(|&c| {
                    let b = ball_quadrature(&g, c, 0.8, 2).unwrap();
                    (b.weight_sum - exact).abs() / exact
                })
                .sum::<f64>()
                / centers.len() as f64;
            grid_errs.push(mean);
        }
        for k in 1..grid_errs.len() {
            assert!(
                grid_errs[k] < grid_errs[k - 1],
                "grid refinement not improving: {grid_errs:?}"
            );
        }
        // more stratified points at fixed grid
        let g = make_grid(32, 4, 2.0 * PI, 0.1, 0.0).unwrap();
        let sub_err = |s: usize| -> f64 {
            centers
                .iter()
                .map(|&c| {
                    let b = ball_quadrature(&g, c, 0.8, s).unwrap();
                    (b.weight_sum - exact).abs() / exact
                })
                .sum::<f64>()
                / centers.len() as f64
        };
        let coarse = sub_err(1);
        let fine = sub_err(8);
        assert!(fine < coarse, "subsampling not improving: {coarse} -> {fine}");
    }

    #[test]
    fn time_window_weights_sum_to_r_squared() {
        let g = make_grid(16, 33, 2.0 * PI, 0.08, -2.56).unwrap();
        let w = time_window(&g, 0.0, 0.9).unwrap();
        let total: f64 = w.weights.iter().sum();
        assert!((total - 0.81).abs() < 1e-12);
    }

    #[test]
    fn cylinder_exiting_time_range_errors() {
        let g = make_grid(16, 4, 2.0 * PI, 0.1, 0.0).unwrap();
        let q = ParabolicCylinder::new([PI, PI, PI], 0.3, 1.6);
        assert!(matches!(
            cylinder_mask(&g, &q, 1),
            Err(Error::CylinderOutOfRange(_))
        ));
    }
}
