//! Approximate parabolic Morrey norm of a force field.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fieldlab::{ball_quadrature, time_window, Grid, ParabolicCylinder, VectorField};

/// Sup-approximation parameters: a deterministic lattice of centers (every
/// `center_stride` cells, every feasible anchor slice) crossed with a radius
/// ladder.
#[derive(Debug, Clone)]
pub struct MorreyParams {
    pub gamma: f64,
    pub center_stride: usize,
    pub radii: Vec<f64>,
    pub subsamples: usize,
}

impl MorreyParams {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma <= 2.0) {
            return Err(Error::InvalidParameter(format!(
                "gamma = {gamma} outside (0, 2]; the space is trivial beyond 2"
            )));
        }
        Ok(MorreyParams { gamma, center_stride: 4, radii: Vec::new(), subsamples: 2 })
    }

    fn effective_radii(&self, grid: &Grid) -> Vec<f64> {
        if !self.radii.is_empty() {
            return self.radii.clone();
        }
        // geometric ladder from a quarter box down to the floor
        let mut r = grid.domain_length / 4.0;
        let floor = grid.resolution_floor();
        let mut out = Vec::new();
        while r >= floor && out.len() < 6 {
            out.push(r);
            r *= 0.5;
        }
        out
    }
}

/// The approximate supremum and the cylinder attaining it.
#[derive(Debug, Clone)]
pub struct MorreyEstimate {
    pub value: f64,
    pub maximizer: ParabolicCylinder,
    pub cylinders_checked: usize,
}

/// Scan the center lattice and radius ladder for the largest scaled squared
/// mass `r^{-(1+2 gamma)} * integral of |f|^2` and return its square root.
pub fn morrey_norm(f: &VectorField, params: &MorreyParams) -> Result<MorreyEstimate> {
    let grid = f.grid;
    let radii = params.effective_radii(&grid);
    if radii.is_empty() {
        return Err(Error::LadderInfeasible("no Morrey radius above the floor".into()));
    }
    let stride = params.center_stride.max(1);
    let mut best_val = 0.0f64;
    let mut best_cyl =
        ParabolicCylinder::new([0.0, 0.0, 0.0], grid.last_time(), radii[0]);
    let mut checked = 0usize;

    let mag2 = {
        let mut m = f.magnitude();
        m.data.mapv_inplace(|v| v * v);
        m
    };

    for &r in &radii {
        if r < grid.resolution_floor() {
            continue;
        }
        // translation-invariant ball pattern anchored at the origin sample
        let pattern = ball_quadrature(&grid, [0.0, 0.0, 0.0], r, params.subsamples)?;
        let centers: Vec<[usize; 3]> = {
            let mut cs = Vec::new();
            let mut iz = 0;
            while iz < grid.nz {
                let mut iy = 0;
                while iy < grid.ny {
                    let mut ix = 0;
                    while ix < grid.nx {
                        cs.push([ix, iy, iz]);
                        ix += stride;
                    }
                    iy += stride;
                }
                iz += stride;
            }
            cs
        };
        // per-center, per-slice ball mass of |f|^2
        let slice_mass: Vec<Vec<f64>> = centers
            .par_iter()
            .map(|c| {
                (0..grid.nt)
                    .map(|j| {
                        let mut acc = 0.0;
                        for cell in &pattern.cells {
                            let iz = (cell.iz + c[2]) % grid.nz;
                            let iy = (cell.iy + c[1]) % grid.ny;
                            let ix = (cell.ix + c[0]) % grid.nx;
                            acc += cell.weight * mag2.data[[j, iz, iy, ix]];
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        let scale = r.powf(-(1.0 + 2.0 * params.gamma));
        for jt in 0..grid.nt {
            let t_end = grid.time_at(jt);
            let window = match time_window(&grid, t_end, r) {
                Ok(w) => w,
                Err(_) => continue,
            };
            for (ci, c) in centers.iter().enumerate() {
                let mass: f64 =
                    window.iter().map(|(j, tau)| tau * slice_mass[ci][j]).sum();
                checked += 1;
                let val = scale * mass;
                if val > best_val {
                    best_val = val;
                    best_cyl = ParabolicCylinder::new(
                        grid.position(c[0], c[1], c[2]),
                        t_end,
                        r,
                    );
                }
            }
        }
    }
    Ok(MorreyEstimate { value: best_val.sqrt(), maximizer: best_cyl, cylinders_checked: checked })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldlab::make_grid;
    use std::f64::consts::PI;

    #[test]
    fn zero_force_has_zero_norm() {
        let g = make_grid(16, 6, 2.0 * PI, 0.5, -2.5).unwrap();
        let f = VectorField::zeros(g);
        let params = MorreyParams::new(1.0).unwrap();
        let est = morrey_norm(&f, &params).unwrap();
        assert_eq!(est.value, 0.0);
        assert!(est.cylinders_checked > 0);
    }

    #[test]
    fn constant_force_attains_sup_at_largest_radius() {
        // sup_r ((4 pi/3) c^2 r^(4 - 2 gamma))^(1/2) at gamma = 1 is
        // c sqrt(4 pi/3) r_max
        let c = 0.7;
        let g = make_grid(32, 10, 2.0 * PI, 0.3, -2.7).unwrap();
        let f = VectorField::from_fn(g, |_, _, _, _| [c, 0.0, 0.0]);
        let mut params = MorreyParams::new(1.0).unwrap();
        let r_max = 1.5;
        params.radii = vec![r_max, 1.0, 0.9];
        params.subsamples = 4;
        let est = morrey_norm(&f, &params).unwrap();
        let want = c * (4.0 * PI / 3.0f64).sqrt() * r_max;
        assert!(
            (est.value - want).abs() / want < 0.01,
            "got {} want {want}",
            est.value
        );
        assert!((est.maximizer.r - r_max).abs() < 1e-12);
    }

    #[test]
    fn gamma_above_two_rejected() {
        assert!(MorreyParams::new(2.5).is_err());
        assert!(MorreyParams::new(0.0).is_err());
    }
}
