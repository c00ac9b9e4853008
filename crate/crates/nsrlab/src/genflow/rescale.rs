//! The exact scaling map on sampled stacks.

use crate::error::{Error, Result};
use crate::fieldlab::{FieldStack, Grid, ScalarField, VectorField};

/// Apply `u -> lambda u(lambda x, lambda^2 t)`, `p -> lambda^2 p`,
/// `w -> lambda^2 w`, `f -> lambda^3 f` for an integer power-of-two `lambda`.
///
/// Spatially, `lambda x` lands on grid points, so the spectral resample
/// reduces to exact index selection. In time the slice times are relabeled
/// `t_j -> t_j / lambda^2` (pure slice selection, never interpolation), which
/// shrinks the covered window by `lambda^2`.
pub fn rescale(stack: &FieldStack, lambda: u32) -> Result<FieldStack> {
    if lambda == 0 || !lambda.is_power_of_two() {
        return Err(Error::TimeMisaligned(format!(
            "lambda = {lambda} must be a positive integer power of two"
        )));
    }
    if lambda == 1 {
        return Ok(stack.clone());
    }
    let lam = lambda as f64;
    let lam2 = lam * lam;
    let g = stack.grid;
    let grid = Grid {
        nx: g.nx,
        ny: g.ny,
        nz: g.nz,
        nt: g.nt,
        domain_length: g.domain_length,
        dt: g.dt / lam2,
        t0: g.t0 / lam2,
    };
    let map_vector = |src: &VectorField, factor: f64| -> VectorField {
        let mut out = VectorField::zeros(grid);
        let l = lambda as usize;
        for j in 0..g.nt {
            for iz in 0..g.nz {
                for iy in 0..g.ny {
                    for ix in 0..g.nx {
                        let (sz, sy, sx) =
                            ((iz * l) % g.nz, (iy * l) % g.ny, (ix * l) % g.nx);
                        for c in 0..3 {
                            out.data[[j, iz, iy, ix, c]] =
                                factor * src.data[[j, sz, sy, sx, c]];
                        }
                    }
                }
            }
        }
        out
    };
    let map_scalar = |src: &ScalarField, factor: f64| -> ScalarField {
        let mut out = ScalarField::zeros(grid);
        let l = lambda as usize;
        for j in 0..g.nt {
            for iz in 0..g.nz {
                for iy in 0..g.ny {
                    for ix in 0..g.nx {
                        let (sz, sy, sx) =
                            ((iz * l) % g.nz, (iy * l) % g.ny, (ix * l) % g.nx);
                        out.data[[j, iz, iy, ix]] = factor * src.data[[j, sz, sy, sx]];
                    }
                }
            }
        }
        out
    };
    let u = map_vector(&stack.u, lam);
    let mut out = FieldStack::new(grid, u)?;
    out.p = stack.p.as_ref().map(|p| map_scalar(p, lam2));
    out.w = stack.w.as_ref().map(|w| map_vector(w, lam2));
    out.f = stack.f.as_ref().map(|f| map_vector(f, lam * lam2));
    out.w_is_derived = stack.w_is_derived;
    out.non_solution = stack.non_solution;
    out.viscosity = stack.viscosity;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldlab::make_grid;
    use crate::genflow::{generate, FlowFamily, FlowSpec};
    use std::f64::consts::PI;

    #[test]
    fn identity_at_lambda_one() {
        let g = make_grid(16, 4, 2.0 * PI, 0.1, -0.3).unwrap();
        let spec = FlowSpec::new(FlowFamily::Abc { a: 1.0, b: 0.6, c: 0.8, nu: 0.1, mode: 1 });
        let stack = generate(&spec, &g).unwrap();
        let same = rescale(&stack, 1).unwrap();
        assert_eq!(stack.u.data, same.u.data);
        assert_eq!(stack.grid.dt, same.grid.dt);
    }

    #[test]
    fn lambda_must_be_power_of_two() {
        let g = make_grid(16, 4, 2.0 * PI, 0.1, -0.3).unwrap();
        let spec = FlowSpec::new(FlowFamily::Abc { a: 1.0, b: 0.0, c: 0.0, nu: 0.1, mode: 1 });
        let stack = generate(&spec, &g).unwrap();
        assert!(rescale(&stack, 3).is_err());
        assert!(rescale(&stack, 0).is_err());
    }

    #[test]
    fn pointwise_scaling_is_exact_on_band_limited_fields() {
        // u_lambda(x, t) = 2 u(2x, 4t) sample for sample
        let g = make_grid(32, 9, 2.0 * PI, 0.05, -0.4).unwrap();
        let spec = FlowSpec::new(FlowFamily::Abc { a: 0.9, b: 0.7, c: 1.2, nu: 0.1, mode: 1 });
        let stack = generate(&spec, &g).unwrap();
        let scaled = rescale(&stack, 2).unwrap();
        assert!((scaled.grid.dt - g.dt / 4.0).abs() < 1e-18);
        let h = g.h();
        let mut worst = 0.0f64;
        for j in 0..g.nt {
            let t = scaled.grid.time_at(j);
            for iz in 0..g.nz {
                for iy in 0..g.ny {
                    for ix in 0..g.nx {
                        let x = ix as f64 * h;
                        let y = iy as f64 * h;
                        let z = iz as f64 * h;
                        let kappa = 1.0;
                        let e = (-0.1 * kappa * kappa * 4.0 * t).exp();
                        let exact = [
                            2.0 * e * (0.9 * (2.0 * z).sin() + 1.2 * (2.0 * y).cos()),
                            2.0 * e * (0.7 * (2.0 * x).sin() + 0.9 * (2.0 * z).cos()),
                            2.0 * e * (1.2 * (2.0 * y).sin() + 0.7 * (2.0 * x).cos()),
                        ];
                        for c in 0..3 {
                            worst = worst
                                .max((scaled.u.data[[j, iz, iy, ix, c]] - exact[c]).abs());
                        }
                    }
                }
            }
        }
        assert!(worst < 1e-10, "pointwise scaling defect {worst}");
    }
}
