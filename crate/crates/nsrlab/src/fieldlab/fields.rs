//! Sampled scalar and vector fields and the combined velocity/pressure stack.

use ndarray::{Array4, Array5, ArrayView3, ArrayView4, s};

use crate::error::{Error, Result};
use super::grid::Grid;

/// Scalar samples with layout `(t, z, y, x)`.
#[derive(Debug, Clone)]
pub struct ScalarField {
    pub grid: Grid,
    pub data: Array4<f64>,
}

/// Three-component samples with layout `(t, z, y, x, component)`.
#[derive(Debug, Clone)]
pub struct VectorField {
    pub grid: Grid,
    pub data: Array5<f64>,
}

impl ScalarField {
    pub fn zeros(grid: Grid) -> Self {
        let data = Array4::zeros((grid.nt, grid.nz, grid.ny, grid.nx));
        ScalarField { grid, data }
    }

    /// Sample `f(x, y, z, t)` on every grid point.
    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64, f64, f64) -> f64 + Sync) -> Self {
        let mut out = ScalarField::zeros(grid);
        let h = grid.h();
        for j in 0..grid.nt {
            let t = grid.time_at(j);
            for iz in 0..grid.nz {
                for iy in 0..grid.ny {
                    for ix in 0..grid.nx {
                        out.data[[j, iz, iy, ix]] =
                            f(ix as f64 * h, iy as f64 * h, iz as f64 * h, t);
                    }
                }
            }
        }
        out
    }

    /// View of one time slice, shape `(z, y, x)`.
    pub fn slice(&self, j: usize) -> ArrayView3<'_, f64> {
        self.data.slice(s![j, .., .., ..])
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

impl VectorField {
    pub fn zeros(grid: Grid) -> Self {
        let data = Array5::zeros((grid.nt, grid.nz, grid.ny, grid.nx, 3));
        VectorField { grid, data }
    }

    /// Sample `f(x, y, z, t) -> [f64; 3]` on every grid point.
    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64, f64, f64) -> [f64; 3] + Sync) -> Self {
        let mut out = VectorField::zeros(grid);
        let h = grid.h();
        for j in 0..grid.nt {
            let t = grid.time_at(j);
            for iz in 0..grid.nz {
                for iy in 0..grid.ny {
                    for ix in 0..grid.nx {
                        let v = f(ix as f64 * h, iy as f64 * h, iz as f64 * h, t);
                        for c in 0..3 {
                            out.data[[j, iz, iy, ix, c]] = v[c];
                        }
                    }
                }
            }
        }
        out
    }

    /// View of one time slice, shape `(z, y, x, 3)`.
    pub fn slice(&self, j: usize) -> ArrayView4<'_, f64> {
        self.data.slice(s![j, .., .., .., ..])
    }

    /// View of one component of one time slice, shape `(z, y, x)`.
    pub fn component(&self, j: usize, c: usize) -> ArrayView3<'_, f64> {
        self.data.slice(s![j, .., .., .., c])
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Pointwise Euclidean magnitude as a scalar field.
    pub fn magnitude(&self) -> ScalarField {
        let mut out = ScalarField::zeros(self.grid);
        ndarray::Zip::from(&mut out.data)
            .and(self.data.slice(s![.., .., .., .., 0]))
            .and(self.data.slice(s![.., .., .., .., 1]))
            .and(self.data.slice(s![.., .., .., .., 2]))
            .for_each(|m, &a, &b, &c| *m = (a * a + b * b + c * c).sqrt());
        out
    }
}

/// Velocity, pressure, vorticity and force samples sharing one grid.
///
/// `w` may be absent (derivable) or marked derived; `p` and `f` are optional.
/// Stacks produced by mock generators that do not solve the momentum equation
/// carry `non_solution = true` and are refused by the energy checks.
#[derive(Debug, Clone)]
pub struct FieldStack {
    pub grid: Grid,
    pub u: VectorField,
    pub p: Option<ScalarField>,
    pub w: Option<VectorField>,
    pub f: Option<VectorField>,
    pub w_is_derived: bool,
    pub non_solution: bool,
    /// Viscosity of the momentum equation the samples solve, when known;
    /// the energy ledger weights its dissipation terms with it.
    pub viscosity: Option<f64>,
}

impl FieldStack {
    pub fn new(grid: Grid, u: VectorField) -> Result<Self> {
        let stack = FieldStack {
            grid,
            u,
            p: None,
            w: None,
            f: None,
            w_is_derived: false,
            non_solution: false,
            viscosity: None,
        };
        stack.validate()?;
        Ok(stack)
    }

    /// Check grid agreement and that no NaN/Inf survived ingestion.
    pub fn validate(&self) -> Result<()> {
        if !self.u.grid.same_mesh(&self.grid) {
            return Err(Error::GridMismatch);
        }
        if !self.u.is_finite() {
            return Err(Error::FieldValidation("velocity contains non-finite samples".into()));
        }
        if let Some(p) = &self.p {
            if !p.grid.same_mesh(&self.grid) {
                return Err(Error::GridMismatch);
            }
            if !p.is_finite() {
                return Err(Error::FieldValidation("pressure contains non-finite samples".into()));
            }
        }
        for (name, v) in [("vorticity", &self.w), ("force", &self.f)] {
            if let Some(v) = v {
                if !v.grid.same_mesh(&self.grid) {
                    return Err(Error::GridMismatch);
                }
                if !v.is_finite() {
                    return Err(Error::FieldValidation(format!(
                        "{name} contains non-finite samples"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn pressure(&self) -> Result<&ScalarField> {
        self.p.as_ref().ok_or(Error::MissingField("pressure"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldlab::make_grid;

    #[test]
    fn rejects_nan_samples() {
        let g = make_grid(8, 2, 1.0, 0.1, 0.0).unwrap();
        let mut u = VectorField::zeros(g);
        u.data[[0, 0, 0, 0, 0]] = f64::NAN;
        assert!(FieldStack::new(g, u).is_err());
    }

    #[test]
    fn magnitude_of_unit_axis_field() {
        let g = make_grid(8, 2, 1.0, 0.1, 0.0).unwrap();
        let u = VectorField::from_fn(g, |_, _, _, _| [3.0, 4.0, 0.0]);
        let m = u.magnitude();
        assert!((m.data[[1, 2, 3, 4]] - 5.0).abs() < 1e-15);
    }
}
