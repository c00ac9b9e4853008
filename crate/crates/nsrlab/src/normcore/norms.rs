//! Mixed space-time norms over parabolic cylinders and ball averages.

use crate::error::{Error, Result};
use crate::fieldlab::{
    ball_quadrature, BallQuadrature, CylinderQuadrature, Grid, ScalarField, VectorField,
};

/// A scalar or vector field fed to the norm machinery; vectors enter through
/// their pointwise Euclidean magnitude.
#[derive(Clone, Copy)]
pub enum FieldRef<'a> {
    Scalar(&'a ScalarField),
    Vector(&'a VectorField),
}

impl<'a> FieldRef<'a> {
    fn grid(&self) -> &Grid {
        match self {
            FieldRef::Scalar(f) => &f.grid,
            FieldRef::Vector(f) => &f.grid,
        }
    }

    #[inline]
    fn mag(&self, j: usize, iz: usize, iy: usize, ix: usize) -> f64 {
        match self {
            FieldRef::Scalar(f) => f.data[[j, iz, iy, ix]].abs(),
            FieldRef::Vector(f) => {
                let a = f.data[[j, iz, iy, ix, 0]];
                let b = f.data[[j, iz, iy, ix, 1]];
                let c = f.data[[j, iz, iy, ix, 2]];
                (a * a + b * b + c * c).sqrt()
            }
        }
    }
}

fn space_norm(
    quad: &CylinderQuadrature,
    p: f64,
    mag: impl Fn(usize, usize, usize) -> f64,
) -> f64 {
    if p == f64::INFINITY {
        quad.ball
            .cells
            .iter()
            .map(|c| mag(c.iz, c.iy, c.ix))
            .fold(0.0, f64::max)
    } else {
        let sum: f64 = quad
            .ball
            .cells
            .iter()
            .map(|c| c.weight * mag(c.iz, c.iy, c.ix).powf(p))
            .sum();
        sum.powf(1.0 / p)
    }
}

fn time_compose(quad: &CylinderQuadrature, q: f64, space: impl Fn(usize) -> f64) -> f64 {
    if q == f64::INFINITY {
        quad.window.sup_slices().map(space).fold(0.0, f64::max)
    } else {
        let sum: f64 = quad.window.iter().map(|(j, tau)| tau * space(j).powf(q)).sum();
        sum.powf(1.0 / q)
    }
}

fn check_exponents(p: f64, q: f64) -> Result<()> {
    if !(p >= 1.0) || !(q >= 1.0) {
        return Err(Error::ExponentRegime(format!("(p, q) = ({p}, {q}) outside [1, inf]^2")));
    }
    Ok(())
}

/// `L^q`-in-time of `L^p`-in-space of `|field|` over the cylinder.
pub fn mixed_norm(field: FieldRef<'_>, quad: &CylinderQuadrature, p: f64, q: f64) -> Result<f64> {
    check_exponents(p, q)?;
    if !field.grid().same_mesh(&quad.grid) {
        return Err(Error::GridMismatch);
    }
    Ok(time_compose(quad, q, |j| space_norm(quad, p, |iz, iy, ix| field.mag(j, iz, iy, ix))))
}

/// Mixed norm of `u - (u)_r(s)` where the slice-wise average runs over the
/// cylinder's own ball.
pub fn mixed_norm_centered(
    u: &VectorField,
    quad: &CylinderQuadrature,
    p: f64,
    q: f64,
) -> Result<f64> {
    check_exponents(p, q)?;
    if !u.grid.same_mesh(&quad.grid) {
        return Err(Error::GridMismatch);
    }
    let lo = quad.window.j_first.min(quad.window.sup_first);
    let hi = quad.window.j_last.max(quad.window.sup_last);
    let means: Vec<[f64; 3]> = (lo..=hi).map(|j| ball_mean(u, j, &quad.ball)).collect();
    let mag = |j: usize, iz: usize, iy: usize, ix: usize| {
        let m = means[j - lo];
        let a = u.data[[j, iz, iy, ix, 0]] - m[0];
        let b = u.data[[j, iz, iy, ix, 1]] - m[1];
        let c = u.data[[j, iz, iy, ix, 2]] - m[2];
        (a * a + b * b + c * c).sqrt()
    };
    Ok(time_compose(quad, q, |j| space_norm(quad, p, |iz, iy, ix| mag(j, iz, iy, ix))))
}

/// Component-wise weighted ball mean of one time slice.
pub fn ball_mean(u: &VectorField, j: usize, ball: &BallQuadrature) -> [f64; 3] {
    let mut acc = [0.0f64; 3];
    for cell in &ball.cells {
        for (a, acc_a) in acc.iter_mut().enumerate() {
            *acc_a += cell.weight * u.data[[j, cell.iz, cell.iy, cell.ix, a]];
        }
    }
    if ball.weight_sum > 0.0 {
        for a in &mut acc {
            *a /= ball.weight_sum;
        }
    }
    acc
}

/// Weighted ball mean of a scalar slice.
pub fn scalar_ball_mean(f: &ScalarField, j: usize, ball: &BallQuadrature) -> f64 {
    let mut acc = 0.0;
    for cell in &ball.cells {
        acc += cell.weight * f.data[[j, cell.iz, cell.iy, cell.ix]];
    }
    if ball.weight_sum > 0.0 {
        acc / ball.weight_sum
    } else {
        0.0
    }
}

/// Slice-wise spatial average of `u` over the ball of radius `r` around `x`,
/// taken at the sample nearest to time `s`.
pub fn spatial_average(
    u: &VectorField,
    x: [f64; 3],
    r: f64,
    s: f64,
    subsamples: usize,
) -> Result<[f64; 3]> {
    let grid = u.grid;
    let tol = 1e-9 * grid.dt;
    if s < grid.t0 - tol || s > grid.last_time() + tol {
        return Err(Error::CylinderOutOfRange(format!("time {s} outside sampled range")));
    }
    let ball = ball_quadrature(&grid, x, r, subsamples)?;
    Ok(ball_mean(u, grid.nearest_slice(s), &ball))
}
