//! Analytic and random test-field generation.

use ndarray::{Array3, Zip};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fieldlab::{smoothstep_quintic, FieldStack, Grid, ScalarField, VectorField};
use crate::singops::SpectralOps;

/// Constant body force, the only analytic force description supported.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ForceSpec {
    Constant([f64; 3]),
}

/// Supported test-field families.
#[derive(Debug, Clone, PartialEq)]
pub enum FlowFamily {
    /// Beltrami triple-mode flow: an exact decaying solution with
    /// `curl u = kappa u` and pressure `-|u|^2/2` (mean-zeroed).
    Abc { a: f64, b: f64, c: f64, nu: f64, mode: u32 },
    /// One Beltrami mode only (the `b = c = 0` member of the family).
    SingleModeBeltrami { amplitude: f64, nu: f64, mode: u32 },
    /// Stationary swirl `amp * m(s) * (axis x d) / s^2` whose magnitude
    /// scales like `1/s`; mollified at the center, tapered near the torus
    /// seam, divergence-free by construction, and *not* a solution.
    HomogeneousMinusOne {
        amplitude: f64,
        r_moll: f64,
        taper_start: f64,
        taper_end: f64,
        center: [f64; 3],
        axis: [f64; 3],
    },
    /// Steady band-limited solenoidal snapshot with the compatible pressure
    /// from the momentum-flux Poisson solve.
    RandomSolenoidal { seed: u64, max_mode: usize, amplitude: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowSpec {
    pub family: FlowFamily,
    pub force: Option<ForceSpec>,
}

impl FlowSpec {
    pub fn new(family: FlowFamily) -> Self {
        FlowSpec { family, force: None }
    }
}

/// Sample a flow family onto a grid.
pub fn generate(spec: &FlowSpec, grid: &Grid) -> Result<FieldStack> {
    let mut stack = match &spec.family {
        FlowFamily::Abc { a, b, c, nu, mode } => abc(grid, *a, *b, *c, *nu, *mode)?,
        FlowFamily::SingleModeBeltrami { amplitude, nu, mode } => {
            abc(grid, *amplitude, 0.0, 0.0, *nu, *mode)?
        }
        FlowFamily::HomogeneousMinusOne {
            amplitude,
            r_moll,
            taper_start,
            taper_end,
            center,
            axis,
        } => homogeneous(grid, *amplitude, *r_moll, *taper_start, *taper_end, *center, *axis)?,
        FlowFamily::RandomSolenoidal { seed, max_mode, amplitude } => {
            random_solenoidal(grid, *seed, *max_mode, *amplitude)?
        }
    };
    if let Some(ForceSpec::Constant(f)) = spec.force {
        stack.f = Some(VectorField::from_fn(*grid, move |_, _, _, _| f));
    }
    stack.validate()?;
    Ok(stack)
}

fn abc(grid: &Grid, a: f64, b: f64, c: f64, nu: f64, mode: u32) -> Result<FieldStack> {
    if mode == 0 {
        return Err(Error::InvalidParameter("Beltrami mode must be positive".into()));
    }
    let kappa = 2.0 * std::f64::consts::PI * mode as f64 / grid.domain_length;
    let mean_sq = a * a + b * b + c * c;
    let profile = move |x: f64, y: f64, z: f64| {
        [
            a * (kappa * z).sin() + c * (kappa * y).cos(),
            b * (kappa * x).sin() + a * (kappa * z).cos(),
            c * (kappa * y).sin() + b * (kappa * x).cos(),
        ]
    };
    let decay = move |t: f64| (-nu * kappa * kappa * t).exp();
    let u = VectorField::from_fn(*grid, move |x, y, z, t| {
        let e = decay(t);
        let v = profile(x, y, z);
        [e * v[0], e * v[1], e * v[2]]
    });
    let p = ScalarField::from_fn(*grid, move |x, y, z, t| {
        let e = decay(t);
        let v = profile(x, y, z);
        let sq = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        0.5 * e * e * (mean_sq - sq)
    });
    let w = {
        let mut w = u.clone();
        w.data.mapv_inplace(|v| kappa * v);
        w
    };
    let mut stack = FieldStack::new(*grid, u)?;
    stack.p = Some(p);
    stack.w = Some(w);
    stack.w_is_derived = true;
    stack.viscosity = Some(nu);
    Ok(stack)
}

fn homogeneous(
    grid: &Grid,
    amplitude: f64,
    r_moll: f64,
    taper_start: f64,
    taper_end: f64,
    center: [f64; 3],
    axis: [f64; 3],
) -> Result<FieldStack> {
    if r_moll <= 2.0 * grid.h() {
        return Err(Error::InvalidParameter(format!(
            "mollification radius {r_moll} under-resolved; need more than two cells ({})",
            2.0 * grid.h()
        )));
    }
    if !(taper_start < taper_end) || taper_end > 0.5 * grid.domain_length {
        return Err(Error::InvalidParameter(format!(
            "taper ({taper_start}, {taper_end}) must increase and end inside the half box"
        )));
    }
    let norm = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
    if norm == 0.0 {
        return Err(Error::InvalidParameter("swirl axis must be nonzero".into()));
    }
    let ax = [axis[0] / norm, axis[1] / norm, axis[2] / norm];
    let g = *grid;
    let u = VectorField::from_fn(*grid, move |x, y, z, _| {
        let d = g.min_image(center, [x, y, z]);
        let s2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
        if s2 == 0.0 {
            return [0.0; 3];
        }
        let s = s2.sqrt();
        let m = smoothstep_quintic(s / r_moll)
            * (1.0 - smoothstep_quintic((s - taper_start) / (taper_end - taper_start)));
        let cross = [
            ax[1] * d[2] - ax[2] * d[1],
            ax[2] * d[0] - ax[0] * d[2],
            ax[0] * d[1] - ax[1] * d[0],
        ];
        let f = amplitude * m / s2;
        [f * cross[0], f * cross[1], f * cross[2]]
    });
    let p = pressure_from_kinetic(grid, &u);
    let ops = SpectralOps::for_grid(grid);
    let w = ops.curl(&u);
    let mut stack = FieldStack::new(*grid, u)?;
    stack.p = Some(p);
    stack.w = Some(w);
    stack.w_is_derived = true;
    stack.non_solution = true;
    Ok(stack)
}

/// `-|u|^2 / 2`, re-centered to box mean zero per slice.
fn pressure_from_kinetic(grid: &Grid, u: &VectorField) -> ScalarField {
    let mut p = ScalarField::zeros(*grid);
    for j in 0..grid.nt {
        let mean;
        {
            let uj = u.slice(j);
            let mut pj = p.data.index_axis_mut(ndarray::Axis(0), j);
            Zip::from(pj.view_mut()).and(uj.lanes(ndarray::Axis(3))).for_each(|pv, uv| {
                let sq = uv[0] * uv[0] + uv[1] * uv[1] + uv[2] * uv[2];
                *pv = -0.5 * sq;
            });
            mean = pj.sum() / grid.spatial_len() as f64;
        }
        p.data.index_axis_mut(ndarray::Axis(0), j).mapv_inplace(|v| v - mean);
    }
    p
}

fn random_solenoidal(
    grid: &Grid,
    seed: u64,
    max_mode: usize,
    amplitude: f64,
) -> Result<FieldStack> {
    if max_mode == 0 || max_mode >= grid.nx / 2 {
        return Err(Error::InvalidParameter(format!(
            "max_mode {max_mode} must sit strictly inside the resolved band"
        )));
    }
    let n = grid.nx;
    let ops = SpectralOps::for_grid(grid);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // white noise, band-limit, project solenoidal, normalize
    let mut uhat: Vec<Array3<Complex64>> = (0..3)
        .map(|_| {
            let mut re = Array3::<f64>::zeros((n, n, n));
            re.mapv_inplace(|_| rng.gen_range(-1.0..1.0));
            ops.forward(re.view())
        })
        .collect();
    let keep = |m: usize| -> bool {
        let signed = if m <= n / 2 { m as i64 } else { m as i64 - n as i64 };
        signed.unsigned_abs() as usize <= max_mode
    };
    for iz in 0..n {
        for iy in 0..n {
            for ix in 0..n {
                let inside = keep(ix) && keep(iy) && keep(iz) && (ix, iy, iz) != (0, 0, 0);
                let k = [ops.k_at(ix), ops.k_at(iy), ops.k_at(iz)];
                let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
                for c in 0..3 {
                    if !inside || k2 == 0.0 {
                        uhat[c][[iz, iy, ix]] = Complex64::default();
                    }
                }
                if inside && k2 > 0.0 {
                    let dot = k[0] * uhat[0][[iz, iy, ix]]
                        + k[1] * uhat[1][[iz, iy, ix]]
                        + k[2] * uhat[2][[iz, iy, ix]];
                    for (c, kc) in k.iter().enumerate() {
                        let v = uhat[c][[iz, iy, ix]] - dot * *kc / k2;
                        uhat[c][[iz, iy, ix]] = v;
                    }
                }
            }
        }
    }
    let comps: Vec<Array3<f64>> = uhat.iter().map(|h| ops.backward(h.clone())).collect();
    let rms = {
        let mut acc = 0.0;
        for c in &comps {
            acc += c.iter().map(|v| v * v).sum::<f64>();
        }
        (acc / (n * n * n) as f64).sqrt()
    };
    let scale = if rms > 0.0 { amplitude / rms } else { 0.0 };
    let mut u0 = [comps[0].clone(), comps[1].clone(), comps[2].clone()];
    for c in &mut u0 {
        c.mapv_inplace(|v| v * scale);
    }
    // compatible pressure: periodic solve of the momentum-flux divergence
    let p0 = {
        let mut acc = Array3::<Complex64>::zeros((n, n, n));
        for i in 0..3 {
            for jc in i..3 {
                let mut t = u0[i].clone();
                Zip::from(&mut t).and(&u0[jc]).for_each(|a, &b| *a *= b);
                let that = ops.forward(t.view());
                let factor = if i == jc { 1.0 } else { 2.0 };
                for iz in 0..n {
                    for iy in 0..n {
                        for ix in 0..n {
                            let k = [ops.k_at(ix), ops.k_at(iy), ops.k_at(iz)];
                            let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
                            if k2 > 0.0 {
                                acc[[iz, iy, ix]] -=
                                    that[[iz, iy, ix]] * (factor * k[i] * k[jc] / k2);
                            }
                        }
                    }
                }
            }
        }
        ops.backward(acc)
    };
    let w0 = ops.curl_slice([u0[0].view(), u0[1].view(), u0[2].view()]);

    // steady in time: replicate the snapshot
    let mut u = VectorField::zeros(*grid);
    let mut w = VectorField::zeros(*grid);
    let mut p = ScalarField::zeros(*grid);
    for j in 0..grid.nt {
        for c in 0..3 {
            u.data.slice_mut(ndarray::s![j, .., .., .., c]).assign(&u0[c]);
            w.data.slice_mut(ndarray::s![j, .., .., .., c]).assign(&w0[c]);
        }
        p.data.index_axis_mut(ndarray::Axis(0), j).assign(&p0);
    }
    let mut stack = FieldStack::new(*grid, u)?;
    stack.p = Some(p);
    stack.w = Some(w);
    stack.w_is_derived = true;
    stack.non_solution = true;
    Ok(stack)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldlab::make_grid;
    use crate::singops::vorticity_consistency;
    use std::f64::consts::PI;

    #[test]
    fn zero_amplitude_abc_is_zero() {
        let g = make_grid(16, 3, 2.0 * PI, 0.1, 0.0).unwrap();
        let spec = FlowSpec::new(FlowFamily::Abc { a: 0.0, b: 0.0, c: 0.0, nu: 0.1, mode: 1 });
        let stack = generate(&spec, &g).unwrap();
        assert!(stack.u.data.iter().all(|v| *v == 0.0));
        assert!(stack.p.unwrap().data.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn abc_decays_with_the_closed_form_factor() {
        // max |u| at t = 1 is e^(-nu) times the initial maximum
        let g = make_grid(24, 11, 2.0 * PI, 0.1, 0.0).unwrap();
        let spec =
            FlowSpec::new(FlowFamily::Abc { a: 1.0, b: 0.7, c: 1.3, nu: 0.1, mode: 1 });
        let stack = generate(&spec, &g).unwrap();
        let max_at = |j: usize| {
            stack
                .u
                .slice(j)
                .iter()
                .fold(0.0f64, |m, &v| m.max(v.abs()))
        };
        let ratio = max_at(10) / max_at(0);
        assert!((ratio - (-0.1f64).exp()).abs() < 1e-12, "ratio {ratio}");
    }

    #[test]
    fn abc_vorticity_is_consistent_with_curl() {
        let g = make_grid(16, 3, 2.0 * PI, 0.1, 0.0).unwrap();
        let spec = FlowSpec::new(FlowFamily::Abc { a: 1.0, b: 0.9, c: 1.1, nu: 0.05, mode: 1 });
        let stack = generate(&spec, &g).unwrap();
        assert!(stack.w_is_derived);
        let defect = vorticity_consistency(&stack).unwrap();
        assert!(defect < 1e-10, "curl defect {defect}");
    }

    #[test]
    fn abc_pressure_is_mean_zero_and_bernoulli() {
        let g = make_grid(16, 3, 2.0 * PI, 0.1, 0.0).unwrap();
        let spec = FlowSpec::new(FlowFamily::Abc { a: 1.0, b: 0.5, c: 0.8, nu: 0.1, mode: 1 });
        let stack = generate(&spec, &g).unwrap();
        let p = stack.p.as_ref().unwrap();
        let mean: f64 = p.slice(0).sum() / g.spatial_len() as f64;
        assert!(mean.abs() < 1e-12);
        // p + |u|^2/2 must be spatially constant
        let mut vals = Vec::new();
        for iz in [0usize, 5, 11] {
            let b = p.data[[0, iz, 3, 7]]
                + 0.5
                    * (0..3)
                        .map(|c| stack.u.data[[0, iz, 3, 7, c]].powi(2))
                        .sum::<f64>();
            vals.push(b);
        }
        assert!((vals[0] - vals[1]).abs() < 1e-12 && (vals[1] - vals[2]).abs() < 1e-12);
    }

    #[test]
    fn random_snapshot_is_divergence_free_and_seed_stable() {
        let g = make_grid(24, 2, 2.0 * PI, 0.1, -0.1).unwrap();
        let spec =
            FlowSpec::new(FlowFamily::RandomSolenoidal { seed: 7, max_mode: 3, amplitude: 1.0 });
        let s1 = generate(&spec, &g).unwrap();
        let s2 = generate(&spec, &g).unwrap();
        assert_eq!(s1.u.data, s2.u.data);
        let ops = SpectralOps::for_grid(&g);
        assert!(ops.max_relative_divergence(&s1.u) < 1e-10);
        assert!(s1.non_solution);
    }

    #[test]
    fn homogeneous_mock_requires_resolved_mollifier() {
        let g = make_grid(16, 2, 2.0 * PI, 0.1, 0.0).unwrap();
        let family = FlowFamily::HomogeneousMinusOne {
            amplitude: 1.0,
            r_moll: 0.1,
            taper_start: 2.2,
            taper_end: 2.9,
            center: [PI, PI, PI],
            axis: [0.0, 0.0, 1.0],
        };
        assert!(generate(&FlowSpec::new(family), &g).is_err());
    }

    #[test]
    fn homogeneous_mock_is_divergence_free() {
        let g = make_grid(48, 2, 2.0 * PI, 0.1, 0.0).unwrap();
        let family = FlowFamily::HomogeneousMinusOne {
            amplitude: 1.0,
            r_moll: 0.4,
            taper_start: 2.2,
            taper_end: 2.9,
            center: [PI, PI, PI],
            axis: [0.0, 0.0, 1.0],
        };
        let stack = generate(&FlowSpec::new(family), &g).unwrap();
        let ops = SpectralOps::for_grid(&g);
        // analytically solenoidal; the spectral reading picks up only the
        // mollifier's aliasing tail
        let div = ops.max_relative_divergence(&stack.u);
        assert!(div < 2e-2, "swirl divergence {div}");
        assert!(stack.non_solution);
    }
}
