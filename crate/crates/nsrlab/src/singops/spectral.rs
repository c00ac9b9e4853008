//! Fourier-symbol differentiation on the periodic grid.

use std::sync::Arc;

use ndarray::{Array3, ArrayView3, Zip};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::fieldlab::{Grid, ScalarField, VectorField};

/// Cached transform plans and derivative symbols for one cubic mesh.
///
/// The first-derivative symbol at the Nyquist mode is zero, so the discrete
/// identities `div(curl .) = 0` and `curl(grad .) = 0` hold to round-off.
pub struct SpectralOps {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    k: Vec<f64>,
}

impl SpectralOps {
    pub fn new(n: usize, box_len: f64) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let base = 2.0 * std::f64::consts::PI / box_len;
        let k = (0..n)
            .map(|m| {
                if 2 * m == n {
                    0.0
                } else if m <= n / 2 {
                    base * m as f64
                } else {
                    base * (m as i64 - n as i64) as f64
                }
            })
            .collect();
        SpectralOps { n, fwd, inv, k }
    }

    pub fn for_grid(grid: &Grid) -> Self {
        SpectralOps::new(grid.nx, grid.domain_length)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Derivative symbol along one axis (`0 = x`, varies along the last array
    /// index).
    pub fn k_at(&self, m: usize) -> f64 {
        self.k[m]
    }

    fn fft3_inplace(&self, data: &mut Array3<Complex64>, inverse: bool) {
        let n = self.n;
        let plan = if inverse { &self.inv } else { &self.fwd };
        let buf = data.as_slice_mut().expect("spectral buffers are contiguous");
        let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
        // x lanes are contiguous
        for chunk in buf.chunks_exact_mut(n) {
            plan.process_with_scratch(chunk, &mut scratch);
        }
        // y lanes, stride n within each z block
        let mut lane = vec![Complex64::default(); n];
        for z in 0..n {
            let block = &mut buf[z * n * n..(z + 1) * n * n];
            for x in 0..n {
                for y in 0..n {
                    lane[y] = block[y * n + x];
                }
                plan.process_with_scratch(&mut lane, &mut scratch);
                for y in 0..n {
                    block[y * n + x] = lane[y];
                }
            }
        }
        // z lanes, stride n^2
        for y in 0..n {
            for x in 0..n {
                let base = y * n + x;
                for z in 0..n {
                    lane[z] = buf[z * n * n + base];
                }
                plan.process_with_scratch(&mut lane, &mut scratch);
                for z in 0..n {
                    buf[z * n * n + base] = lane[z];
                }
            }
        }
        if inverse {
            let scale = 1.0 / (n * n * n) as f64;
            for v in buf.iter_mut() {
                *v *= scale;
            }
        }
    }

    /// Forward transform of a real slice.
    pub fn forward(&self, f: ArrayView3<'_, f64>) -> Array3<Complex64> {
        let mut c = f.mapv(|v| Complex64::new(v, 0.0));
        self.fft3_inplace(&mut c, false);
        c
    }

    /// Inverse transform, real part.
    pub fn backward(&self, mut fhat: Array3<Complex64>) -> Array3<f64> {
        self.fft3_inplace(&mut fhat, true);
        fhat.mapv(|v| v.re)
    }

    /// Multiply a spectrum by `i k_axis`.
    pub fn apply_derivative(&self, fhat: &Array3<Complex64>, axis: usize) -> Array3<Complex64> {
        let n = self.n;
        let mut out = fhat.clone();
        for iz in 0..n {
            for iy in 0..n {
                for ix in 0..n {
                    let k = match axis {
                        0 => self.k[ix],
                        1 => self.k[iy],
                        _ => self.k[iz],
                    };
                    out[[iz, iy, ix]] *= Complex64::new(0.0, k);
                }
            }
        }
        out
    }

    fn apply_neg_ksq(&self, fhat: &mut Array3<Complex64>) {
        let n = self.n;
        for iz in 0..n {
            for iy in 0..n {
                for ix in 0..n {
                    let k2 = self.k[ix] * self.k[ix]
                        + self.k[iy] * self.k[iy]
                        + self.k[iz] * self.k[iz];
                    fhat[[iz, iy, ix]] *= -k2;
                }
            }
        }
    }

    /// Gradient of a scalar slice: `[d/dx, d/dy, d/dz]`.
    pub fn gradient_slice(&self, f: ArrayView3<'_, f64>) -> [Array3<f64>; 3] {
        let fhat = self.forward(f);
        [0, 1, 2].map(|a| self.backward(self.apply_derivative(&fhat, a)))
    }

    /// Divergence of a vector slice given per-component views.
    pub fn divergence_slice(&self, v: [ArrayView3<'_, f64>; 3]) -> Array3<f64> {
        let mut acc: Option<Array3<Complex64>> = None;
        for (a, comp) in v.into_iter().enumerate() {
            let d = self.apply_derivative(&self.forward(comp), a);
            acc = Some(match acc {
                None => d,
                Some(mut t) => {
                    t += &d;
                    t
                }
            });
        }
        self.backward(acc.unwrap())
    }

    /// Curl of a vector slice.
    pub fn curl_slice(&self, v: [ArrayView3<'_, f64>; 3]) -> [Array3<f64>; 3] {
        let vh: Vec<Array3<Complex64>> = v.into_iter().map(|c| self.forward(c)).collect();
        let d = |comp: usize, axis: usize| self.apply_derivative(&vh[comp], axis);
        let cx = {
            let mut t = d(2, 1);
            t -= &d(1, 2);
            t
        };
        let cy = {
            let mut t = d(0, 2);
            t -= &d(2, 0);
            t
        };
        let cz = {
            let mut t = d(1, 0);
            t -= &d(0, 1);
            t
        };
        [self.backward(cx), self.backward(cy), self.backward(cz)]
    }

    /// Laplacian of a scalar slice (squared first-derivative symbols, so it
    /// composes consistently with the other operators).
    pub fn laplacian_slice(&self, f: ArrayView3<'_, f64>) -> Array3<f64> {
        let mut fhat = self.forward(f);
        self.apply_neg_ksq(&mut fhat);
        self.backward(fhat)
    }

    /// Curl of a whole stack.
    pub fn curl(&self, v: &VectorField) -> VectorField {
        let grid = v.grid;
        let slices: Vec<[Array3<f64>; 3]> = (0..grid.nt)
            .into_par_iter()
            .map(|j| self.curl_slice([v.component(j, 0), v.component(j, 1), v.component(j, 2)]))
            .collect();
        assemble_vector(grid, &slices)
    }

    /// Frobenius magnitude of the velocity gradient tensor, per sample.
    pub fn gradient_magnitude(&self, v: &VectorField) -> ScalarField {
        let grid = v.grid;
        let slices: Vec<Array3<f64>> = (0..grid.nt)
            .into_par_iter()
            .map(|j| {
                let mut sq = Array3::<f64>::zeros((grid.nz, grid.ny, grid.nx));
                for c in 0..3 {
                    let fhat = self.forward(v.component(j, c));
                    for a in 0..3 {
                        let d = self.backward(self.apply_derivative(&fhat, a));
                        Zip::from(&mut sq).and(&d).for_each(|s, &g| *s += g * g);
                    }
                }
                sq.mapv_inplace(f64::sqrt);
                sq
            })
            .collect();
        assemble_scalar(grid, &slices)
    }

    /// Pointwise magnitude of the curl of a stack.
    pub fn curl_magnitude(&self, v: &VectorField) -> ScalarField {
        self.curl(v).magnitude()
    }

    /// Largest relative divergence over all slices.
    pub fn max_relative_divergence(&self, v: &VectorField) -> f64 {
        let grid = v.grid;
        (0..grid.nt)
            .into_par_iter()
            .map(|j| {
                let div = self.divergence_slice([
                    v.component(j, 0),
                    v.component(j, 1),
                    v.component(j, 2),
                ]);
                let dmax = div.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
                let umax = v.slice(j).iter().fold(0.0f64, |m, &x| m.max(x.abs()));
                if umax > 0.0 {
                    dmax * grid.h() / umax
                } else {
                    dmax
                }
            })
            .fold(|| 0.0f64, f64::max)
            .reduce(|| 0.0f64, f64::max)
    }
}

pub(crate) fn assemble_scalar(grid: Grid, slices: &[Array3<f64>]) -> ScalarField {
    let mut out = ScalarField::zeros(grid);
    for (j, s) in slices.iter().enumerate() {
        out.data.index_axis_mut(ndarray::Axis(0), j).assign(s);
    }
    out
}

pub(crate) fn assemble_vector(grid: Grid, slices: &[[Array3<f64>; 3]]) -> VectorField {
    let mut out = VectorField::zeros(grid);
    for (j, comps) in slices.iter().enumerate() {
        for (c, comp) in comps.iter().enumerate() {
            out.data
                .slice_mut(ndarray::s![j, .., .., .., c])
                .assign(comp);
        }
    }
    out
}

/// Relative defect of a stack whose vorticity is marked "derived": the worst
/// slice-wise `||w - curl u||_2 / ||w||_2`.
pub fn vorticity_consistency(stack: &crate::fieldlab::FieldStack) -> Result<f64> {
    let w = stack.w.as_ref().ok_or(Error::MissingField("vorticity"))?;
    let ops = SpectralOps::for_grid(&stack.grid);
    let cu = ops.curl(&stack.u);
    let mut worst = 0.0f64;
    for j in 0..stack.grid.nt {
        let mut diff2 = 0.0;
        let mut norm2 = 0.0;
        Zip::from(w.slice(j)).and(cu.slice(j)).for_each(|&a, &b| {
            diff2 += (a - b) * (a - b);
            norm2 += a * a;
        });
        let rel = if norm2 > 0.0 { (diff2 / norm2).sqrt() } else { diff2.sqrt() };
        worst = worst.max(rel);
    }
    Ok(worst)
}
