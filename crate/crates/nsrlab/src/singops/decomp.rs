//! Localized singular-integral decompositions: pressure split, local
//! Biot-Savart pair, and the curl-tensor pair. Each splits an input field
//! into a potential part driven by cut-off data and a remainder that is
//! harmonic on the cutoff plateau.

use ndarray::{Array3, ArrayView3, Zip};
use num_complex::Complex64;

use crate::error::Result;
use crate::fieldlab::{ball_quadrature, Cutoff, FieldStack, Grid};
use super::potential::PotentialOps;
use super::spectral::SpectralOps;

/// Reusable transform plans for a sequence of decompositions on one grid.
pub struct DecompCtx {
    pub grid: Grid,
    pub spectral: SpectralOps,
    pub potential: PotentialOps,
    pub subsamples: usize,
}

/// One decomposition at one time slice.
///
/// `harmonic_laplacian` is the Laplacian of the harmonic part evaluated
/// consistently (periodic spectral Laplacian of the input minus the padded
/// transform Laplacian of the potential part), so it stays meaningful even
/// though the potential part itself is not periodic.
pub struct SliceDecomposition {
    pub primary: Vec<Array3<f64>>,
    pub harmonic: Vec<Array3<f64>>,
    pub harmonic_laplacian: Vec<Array3<f64>>,
    pub reference_laplacian: Vec<Array3<f64>>,
    pub cutoff: Cutoff,
    pub center: [f64; 3],
    pub interior_radius: f64,
    pub slice: usize,
}

impl SliceDecomposition {
    /// `L^2` size of the harmonic part's Laplacian over the ball of radius
    /// `rb`, relative to the input's own Laplacian there.
    pub fn laplacian_relative_residual(
        &self,
        grid: &Grid,
        rb: f64,
        subsamples: usize,
    ) -> Result<f64> {
        let ball = ball_quadrature(grid, self.center, rb, subsamples)?;
        let mut res2 = 0.0;
        let mut ref2 = 0.0;
        for (h, r) in self.harmonic_laplacian.iter().zip(&self.reference_laplacian) {
            for cell in &ball.cells {
                res2 += cell.weight * h[[cell.iz, cell.iy, cell.ix]].powi(2);
                ref2 += cell.weight * r[[cell.iz, cell.iy, cell.ix]].powi(2);
            }
        }
        if ref2 > 0.0 {
            Ok((res2 / ref2).sqrt())
        } else if res2 == 0.0 {
            Ok(0.0)
        } else {
            Ok(f64::INFINITY)
        }
    }

    /// Worst mean-value defect of the harmonic components over the ball of
    /// radius `rb`.
    pub fn mean_value_defect(&self, grid: &Grid, rb: f64, subsamples: usize) -> Result<f64> {
        let mut worst = 0.0f64;
        for h in &self.harmonic {
            let d = super::harmonic::harmonic_defect(h.view(), grid, self.center, rb, subsamples)?;
            worst = worst.max(d);
        }
        Ok(worst)
    }
}

impl DecompCtx {
    pub fn new(grid: &Grid, subsamples: usize) -> Self {
        DecompCtx {
            grid: *grid,
            spectral: SpectralOps::for_grid(grid),
            potential: PotentialOps::new(grid),
            subsamples,
        }
    }

    fn slice_views<'a>(
        v: &'a crate::fieldlab::VectorField,
        j: usize,
    ) -> [ArrayView3<'a, f64>; 3] {
        [v.component(j, 0), v.component(j, 1), v.component(j, 2)]
    }

    fn vorticity_slice(&self, stack: &FieldStack, j: usize) -> [Array3<f64>; 3] {
        match &stack.w {
            Some(w) => [
                w.component(j, 0).to_owned(),
                w.component(j, 1).to_owned(),
                w.component(j, 2).to_owned(),
            ],
            None => self.spectral.curl_slice(Self::slice_views(&stack.u, j)),
        }
    }

    /// Split the pressure at slice `j` into the Newtonian potential of the
    /// cut-off centered momentum-flux divergence (minus the cut-off force
    /// divergence) and a remainder that is harmonic on the plateau.
    pub fn pressure_split(
        &self,
        stack: &FieldStack,
        j: usize,
        center: [f64; 3],
        cutoff: Cutoff,
    ) -> Result<SliceDecomposition> {
        let p = stack.pressure()?;
        self.potential.check_support(cutoff.rho, self.grid.domain_length)?;
        let ball = ball_quadrature(&self.grid, center, cutoff.rho, self.subsamples)?;
        let u = &stack.u;
        let mut ubar = [0.0f64; 3];
        for cell in &ball.cells {
            for (a, ub) in ubar.iter_mut().enumerate() {
                *ub += cell.weight * u.data[[j, cell.iz, cell.iy, cell.ix, a]];
            }
        }
        for ub in &mut ubar {
            *ub /= ball.weight_sum;
        }
        let phi = cutoff.sample(&self.grid, center);

        let pad = self.potential.pad();
        let mut dhat = Array3::<Complex64>::zeros((pad, pad, pad));
        for i in 0..3 {
            for jc in i..3 {
                let mut t = Array3::<f64>::zeros((self.grid.nz, self.grid.ny, self.grid.nx));
                Zip::from(&mut t)
                    .and(u.component(j, i))
                    .and(u.component(j, jc))
                    .and(&phi)
                    .for_each(|d, &ui, &uj, &ph| {
                        *d = (ui - ubar[i]) * (uj - ubar[jc]) * ph;
                    });
                let that = self.potential.forward_padded(t.view());
                let factor = if i == jc { 1.0 } else { 2.0 };
                self.add_second_derivative(&mut dhat, &that, i, jc, factor);
            }
        }
        if let Some(f) = &stack.f {
            for jc in 0..3 {
                let mut m = Array3::<f64>::zeros((self.grid.nz, self.grid.ny, self.grid.nx));
                Zip::from(&mut m).and(f.component(j, jc)).and(&phi).for_each(|d, &fj, &ph| {
                    *d = fj * ph;
                });
                let mhat = self.potential.forward_padded(m.view());
                self.sub_first_derivative(&mut dhat, &mhat, jc);
            }
        }

        let mut p1hat = dhat.clone();
        self.potential.apply_symbol(&mut p1hat, |_, _, g| Complex64::new(g, 0.0));
        let p1 = self.potential.backward_cropped(p1hat);
        let mut shellhat = dhat;
        self.potential.apply_symbol(&mut shellhat, |_, k2, _| {
            Complex64::new(self.potential.shell_factor(k2), 0.0)
        });
        // -shell * dhat is the Laplacian of the potential part
        let lap_p1 = {
            let mut a = self.potential.backward_cropped(shellhat);
            a.mapv_inplace(|v| -v);
            a
        };

        let lap_p = self.spectral.laplacian_slice(p.slice(j));
        let p2 = {
            let mut a = p.slice(j).to_owned();
            a -= &p1;
            a
        };
        let harm_lap = {
            let mut a = lap_p.clone();
            a -= &lap_p1;
            a
        };
        Ok(SliceDecomposition {
            primary: vec![p1],
            harmonic: vec![p2],
            harmonic_laplacian: vec![harm_lap],
            reference_laplacian: vec![lap_p],
            cutoff,
            center,
            interior_radius: cutoff.plateau_radius(),
            slice: j,
        })
    }

    /// Velocity-like potential of the cut-off vorticity and the harmonic
    /// remainder `h = u - v` at slice `j`.
    pub fn biot_savart(
        &self,
        stack: &FieldStack,
        j: usize,
        center: [f64; 3],
        cutoff: Cutoff,
    ) -> Result<SliceDecomposition> {
        self.potential.check_support(cutoff.rho, self.grid.domain_length)?;
        let w = self.vorticity_slice(stack, j);
        let phi = cutoff.sample(&self.grid, center);
        let mhat: Vec<Array3<Complex64>> = (0..3)
            .map(|c| {
                let mut m = w[c].clone();
                Zip::from(&mut m).and(&phi).for_each(|d, &ph| *d *= ph);
                self.potential.forward_padded(m.view())
            })
            .collect();

        let (v, lap_v) = self.curl_of_potential(&mhat);
        let u = &stack.u;
        let mut harmonic = Vec::with_capacity(3);
        let mut harm_lap = Vec::with_capacity(3);
        let mut ref_lap = Vec::with_capacity(3);
        for c in 0..3 {
            let mut h = u.component(j, c).to_owned();
            h -= &v[c];
            harmonic.push(h);
            let lap_u = self.spectral.laplacian_slice(u.component(j, c));
            let mut hl = lap_u.clone();
            hl -= &lap_v[c];
            harm_lap.push(hl);
            ref_lap.push(lap_u);
        }
        Ok(SliceDecomposition {
            primary: v.into_iter().collect(),
            harmonic,
            harmonic_laplacian: harm_lap,
            reference_laplacian: ref_lap,
            cutoff,
            center,
            interior_radius: cutoff.plateau_radius(),
            slice: j,
        })
    }

    /// Gradient-like 2-tensor potential of the cut-off `curl w` and the
    /// harmonic remainder `H = grad u - V` at slice `j`. Components are
    /// flattened as `3 * derivative_axis + velocity_component`.
    pub fn curl_tensor_split(
        &self,
        stack: &FieldStack,
        j: usize,
        center: [f64; 3],
        cutoff: Cutoff,
    ) -> Result<SliceDecomposition> {
        self.potential.check_support(cutoff.rho, self.grid.domain_length)?;
        let w = self.vorticity_slice(stack, j);
        let cw = self.spectral.curl_slice([w[0].view(), w[1].view(), w[2].view()]);
        let phi = cutoff.sample(&self.grid, center);
        let mhat: Vec<Array3<Complex64>> = (0..3)
            .map(|c| {
                let mut m = cw[c].clone();
                Zip::from(&mut m).and(&phi).for_each(|d, &ph| *d *= ph);
                self.potential.forward_padded(m.view())
            })
            .collect();

        let mut primary = Vec::with_capacity(9);
        let mut harmonic = Vec::with_capacity(9);
        let mut harm_lap = Vec::with_capacity(9);
        let mut ref_lap = Vec::with_capacity(9);
        let uhat: Vec<Array3<Complex64>> =
            (0..3).map(|c| self.spectral.forward(stack.u.component(j, c))).collect();
        for axis in 0..3 {
            for comp in 0..3 {
                // V_ij = d_i N(m_j)
                let mut vhat = mhat[comp].clone();
                self.potential.apply_symbol(&mut vhat, |kd, _, g| {
                    Complex64::new(0.0, kd[axis] * g)
                });
                let v_ij = self.potential.backward_cropped(vhat);
                let mut lvhat = mhat[comp].clone();
                self.potential.apply_symbol(&mut lvhat, |kd, k2, _| {
                    Complex64::new(0.0, -kd[axis] * self.potential.shell_factor(k2))
                });
                let lap_v_ij = self.potential.backward_cropped(lvhat);

                let gu = self.spectral.backward(self.spectral.apply_derivative(&uhat[comp], axis));
                let lap_gu = {
                    let d = self.spectral.apply_derivative(&uhat[comp], axis);
                    let mut l = d;
                    apply_neg_ksq_with(&self.spectral, &mut l);
                    self.spectral.backward(l)
                };
                let mut h = gu.clone();
                h -= &v_ij;
                let mut hl = lap_gu.clone();
                hl -= &lap_v_ij;
                primary.push(v_ij);
                harmonic.push(h);
                harm_lap.push(hl);
                ref_lap.push(lap_gu);
            }
        }
        Ok(SliceDecomposition {
            primary,
            harmonic,
            harmonic_laplacian: harm_lap,
            reference_laplacian: ref_lap,
            cutoff,
            center,
            interior_radius: cutoff.plateau_radius(),
            slice: j,
        })
    }

    /// Ball average of the Biot-Savart remainder's gradient tensor
    /// `grad h = grad u - grad v` at slice `j`, returned as the Frobenius
    /// magnitude of the averaged tensor.
    pub fn biot_savart_grad_ball_avg(
        &self,
        stack: &FieldStack,
        j: usize,
        center: [f64; 3],
        cutoff: Cutoff,
        ball: &crate::fieldlab::BallQuadrature,
    ) -> Result<f64> {
        self.potential.check_support(cutoff.rho, self.grid.domain_length)?;
        let w = self.vorticity_slice(stack, j);
        let phi = cutoff.sample(&self.grid, center);
        let mhat: Vec<Array3<Complex64>> = (0..3)
            .map(|c| {
                let mut m = w[c].clone();
                Zip::from(&mut m).and(&phi).for_each(|d, &ph| *d *= ph);
                self.potential.forward_padded(m.view())
            })
            .collect();
        let pad = self.potential.pad();
        let uhat: Vec<Array3<Complex64>> =
            (0..3).map(|c| self.spectral.forward(stack.u.component(j, c))).collect();
        let avg = |arr: &Array3<f64>| -> f64 {
            let mut acc = 0.0;
            for cell in &ball.cells {
                acc += cell.weight * arr[[cell.iz, cell.iy, cell.ix]];
            }
            acc / ball.weight_sum
        };
        let mut mag2 = 0.0;
        for axis in 0..3 {
            for comp in 0..3 {
                // grad of the curl-of-potential component
                let (a, b) = ((comp + 1) % 3, (comp + 2) % 3);
                let mut gh = Array3::<Complex64>::zeros((pad, pad, pad));
                for iz in 0..pad {
                    for iy in 0..pad {
                        for ix in 0..pad {
                            let (kd, k2) = self.potential.k_info(ix, iy, iz);
                            let cross = Complex64::new(0.0, 1.0)
                                * (kd[a] * mhat[b][[iz, iy, ix]]
                                    - kd[b] * mhat[a][[iz, iy, ix]]);
                            gh[[iz, iy, ix]] = Complex64::new(0.0, kd[axis])
                                * self.potential.ghat_of(k2)
                                * cross;
                        }
                    }
                }
                let grad_v = self.potential.backward_cropped(gh);
                let grad_u =
                    self.spectral.backward(self.spectral.apply_derivative(&uhat[comp], axis));
                let mean = avg(&grad_u) - avg(&grad_v);
                mag2 += mean * mean;
            }
        }
        Ok(mag2.sqrt())
    }

    /// `curl` applied to the Newtonian potential of a padded spectrum triple,
    /// together with its Laplacian.
    fn curl_of_potential(
        &self,
        mhat: &[Array3<Complex64>],
    ) -> ([Array3<f64>; 3], [Array3<f64>; 3]) {
        let pad = self.potential.pad();
        let mut v = Vec::with_capacity(3);
        let mut lap = Vec::with_capacity(3);
        for c in 0..3 {
            let (a, b) = ((c + 1) % 3, (c + 2) % 3);
            let mut vh = Array3::<Complex64>::zeros((pad, pad, pad));
            let mut lh = Array3::<Complex64>::zeros((pad, pad, pad));
            for iz in 0..pad {
                for iy in 0..pad {
                    for ix in 0..pad {
                        let (kd, k2) = self.potential.k_info(ix, iy, iz);
                        let cross = Complex64::new(0.0, 1.0)
                            * (kd[a] * mhat[b][[iz, iy, ix]] - kd[b] * mhat[a][[iz, iy, ix]]);
                        vh[[iz, iy, ix]] = self.potential.ghat_of(k2) * cross;
                        lh[[iz, iy, ix]] = -self.potential.shell_factor(k2) * cross;
                    }
                }
            }
            v.push(self.potential.backward_cropped(vh));
            lap.push(self.potential.backward_cropped(lh));
        }
        (
            [v.remove(0), v.remove(0), v.remove(0)],
            [lap.remove(0), lap.remove(0), lap.remove(0)],
        )
    }

    fn add_second_derivative(
        &self,
        acc: &mut Array3<Complex64>,
        that: &Array3<Complex64>,
        i: usize,
        jc: usize,
        factor: f64,
    ) {
        let pad = self.potential.pad();
        for iz in 0..pad {
            for iy in 0..pad {
                for ix in 0..pad {
                    let (kd, _) = self.potential.k_info(ix, iy, iz);
                    acc[[iz, iy, ix]] += that[[iz, iy, ix]] * (-factor * kd[i] * kd[jc]);
                }
            }
        }
    }

    fn sub_first_derivative(
        &self,
        acc: &mut Array3<Complex64>,
        mhat: &Array3<Complex64>,
        jc: usize,
    ) {
        let pad = self.potential.pad();
        for iz in 0..pad {
            for iy in 0..pad {
                for ix in 0..pad {
                    let (kd, _) = self.potential.k_info(ix, iy, iz);
                    acc[[iz, iy, ix]] -= mhat[[iz, iy, ix]] * Complex64::new(0.0, kd[jc]);
                }
            }
        }
    }
}

fn apply_neg_ksq_with(ops: &SpectralOps, fhat: &mut Array3<Complex64>) {
    let n = ops.n();
    for iz in 0..n {
        for iy in 0..n {
            for ix in 0..n {
                let k2 = ops.k_at(ix) * ops.k_at(ix)
                    + ops.k_at(iy) * ops.k_at(iy)
                    + ops.k_at(iz) * ops.k_at(iz);
                fhat[[iz, iy, ix]] *= -k2;
            }
        }
    }
}

/// Pressure split at the slice nearest to `z`. The default cutoff plateau is
/// the half radius: the pressure density enters through second derivatives,
/// which need the wide transition, and the harmonic claim only ever uses the
/// half ball.
pub fn pressure_split(
    stack: &FieldStack,
    x: [f64; 3],
    t: f64,
    rho: f64,
    subsamples: usize,
) -> Result<SliceDecomposition> {
    let ctx = DecompCtx::new(&stack.grid, subsamples);
    ctx.pressure_split(stack, stack.grid.nearest_slice(t), x, Cutoff::with_plateau(rho, 0.5)?)
}

/// Local Biot-Savart reconstruction at the slice nearest to `z`.
pub fn biot_savart_local(
    stack: &FieldStack,
    x: [f64; 3],
    t: f64,
    rho: f64,
    subsamples: usize,
) -> Result<SliceDecomposition> {
    let ctx = DecompCtx::new(&stack.grid, subsamples);
    ctx.biot_savart(stack, stack.grid.nearest_slice(t), x, Cutoff::new(rho)?)
}

/// Curl-tensor split at the slice nearest to `z`.
pub fn curl_tensor_split(
    stack: &FieldStack,
    x: [f64; 3],
    t: f64,
    rho: f64,
    subsamples: usize,
) -> Result<SliceDecomposition> {
    let ctx = DecompCtx::new(&stack.grid, subsamples);
    ctx.curl_tensor_split(stack, stack.grid.nearest_slice(t), x, Cutoff::new(rho)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldlab::{ball_quadrature, make_grid, ScalarField, VectorField};
    use crate::genflow::{generate, FlowFamily, FlowSpec, ForceSpec};
    use std::f64::consts::PI;

    const RHO: f64 = 2.0;

    fn abc_stack(n: usize) -> FieldStack {
        let g = make_grid(n, 3, 2.0 * PI, 0.05, -0.1).unwrap();
        let spec = FlowSpec::new(FlowFamily::Abc { a: 1.0, b: 1.1, c: 0.9, nu: 0.1, mode: 1 });
        generate(&spec, &g).unwrap()
    }

    #[test]
    fn constant_velocity_leaves_pressure_untouched() {
        let g = make_grid(16, 3, 2.0 * PI, 0.05, -0.1).unwrap();
        let u = VectorField::from_fn(g, |_, _, _, _| [0.7, -0.2, 1.1]);
        let mut stack = FieldStack::new(g, u).unwrap();
        stack.p = Some(ScalarField::from_fn(g, |x, y, _, _| (x - y).cos()));
        let dec = pressure_split(&stack, [PI, PI, PI], 0.0, RHO, 2).unwrap();
        let p1_max = dec.primary[0].iter().fold(0.0f64, |m, &v| m.max(v.abs()));
        assert!(p1_max < 1e-10, "centered flux of a constant must vanish, got {p1_max}");
        let p = stack.p.as_ref().unwrap();
        let mut diff = 0.0f64;
        ndarray::Zip::from(&dec.harmonic[0]).and(p.slice(0)).for_each(|&a, &b| {
            diff = diff.max((a - b).abs());
        });
        assert!(diff < 1e-10);
    }

    #[test]
    fn beltrami_pressure_remainder_is_nearly_harmonic() {
        let stack = abc_stack(64);
        let rho = 2.8;
        let dec = pressure_split(&stack, [PI, PI, PI], 0.0, rho, 3).unwrap();
        let g = &stack.grid;
        let rel = dec
            .laplacian_relative_residual(g, dec.interior_radius / 2.0, 3)
            .unwrap();
        assert!(rel < 1e-2, "pressure remainder Laplacian residual {rel}");
        let defect = dec.mean_value_defect(g, rho / 4.0, 3).unwrap();
        assert!(defect < 1e-2, "mean-value defect {defect}");
    }

    #[test]
    fn forced_rest_state_reproduces_the_force_divergence() {
        // u = 0, f constant: the only density is -div(f phi), so the
        // potential part must satisfy -lap p1 = -div(f phi) spectrally
        let g = make_grid(64, 3, 2.0 * PI, 0.05, -0.1).unwrap();
        let u = VectorField::zeros(g);
        let mut stack = FieldStack::new(g, u).unwrap();
        stack.p = Some(ScalarField::zeros(g));
        let f = [0.4, -0.8, 0.3];
        let mut spec = FlowSpec::new(FlowFamily::Abc { a: 0.0, b: 0.0, c: 0.0, nu: 0.1, mode: 1 });
        spec.force = Some(ForceSpec::Constant(f));
        stack.f = Some(VectorField::from_fn(g, move |_, _, _, _| f));
        let _ = spec;
        let center = [PI, PI, PI];
        // wide transition so the analytic density is well represented on
        // the grid
        let cutoff = Cutoff::with_plateau(2.8, 0.5).unwrap();
        let ctx = DecompCtx::new(&g, 2);
        let dec = ctx.pressure_split(&stack, 0, center, cutoff).unwrap();
        // -lap p1 from the padded pipeline against the analytic density
        let phi = cutoff.sample(&g, center);
        let gphi = ctx.spectral.gradient_slice(phi.view());
        let mut num = 0.0;
        let mut den = 0.0;
        for iz in 0..g.nz {
            for iy in 0..g.ny {
                for ix in 0..g.nx {
                    if g.distance(center, g.position(ix, iy, iz)) > 2.8 + 0.3 {
                        continue;
                    }
                    let density = -(f[0] * gphi[0][[iz, iy, ix]]
                        + f[1] * gphi[1][[iz, iy, ix]]
                        + f[2] * gphi[2][[iz, iy, ix]]);
                    // with p = 0: harmonic_laplacian = -lap p1 = density
                    let got = dec.harmonic_laplacian[0][[iz, iy, ix]];
                    num += (got - density).powi(2);
                    den += density * density;
                }
            }
        }
        let rel = (num / den).sqrt();
        assert!(rel < 1e-3, "force-divergence reconstruction error {rel}");
    }

    #[test]
    fn zero_vorticity_returns_velocity_as_remainder() {
        let g = make_grid(16, 3, 2.0 * PI, 0.05, -0.1).unwrap();
        let u = VectorField::from_fn(g, |_, _, _, _| [0.3, 0.4, -0.1]);
        let mut stack = FieldStack::new(g, u.clone()).unwrap();
        stack.w = Some(VectorField::zeros(g));
        let dec = biot_savart_local(&stack, [PI, PI, PI], 0.0, RHO, 2).unwrap();
        for comp in &dec.primary {
            assert!(comp.iter().all(|v| v.abs() < 1e-12));
        }
        for c in 0..3 {
            let mut diff = 0.0f64;
            ndarray::Zip::from(&dec.harmonic[c]).and(u.component(0, c)).for_each(|&a, &b| {
                diff = diff.max((a - b).abs());
            });
            assert!(diff < 1e-12);
        }
    }

    #[test]
    fn beltrami_curl_of_potential_recovers_cut_vorticity() {
        // curl v reproduces the solenoidal part of the cut vorticity; the
        // gradient remainder is driven by the shell term w . grad(phi) and
        // fades only when w oscillates well below the cutoff scale, hence
        // the fine Beltrami mode here
        let g0 = make_grid(64, 3, 2.0 * PI, 0.05, -0.1).unwrap();
        let spec = FlowSpec::new(FlowFamily::Abc { a: 1.0, b: 1.1, c: 0.9, nu: 0.1, mode: 8 });
        let stack = generate(&spec, &g0).unwrap();
        let g = stack.grid;
        let center = [PI, PI, PI];
        let cutoff = Cutoff::new(RHO).unwrap();
        let ctx = DecompCtx::new(&g, 3);
        let dec = ctx.biot_savart(&stack, 0, center, cutoff).unwrap();
        let curl_v = ctx.spectral.curl_slice([
            dec.primary[0].view(),
            dec.primary[1].view(),
            dec.primary[2].view(),
        ]);
        let w = stack.w.as_ref().unwrap();
        let phi = cutoff.sample(&g, center);
        let ball = ball_quadrature(&g, center, RHO / 2.0, 3).unwrap();
        let mut num = 0.0;
        let mut den = 0.0;
        for cell in &ball.cells {
            for c in 0..3 {
                let want = w.data[[0, cell.iz, cell.iy, cell.ix, c]]
                    * phi[[cell.iz, cell.iy, cell.ix]];
                let got = curl_v[c][[cell.iz, cell.iy, cell.ix]];
                num += cell.weight * (got - want).powi(2);
                den += cell.weight * want * want;
            }
        }
        let rel = (num / den).sqrt();
        assert!(rel < 1e-2, "curl-of-potential defect {rel}");
    }

    #[test]
    fn beltrami_velocity_remainder_is_nearly_harmonic() {
        let stack = abc_stack(64);
        let dec = biot_savart_local(&stack, [PI, PI, PI], 0.0, 2.8, 3).unwrap();
        let rel = dec
            .laplacian_relative_residual(&stack.grid, 1.4, 3)
            .unwrap();
        assert!(rel < 1e-2, "velocity remainder residual {rel}");
    }

    #[test]
    fn constant_velocity_tensor_split_is_all_zero() {
        let g = make_grid(16, 3, 2.0 * PI, 0.05, -0.1).unwrap();
        let u = VectorField::from_fn(g, |_, _, _, _| [0.5, 0.5, -0.5]);
        let mut stack = FieldStack::new(g, u).unwrap();
        stack.w = Some(VectorField::zeros(g));
        let dec = curl_tensor_split(&stack, [PI, PI, PI], 0.0, RHO, 2).unwrap();
        for comp in dec.primary.iter().chain(&dec.harmonic) {
            assert!(comp.iter().all(|v| v.abs() < 1e-10));
        }
    }

    #[test]
    fn beltrami_gradient_remainder_is_nearly_harmonic() {
        let stack = abc_stack(64);
        let dec = curl_tensor_split(&stack, [PI, PI, PI], 0.0, 2.8, 3).unwrap();
        let rel = dec
            .laplacian_relative_residual(&stack.grid, 1.4, 3)
            .unwrap();
        assert!(rel < 1e-2, "gradient remainder residual {rel}");
    }
}
