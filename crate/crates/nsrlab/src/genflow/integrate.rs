//! Pseudo-spectral integrator for the incompressible momentum equation on
//! the periodic box: 2/3-rule dealiasing, projected rotational-form
//! nonlinearity, explicit four-stage Runge-Kutta with integrating-factor
//! viscosity, and per-slice pressure recovery from the projection.

use ndarray::{Array3, Zip};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fieldlab::{FieldStack, Grid, ScalarField, VectorField};
use crate::singops::SpectralOps;

const CFL_LIMIT: f64 = 0.9;

struct Solver {
    ops: SpectralOps,
    n: usize,
    dt: f64,
    h: f64,
    mask: Array3<f64>,
    half_factor: Array3<f64>,
    fhat: Option<[Array3<Complex64>; 3]>,
}

type State = [Array3<Complex64>; 3];

impl Solver {
    fn new(grid: &Grid, nu: f64, fhat: Option<[Array3<Complex64>; 3]>) -> Self {
        let ops = SpectralOps::for_grid(grid);
        let n = grid.nx;
        let cutoff = (n as f64) / 3.0;
        let mut mask = Array3::<f64>::zeros((n, n, n));
        let mut half_factor = Array3::<f64>::zeros((n, n, n));
        let base = 2.0 * std::f64::consts::PI / grid.domain_length;
        let signed = |m: usize| -> f64 {
            if m <= n / 2 {
                m as f64
            } else {
                m as f64 - n as f64
            }
        };
        for iz in 0..n {
            for iy in 0..n {
                for ix in 0..n {
                    let (mx, my, mz) = (signed(ix), signed(iy), signed(iz));
                    let keep =
                        mx.abs() <= cutoff && my.abs() <= cutoff && mz.abs() <= cutoff;
                    mask[[iz, iy, ix]] = if keep { 1.0 } else { 0.0 };
                    let k2 = base * base * (mx * mx + my * my + mz * mz);
                    half_factor[[iz, iy, ix]] = (-nu * k2 * grid.dt / 2.0).exp();
                }
            }
        }
        Solver { ops, n, dt: grid.dt, h: grid.h(), mask, half_factor, fhat }
    }

    fn dealias(&self, s: &mut State) {
        for c in s.iter_mut() {
            Zip::from(c.view_mut()).and(&self.mask).for_each(|v, &m| *v *= m);
        }
    }

    fn project(&self, s: &mut State) {
        let n = self.n;
        for iz in 0..n {
            for iy in 0..n {
                for ix in 0..n {
                    let k = [self.ops.k_at(ix), self.ops.k_at(iy), self.ops.k_at(iz)];
                    let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
                    if k2 == 0.0 {
                        continue;
                    }
                    let dot = k[0] * s[0][[iz, iy, ix]]
                        + k[1] * s[1][[iz, iy, ix]]
                        + k[2] * s[2][[iz, iy, ix]];
                    for (c, kc) in k.iter().enumerate() {
                        let v = s[c][[iz, iy, ix]] - dot * *kc / k2;
                        s[c][[iz, iy, ix]] = v;
                    }
                }
            }
        }
    }

    fn physical(&self, s: &State) -> [Array3<f64>; 3] {
        [0, 1, 2].map(|c| self.ops.backward(s[c].clone()))
    }

    fn vorticity_hat(&self, s: &State) -> State {
        let d = |comp: usize, axis: usize| self.ops.apply_derivative(&s[comp], axis);
        let mut wx = d(2, 1);
        wx -= &d(1, 2);
        let mut wy = d(0, 2);
        wy -= &d(2, 0);
        let mut wz = d(1, 0);
        wz -= &d(0, 1);
        [wx, wy, wz]
    }

    /// Projected rotational-form tendency `P[u x w + f]` in spectral space;
    /// also hands back the cross-product transform for pressure recovery and
    /// the physical velocity for CFL monitoring.
    fn tendency(&self, s: &State) -> (State, State, f64) {
        let u = self.physical(s);
        let w = {
            let wh = self.vorticity_hat(s);
            [0, 1, 2].map(|c| self.ops.backward(wh[c].clone()))
        };
        let mut cross_hat: Vec<Array3<Complex64>> = Vec::with_capacity(3);
        for c in 0..3 {
            let (a, b) = ((c + 1) % 3, (c + 2) % 3);
            let mut phys = Array3::<f64>::zeros((self.n, self.n, self.n));
            Zip::from(&mut phys)
                .and(&u[a])
                .and(&w[b])
                .and(&u[b])
                .and(&w[a])
                .for_each(|d, &ua, &wb, &ub, &wa| *d = ua * wb - ub * wa);
            cross_hat.push(self.ops.forward(phys.view()));
        }
        let mut cross: State = [
            cross_hat.remove(0),
            cross_hat.remove(0),
            cross_hat.remove(0),
        ];
        self.dealias(&mut cross);
        let mut tend = cross.clone();
        if let Some(f) = &self.fhat {
            for c in 0..3 {
                tend[c] += &f[c];
            }
        }
        self.project(&mut tend);
        let umax = u
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0f64, |m, &v| m.max(v.abs()));
        (tend, cross, umax)
    }

    fn scaled(&self, s: &State, e: &Array3<f64>, times: usize) -> State {
        [0, 1, 2].map(|c| {
            let mut out = s[c].clone();
            for _ in 0..times {
                Zip::from(out.view_mut()).and(e).for_each(|v, &f| *v *= f);
            }
            out
        })
    }

    fn axpy(s: &State, k: &State, alpha: f64) -> State {
        [0, 1, 2].map(|c| {
            let mut out = s[c].clone();
            Zip::from(out.view_mut()).and(&k[c]).for_each(|v, &d| *v += d * alpha);
            out
        })
    }

    /// One integrating-factor RK4 step. Returns the physical max speed seen
    /// at the first stage for the CFL check.
    fn step(&self, s: &mut State) -> Result<f64> {
        let dt = self.dt;
        let e = &self.half_factor;
        let (k1, _, umax) = self.tendency(s);
        let u2 = self.scaled(&Self::axpy(s, &k1, dt / 2.0), e, 1);
        let (k2, _, _) = self.tendency(&u2);
        let u3 = Self::axpy(&self.scaled(s, e, 1), &k2, dt / 2.0);
        let (k3, _, _) = self.tendency(&u3);
        let u4 = Self::axpy(&self.scaled(s, e, 2), &self.scaled(&k3, e, 1), dt);
        let (k4, _, _) = self.tendency(&u4);

        let mut next = self.scaled(&Self::axpy(s, &k1, dt / 6.0), e, 2);
        let mid = self.scaled(&Self::axpy(&k2, &k3, 1.0), e, 1);
        for c in 0..3 {
            Zip::from(next[c].view_mut()).and(&mid[c]).for_each(|v, &m| *v += m * dt / 3.0);
            Zip::from(next[c].view_mut()).and(&k4[c]).for_each(|v, &m| *v += m * dt / 6.0);
        }
        *s = next;
        Ok(umax)
    }

    /// Pressure of the current state from the projection, mean-zero.
    fn pressure(&self, cross: &State, u: &[Array3<f64>; 3]) -> Array3<f64> {
        let n = self.n;
        let mut pihat = Array3::<Complex64>::zeros((n, n, n));
        for iz in 0..n {
            for iy in 0..n {
                for ix in 0..n {
                    let k = [self.ops.k_at(ix), self.ops.k_at(iy), self.ops.k_at(iz)];
                    let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
                    if k2 == 0.0 {
                        continue;
                    }
                    let mut dot = Complex64::default();
                    for (c, kc) in k.iter().enumerate() {
                        let mut g = cross[c][[iz, iy, ix]];
                        if let Some(f) = &self.fhat {
                            g += f[c][[iz, iy, ix]];
                        }
                        dot += Complex64::new(0.0, *kc) * g;
                    }
                    pihat[[iz, iy, ix]] = -dot / k2;
                }
            }
        }
        let mut p = self.ops.backward(pihat);
        Zip::from(&mut p).and(&u[0]).and(&u[1]).and(&u[2]).for_each(|pv, &a, &b, &c| {
            *pv -= 0.5 * (a * a + b * b + c * c);
        });
        let mean = p.sum() / (n * n * n) as f64;
        p.mapv_inplace(|v| v - mean);
        p
    }
}

/// Integrate divergence-free, band-limited initial data over `grid.nt - 1`
/// steps of size `grid.dt`, storing velocity, recovered pressure and
/// vorticity at every slice.
pub fn ns_integrate(
    u0: &VectorField,
    force: Option<&VectorField>,
    nu: f64,
    grid: &Grid,
) -> Result<FieldStack> {
    if u0.grid.nx != grid.nx || u0.grid.domain_length != grid.domain_length {
        return Err(Error::GridMismatch);
    }
    if !(nu > 0.0) {
        return Err(Error::InvalidParameter(format!("viscosity {nu} must be positive")));
    }
    let probe = SpectralOps::for_grid(grid);
    {
        let div = probe.divergence_slice([
            u0.component(0, 0),
            u0.component(0, 1),
            u0.component(0, 2),
        ]);
        let dmax = div.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
        let umax = u0.slice(0).iter().fold(0.0f64, |m, &v| m.max(v.abs()));
        if umax > 0.0 && dmax * grid.h() / umax > 1e-6 {
            return Err(Error::FieldValidation(format!(
                "initial data not divergence-free (relative divergence {})",
                dmax * grid.h() / umax
            )));
        }
    }
    let fhat = force.map(|f| {
        let mut fh =
            [0, 1, 2].map(|c| probe.forward(f.component(0, c)));
        // force acts through its projected, dealiased part
        let solver_tmp = Solver::new(grid, nu, None);
        solver_tmp.dealias(&mut fh);
        fh
    });
    let solver = Solver::new(grid, nu, fhat);
    let mut state: State = [0, 1, 2].map(|c| solver.ops.forward(u0.component(0, c)));
    solver.dealias(&mut state);
    solver.project(&mut state);

    let mut u_out = VectorField::zeros(*grid);
    let mut w_out = VectorField::zeros(*grid);
    let mut p_out = ScalarField::zeros(*grid);
    let store = |state: &State,
                 solver: &Solver,
                 j: usize,
                 u_out: &mut VectorField,
                 w_out: &mut VectorField,
                 p_out: &mut ScalarField| {
        let u = solver.physical(state);
        let wh = solver.vorticity_hat(state);
        let w = [0, 1, 2].map(|c| solver.ops.backward(wh[c].clone()));
        let (_, cross, _) = solver.tendency(state);
        let p = solver.pressure(&cross, &u);
        for c in 0..3 {
            u_out.data.slice_mut(ndarray::s![j, .., .., .., c]).assign(&u[c]);
            w_out.data.slice_mut(ndarray::s![j, .., .., .., c]).assign(&w[c]);
        }
        p_out.data.index_axis_mut(ndarray::Axis(0), j).assign(&p);
    };

    store(&state, &solver, 0, &mut u_out, &mut w_out, &mut p_out);
    for step in 1..grid.nt {
        let umax = solver.step(&mut state)?;
        let cfl = umax * grid.dt / solver.h;
        if cfl > CFL_LIMIT {
            return Err(Error::CflViolation {
                step,
                detail: format!("advective number {cfl:.3} above {CFL_LIMIT}"),
            });
        }
        if state.iter().any(|c| c.iter().any(|v| !v.re.is_finite() || !v.im.is_finite())) {
            return Err(Error::NumericFailure(format!("non-finite state at step {step}")));
        }
        store(&state, &solver, step, &mut u_out, &mut w_out, &mut p_out);
    }
    let mut stack = FieldStack::new(*grid, u_out)?;
    stack.p = Some(p_out);
    stack.w = Some(w_out);
    stack.w_is_derived = true;
    stack.viscosity = Some(nu);
    stack.f = force.map(|f| {
        let mut rep = VectorField::zeros(*grid);
        for j in 0..grid.nt {
            rep.data
                .index_axis_mut(ndarray::Axis(0), j)
                .assign(&f.data.index_axis(ndarray::Axis(0), 0));
        }
        rep
    });
    Ok(stack)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldlab::make_grid;
    use crate::genflow::{generate, FlowFamily, FlowSpec};
    use std::f64::consts::PI;

    #[test]
    fn zero_data_stays_zero() {
        let g = make_grid(16, 5, 2.0 * PI, 0.01, 0.0).unwrap();
        let u0 = VectorField::zeros(g);
        let out = ns_integrate(&u0, None, 0.1, &g).unwrap();
        assert!(out.u.data.iter().all(|v| *v == 0.0));
        assert!(out.p.unwrap().data.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn beltrami_data_reproduces_the_exact_decay() {
        let g = make_grid(32, 101, 2.0 * PI, 1e-3, 0.0).unwrap();
        let spec = FlowSpec::new(FlowFamily::Abc { a: 1.0, b: 1.0, c: 1.0, nu: 0.1, mode: 1 });
        let exact = generate(&spec, &g).unwrap();
        let out = ns_integrate(&exact.u, None, 0.1, &g).unwrap();
        let mut num = 0.0;
        let mut den = 0.0;
        let j = g.nt - 1;
        for ((a, b), _) in out.u.slice(j).iter().zip(exact.u.slice(j)).zip(0..) {
            num += (a - b) * (a - b);
            den += b * b;
        }
        let rel = (num / den).sqrt();
        assert!(rel < 1e-6, "relative trajectory error {rel}");
    }

    #[test]
    fn energy_never_increases_without_force() {
        let g = make_grid(24, 41, 2.0 * PI, 2e-3, 0.0).unwrap();
        let spec =
            FlowSpec::new(FlowFamily::RandomSolenoidal { seed: 3, max_mode: 3, amplitude: 0.5 });
        let snap = generate(&spec, &g).unwrap();
        let out = ns_integrate(&snap.u, None, 0.05, &g).unwrap();
        let energy = |j: usize| -> f64 { out.u.slice(j).iter().map(|v| v * v).sum() };
        let mut prev = energy(0);
        for j in 1..g.nt {
            let e = energy(j);
            assert!(e <= prev * (1.0 + 1e-12), "energy rose at step {j}: {prev} -> {e}");
            prev = e;
        }
    }

    #[test]
    fn cfl_violation_aborts() {
        let g = make_grid(16, 4, 2.0 * PI, 0.5, 0.0).unwrap();
        let spec = FlowSpec::new(FlowFamily::Abc { a: 2.0, b: 2.0, c: 2.0, nu: 0.01, mode: 1 });
        let exact = generate(&spec, &g).unwrap();
        let err = ns_integrate(&exact.u, None, 0.01, &g);
        assert!(matches!(err, Err(Error::CflViolation { .. })));
    }
}
