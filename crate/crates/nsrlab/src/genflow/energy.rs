//! Local energy inequality residual for sampled trajectories.

use ndarray::{Array3, Zip};

use crate::error::{Error, Result};
use crate::fieldlab::{smoothstep_c4, smoothstep_c4_deriv, Cutoff, FieldStack};
use crate::singops::SpectralOps;

/// Tensor test bump: a radial plateau profile in space times a compactly
/// supported quintic window in time. The time derivative is analytic; the
/// spatial derivatives are taken spectrally from the samples so every
/// integration by parts pairs consistently with the field transforms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiBump {
    pub center: [f64; 3],
    pub space_radius: f64,
    pub plateau_fraction: f64,
    pub t_start: f64,
    pub t_end: f64,
    /// Fraction of the window spent in each of the rise and fall ramps.
    pub ramp_fraction: f64,
}

impl PhiBump {
    pub fn new(center: [f64; 3], space_radius: f64, t_start: f64, t_end: f64) -> Self {
        PhiBump {
            center,
            space_radius,
            plateau_fraction: 0.5,
            t_start,
            t_end,
            ramp_fraction: 0.25,
        }
    }

    pub fn psi(&self, t: f64) -> f64 {
        let len = self.t_end - self.t_start;
        let w = self.ramp_fraction * len;
        if t <= self.t_start || t >= self.t_end {
            0.0
        } else if t < self.t_start + w {
            smoothstep_c4((t - self.t_start) / w)
        } else if t > self.t_end - w {
            smoothstep_c4((self.t_end - t) / w)
        } else {
            1.0
        }
    }

    pub fn psi_dot(&self, t: f64) -> f64 {
        let len = self.t_end - self.t_start;
        let w = self.ramp_fraction * len;
        if t <= self.t_start || t >= self.t_end {
            0.0
        } else if t < self.t_start + w {
            smoothstep_c4_deriv((t - self.t_start) / w) / w
        } else if t > self.t_end - w {
            -smoothstep_c4_deriv((self.t_end - t) / w) / w
        } else {
            0.0
        }
    }
}

/// Both sides of the local energy inequality tested with one bump, plus the
/// residual `rhs - lhs` (nonnegative when the inequality holds).
#[derive(Debug, Clone)]
pub struct EnergyLedger {
    pub phi: PhiBump,
    pub kinetic_final: f64,
    pub dissipation: f64,
    pub potential_term: f64,
    pub transport_pressure: f64,
    pub force_term: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub relative_residual: f64,
    pub satisfied: bool,
}

/// Evaluate the ledger; `tolerance` is the relative slack granted to the
/// inequality direction.
pub fn local_energy_residual(
    stack: &FieldStack,
    phi: &PhiBump,
    tolerance: f64,
) -> Result<EnergyLedger> {
    ledger_with_dissipation_factor(stack, phi, tolerance, 1.0)
}

pub(crate) fn ledger_with_dissipation_factor(
    stack: &FieldStack,
    phi: &PhiBump,
    tolerance: f64,
    dissipation_factor: f64,
) -> Result<EnergyLedger> {
    if stack.non_solution {
        return Err(Error::EnergyRefused(
            "stack is labeled non-solution; the energy inequality does not apply".into(),
        ));
    }
    let p = stack.pressure()?;
    let grid = stack.grid;
    let tol = 1e-9 * grid.dt;
    if phi.t_start < grid.t0 - tol || phi.t_end > grid.last_time() + tol {
        return Err(Error::CylinderOutOfRange(format!(
            "test-function support ({}, {}) touches the time boundary ({}, {})",
            phi.t_start,
            phi.t_end,
            grid.t0,
            grid.last_time()
        )));
    }
    if phi.space_radius >= 0.5 * grid.domain_length {
        return Err(Error::InvalidParameter(
            "spatial bump must fit inside the half box".into(),
        ));
    }

    let nu = stack.viscosity.unwrap_or(1.0);
    let ops = SpectralOps::for_grid(&grid);
    let cut = Cutoff::with_plateau(phi.space_radius, phi.plateau_fraction)?;
    let phis = cut.sample(&grid, phi.center);
    let lap_phis = ops.laplacian_slice(phis.view());
    let grad_phis = ops.gradient_slice(phis.view());
    let cell = grid.h().powi(3);

    let slices: Vec<usize> = (0..grid.nt)
        .filter(|&j| {
            let t = grid.time_at(j);
            t >= phi.t_start - tol && t <= phi.t_end + tol
        })
        .collect();
    if slices.len() < 3 {
        return Err(Error::InvalidParameter(
            "test-function window covers fewer than three slices".into(),
        ));
    }

    let mut dissipation = 0.0;
    let mut potential_term = 0.0;
    let mut transport = 0.0;
    let mut force_term = 0.0;
    for &j in &slices {
        let t = grid.time_at(j);
        let (psi, psid) = (phi.psi(t), phi.psi_dot(t));
        // |grad u|^2 for this slice
        let mut grad_sq = Array3::<f64>::zeros((grid.nz, grid.ny, grid.nx));
        for c in 0..3 {
            let uhat = ops.forward(stack.u.component(j, c));
            for a in 0..3 {
                let d = ops.backward(ops.apply_derivative(&uhat, a));
                Zip::from(&mut grad_sq).and(&d).for_each(|s, &g| *s += g * g);
            }
        }
        let mut diss_j = 0.0;
        let mut pot_j = 0.0;
        let mut trans_j = 0.0;
        let mut force_j = 0.0;
        for iz in 0..grid.nz {
            for iy in 0..grid.ny {
                for ix in 0..grid.nx {
                    let u = [
                        stack.u.data[[j, iz, iy, ix, 0]],
                        stack.u.data[[j, iz, iy, ix, 1]],
                        stack.u.data[[j, iz, iy, ix, 2]],
                    ];
                    let usq = u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
                    let ph = phis[[iz, iy, ix]];
                    diss_j += grad_sq[[iz, iy, ix]] * ph * psi;
                    pot_j += usq * (ph * psid + nu * lap_phis[[iz, iy, ix]] * psi);
                    let ugradphi = u[0] * grad_phis[0][[iz, iy, ix]]
                        + u[1] * grad_phis[1][[iz, iy, ix]]
                        + u[2] * grad_phis[2][[iz, iy, ix]];
                    trans_j += (usq + 2.0 * p.data[[j, iz, iy, ix]]) * ugradphi * psi;
                    if let Some(f) = &stack.f {
                        let fu = f.data[[j, iz, iy, ix, 0]] * u[0]
                            + f.data[[j, iz, iy, ix, 1]] * u[1]
                            + f.data[[j, iz, iy, ix, 2]] * u[2];
                        force_j += 2.0 * fu * ph * psi;
                    }
                }
            }
        }
        dissipation += 2.0 * nu * diss_j * cell * grid.dt;
        potential_term += pot_j * cell * grid.dt;
        transport += trans_j * cell * grid.dt;
        force_term += force_j * cell * grid.dt;
    }
    // kinetic term at the final window time (the bump vanishes there, kept
    // for generality)
    let j_end = *slices.last().unwrap();
    let psi_end = phi.psi(grid.time_at(j_end));
    let mut kinetic_final = 0.0;
    for iz in 0..grid.nz {
        for iy in 0..grid.ny {
            for ix in 0..grid.nx {
                let mut usq = 0.0;
                for c in 0..3 {
                    usq += stack.u.data[[j_end, iz, iy, ix, c]].powi(2);
                }
                kinetic_final += usq * phis[[iz, iy, ix]] * psi_end;
            }
        }
    }
    kinetic_final *= cell;

    let lhs = kinetic_final + dissipation_factor * dissipation;
    let rhs = potential_term + transport + force_term;
    let residual = rhs - lhs;
    let scale = [kinetic_final, dissipation, potential_term, transport, force_term]
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(1e-300);
    let relative_residual = residual / scale;
    Ok(EnergyLedger {
        phi: *phi,
        kinetic_final,
        dissipation,
        potential_term,
        transport_pressure: transport,
        force_term,
        lhs,
        rhs,
        residual,
        relative_residual,
        satisfied: residual >= -tolerance * scale,
    })
}
