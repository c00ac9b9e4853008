//! Free-space Newtonian potential by zero-padded transform convolution.
//!
//! The kernel `1/(4 pi |x|)` enters through its analytically truncated
//! transform `(1 - cos(T|k|)) / |k|^2` with truncation radius `T` equal to
//! the box side. On the doubled box every displacement between source and
//! evaluation points inside the original box is a minimal image, so the
//! cyclic convolution reproduces the free-space integral wherever sources
//! and targets are within distance `T` of each other.

use ndarray::{s, Array3, ArrayView3};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fieldlab::Grid;
use super::spectral::SpectralOps;

/// Padded-transform workspace for one grid.
pub struct PotentialOps {
    n: usize,
    pad: usize,
    ops: SpectralOps,
    k_full: Vec<f64>,
    trunc: f64,
}

impl PotentialOps {
    pub fn new(grid: &Grid) -> Self {
        let n = grid.nx;
        let pad = 2 * n;
        let box_len = grid.domain_length;
        let ops = SpectralOps::new(pad, 2.0 * box_len);
        let base = std::f64::consts::PI / box_len;
        let k_full = (0..pad)
            .map(|m| {
                if m <= pad / 2 {
                    base * m as f64
                } else {
                    base * (m as i64 - pad as i64) as f64
                }
            })
            .collect();
        PotentialOps { n, pad, ops, k_full, trunc: box_len }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pad(&self) -> usize {
        self.pad
    }

    /// Check that a ball of radius `rho` around the localization center keeps
    /// source-target distances within the truncation radius.
    pub fn check_support(&self, rho: f64, box_len: f64) -> Result<()> {
        if 2.0 * rho > self.trunc {
            return Err(Error::PaddingViolation(format!(
                "cutoff support radius {rho} needs truncation beyond {}; shrink the support \
                 or enlarge the box (box side {box_len})",
                self.trunc
            )));
        }
        Ok(())
    }

    /// Truncated-kernel transform at squared wavenumber `k2`.
    fn ghat(&self, k2: f64) -> f64 {
        if k2 == 0.0 {
            0.5 * self.trunc * self.trunc
        } else {
            (1.0 - (self.trunc * k2.sqrt()).cos()) / k2
        }
    }

    /// Zero-pad a real slice into the doubled box and transform.
    pub fn forward_padded(&self, f: ArrayView3<'_, f64>) -> Array3<Complex64> {
        let mut padded = Array3::<f64>::zeros((self.pad, self.pad, self.pad));
        padded.slice_mut(s![..self.n, ..self.n, ..self.n]).assign(&f);
        self.ops.forward(padded.view())
    }

    /// Inverse transform and crop back to the original box.
    pub fn backward_cropped(&self, fhat: Array3<Complex64>) -> Array3<f64> {
        let full = self.ops.backward(fhat);
        full.slice(s![..self.n, ..self.n, ..self.n]).to_owned()
    }

    /// Apply a multiplier `sym(k_deriv, k2, ghat)` to a padded spectrum in
    /// place. `k_deriv` are the first-derivative symbols (Nyquist zeroed),
    /// `k2` the true squared wavenumber.
    pub fn apply_symbol(
        &self,
        fhat: &mut Array3<Complex64>,
        sym: impl Fn([f64; 3], f64, f64) -> Complex64,
    ) {
        for iz in 0..self.pad {
            for iy in 0..self.pad {
                for ix in 0..self.pad {
                    let kd = [self.ops.k_at(ix), self.ops.k_at(iy), self.ops.k_at(iz)];
                    let k2 = self.k_full[ix] * self.k_full[ix]
                        + self.k_full[iy] * self.k_full[iy]
                        + self.k_full[iz] * self.k_full[iz];
                    fhat[[iz, iy, ix]] *= sym(kd, k2, self.ghat(k2));
                }
            }
        }
    }

    /// Shell factor `|k|^2 ghat = 1 - cos(T |k|)`; vanishes at `k = 0`.
    pub fn shell_factor(&self, k2: f64) -> f64 {
        if k2 == 0.0 {
            0.0
        } else {
            1.0 - (self.trunc * k2.sqrt()).cos()
        }
    }

    /// Derivative symbols and squared wavenumber at one padded lattice node.
    pub fn k_info(&self, ix: usize, iy: usize, iz: usize) -> ([f64; 3], f64) {
        let kd = [self.ops.k_at(ix), self.ops.k_at(iy), self.ops.k_at(iz)];
        let k2 = self.k_full[ix] * self.k_full[ix]
            + self.k_full[iy] * self.k_full[iy]
            + self.k_full[iz] * self.k_full[iz];
        (kd, k2)
    }

    /// Truncated-kernel transform value (public variant of `ghat`).
    pub fn ghat_of(&self, k2: f64) -> f64 {
        self.ghat(k2)
    }

    /// Potential of a compactly supported density slice.
    pub fn newtonian_potential(&self, density: ArrayView3<'_, f64>) -> Array3<f64> {
        let mut dhat = self.forward_padded(density);
        self.apply_symbol(&mut dhat, |_, _, g| Complex64::new(g, 0.0));
        self.backward_cropped(dhat)
    }

    /// Potential together with its negative Laplacian, both applied in the
    /// padded transform so the Laplacian is meaningful despite the crop.
    pub fn newtonian_with_neg_laplacian(
        &self,
        density: ArrayView3<'_, f64>,
    ) -> (Array3<f64>, Array3<f64>) {
        let dhat = self.forward_padded(density);
        let mut phat = dhat.clone();
        self.apply_symbol(&mut phat, |_, _, g| Complex64::new(g, 0.0));
        let phi = self.backward_cropped(phat);
        let mut lhat = dhat;
        let trunc = self.trunc;
        self.apply_symbol(&mut lhat, |_, k2, _| {
            let shell = if k2 == 0.0 { 0.0 } else { 1.0 - (trunc * k2.sqrt()).cos() };
            Complex64::new(shell, 0.0)
        });
        let neg_lap = self.backward_cropped(lhat);
        (phi, neg_lap)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldlab::{make_grid, smoothstep_quintic};
    use std::f64::consts::PI;

    fn bump_density(grid: &Grid, center: [f64; 3], a: f64) -> Array3<f64> {
        let mut rho = Array3::zeros((grid.nz, grid.ny, grid.nx));
        for iz in 0..grid.nz {
            for iy in 0..grid.ny {
                for ix in 0..grid.nx {
                    let d = grid.distance(center, grid.position(ix, iy, iz));
                    rho[[iz, iy, ix]] = 1.0 - smoothstep_quintic(d / a);
                }
            }
        }
        rho
    }

    #[test]
    fn zero_density_gives_zero_potential() {
        let g = make_grid(16, 2, 2.0 * PI, 0.1, 0.0).unwrap();
        let ops = PotentialOps::new(&g);
        let phi = ops.newtonian_potential(Array3::zeros((16, 16, 16)).view());
        assert!(phi.iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn far_field_matches_point_mass() {
        let g = make_grid(32, 2, 2.0 * PI, 0.1, 0.0).unwrap();
        let center = [PI, PI, PI];
        let a = 0.5;
        let rho = bump_density(&g, center, a);
        let mass: f64 = rho.iter().sum::<f64>() * g.h().powi(3);
        let phi = ops_potential(&g, &rho);
        // sample ~3 support radii away along x
        let ix = g.nearest_sample([PI + 3.0 * a, PI, PI]);
        let p = g.position(ix[0], ix[1], ix[2]);
        let d = g.distance(center, p);
        let got = phi[[ix[2], ix[1], ix[0]]];
        let want = mass / (4.0 * PI * d);
        assert!(
            (got - want).abs() / want < 0.01,
            "far field {got} vs shell value {want}"
        );
    }

    fn ops_potential(g: &Grid, rho: &Array3<f64>) -> Array3<f64> {
        PotentialOps::new(g).newtonian_potential(rho.view())
    }

    #[test]
    fn neg_laplacian_recovers_density() {
        let g = make_grid(32, 2, 2.0 * PI, 0.1, 0.0).unwrap();
        let center = [PI, PI, PI];
        let rho = bump_density(&g, center, 0.8);
        let ops = PotentialOps::new(&g);
        let (_phi, neg_lap) = ops.newtonian_with_neg_laplacian(rho.view());
        let mut num = 0.0;
        let mut den = 0.0;
        for iz in 0..g.nz {
            for iy in 0..g.ny {
                for ix in 0..g.nx {
                    let d = g.distance(center, g.position(ix, iy, iz));
                    if d < 1.2 {
                        num += (neg_lap[[iz, iy, ix]] - rho[[iz, iy, ix]]).powi(2);
                        den += rho[[iz, iy, ix]].powi(2);
                    }
                }
            }
        }
        let rel = (num / den).sqrt();
        assert!(rel < 1e-3, "interior reconstruction error {rel}");
    }

    #[test]
    fn support_check_rejects_oversized_cutoff() {
        let g = make_grid(16, 2, 2.0 * PI, 0.1, 0.0).unwrap();
        let ops = PotentialOps::new(&g);
        assert!(ops.check_support(0.6 * 2.0 * PI, 2.0 * PI).is_err());
        assert!(ops.check_support(2.0, 2.0 * PI).is_ok());
    }
}
