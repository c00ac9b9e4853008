//! Field stack with lazily derived gradient and vorticity magnitudes.

use std::sync::OnceLock;

use crate::error::Result;
use crate::fieldlab::{FieldStack, Grid, ScalarField, VectorField};
use crate::singops::SpectralOps;

/// Wraps a [`FieldStack`] and caches the spectral derivatives the functionals
/// consume. All accessors are reentrant; the caches fill at most once.
pub struct Prepared {
    pub stack: FieldStack,
    ops: OnceLock<SpectralOps>,
    vorticity: OnceLock<VectorField>,
    grad_u_mag: OnceLock<ScalarField>,
    grad_w_mag: OnceLock<ScalarField>,
    curl_w_mag: OnceLock<ScalarField>,
}

impl Prepared {
    pub fn new(stack: FieldStack) -> Self {
        Prepared {
            stack,
            ops: OnceLock::new(),
            vorticity: OnceLock::new(),
            grad_u_mag: OnceLock::new(),
            grad_w_mag: OnceLock::new(),
            curl_w_mag: OnceLock::new(),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.stack.grid
    }

    pub fn u(&self) -> &VectorField {
        &self.stack.u
    }

    pub fn p(&self) -> Result<&ScalarField> {
        self.stack.pressure()
    }

    pub fn spectral(&self) -> &SpectralOps {
        self.ops.get_or_init(|| SpectralOps::for_grid(&self.stack.grid))
    }

    /// Stored vorticity if present, otherwise the spectral curl of `u`.
    pub fn w(&self) -> &VectorField {
        if let Some(w) = &self.stack.w {
            w
        } else {
            self.vorticity.get_or_init(|| self.spectral().curl(&self.stack.u))
        }
    }

    /// `|grad u|` (Frobenius) per sample.
    pub fn grad_u_mag(&self) -> &ScalarField {
        self.grad_u_mag.get_or_init(|| self.spectral().gradient_magnitude(&self.stack.u))
    }

    /// `|grad w|` per sample.
    pub fn grad_w_mag(&self) -> &ScalarField {
        self.grad_w_mag.get_or_init(|| {
            let w = self.w().clone();
            self.spectral().gradient_magnitude(&w)
        })
    }

    /// `|curl w|` per sample.
    pub fn curl_w_mag(&self) -> &ScalarField {
        self.curl_w_mag.get_or_init(|| {
            let w = self.w().clone();
            self.spectral().curl_magnitude(&w)
        })
    }
}
