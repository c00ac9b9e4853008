//! Test-field generation, the scaling map, the pseudo-spectral integrator
//! and the local-energy-inequality checker.

mod energy;
mod families;
mod integrate;
mod rescale;

pub use energy::{local_energy_residual, EnergyLedger, PhiBump};
pub use families::{generate, FlowFamily, FlowSpec, ForceSpec};
pub use integrate::ns_integrate;
pub use rescale::rescale;
