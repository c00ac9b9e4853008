//! Spectral differential calculus and the singular-integral decompositions
//! behind the localized estimates: pressure split, Biot-Savart pair, and the
//! curl-tensor pair, with harmonicity diagnostics for their remainders.

mod decomp;
mod harmonic;
mod potential;
mod spectral;

pub use decomp::{
    biot_savart_local, curl_tensor_split, pressure_split, DecompCtx, SliceDecomposition,
};
pub use harmonic::{harmonic_defect, harmonic_mean_trace, GTrace, GTraceEntry, SliceSeries};
pub use potential::PotentialOps;
pub use spectral::{vorticity_consistency, SpectralOps};
