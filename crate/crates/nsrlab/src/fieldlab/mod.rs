//! Grid and field containers, parabolic-cylinder geometry, and exponent-pair
//! algebra and classification.

mod cutoff;
mod cylinder;
mod exponents;
mod fields;
mod grid;

pub use cutoff::{smoothstep_c4, smoothstep_c4_deriv, smoothstep_quintic, smoothstep_quintic_deriv, Cutoff};
pub use cylinder::{
    ball_quadrature, cylinder_mask, time_window, BallCell, BallQuadrature, CylinderQuadrature,
    ParabolicCylinder, TimeWindow,
};
pub use exponents::{
    classify_exponents, conjugate_exponents, p_from_sharp, p_from_star, p_sharp_rational,
    p_star_rational, Conjugates, CriterionKind, ExponentPair, RegionVerdict,
};
pub use fields::{FieldStack, ScalarField, VectorField};
pub use grid::{make_grid, Grid, RESOLUTION_FLOOR_CELLS};
