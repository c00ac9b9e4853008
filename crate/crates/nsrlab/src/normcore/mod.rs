//! Mixed space-time norms over parabolic cylinders, the scale-invariant
//! functionals, ball averages and the parabolic Morrey norm.

mod functionals;
mod ladder;
mod morrey;
mod norms;
mod prepared;

pub use functionals::{
    ball_mean_cubed_term, criterion_quantity, functional, velocity_norms_plain_and_centered,
    BorderlinePair, CriterionOptions, Functional,
};
pub use ladder::{build_ladder, FunctionalLadder, LadderSpec};
pub use morrey::{morrey_norm, MorreyEstimate, MorreyParams};
pub use norms::{
    ball_mean, mixed_norm, mixed_norm_centered, scalar_ball_mean, spatial_average, FieldRef,
};
pub use prepared::Prepared;
