//! Graph hypersurfaces: frames, shape operator, intrinsic operators,
//! tension and bitension.

pub mod bitension;
pub mod height;
pub mod immersion;
pub mod operators;

pub use bitension::{bitension, bitension_vector, field_jet, residuals_s, route_factor, tension, BitensionValue, SystemResiduals};
pub use height::{height_jet, FnHeight, HeightFunction, HeightJet, Hyperplane, Polynomial, SineBump, Wave, MAX_HEIGHT_JET};
pub use immersion::{GraphImmersion, HypersurfaceFrame};
pub use operators::{directional_derivative, divergence, intrinsic_grad, laplace_beltrami, ScalarField, TangentField};
