//! Torse-forming vector fields and the identities they induce on
//! hypersurfaces.

pub mod corollary;
pub mod field;
pub mod identities;

pub use corollary::{
    corollary1_predicate, fit_at, theta_einstein_fit, CorollaryPoint, CorollaryReport, CorollaryTolerances,
    CorollaryVerdict, ThetaEinsteinFit, Witness,
};
pub use field::{field_jacobian, stf_defect, torse_residual, ConstantField, TorseFormingData, TorseFormingField};
pub use identities::{
    identity_residuals, lemma1_residual, lemma2_residual, lemma3_residual, lemma4_residual, point_split, split,
    t5t6_check, theorem1_scalar, IdentityResiduals, Lemma1Terms, Lemma2Terms, Lemma3Terms, Lemma4Terms, PointSplit,
    ResidualEntry, SurfaceSplit, T5T6Terms,
};
