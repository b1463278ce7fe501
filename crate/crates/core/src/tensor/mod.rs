//! Chart-based ambient geometry: metric jets, Levi-Civita connection,
//! curvature.

pub mod curvature;
pub mod frame;
pub mod metric;

pub use curvature::{christoffel, ricci, riemann, AmbientGeometry, Christoffel};
pub use frame::{coordinate_frame, gram_schmidt};
pub use metric::{
    checked_matrix, inner, metric_jet, FdOnly, FlatMetric, MetricField, MetricJet, PerturbedJet, Point,
    MAX_METRIC_JET,
};
