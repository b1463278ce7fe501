//! Numerical Riemannian geometry for graph hypersurfaces: metric jets,
//! curvature, shape operators, bitension fields and torse-forming
//! identities, evaluated pointwise in a chart.

pub mod domain;
pub mod error;
pub mod fd;
pub mod hypersurface;
pub mod model;
pub mod tensor;
pub mod tolerance;
pub mod torse;

pub use domain::BoxDomain;
pub use error::{GeomError, Result};
pub use model::{model_metric, stf_field, ModelMetric, ModelParams, StfField};
pub use tensor::{AmbientGeometry, MetricField, Point};
pub use tolerance::Tier;
