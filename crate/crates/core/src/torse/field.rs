use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{GeomError, Result};
use crate::fd::fd_jet_vec;
use crate::tensor::{AmbientGeometry, MetricField, Point};

/// Ambient vector field `P` with conformal scalar `μ` and generating form
/// `ω`, claimed to satisfy `∇̄_X P = μ X + ω(X) P`.
pub trait TorseFormingField: Send + Sync {
    fn dim(&self) -> usize;

    fn field(&self, p: &[f64]) -> DVector<f64>;

    /// `J[(k, i)] = ∂_i P^k` when known in closed form.
    fn field_jacobian(&self, _p: &[f64]) -> Option<DMatrix<f64>> {
        None
    }

    fn conformal_scalar(&self, p: &[f64]) -> f64;

    /// Covector components of `ω`.
    fn generating_form(&self, p: &[f64]) -> DVector<f64>;

    /// `β` with `ω = β P♭`, for special torse-forming fields.
    fn stf_beta(&self, _p: &[f64]) -> Option<f64> {
        None
    }
}

/// `∂_i P^k`, analytic when supplied, otherwise by finite differences.
pub fn field_jacobian(
    metric: &dyn MetricField,
    field: &dyn TorseFormingField,
    p: &[f64],
) -> Result<DMatrix<f64>> {
    if let Some(j) = field.field_jacobian(p) {
        return Ok(j);
    }
    let n = field.dim();
    let jet = fd_jet_vec(
        |q| Ok(field.field(q).as_slice().to_vec()),
        p,
        1,
        Some(&metric.domain()),
    )?;
    Ok(DMatrix::from_fn(n, n, |k, i| jet.first(i)[k]))
}

/// `∇̄_X P − μ X − ω(X) P` at `p`.
pub fn torse_residual(
    metric: &dyn MetricField,
    field: &dyn TorseFormingField,
    p: &Point,
    x: &DVector<f64>,
) -> Result<DVector<f64>> {
    let geo = AmbientGeometry::at(metric, p.as_slice(), 1)?;
    torse_residual_with(&geo, metric, field, x)
}

pub(crate) fn torse_residual_with(
    geo: &AmbientGeometry,
    metric: &dyn MetricField,
    field: &dyn TorseFormingField,
    x: &DVector<f64>,
) -> Result<DVector<f64>> {
    let p = geo.point();
    let pv = field.field(p);
    let jac = field_jacobian(metric, field, p)?;
    let nabla = geo.covariant(x, &pv, &(jac * x));
    let omega_x = field.generating_form(p).dot(x);
    Ok(nabla - x * field.conformal_scalar(p) - &pv * omega_x)
}

/// `max |ω − β P♭|` for special torse-forming fields; `None` otherwise.
pub fn stf_defect(metric: &dyn MetricField, field: &dyn TorseFormingField, p: &Point) -> Result<Option<f64>> {
    let Some(beta) = field.stf_beta(p.as_slice()) else {
        return Ok(None);
    };
    let g = crate::tensor::checked_matrix(metric, p.as_slice())?;
    let flat = g * field.field(p.as_slice());
    Ok(Some((field.generating_form(p.as_slice()) - flat * beta).amax()))
}

/// A field whose torse-forming property has been checked on sample points.
#[derive(Clone)]
pub struct TorseFormingData {
    field: Arc<dyn TorseFormingField>,
}

impl TorseFormingData {
    /// Accepts `field` only if its residual along every coordinate
    /// direction stays within `tol` (metric norm) at each point.
    pub fn certify(
        metric: &dyn MetricField,
        field: Arc<dyn TorseFormingField>,
        points: &[Point],
        tol: f64,
    ) -> Result<Self> {
        let n = field.dim();
        if metric.dim() != n {
            return Err(GeomError::DimensionMismatch {
                expected: metric.dim(),
                found: n,
            });
        }
        for p in points {
            let geo = AmbientGeometry::at(metric, p.as_slice(), 1)?;
            for i in 0..n {
                let x = DVector::from_fn(n, |k, _| if k == i { 1.0 } else { 0.0 });
                let r = torse_residual_with(&geo, metric, field.as_ref(), &x)?;
                let mag = geo.norm(&r);
                if !(mag <= tol) {
                    return Err(GeomError::NotTorseForming {
                        residual: mag,
                        tolerance: tol,
                    });
                }
            }
        }
        Ok(Self { field })
    }

    /// Skip certification.
    pub fn trusted(field: Arc<dyn TorseFormingField>) -> Self {
        Self { field }
    }

    pub fn field(&self) -> &dyn TorseFormingField {
        self.field.as_ref()
    }
}

/// Chart-constant field with `μ = 0`, `ω = 0`; parallel in flat space.
#[derive(Debug, Clone)]
pub struct ConstantField {
    pub value: DVector<f64>,
}

impl TorseFormingField for ConstantField {
    fn dim(&self) -> usize {
        self.value.len()
    }

    fn field(&self, _p: &[f64]) -> DVector<f64> {
        self.value.clone()
    }

    fn field_jacobian(&self, _p: &[f64]) -> Option<DMatrix<f64>> {
        let n = self.value.len();
        Some(DMatrix::zeros(n, n))
    }

    fn conformal_scalar(&self, _p: &[f64]) -> f64 {
        0.0
    }

    fn generating_form(&self, _p: &[f64]) -> DVector<f64> {
        DVector::zeros(self.value.len())
    }
}
