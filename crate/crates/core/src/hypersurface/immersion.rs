use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::height::{height_jet, HeightFunction, HeightJet};
use crate::domain::BoxDomain;
use crate::error::{GeomError, Result};
use crate::tensor::{gram_schmidt, AmbientGeometry, MetricField};

/// Graph hypersurface `x ↦ (x, F(x))` over an open box `Ω ⊂ ℝ^m`.
#[derive(Clone)]
pub struct GraphImmersion {
    height: Arc<dyn HeightFunction>,
    domain: BoxDomain,
    ambient: Arc<dyn MetricField>,
    orientation: f64,
}

impl fmt::Debug for GraphImmersion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GraphImmersion")
            .field("height", &self.height)
            .field("domain", &self.domain)
            .field("orientation", &self.orientation)
            .finish()
    }
}

impl GraphImmersion {
    pub fn new(
        height: Arc<dyn HeightFunction>,
        domain: BoxDomain,
        ambient: Arc<dyn MetricField>,
    ) -> Result<Self> {
        let m = height.dim();
        if domain.dim() != m {
            return Err(GeomError::DimensionMismatch {
                expected: m,
                found: domain.dim(),
            });
        }
        if ambient.dim() != m + 1 {
            return Err(GeomError::DimensionMismatch {
                expected: m + 1,
                found: ambient.dim(),
            });
        }
        Ok(Self {
            height,
            domain,
            ambient,
            orientation: 1.0,
        })
    }

    /// Same immersion with the opposite unit normal.
    pub fn flipped(mut self) -> Self {
        self.orientation = -self.orientation;
        self
    }

    pub fn m(&self) -> usize {
        self.height.dim()
    }

    pub fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    pub fn ambient(&self) -> &dyn MetricField {
        self.ambient.as_ref()
    }

    pub fn height(&self) -> &dyn HeightFunction {
        self.height.as_ref()
    }

    /// True when frames use analytic second derivatives of `F`. Otherwise
    /// every frame carries one finite-difference layer of its own.
    pub fn has_analytic_frames(&self) -> bool {
        self.height.analytic_order() >= 2
    }

    /// Image point `(x, F(x))`.
    pub fn embed(&self, x: &[f64]) -> Vec<f64> {
        let mut y = x.to_vec();
        y.push(self.height.value(x));
        y
    }

    /// Full frame at `x`, including ambient curvature.
    pub fn frame_at(&self, x: &[f64]) -> Result<HypersurfaceFrame> {
        self.frame_with(x, 2)
    }

    /// Frame with the ambient metric jet truncated at `ambient_order`
    /// (1 is enough for everything except curvature).
    pub fn frame_with(&self, x: &[f64], ambient_order: usize) -> Result<HypersurfaceFrame> {
        self.domain.check(x)?;
        let m = self.m();
        let n = m + 1;
        let hj = height_jet(self.height.as_ref(), x, 2, Some(&self.domain))?;
        let mut y = x.to_vec();
        y.push(hj.value);
        let ambient = AmbientGeometry::at(self.ambient.as_ref(), &y, ambient_order)?;
        let gm = ambient.metric().clone();

        let tangents: Vec<DVector<f64>> = (0..m)
            .map(|a| {
                let mut v = DVector::zeros(n);
                v[a] = 1.0;
                v[m] = hj.gradient[a];
                v
            })
            .collect();
        let induced = DMatrix::from_fn(m, m, |a, b| (tangents[a].transpose() * &gm * &tangents[b])[(0, 0)]);
        let det = induced.determinant();
        let hadamard: f64 = (0..m).map(|a| induced[(a, a)]).product();
        if !(det > 1e-12 * hadamard) {
            return Err(GeomError::ImmersionDegenerate { x: x.to_vec(), det });
        }
        let induced_inv = induced
            .clone()
            .try_inverse()
            .ok_or(GeomError::ImmersionDegenerate { x: x.to_vec(), det })?;

        let mut conormal = DVector::zeros(n);
        for a in 0..m {
            conormal[a] = -hj.gradient[a];
        }
        conormal[m] = 1.0;
        let raised = ambient.metric_inv() * &conormal;
        let norm = conormal.dot(&raised).sqrt();
        let normal = raised * (self.orientation / norm);

        let gamma = ambient.christoffel();
        let mut second = DMatrix::zeros(m, m);
        for a in 0..m {
            for b in a..m {
                let mut acc = gamma.apply(&tangents[a], &tangents[b]);
                acc[m] += hj.hessian[(a, b)];
                let v = ambient.inner(&acc, &normal);
                second[(a, b)] = v;
                second[(b, a)] = v;
            }
        }
        let shape = &induced_inv * &second;
        let mean_curvature = shape.trace() / m as f64;
        let shape_norm2 = (&shape * &shape).trace();

        Ok(HypersurfaceFrame {
            x: x.to_vec(),
            point: y,
            height: hj,
            tangents,
            induced,
            induced_inv,
            normal,
            second_form: second,
            shape,
            mean_curvature,
            shape_norm2,
            ambient,
        })
    }
}

/// Pointwise hypersurface data. Tangent vectors are represented either
/// in ambient chart components or by coefficients in the basis
/// `X_a = ∂/∂x_a + F_a ∂/∂t`.
#[derive(Debug, Clone)]
pub struct HypersurfaceFrame {
    pub x: Vec<f64>,
    /// Image point `(x, F(x))`.
    pub point: Vec<f64>,
    pub height: HeightJet,
    pub tangents: Vec<DVector<f64>>,
    /// `g_ab = ⟨X_a, X_b⟩`.
    pub induced: DMatrix<f64>,
    pub induced_inv: DMatrix<f64>,
    /// Unit normal `η`, ambient components.
    pub normal: DVector<f64>,
    /// `B_ab = ⟨∇̄_{X_a} X_b, η⟩ = ⟨A X_a, X_b⟩`.
    pub second_form: DMatrix<f64>,
    /// Shape operator in the X-basis: column `a` holds `A X_a`.
    pub shape: DMatrix<f64>,
    /// `f = trace(A) / m`.
    pub mean_curvature: f64,
    /// `|A|² = trace(A²)`.
    pub shape_norm2: f64,
    pub ambient: AmbientGeometry,
}

impl HypersurfaceFrame {
    pub fn m(&self) -> usize {
        self.tangents.len()
    }

    /// `Σ c^a X_a`.
    pub fn to_ambient(&self, c: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.m() + 1);
        for (a, x) in self.tangents.iter().enumerate() {
            out += x * c[a];
        }
        out
    }

    /// X-basis coefficients of the tangential projection of `y`.
    pub fn tangent_part(&self, y: &DVector<f64>) -> DVector<f64> {
        let rhs = DVector::from_fn(self.m(), |a, _| self.ambient.inner(&self.tangents[a], y));
        &self.induced_inv * rhs
    }

    /// `⟨y, η⟩`.
    pub fn normal_part(&self, y: &DVector<f64>) -> f64 {
        self.ambient.inner(y, &self.normal)
    }

    /// `g(c1, c2)` for X-basis coefficient vectors.
    pub fn tangent_inner(&self, c1: &DVector<f64>, c2: &DVector<f64>) -> f64 {
        (c1.transpose() * &self.induced * c2)[(0, 0)]
    }

    pub fn tangent_norm(&self, c: &DVector<f64>) -> f64 {
        self.tangent_inner(c, c).max(0.0).sqrt()
    }

    /// `A(c)` in the X-basis.
    pub fn shape_apply(&self, c: &DVector<f64>) -> DVector<f64> {
        &self.shape * c
    }

    /// Mean curvature vector `H = f η`.
    pub fn mean_curvature_vector(&self) -> DVector<f64> {
        &self.normal * self.mean_curvature
    }

    /// Tension `τ = m H`.
    pub fn tension(&self) -> DVector<f64> {
        self.mean_curvature_vector() * self.m() as f64
    }

    /// g-orthonormal tangent frame from Gram–Schmidt on `X_1, …, X_m`;
    /// column `i` holds the X-basis coefficients of `e_i`.
    pub fn orthonormal_tangent_frame(&self) -> DMatrix<f64> {
        let m = self.m();
        let basis: Vec<DVector<f64>> = (0..m)
            .map(|a| DVector::from_fn(m, |b, _| if a == b { 1.0 } else { 0.0 }))
            .collect();
        let e = gram_schmidt(&self.induced, &basis).expect("induced metric checked non-degenerate");
        DMatrix::from_columns(&e)
    }

    /// `√det g`.
    pub fn volume_density(&self) -> f64 {
        self.induced.determinant().sqrt()
    }
}

impl GraphImmersion {
    /// Induced metric `g_ab` at `x`; needs only first derivatives of `F`.
    pub fn induced_metric(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        self.domain.check(x)?;
        let m = self.m();
        let hj = height_jet(self.height.as_ref(), x, 1, Some(&self.domain))?;
        let mut y = x.to_vec();
        y.push(hj.value);
        self.ambient.domain().check(&y)?;
        let gm = crate::tensor::checked_matrix(self.ambient.as_ref(), &y)?;
        Ok(DMatrix::from_fn(m, m, |a, b| {
            let (fa, fb) = (hj.gradient[a], hj.gradient[b]);
            gm[(a, b)] + fa * gm[(m, b)] + fb * gm[(a, m)] + fa * fb * gm[(m, m)]
        }))
    }
}
