//! The warped model family
//! `⟨,⟩ = (u + v t²)⁻¹ (dy_1² + … + dy_m²) + dt²` on `ℝ^m × I`,
//! with closed forms for its connection, curvature, θ-Einstein scalars and
//! the special torse-forming field `P = ∂/∂t`.

use nalgebra::{DMatrix, DVector};

use crate::domain::BoxDomain;
use crate::error::{GeomError, Result};
use crate::tensor::{MetricField, MetricJet, MAX_METRIC_JET};
use crate::torse::TorseFormingField;

#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    u: f64,
    v: f64,
    m: usize,
    t_range: (f64, f64),
    flat_limit: bool,
}

impl ModelParams {
    /// `u, v > 0`, `m ≥ 2`, `t` ranging over all reals.
    pub fn new(u: f64, v: f64, m: usize) -> Result<Self> {
        Self::build(u, v, m, (f64::NEG_INFINITY, f64::INFINITY), false)
    }

    /// Flat-limit mode: admits `v = 0`, where the metric is Euclidean.
    pub fn flat_limit(u: f64, v: f64, m: usize) -> Result<Self> {
        Self::build(u, v, m, (f64::NEG_INFINITY, f64::INFINITY), true)
    }

    /// Restrict `t` to the open interval `(lo, hi)`.
    pub fn with_interval(self, lo: f64, hi: f64) -> Result<Self> {
        Self::build(self.u, self.v, self.m, (lo, hi), self.flat_limit)
    }

    fn build(u: f64, v: f64, m: usize, t_range: (f64, f64), flat_limit: bool) -> Result<Self> {
        if !(u > 0.0 && u.is_finite()) {
            return Err(GeomError::InvalidParams(format!("u must be positive, got {u}")));
        }
        let v_ok = if flat_limit { v >= 0.0 } else { v > 0.0 };
        if !(v_ok && v.is_finite()) {
            return Err(GeomError::InvalidParams(format!(
                "v must be {}, got {v}",
                if flat_limit { "non-negative in flat-limit mode" } else { "positive" }
            )));
        }
        if m < 2 {
            return Err(GeomError::InvalidParams(format!("m must be at least 2, got {m}")));
        }
        if !(t_range.0 < t_range.1) || t_range.0.is_nan() || t_range.1.is_nan() {
            return Err(GeomError::InvalidParams(format!("empty t interval {t_range:?}")));
        }
        Ok(Self {
            u,
            v,
            m,
            t_range,
            flat_limit,
        })
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Ambient dimension `m + 1`.
    pub fn n(&self) -> usize {
        self.m + 1
    }

    pub fn t_range(&self) -> (f64, f64) {
        self.t_range
    }

    pub fn is_flat_limit(&self) -> bool {
        self.flat_limit
    }

    /// `w(t) = u + v t²`.
    pub fn w(&self, t: f64) -> f64 {
        self.u + self.v * t * t
    }

    /// `β(t) = v t / (u + v t²)`.
    pub fn beta(&self, t: f64) -> f64 {
        self.v * t / self.w(t)
    }

    /// Natural curvature scale `v / u`, used as the floor of relative errors.
    pub fn curvature_scale(&self) -> f64 {
        self.v / self.u
    }

    /// Positive hyperplane heights `c = ±√(u / 3v)` at which `F ≡ c` is
    /// biharmonic and not harmonic. Empty when `v = 0`.
    pub fn biharmonic_heights(&self) -> Vec<f64> {
        if self.v == 0.0 {
            return Vec::new();
        }
        let c = (self.u / (3.0 * self.v)).sqrt();
        vec![-c, c]
    }
}

/// The model metric with analytic jets to order 3.
#[derive(Debug, Clone)]
pub struct ModelMetric {
    params: ModelParams,
}

pub fn model_metric(params: &ModelParams) -> ModelMetric {
    ModelMetric {
        params: params.clone(),
    }
}

impl ModelMetric {
    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// `s = 1/w` and its first three `t`-derivatives.
    fn warp_derivatives(&self, t: f64) -> [f64; 4] {
        let (u, v) = (self.params.u, self.params.v);
        let w = self.params.w(t);
        [
            1.0 / w,
            -2.0 * v * t / (w * w),
            (6.0 * v * v * t * t - 2.0 * u * v) / (w * w * w),
            24.0 * v * v * t * (u - v * t * t) / (w * w * w * w),
        ]
    }

    fn diag(&self, s: f64, tt: f64) -> DMatrix<f64> {
        let n = self.params.n();
        let mut d = DMatrix::zeros(n, n);
        for i in 0..self.params.m {
            d[(i, i)] = s;
        }
        d[(n - 1, n - 1)] = tt;
        d
    }
}

impl MetricField for ModelMetric {
    fn dim(&self) -> usize {
        self.params.n()
    }

    fn matrix(&self, p: &[f64]) -> DMatrix<f64> {
        let t = p[self.params.m];
        self.diag(1.0 / self.params.w(t), 1.0)
    }

    fn analytic_order(&self) -> usize {
        MAX_METRIC_JET
    }

    fn analytic_jet(&self, p: &[f64], order: usize) -> Option<MetricJet> {
        let n = self.params.n();
        let tix = n - 1;
        let s = self.warp_derivatives(p[tix]);
        let order = order.min(MAX_METRIC_JET);
        let zero = DMatrix::zeros(n, n);
        // only pure t-derivatives survive
        let build = |k: usize| -> Vec<DMatrix<f64>> {
            let count = n.pow(k as u32);
            let only_t: usize = (0..k).fold(0, |acc, _| acc * n + tix);
            (0..count)
                .map(|idx| if idx == only_t { self.diag(s[k], 0.0) } else { zero.clone() })
                .collect()
        };
        Some(MetricJet {
            order,
            g: self.diag(s[0], 1.0),
            d1: if order >= 1 { build(1) } else { Vec::new() },
            d2: if order >= 2 { build(2) } else { Vec::new() },
            d3: if order >= 3 { build(3) } else { Vec::new() },
        })
    }

    fn domain(&self) -> BoxDomain {
        let n = self.params.n();
        let mut lo = vec![f64::NEG_INFINITY; n];
        let mut hi = vec![f64::INFINITY; n];
        lo[n - 1] = self.params.t_range.0;
        hi[n - 1] = self.params.t_range.1;
        BoxDomain::new(lo, hi).expect("validated interval")
    }
}

/// Orthonormal frame `e_i = √w ∂/∂y_i`, `e_{m+1} = ∂/∂t` in chart components.
pub fn model_frame(params: &ModelParams, t: f64) -> Vec<DVector<f64>> {
    let n = params.n();
    let sw = params.w(t).sqrt();
    (0..n)
        .map(|i| {
            let mut e = DVector::zeros(n);
            e[i] = if i < params.m { sw } else { 1.0 };
            e
        })
        .collect()
}

/// Connection of the model in its orthonormal frame. With `β = vt/(u+vt²)`:
/// `∇̄_{e_i} e_i = β e_{m+1}`, `∇̄_{e_i} e_{m+1} = −β e_i`, and
/// `∇̄_{e_{m+1}} e_i`, `∇̄_{e_i} e_j` (`i ≠ j`), `∇̄_{e_{m+1}} e_{m+1}` vanish.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameConnection {
    /// Coefficient of `e_{m+1}` in `∇̄_{e_i} e_i`.
    pub ei_ei: f64,
    /// Coefficient of `e_i` in `∇̄_{e_i} e_{m+1}`.
    pub ei_en: f64,
    pub en_ei: f64,
    pub ei_ej: f64,
    pub en_en: f64,
}

pub fn closed_form_connection(params: &ModelParams, t: f64) -> FrameConnection {
    let b = params.beta(t);
    FrameConnection {
        ei_ei: b,
        ei_en: -b,
        en_ei: 0.0,
        ei_ej: 0.0,
        en_en: 0.0,
    }
}

impl FrameConnection {
    /// `∇̄_{e_a} e_b` as frame coefficients, for frame indices `a, b` with
    /// `m` the index of `e_{m+1}`.
    pub fn nabla(&self, m: usize, a: usize, b: usize) -> DVector<f64> {
        let mut out = DVector::zeros(m + 1);
        match (a < m, b < m) {
            (true, true) if a == b => out[m] = self.ei_ei,
            (true, true) => {}
            (true, false) => out[a] = self.ei_en,
            (false, _) => {}
        }
        out
    }
}

/// Curvature of the model in its orthonormal frame, `i ≠ j ≤ m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormCurvature {
    /// `⟨R(e_i, e_j) e_i, e_j⟩ = v²t²/(u+vt²)²`.
    pub r_ijij: f64,
    /// `⟨R(e_i, e_{m+1}) e_i, e_{m+1}⟩ = −v(u−2vt²)/(u+vt²)²`.
    pub r_inin: f64,
}

impl ClosedFormCurvature {
    /// Sectional curvature of `span(e_i, e_j)`.
    pub fn sectional_tangential(&self) -> f64 {
        -self.r_ijij
    }

    /// Sectional curvature of `span(e_i, e_{m+1})`.
    pub fn sectional_vertical(&self) -> f64 {
        -self.r_inin
    }
}

pub fn closed_form_curvature(params: &ModelParams, t: f64) -> ClosedFormCurvature {
    let (u, v) = (params.u, params.v);
    let w2 = params.w(t).powi(2);
    ClosedFormCurvature {
        r_ijij: v * v * t * t / w2,
        r_inin: -v * (u - 2.0 * v * t * t) / w2,
    }
}

/// Scalars of `Ric = a⟨,⟩ + b θ⊗θ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaEinsteinScalars {
    pub a: f64,
    pub b: f64,
}

pub fn theta_einstein_scalars(params: &ModelParams, t: f64) -> ThetaEinsteinScalars {
    let (u, v, m) = (params.u, params.v, params.m as f64);
    let w2 = params.w(t).powi(2);
    ThetaEinsteinScalars {
        a: v * (u - v * (m + 1.0) * t * t) / w2,
        b: v * (m - 1.0) * (u - v * t * t) / w2,
    }
}

/// `P = ∂/∂t` with `μ = −β`, `ω = β θ`, `θ = P♭`.
#[derive(Debug, Clone)]
pub struct StfField {
    params: ModelParams,
}

pub fn stf_field(params: &ModelParams) -> StfField {
    StfField {
        params: params.clone(),
    }
}

impl StfField {
    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    fn t(&self, p: &[f64]) -> f64 {
        p[self.params.m]
    }

    /// `θ = P♭`; the metric has `g_{tt} = 1` and no cross terms.
    pub fn theta(&self) -> DVector<f64> {
        let n = self.params.n();
        let mut th = DVector::zeros(n);
        th[n - 1] = 1.0;
        th
    }
}

impl TorseFormingField for StfField {
    fn dim(&self) -> usize {
        self.params.n()
    }

    fn field(&self, _p: &[f64]) -> DVector<f64> {
        self.theta()
    }

    fn field_jacobian(&self, _p: &[f64]) -> Option<DMatrix<f64>> {
        let n = self.params.n();
        Some(DMatrix::zeros(n, n))
    }

    fn conformal_scalar(&self, p: &[f64]) -> f64 {
        -self.params.beta(self.t(p))
    }

    fn generating_form(&self, p: &[f64]) -> DVector<f64> {
        self.theta() * self.params.beta(self.t(p))
    }

    fn stf_beta(&self, p: &[f64]) -> Option<f64> {
        Some(self.params.beta(self.t(p)))
    }
}
