use nalgebra::{DMatrix, DVector};

use crate::domain::BoxDomain;
use crate::error::{GeomError, Result};
use crate::fd::{fd_jet_vec, MAX_FD_ORDER};

/// Ambient chart coordinates `(y_1, …, y_m, t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(GeomError::InvalidPoint(format!(
                "need at least 2 coordinates, got {}",
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(GeomError::InvalidPoint(format!("non-finite coordinate in {coords:?}")));
        }
        Ok(Self(coords))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

/// Highest jet order any metric evaluator is asked for.
pub const MAX_METRIC_JET: usize = 3;

/// Metric matrix and its coordinate derivatives at one point.
///
/// `d1[k] = ∂_k G`, `d2[k n + l] = ∂_k ∂_l G`,
/// `d3[(k n + l) n + p] = ∂_k ∂_l ∂_p G`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricJet {
    pub order: usize,
    pub g: DMatrix<f64>,
    pub d1: Vec<DMatrix<f64>>,
    pub d2: Vec<DMatrix<f64>>,
    pub d3: Vec<DMatrix<f64>>,
}

impl MetricJet {
    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    pub fn d2(&self, k: usize, l: usize) -> &DMatrix<f64> {
        &self.d2[k * self.dim() + l]
    }

    pub fn d3(&self, k: usize, l: usize, p: usize) -> &DMatrix<f64> {
        let n = self.dim();
        &self.d3[(k * n + l) * n + p]
    }

    /// Drop everything above `order`.
    pub fn truncate(mut self, order: usize) -> Self {
        if order < 3 {
            self.d3.clear();
        }
        if order < 2 {
            self.d2.clear();
        }
        if order < 1 {
            self.d1.clear();
        }
        self.order = self.order.min(order);
        self
    }

    fn derivatives(&self, order: usize) -> &[DMatrix<f64>] {
        match order {
            1 => &self.d1,
            2 => &self.d2,
            3 => &self.d3,
            _ => std::slice::from_ref(&self.g),
        }
    }
}

/// A Riemannian metric on a coordinate chart.
///
/// Implementations supply the matrix and, optionally, analytic derivative
/// jets. Missing orders are synthesized by [`metric_jet`] with finite
/// differences of the highest analytic order available.
pub trait MetricField: Send + Sync {
    fn dim(&self) -> usize;

    fn matrix(&self, p: &[f64]) -> DMatrix<f64>;

    /// Highest derivative order [`MetricField::analytic_jet`] can supply.
    fn analytic_order(&self) -> usize {
        0
    }

    /// Analytic jet truncated at `order.min(self.analytic_order())`.
    fn analytic_jet(&self, _p: &[f64], _order: usize) -> Option<MetricJet> {
        None
    }

    fn domain(&self) -> BoxDomain {
        BoxDomain::unbounded(self.dim())
    }
}

/// Metric matrix at `p`, checked for symmetry and positive definiteness.
pub fn checked_matrix(metric: &dyn MetricField, p: &[f64]) -> Result<DMatrix<f64>> {
    let g = metric.matrix(p);
    validate_metric(&g, p)?;
    Ok(g)
}

pub(crate) fn validate_metric(g: &DMatrix<f64>, p: &[f64]) -> Result<()> {
    if g.iter().any(|v| !v.is_finite()) {
        return Err(GeomError::DegenerateMetric {
            point: p.to_vec(),
            detail: "non-finite entry".into(),
        });
    }
    let scale = g.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(f64::MIN_POSITIVE);
    let asym = (g - g.transpose()).amax();
    if asym > 1e-12 * scale {
        return Err(GeomError::DegenerateMetric {
            point: p.to_vec(),
            detail: format!("not symmetric (max asymmetry {asym:e})"),
        });
    }
    if g.clone().cholesky().is_none() {
        let hadamard: f64 = (0..g.nrows()).map(|i| g[(i, i)].abs()).product();
        if g.determinant().abs() <= 1e-14 * hadamard.max(f64::MIN_POSITIVE) {
            return Err(GeomError::DegenerateMetric {
                point: p.to_vec(),
                detail: "singular matrix".into(),
            });
        }
        return Err(GeomError::NotPositiveDefinite { point: p.to_vec() });
    }
    Ok(())
}

/// Metric jet of the requested order at `p`, analytic where the metric
/// provides it and finite-difference synthesized above that.
pub fn metric_jet(metric: &dyn MetricField, p: &[f64], order: usize) -> Result<MetricJet> {
    let n = metric.dim();
    if p.len() != n {
        return Err(GeomError::DimensionMismatch {
            expected: n,
            found: p.len(),
        });
    }
    if order > MAX_METRIC_JET {
        return Err(GeomError::InsufficientJetOrder {
            required: order,
            available: MAX_METRIC_JET,
        });
    }
    let domain = metric.domain();
    domain.check(p)?;

    let base_order = metric.analytic_order().min(order);
    let mut jet = if base_order == 0 {
        MetricJet {
            order: 0,
            g: metric.matrix(p),
            d1: Vec::new(),
            d2: Vec::new(),
            d3: Vec::new(),
        }
    } else {
        metric
            .analytic_jet(p, base_order)
            .ok_or(GeomError::InsufficientJetOrder {
                required: base_order,
                available: 0,
            })?
            .truncate(base_order)
    };
    validate_metric(&jet.g, p)?;

    let extra = order - base_order;
    if extra > 0 {
        debug_assert!(extra <= MAX_FD_ORDER);
        let flat_top = |q: &[f64]| -> Result<Vec<f64>> {
            if base_order == 0 {
                let g = checked_matrix(metric, q)?;
                Ok(g.as_slice().to_vec())
            } else {
                let j = metric
                    .analytic_jet(q, base_order)
                    .ok_or(GeomError::InsufficientJetOrder {
                        required: base_order,
                        available: 0,
                    })?;
                Ok(j.derivatives(base_order)
                    .iter()
                    .flat_map(|m| m.as_slice().iter().copied())
                    .collect())
            }
        };
        let fd = fd_jet_vec(flat_top, p, extra, Some(&domain))?;
        let blocks = n.pow(base_order as u32);
        let nn = n * n;
        // index of a derivative multi-index (outer analytic slots, inner FD slots)
        for r in 1..=extra {
            let target = base_order + r;
            let count = n.pow(target as u32);
            let mut out = Vec::with_capacity(count);
            for idx in 0..count {
                // split idx into analytic prefix and FD suffix
                let fd_count = n.pow(r as u32);
                let prefix = idx / fd_count;
                let suffix = idx % fd_count;
                let raw = match r {
                    1 => fd.first(suffix),
                    2 => fd.second(suffix / n, suffix % n),
                    _ => fd.third(suffix / nn, (suffix / n) % n, suffix % n),
                };
                let o = prefix * nn;
                debug_assert!(prefix < blocks);
                out.push(DMatrix::from_column_slice(n, n, &raw[o..o + nn]));
            }
            match target {
                1 => jet.d1 = out,
                2 => jet.d2 = out,
                _ => jet.d3 = out,
            }
        }
        jet.order = order;
    }
    Ok(jet)
}

/// Euclidean metric; all derivatives vanish.
#[derive(Debug, Clone, Copy)]
pub struct FlatMetric {
    dim: usize,
}

impl FlatMetric {
    pub fn new(dim: usize) -> Self {
        Self { dim }
    }
}

impl MetricField for FlatMetric {
    fn dim(&self) -> usize {
        self.dim
    }

    fn matrix(&self, _p: &[f64]) -> DMatrix<f64> {
        DMatrix::identity(self.dim, self.dim)
    }

    fn analytic_order(&self) -> usize {
        MAX_METRIC_JET
    }

    fn analytic_jet(&self, _p: &[f64], order: usize) -> Option<MetricJet> {
        let n = self.dim;
        let z = DMatrix::zeros(n, n);
        let order = order.min(MAX_METRIC_JET);
        Some(MetricJet {
            order,
            g: DMatrix::identity(n, n),
            d1: if order >= 1 { vec![z.clone(); n] } else { Vec::new() },
            d2: if order >= 2 { vec![z.clone(); n * n] } else { Vec::new() },
            d3: if order >= 3 { vec![z; n * n * n] } else { Vec::new() },
        })
    }
}

/// Hides the analytic jets of the wrapped metric so every derivative is
/// finite-difference synthesized.
#[derive(Debug, Clone)]
pub struct FdOnly<M>(pub M);

impl<M: MetricField> MetricField for FdOnly<M> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn matrix(&self, p: &[f64]) -> DMatrix<f64> {
        self.0.matrix(p)
    }

    fn domain(&self) -> BoxDomain {
        self.0.domain()
    }
}

/// Negative-control wrapper: adds `delta` to the analytic entry
/// `∂_{n-1} G[(0, n-1)]` only, leaving its transpose untouched. The
/// resulting first jet is not the derivative of any symmetric metric.
#[derive(Debug, Clone)]
pub struct PerturbedJet<M> {
    pub inner: M,
    pub delta: f64,
}

impl<M: MetricField> MetricField for PerturbedJet<M> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn matrix(&self, p: &[f64]) -> DMatrix<f64> {
        self.inner.matrix(p)
    }

    fn analytic_order(&self) -> usize {
        self.inner.analytic_order()
    }

    fn analytic_jet(&self, p: &[f64], order: usize) -> Option<MetricJet> {
        let mut jet = self.inner.analytic_jet(p, order)?;
        let n = self.dim();
        if let Some(d) = jet.d1.get_mut(n - 1) {
            d[(0, n - 1)] += self.delta;
        }
        Some(jet)
    }

    fn domain(&self) -> BoxDomain {
        self.inner.domain()
    }
}

/// `⟨x, y⟩_G`.
pub fn inner(g: &DMatrix<f64>, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    (x.transpose() * g * y)[(0, 0)]
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Diag;

    impl MetricField for Diag {
        fn dim(&self) -> usize {
            2
        }
        fn matrix(&self, p: &[f64]) -> DMatrix<f64> {
            DMatrix::from_diagonal(&DVector::from_vec(vec![1.0 + p[1] * p[1], 1.0]))
        }
    }

    struct Indefinite;

    impl MetricField for Indefinite {
        fn dim(&self) -> usize {
            2
        }
        fn matrix(&self, _p: &[f64]) -> DMatrix<f64> {
            DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -1.0]))
        }
    }

    struct Singular;

    impl MetricField for Singular {
        fn dim(&self) -> usize {
            2
        }
        fn matrix(&self, _p: &[f64]) -> DMatrix<f64> {
            DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0])
        }
    }

    #[test]
    fn point_rejects_short_or_nonfinite() {
        assert!(Point::new(vec![1.0]).is_err());
        assert!(Point::new(vec![1.0, f64::INFINITY]).is_err());
        assert_eq!(Point::new(vec![1.0, 2.0]).unwrap().dim(), 2);
    }

    #[test]
    fn fd_synthesized_jet_of_value_only_metric() {
        let j = metric_jet(&Diag, &[0.3, 0.5], 3).unwrap();
        assert_eq!(j.order, 3);
        // g_00 = 1 + t^2
        assert!((j.d1[1][(0, 0)] - 1.0).abs() < 1e-9);
        assert!(j.d1[0][(0, 0)].abs() < 1e-9);
        assert!((j.d2(1, 1)[(0, 0)] - 2.0).abs() < 1e-7);
        assert!(j.d3(1, 1, 1)[(0, 0)].abs() < 1e-5);
    }

    #[test]
    fn rejects_indefinite_and_singular() {
        assert!(matches!(
            metric_jet(&Indefinite, &[0.0, 0.0], 0),
            Err(GeomError::NotPositiveDefinite { .. })
        ));
        assert!(matches!(
            metric_jet(&Singular, &[0.0, 0.0], 0),
            Err(GeomError::DegenerateMetric { .. })
        ));
    }

    #[test]
    fn order_four_is_a_capability_error() {
        assert!(matches!(
            metric_jet(&FlatMetric::new(3), &[0.0; 3], 4),
            Err(GeomError::InsufficientJetOrder { .. })
        ));
    }

    #[test]
    fn flat_jet_is_zero() {
        let j = metric_jet(&FlatMetric::new(3), &[1.0, 2.0, 3.0], 3).unwrap();
        assert_eq!(j.g, DMatrix::identity(3, 3));
        assert!(j.d3.iter().all(|m| m.amax() == 0.0));
    }
}
