//! Levi-Civita connection, Riemann and Ricci curvature from metric jets.
//!
//! Conventions: `R(X,Y)Z = ∇_X ∇_Y Z − ∇_Y ∇_X Z − ∇_[X,Y] Z` and
//! `Ric(X,Y) = Σ_a ⟨R(E_a, X) Y, E_a⟩` over an orthonormal frame `{E_a}`.

use nalgebra::{DMatrix, DVector};

use super::frame::coordinate_frame;
use super::metric::{inner, metric_jet, MetricField, MetricJet, Point};
use crate::error::{GeomError, Result};

/// Christoffel symbols `Γ^k_{ij}` at a point, stored `[k][i][j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Christoffel {
    n: usize,
    data: Vec<f64>,
}

impl Christoffel {
    fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.data[(k * self.n + i) * self.n + j]
    }

    #[inline]
    fn set(&mut self, k: usize, i: usize, j: usize, v: f64) {
        self.data[(k * self.n + i) * self.n + j] = v;
    }

    /// `Γ(x, y)^k = Γ^k_{ij} x^i y^j`.
    pub fn apply(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let n = self.n;
        DVector::from_fn(n, |k, _| {
            let mut s = 0.0;
            for i in 0..n {
                if x[i] == 0.0 {
                    continue;
                }
                for j in 0..n {
                    s += self.get(k, i, j) * x[i] * y[j];
                }
            }
            s
        })
    }

    /// `max |Γ^k_{ij} − Γ^k_{ji}|`.
    pub fn torsion(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    worst = worst.max((self.get(k, i, j) - self.get(k, j, i)).abs());
                }
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |a, v| a.max(v.abs()))
    }
}

fn koszul(jet: &MetricJet, g_inv: &DMatrix<f64>) -> Christoffel {
    let n = jet.dim();
    let mut gamma = Christoffel::zeros(n);
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for l in 0..n {
                    s += g_inv[(k, l)]
                        * (jet.d1[i][(j, l)] + jet.d1[j][(i, l)] - jet.d1[l][(i, j)]);
                }
                gamma.set(k, i, j, 0.5 * s);
            }
        }
    }
    gamma
}

/// `∂_m Γ^k_{ij}`, one [`Christoffel`] per derivative direction `m`.
fn koszul_gradient(jet: &MetricJet, g_inv: &DMatrix<f64>) -> Vec<Christoffel> {
    let n = jet.dim();
    (0..n)
        .map(|m| {
            let dginv = -(g_inv * &jet.d1[m] * g_inv);
            let mut out = Christoffel::zeros(n);
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let mut s = 0.0;
                        for l in 0..n {
                            let first = jet.d1[i][(j, l)] + jet.d1[j][(i, l)] - jet.d1[l][(i, j)];
                            let second = jet.d2(m, i)[(j, l)] + jet.d2(m, j)[(i, l)]
                                - jet.d2(m, l)[(i, j)];
                            s += dginv[(k, l)] * first + g_inv[(k, l)] * second;
                        }
                        out.set(k, i, j, 0.5 * s);
                    }
                }
            }
            out
        })
        .collect()
}

/// Everything the ambient geometry contributes at one point: metric jet,
/// inverse metric, Christoffel symbols and, at order ≥ 2, the Riemann
/// tensor `R^l_{kij}` with `R(∂_i, ∂_j) ∂_k = R^l_{kij} ∂_l`.
#[derive(Debug, Clone)]
pub struct AmbientGeometry {
    point: Vec<f64>,
    jet: MetricJet,
    g_inv: DMatrix<f64>,
    gamma: Christoffel,
    dgamma: Vec<Christoffel>,
    riemann: Vec<f64>,
}

impl AmbientGeometry {
    /// `order` is the metric jet order: 1 gives the connection, 2 adds
    /// curvature.
    pub fn at(metric: &dyn MetricField, p: &[f64], order: usize) -> Result<Self> {
        let order = order.max(1);
        let jet = metric_jet(metric, p, order)?;
        let g_inv = jet
            .g
            .clone()
            .try_inverse()
            .ok_or_else(|| GeomError::DegenerateMetric {
                point: p.to_vec(),
                detail: "matrix not invertible".into(),
            })?;
        let gamma = koszul(&jet, &g_inv);
        let (dgamma, riemann) = if order >= 2 {
            let dgamma = koszul_gradient(&jet, &g_inv);
            let riemann = riemann_components(&gamma, &dgamma);
            (dgamma, riemann)
        } else {
            (Vec::new(), Vec::new())
        };
        Ok(Self {
            point: p.to_vec(),
            jet,
            g_inv,
            gamma,
            dgamma,
            riemann,
        })
    }

    pub fn dim(&self) -> usize {
        self.jet.dim()
    }

    pub fn point(&self) -> &[f64] {
        &self.point
    }

    pub fn jet(&self) -> &MetricJet {
        &self.jet
    }

    pub fn metric(&self) -> &DMatrix<f64> {
        &self.jet.g
    }

    pub fn metric_inv(&self) -> &DMatrix<f64> {
        &self.g_inv
    }

    pub fn christoffel(&self) -> &Christoffel {
        &self.gamma
    }

    /// `∂_m Γ`, available at order ≥ 2.
    pub fn christoffel_gradient(&self) -> Result<&[Christoffel]> {
        self.require_curvature()?;
        Ok(&self.dgamma)
    }

    /// `(∂_X Γ)^k_{ij} = X^m ∂_m Γ^k_{ij}`, applied to `(a, b)`.
    pub fn christoffel_derivative_apply(
        &self,
        x: &DVector<f64>,
        a: &DVector<f64>,
        b: &DVector<f64>,
    ) -> Result<DVector<f64>> {
        self.require_curvature()?;
        let mut out = DVector::zeros(self.dim());
        for (m, dg) in self.dgamma.iter().enumerate() {
            if x[m] != 0.0 {
                out += dg.apply(a, b) * x[m];
            }
        }
        Ok(out)
    }

    pub fn inner(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        inner(&self.jet.g, x, y)
    }

    pub fn norm(&self, x: &DVector<f64>) -> f64 {
        self.inner(x, x).max(0.0).sqrt()
    }

    /// Index-lowered vector `X♭ = G X`.
    pub fn flat(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.jet.g * x
    }

    /// Index-raised covector `ω♯ = G⁻¹ ω`.
    pub fn sharp(&self, w: &DVector<f64>) -> DVector<f64> {
        &self.g_inv * w
    }

    /// `max |∂_k g_ij − Γ^l_{ki} g_lj − Γ^l_{kj} g_il|`.
    pub fn compatibility_defect(&self) -> f64 {
        let n = self.dim();
        let g = &self.jet.g;
        let mut worst = 0.0f64;
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut s = self.jet.d1[k][(i, j)];
                    for l in 0..n {
                        s -= self.gamma.get(l, k, i) * g[(l, j)] + self.gamma.get(l, k, j) * g[(i, l)];
                    }
                    worst = worst.max(s.abs());
                }
            }
        }
        worst
    }

    /// Covariant derivative `∇_X Y` given the chart directional derivative
    /// `dy = X(Y^k)`.
    pub fn covariant(&self, x: &DVector<f64>, y: &DVector<f64>, dy: &DVector<f64>) -> DVector<f64> {
        dy + self.gamma.apply(x, y)
    }

    fn require_curvature(&self) -> Result<()> {
        if self.riemann.is_empty() {
            Err(GeomError::InsufficientJetOrder {
                required: 2,
                available: self.jet.order,
            })
        } else {
            Ok(())
        }
    }

    #[inline]
    fn r(&self, l: usize, k: usize, i: usize, j: usize) -> f64 {
        let n = self.dim();
        self.riemann[((l * n + k) * n + i) * n + j]
    }

    /// `R(X, Y) Z`.
    pub fn riemann(&self, x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>) -> Result<DVector<f64>> {
        self.require_curvature()?;
        let n = self.dim();
        let mut out = DVector::zeros(n);
        for l in 0..n {
            let mut s = 0.0;
            for k in 0..n {
                if z[k] == 0.0 {
                    continue;
                }
                for i in 0..n {
                    if x[i] == 0.0 {
                        continue;
                    }
                    for j in 0..n {
                        s += self.r(l, k, i, j) * z[k] * x[i] * y[j];
                    }
                }
            }
            out[l] = s;
        }
        Ok(out)
    }

    /// `⟨R(X, Y) Z, W⟩`.
    pub fn riemann_lowered(
        &self,
        x: &DVector<f64>,
        y: &DVector<f64>,
        z: &DVector<f64>,
        w: &DVector<f64>,
    ) -> Result<f64> {
        Ok(self.inner(&self.riemann(x, y, z)?, w))
    }

    /// Ricci matrix in chart components, `Ric_{jk} = R^i_{k i j}`.
    pub fn ricci_matrix(&self) -> Result<DMatrix<f64>> {
        self.require_curvature()?;
        let n = self.dim();
        Ok(DMatrix::from_fn(n, n, |j, k| (0..n).map(|i| self.r(i, k, i, j)).sum()))
    }

    pub fn ricci(&self, x: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
        let ric = self.ricci_matrix()?;
        Ok((x.transpose() * ric * y)[(0, 0)])
    }

    /// `Σ_a ⟨R(E_a, X) Y, E_a⟩` over the supplied frame.
    pub fn ricci_in_frame(&self, frame: &[DVector<f64>], x: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
        let mut s = 0.0;
        for e in frame {
            s += self.riemann_lowered(e, x, y, e)?;
        }
        Ok(s)
    }

    /// The `(1,1)` Ricci operator: `⟨Ricci(X), Y⟩ = Ric(X, Y)`.
    pub fn ricci_operator(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        let ric = self.ricci_matrix()?;
        Ok(&self.g_inv * (ric.transpose() * x))
    }

    /// Gram–Schmidt of the coordinate basis in index order.
    pub fn orthonormal_frame(&self) -> Vec<DVector<f64>> {
        coordinate_frame(&self.jet.g)
    }

    /// Largest absolute Riemann component in chart coordinates.
    pub fn riemann_max_abs(&self) -> Result<f64> {
        self.require_curvature()?;
        Ok(self.riemann.iter().fold(0.0, |a, v| a.max(v.abs())))
    }
}

fn riemann_components(gamma: &Christoffel, dgamma: &[Christoffel]) -> Vec<f64> {
    let n = gamma.dim();
    let mut out = vec![0.0; n * n * n * n];
    for l in 0..n {
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut s = dgamma[i].get(l, j, k) - dgamma[j].get(l, i, k);
                    for p in 0..n {
                        s += gamma.get(l, i, p) * gamma.get(p, j, k) - gamma.get(l, j, p) * gamma.get(p, i, k);
                    }
                    out[((l * n + k) * n + i) * n + j] = s;
                }
            }
        }
    }
    out
}

/// Christoffel symbols of `metric` at `p`.
pub fn christoffel(metric: &dyn MetricField, p: &Point) -> Result<Christoffel> {
    Ok(AmbientGeometry::at(metric, p.as_slice(), 1)?.gamma)
}

/// `R(X, Y) Z` of `metric` at `p`.
pub fn riemann(
    metric: &dyn MetricField,
    p: &Point,
    x: &DVector<f64>,
    y: &DVector<f64>,
    z: &DVector<f64>,
) -> Result<DVector<f64>> {
    AmbientGeometry::at(metric, p.as_slice(), 2)?.riemann(x, y, z)
}

/// `Ric(X, Y)` of `metric` at `p`.
pub fn ricci(metric: &dyn MetricField, p: &Point, x: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
    AmbientGeometry::at(metric, p.as_slice(), 2)?.ricci(x, y)
}
