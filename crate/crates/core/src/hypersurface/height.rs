//! Height functions `F: Ω → ℝ` defining graph hypersurfaces `x ↦ (x, F(x))`.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::domain::BoxDomain;
use crate::error::{GeomError, Result};
use crate::fd::{fd_jet_vec, MAX_FD_ORDER};

pub const MAX_HEIGHT_JET: usize = 4;

/// Value and partial derivatives of `F` up to `order`. Third and fourth
/// derivatives are flat arrays indexed `[i][j][k]` and `[i][j][k][l]`.
#[derive(Debug, Clone, PartialEq)]
pub struct HeightJet {
    pub order: usize,
    pub value: f64,
    pub gradient: DVector<f64>,
    pub hessian: DMatrix<f64>,
    pub third: Vec<f64>,
    pub fourth: Vec<f64>,
}

impl HeightJet {
    pub fn dim(&self) -> usize {
        self.gradient.len()
    }

    pub fn third(&self, i: usize, j: usize, k: usize) -> f64 {
        let m = self.dim();
        self.third[(i * m + j) * m + k]
    }

    pub fn fourth(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        let m = self.dim();
        self.fourth[((i * m + j) * m + k) * m + l]
    }

    /// All derivatives of the given order, flattened.
    fn slab(&self, order: usize) -> Vec<f64> {
        match order {
            0 => vec![self.value],
            1 => self.gradient.as_slice().to_vec(),
            2 => self.hessian.as_slice().to_vec(),
            3 => self.third.clone(),
            _ => self.fourth.clone(),
        }
    }
}

pub trait HeightFunction: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;

    fn value(&self, x: &[f64]) -> f64;

    fn analytic_order(&self) -> usize {
        0
    }

    /// Analytic jet truncated at `order.min(self.analytic_order())`.
    fn analytic_jet(&self, _x: &[f64], _order: usize) -> Option<HeightJet> {
        None
    }
}

/// Jet of `F` at `x`, analytic where available and finite-difference
/// synthesized above that (at most three orders of FD).
pub fn height_jet(
    height: &dyn HeightFunction,
    x: &[f64],
    order: usize,
    domain: Option<&BoxDomain>,
) -> Result<HeightJet> {
    let m = height.dim();
    if x.len() != m {
        return Err(GeomError::DimensionMismatch {
            expected: m,
            found: x.len(),
        });
    }
    let base = height.analytic_order().min(order);
    let reachable = (height.analytic_order() + MAX_FD_ORDER).min(MAX_HEIGHT_JET);
    if order > reachable {
        return Err(GeomError::InsufficientJetOrder {
            required: order,
            available: reachable,
        });
    }
    let analytic = |q: &[f64]| -> Result<HeightJet> {
        if base == 0 {
            Ok(HeightJet {
                order: 0,
                value: height.value(q),
                gradient: DVector::zeros(m),
                hessian: DMatrix::zeros(m, m),
                third: Vec::new(),
                fourth: Vec::new(),
            })
        } else {
            height
                .analytic_jet(q, base)
                .ok_or(GeomError::InsufficientJetOrder {
                    required: base,
                    available: 0,
                })
        }
    };
    let mut jet = analytic(x)?;
    if !jet.value.is_finite() {
        return Err(GeomError::InvalidPoint(format!("height is not finite at {x:?}")));
    }
    let extra = order - base;
    if extra > 0 {
        let fd = fd_jet_vec(|q| analytic(q).map(|j| j.slab(base)), x, extra, domain)?;
        let blocks = m.pow(base as u32);
        for r in 1..=extra {
            let target = base + r;
            let fd_count = m.pow(r as u32);
            let mut out = vec![0.0; blocks * fd_count];
            for (idx, slot) in out.iter_mut().enumerate() {
                let (prefix, suffix) = (idx / fd_count, idx % fd_count);
                let raw = match r {
                    1 => fd.first(suffix),
                    2 => fd.second(suffix / m, suffix % m),
                    _ => fd.third(suffix / (m * m), (suffix / m) % m, suffix % m),
                };
                *slot = raw[prefix];
            }
            match target {
                1 => jet.gradient = DVector::from_vec(out),
                2 => {
                    let h = DMatrix::from_row_slice(m, m, &out);
                    jet.hessian = (&h + h.transpose()) * 0.5;
                }
                3 => jet.third = out,
                _ => jet.fourth = out,
            }
        }
        jet.order = order;
    }
    Ok(jet)
}

fn empty_jet(m: usize, order: usize, value: f64) -> HeightJet {
    HeightJet {
        order,
        value,
        gradient: DVector::zeros(m),
        hessian: DMatrix::zeros(m, m),
        third: if order >= 3 { vec![0.0; m.pow(3)] } else { Vec::new() },
        fourth: if order >= 4 { vec![0.0; m.pow(4)] } else { Vec::new() },
    }
}

/// `F ≡ c`.
#[derive(Debug, Clone, PartialEq)]
pub struct Hyperplane {
    pub m: usize,
    pub c: f64,
}

impl HeightFunction for Hyperplane {
    fn dim(&self) -> usize {
        self.m
    }

    fn value(&self, _x: &[f64]) -> f64 {
        self.c
    }

    fn analytic_order(&self) -> usize {
        MAX_HEIGHT_JET
    }

    fn analytic_jet(&self, _x: &[f64], order: usize) -> Option<HeightJet> {
        Some(empty_jet(self.m, order.min(MAX_HEIGHT_JET), self.c))
    }
}

/// `F(x) = c + l·x + xᵀ Q x + Σ T_ijk x_i x_j x_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    m: usize,
    constant: f64,
    linear: DVector<f64>,
    // symmetrized
    quad: DMatrix<f64>,
    cubic: Vec<f64>,
}

impl Polynomial {
    pub fn quadratic(q: DMatrix<f64>, linear: DVector<f64>, constant: f64) -> Result<Self> {
        let m = linear.len();
        Self::cubic(q, linear, constant, vec![0.0; m * m * m])
    }

    /// `cubic` is a flat `m³` array; only its symmetric part matters.
    pub fn cubic(q: DMatrix<f64>, linear: DVector<f64>, constant: f64, cubic: Vec<f64>) -> Result<Self> {
        let m = linear.len();
        if q.nrows() != m || q.ncols() != m {
            return Err(GeomError::DimensionMismatch {
                expected: m,
                found: q.nrows(),
            });
        }
        if cubic.len() != m * m * m {
            return Err(GeomError::DimensionMismatch {
                expected: m * m * m,
                found: cubic.len(),
            });
        }
        let quad = (&q + q.transpose()) * 0.5;
        let mut sym = vec![0.0; m * m * m];
        let at = |i: usize, j: usize, k: usize| cubic[(i * m + j) * m + k];
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    sym[(i * m + j) * m + k] =
                        (at(i, j, k) + at(i, k, j) + at(j, i, k) + at(j, k, i) + at(k, i, j) + at(k, j, i)) / 6.0;
                }
            }
        }
        Ok(Self {
            m,
            constant,
            linear,
            quad,
            cubic: sym,
        })
    }

    fn t(&self, i: usize, j: usize, k: usize) -> f64 {
        self.cubic[(i * self.m + j) * self.m + k]
    }
}

impl HeightFunction for Polynomial {
    fn dim(&self) -> usize {
        self.m
    }

    fn value(&self, x: &[f64]) -> f64 {
        let xv = DVector::from_column_slice(x);
        let mut v = self.constant + self.linear.dot(&xv) + (xv.transpose() * &self.quad * &xv)[(0, 0)];
        let m = self.m;
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    v += self.t(i, j, k) * x[i] * x[j] * x[k];
                }
            }
        }
        v
    }

    fn analytic_order(&self) -> usize {
        MAX_HEIGHT_JET
    }

    fn analytic_jet(&self, x: &[f64], order: usize) -> Option<HeightJet> {
        let m = self.m;
        let order = order.min(MAX_HEIGHT_JET);
        let xv = DVector::from_column_slice(x);
        let mut jet = empty_jet(m, order, self.value(x));
        if order >= 1 {
            let mut g = &self.linear + &self.quad * &xv * 2.0;
            for i in 0..m {
                for j in 0..m {
                    for k in 0..m {
                        g[i] += 3.0 * self.t(i, j, k) * x[j] * x[k];
                    }
                }
            }
            jet.gradient = g;
        }
        if order >= 2 {
            let mut h = &self.quad * 2.0;
            for i in 0..m {
                for j in 0..m {
                    for k in 0..m {
                        h[(i, j)] += 6.0 * self.t(i, j, k) * x[k];
                    }
                }
            }
            jet.hessian = h;
        }
        if order >= 3 {
            jet.third = self.cubic.iter().map(|t| 6.0 * t).collect();
        }
        Some(jet)
    }
}

/// One plane wave `A sin(k·x + phase)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Wave {
    pub amplitude: f64,
    pub wavevector: Vec<f64>,
    pub phase: f64,
}

/// `F(x) = offset + Σ A sin(k·x + phase)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SineBump {
    m: usize,
    offset: f64,
    waves: Vec<Wave>,
}

impl SineBump {
    pub fn new(m: usize, offset: f64, waves: Vec<Wave>) -> Result<Self> {
        if let Some(w) = waves.iter().find(|w| w.wavevector.len() != m) {
            return Err(GeomError::DimensionMismatch {
                expected: m,
                found: w.wavevector.len(),
            });
        }
        Ok(Self { m, offset, waves })
    }
}

impl HeightFunction for SineBump {
    fn dim(&self) -> usize {
        self.m
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.offset
            + self
                .waves
                .iter()
                .map(|w| w.amplitude * (dot(&w.wavevector, x) + w.phase).sin())
                .sum::<f64>()
    }

    fn analytic_order(&self) -> usize {
        MAX_HEIGHT_JET
    }

    fn analytic_jet(&self, x: &[f64], order: usize) -> Option<HeightJet> {
        let m = self.m;
        let order = order.min(MAX_HEIGHT_JET);
        let mut jet = empty_jet(m, order, self.value(x));
        for w in &self.waves {
            let arg = dot(&w.wavevector, x) + w.phase;
            // r-th derivative of sin is sin(arg + r π/2)
            let d = |r: usize| w.amplitude * (arg + r as f64 * std::f64::consts::FRAC_PI_2).sin();
            let k = &w.wavevector;
            if order >= 1 {
                for i in 0..m {
                    jet.gradient[i] += d(1) * k[i];
                }
            }
            if order >= 2 {
                for i in 0..m {
                    for j in 0..m {
                        jet.hessian[(i, j)] += d(2) * k[i] * k[j];
                    }
                }
            }
            if order >= 3 {
                for i in 0..m {
                    for j in 0..m {
                        for l in 0..m {
                            jet.third[(i * m + j) * m + l] += d(3) * k[i] * k[j] * k[l];
                        }
                    }
                }
            }
            if order >= 4 {
                for i in 0..m {
                    for j in 0..m {
                        for l in 0..m {
                            for q in 0..m {
                                jet.fourth[((i * m + j) * m + l) * m + q] += d(4) * k[i] * k[j] * k[l] * k[q];
                            }
                        }
                    }
                }
            }
        }
        Some(jet)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// User-supplied height with values only; every derivative is synthesized.
#[derive(Clone)]
pub struct FnHeight {
    m: usize,
    f: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
}

impl FnHeight {
    pub fn new(m: usize, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self { m, f: Arc::new(f) }
    }
}

impl fmt::Debug for FnHeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnHeight").field("m", &self.m).finish()
    }
}

impl HeightFunction for FnHeight {
    fn dim(&self) -> usize {
        self.m
    }

    fn value(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
}
