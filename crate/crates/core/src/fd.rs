//! Central finite differences with one level of Richardson extrapolation.
//!
//! Step policy, with `s = max(1, |x_i|)`:
//!
//! | order | base step      | error after extrapolation |
//! |-------|----------------|---------------------------|
//! | 1     | `eps^(1/3) s`  | `O(h^4) + O(eps/h)`       |
//! | 2     | `eps^(1/6) s`  | `O(h^4) + O(eps/h^2)`     |
//! | 3     | `eps^(1/7) s`  | nested: order-1 stencil over order-2 stencils |
//!
//! Each estimate `D(h)` has an even error expansion in `h`, so
//! `(4 D(h/2) - D(h)) / 3` removes the leading term. Results are
//! deterministic for a fixed point and field.

use nalgebra::{DMatrix, DVector};

use crate::domain::BoxDomain;
use crate::error::{GeomError, Result};

pub const MAX_FD_ORDER: usize = 3;

fn base_step(order: usize) -> f64 {
    let eps = f64::EPSILON;
    match order {
        1 => eps.powf(1.0 / 3.0),
        2 => eps.powf(1.0 / 6.0),
        _ => eps.powf(1.0 / 7.0),
    }
}

/// Step used for derivatives of the given order at coordinate value `xi`.
pub fn step_for(order: usize, xi: f64) -> f64 {
    base_step(order) * xi.abs().max(1.0)
}

/// Derivatives of a vector-valued field, stored flat with the component
/// index innermost.
#[derive(Debug, Clone, PartialEq)]
pub struct FdJet {
    dim: usize,
    comps: usize,
    order: usize,
    value: Vec<f64>,
    first: Vec<f64>,
    second: Vec<f64>,
    third: Vec<f64>,
}

impl FdJet {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn comps(&self) -> usize {
        self.comps
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn value(&self) -> &[f64] {
        &self.value
    }

    /// `∂_i` of every component.
    pub fn first(&self, i: usize) -> &[f64] {
        assert!(self.order >= 1);
        &self.first[i * self.comps..(i + 1) * self.comps]
    }

    /// `∂_i ∂_j` of every component.
    pub fn second(&self, i: usize, j: usize) -> &[f64] {
        assert!(self.order >= 2);
        let o = (i * self.dim + j) * self.comps;
        &self.second[o..o + self.comps]
    }

    /// `∂_i ∂_j ∂_k` of every component.
    pub fn third(&self, i: usize, j: usize, k: usize) -> &[f64] {
        assert!(self.order >= 3);
        let o = ((i * self.dim + j) * self.dim + k) * self.comps;
        &self.third[o..o + self.comps]
    }
}

/// Scalar field derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarJet {
    pub value: f64,
    pub gradient: DVector<f64>,
    pub hessian: DMatrix<f64>,
    /// Flat `n^3` array, `[i][j][k]`; empty below order 3.
    pub third: Vec<f64>,
}

impl ScalarJet {
    pub fn third(&self, i: usize, j: usize, k: usize) -> f64 {
        let n = self.gradient.len();
        self.third[(i * n + j) * n + k]
    }
}

struct Stencil<'a, F> {
    f: F,
    domain: Option<&'a BoxDomain>,
    comps: usize,
}

impl<F> Stencil<'_, F>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        if let Some(d) = self.domain {
            d.check(x)?;
        }
        let y = (self.f)(x)?;
        if y.len() != self.comps {
            return Err(GeomError::DimensionMismatch {
                expected: self.comps,
                found: y.len(),
            });
        }
        Ok(y)
    }

    /// Central first difference along `i`, extrapolated.
    fn first(&self, x: &[f64], i: usize, h: f64) -> Result<Vec<f64>> {
        let d_h = self.central(x, i, h)?;
        let d_h2 = self.central(x, i, 0.5 * h)?;
        Ok(extrapolate(&d_h, &d_h2))
    }

    fn central(&self, x: &[f64], i: usize, h: f64) -> Result<Vec<f64>> {
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[i] += h;
        xm[i] -= h;
        let width = xp[i] - xm[i];
        let fp = self.eval(&xp)?;
        let fm = self.eval(&xm)?;
        Ok(fp.iter().zip(&fm).map(|(a, b)| (a - b) / width).collect())
    }

    fn second_diag(&self, x: &[f64], f0: &[f64], i: usize, h: f64) -> Result<Vec<f64>> {
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[i] += h;
        xm[i] -= h;
        let hp = xp[i] - x[i];
        let hm = x[i] - xm[i];
        let fp = self.eval(&xp)?;
        let fm = self.eval(&xm)?;
        // non-uniform three-point formula; reduces to the usual one when hp == hm
        Ok((0..self.comps)
            .map(|c| {
                2.0 * (hm * fp[c] - (hp + hm) * f0[c] + hp * fm[c]) / (hp * hm * (hp + hm))
            })
            .collect())
    }

    fn second_mixed(&self, x: &[f64], i: usize, j: usize, h_i: f64, h_j: f64) -> Result<Vec<f64>> {
        let corner = |si: f64, sj: f64| -> Result<(Vec<f64>, f64, f64)> {
            let mut p = x.to_vec();
            p[i] += si * h_i;
            p[j] += sj * h_j;
            let (di, dj) = (p[i] - x[i], p[j] - x[j]);
            Ok((self.eval(&p)?, di, dj))
        };
        let (fpp, a, b) = corner(1.0, 1.0)?;
        let (fpm, _, _) = corner(1.0, -1.0)?;
        let (fmp, _, _) = corner(-1.0, 1.0)?;
        let (fmm, _, _) = corner(-1.0, -1.0)?;
        let denom = 4.0 * a * b;
        Ok((0..self.comps)
            .map(|c| (fpp[c] - fpm[c] - fmp[c] + fmm[c]) / denom)
            .collect())
    }

    /// Full Hessian of every component, `[i][j][c]`, extrapolated.
    fn hessian(&self, x: &[f64], f0: &[f64], scale: f64) -> Result<Vec<f64>> {
        let n = x.len();
        let c = self.comps;
        let mut out = vec![0.0; n * n * c];
        for i in 0..n {
            let h = scale * step_for(2, x[i]);
            let d_h = self.second_diag(x, f0, i, h)?;
            let d_h2 = self.second_diag(x, f0, i, 0.5 * h)?;
            let r = extrapolate(&d_h, &d_h2);
            out[(i * n + i) * c..(i * n + i + 1) * c].copy_from_slice(&r);
            for j in (i + 1)..n {
                let hi = scale * step_for(2, x[i]);
                let hj = scale * step_for(2, x[j]);
                let d_h = self.second_mixed(x, i, j, hi, hj)?;
                let d_h2 = self.second_mixed(x, i, j, 0.5 * hi, 0.5 * hj)?;
                let r = extrapolate(&d_h, &d_h2);
                out[(i * n + j) * c..(i * n + j + 1) * c].copy_from_slice(&r);
                out[(j * n + i) * c..(j * n + i + 1) * c].copy_from_slice(&r);
            }
        }
        Ok(out)
    }
}

fn extrapolate(coarse: &[f64], fine: &[f64]) -> Vec<f64> {
    coarse
        .iter()
        .zip(fine)
        .map(|(c, f)| (4.0 * f - c) / 3.0)
        .collect()
}

/// Finite-difference jet of a vector-valued field up to `order` (1..=3).
///
/// Every stencil point is checked against `domain` when one is given;
/// leaving it is a [`GeomError::DomainBoundary`].
pub fn fd_jet_vec<F>(f: F, x: &[f64], order: usize, domain: Option<&BoxDomain>) -> Result<FdJet>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    if order > MAX_FD_ORDER {
        return Err(GeomError::InsufficientJetOrder {
            required: order,
            available: MAX_FD_ORDER,
        });
    }
    if let Some(d) = domain {
        if d.dim() != x.len() {
            return Err(GeomError::DimensionMismatch {
                expected: d.dim(),
                found: x.len(),
            });
        }
    }
    let n = x.len();
    if let Some(d) = domain {
        d.check(x)?;
    }
    let value = f(x)?;
    let st = Stencil {
        f,
        domain,
        comps: value.len(),
    };
    let c = st.comps;

    let mut first = Vec::new();
    if order >= 1 {
        first.reserve(n * c);
        for i in 0..n {
            first.extend(st.first(x, i, step_for(1, x[i]))?);
        }
    }

    let second = if order >= 2 {
        st.hessian(x, &value, 1.0)?
    } else {
        Vec::new()
    };

    let mut third = Vec::new();
    if order >= 3 {
        // d_k of the Hessian, central in k with its own extrapolation
        let mut dk = Vec::with_capacity(n);
        for k in 0..n {
            let h = step_for(3, x[k]);
            let est = |h: f64| -> Result<Vec<f64>> {
                let mut xp = x.to_vec();
                let mut xm = x.to_vec();
                xp[k] += h;
                xm[k] -= h;
                let width = xp[k] - xm[k];
                let hp = st.hessian(&xp, &st.eval(&xp)?, 1.0)?;
                let hm = st.hessian(&xm, &st.eval(&xm)?, 1.0)?;
                Ok(hp.iter().zip(&hm).map(|(a, b)| (a - b) / width).collect())
            };
            dk.push(extrapolate(&est(h)?, &est(0.5 * h)?));
        }
        third = vec![0.0; n * n * n * c];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for comp in 0..c {
                        let v = dk[k][(i * n + j) * c + comp];
                        third[((i * n + j) * n + k) * c + comp] = v;
                    }
                }
            }
        }
        // symmetrize over the three derivative slots
        let sym = third.clone();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for comp in 0..c {
                        let at = |a: usize, b: usize, d: usize| sym[((a * n + b) * n + d) * c + comp];
                        let s = (at(i, j, k) + at(j, k, i) + at(k, i, j)) / 3.0;
                        third[((i * n + j) * n + k) * c + comp] = s;
                    }
                }
            }
        }
    }

    Ok(FdJet {
        dim: n,
        comps: c,
        order,
        value,
        first,
        second,
        third,
    })
}

/// Finite-difference jet of a scalar field up to `order` (1..=3).
pub fn fd_jet<F>(f: F, x: &[f64], order: usize, domain: Option<&BoxDomain>) -> Result<ScalarJet>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let jet = fd_jet_vec(|p| f(p).map(|v| vec![v]), x, order, domain)?;
    let n = x.len();
    let gradient = if order >= 1 {
        DVector::from_fn(n, |i, _| jet.first(i)[0])
    } else {
        DVector::zeros(n)
    };
    let hessian = if order >= 2 {
        DMatrix::from_fn(n, n, |i, j| jet.second(i, j)[0])
    } else {
        DMatrix::zeros(n, n)
    };
    Ok(ScalarJet {
        value: jet.value()[0],
        gradient,
        hessian,
        third: if order >= 3 { jet.third.clone() } else { Vec::new() },
    })
}
