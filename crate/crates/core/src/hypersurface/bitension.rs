//! Tension and bitension of graph immersions, and the two residuals of the
//! hypersurface biharmonicity system.

use nalgebra::DVector;

use super::immersion::{GraphImmersion, HypersurfaceFrame};
use super::operators::{intrinsic_grad, laplace_beltrami};
use crate::error::Result;
use crate::fd::{fd_jet_vec, FdJet};

/// Multiplier linking the two biharmonicity routes:
/// `τ₂ = m (N η + T)`, with `N`, `T` the normal and tangential residuals
/// of the system. Fixed by a least-squares fit over random cubic graphs
/// (see the `two_route` integration tests).
pub fn route_factor(m: usize) -> f64 {
    m as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct BitensionValue {
    /// `τ = m H`.
    pub tension: DVector<f64>,
    /// `τ₂`, ambient components.
    pub bitension: DVector<f64>,
    /// `⟨τ₂, η⟩`.
    pub bitension_normal: f64,
    /// Tangential part of `τ₂`, X-basis coefficients.
    pub bitension_tangent: DVector<f64>,
    /// `N = −Δf + f|A|² − f Ric(η, η)`.
    pub normal_residual: f64,
    /// `T = 2A(grad f) + m f grad f − 2f (Ricci η)^⊤`, X-basis.
    pub tangential_residual: DVector<f64>,
}

impl BitensionValue {
    /// Relative disagreement between `τ₂` and `m (N η + T)`, with `floor`
    /// guarding the denominator.
    pub fn route_discrepancy(&self, frame: &HypersurfaceFrame, floor: f64) -> f64 {
        let k = route_factor(frame.m());
        let predicted = &frame.normal * (k * self.normal_residual)
            + frame.to_ambient(&self.tangential_residual) * k;
        let diff = &self.bitension - predicted;
        frame.ambient.norm(&diff) / frame.ambient.norm(&self.bitension).max(floor)
    }
}

/// `τ = m f η` at `x`.
pub fn tension(imm: &GraphImmersion, x: &[f64]) -> Result<DVector<f64>> {
    Ok(imm.frame_with(x, 1)?.tension())
}

/// Finite-difference jet over `Ω` of an ambient vector field defined along
/// the immersion through its frames.
pub fn field_jet<F>(imm: &GraphImmersion, x: &[f64], order: usize, field: F) -> Result<FdJet>
where
    F: Fn(&HypersurfaceFrame) -> DVector<f64>,
{
    fd_jet_vec(
        |q| Ok(field(&imm.frame_with(q, 1)?).as_slice().to_vec()),
        x,
        order,
        Some(imm.domain()),
    )
}

/// `τ₂ = −m Σ_i { R̄(H, e_i) e_i + ∇̄_{e_i} ∇̄_{e_i} H − ∇̄_{∇_{e_i} e_i} H }`.
///
/// Chart derivatives of `H` come from one finite-difference layer over `Ω`;
/// everything else is evaluated from jets at `x`.
pub fn bitension_vector(imm: &GraphImmersion, x: &[f64]) -> Result<(HypersurfaceFrame, DVector<f64>)> {
    let frame = imm.frame_at(x)?;
    let m = frame.m();
    let n = m + 1;
    let amb = &frame.ambient;
    let gamma = amb.christoffel();
    let hvec = frame.mean_curvature_vector();
    let jet = field_jet(imm, x, 2, |fr| fr.mean_curvature_vector())?;
    let d_h: Vec<DVector<f64>> = (0..m).map(|a| DVector::from_column_slice(jet.first(a))).collect();

    // ∇̄_{X_b} H
    let nabla_h: Vec<DVector<f64>> = (0..m)
        .map(|b| amb.covariant(&frame.tangents[b], &hvec, &d_h[b]))
        .collect();

    let mut rough = DVector::zeros(n);
    let e = frame.orthonormal_tangent_frame();
    let mut hess = vec![DVector::zeros(n); m * m];
    for a in 0..m {
        for b in 0..m {
            let xa = &frame.tangents[a];
            let xb = &frame.tangents[b];
            let mut dxb = DVector::zeros(n);
            dxb[m] = frame.height.hessian[(a, b)];
            // ∇̄_{X_a} ∇̄_{X_b} H
            let mut second = DVector::from_column_slice(jet.second(a, b));
            second += amb.christoffel_derivative_apply(xa, xb, &hvec)?;
            second += gamma.apply(&dxb, &hvec);
            second += gamma.apply(xb, &d_h[a]);
            second += gamma.apply(xa, &nabla_h[b]);
            // ∇_{X_a} X_b = (∇̄_{X_a} X_b)^⊤
            let conn = frame.tangent_part(&(dxb + gamma.apply(xa, xb)));
            for c in 0..m {
                second -= &nabla_h[c] * conn[c];
            }
            hess[a * m + b] = second;
        }
    }
    let mut curv = DVector::zeros(n);
    for i in 0..m {
        let ei = e.column(i).into_owned();
        for a in 0..m {
            for b in 0..m {
                let w = ei[a] * ei[b];
                if w != 0.0 {
                    rough += &hess[a * m + b] * w;
                }
            }
        }
        let ei_amb = frame.to_ambient(&ei);
        curv += amb.riemann(&hvec, &ei_amb, &ei_amb)?;
    }
    let tau2 = (curv + rough) * -(m as f64);
    Ok((frame, tau2))
}

/// Residuals `(N, T)` of the biharmonicity system at `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemResiduals {
    pub normal: f64,
    pub tangential: DVector<f64>,
}

pub fn residuals_s(imm: &GraphImmersion, x: &[f64]) -> Result<SystemResiduals> {
    let frame = imm.frame_at(x)?;
    residuals_with_frame(imm, &frame)
}

fn residuals_with_frame(imm: &GraphImmersion, frame: &HypersurfaceFrame) -> Result<SystemResiduals> {
    let x = &frame.x;
    let m = frame.m() as f64;
    let f = frame.mean_curvature;
    let mean = |q: &[f64]| -> Result<f64> { Ok(imm.frame_with(q, 1)?.mean_curvature) };
    let lap_f = laplace_beltrami(imm, &mean, x)?;
    let grad_f = intrinsic_grad(imm, &mean, x)?;
    let ric_nn = frame.ambient.ricci(&frame.normal, &frame.normal)?;
    let ricci_eta = frame.tangent_part(&frame.ambient.ricci_operator(&frame.normal)?);
    let normal = -lap_f + f * frame.shape_norm2 - f * ric_nn;
    let tangential = frame.shape_apply(&grad_f) * 2.0 + &grad_f * (m * f) - ricci_eta * (2.0 * f);
    Ok(SystemResiduals { normal, tangential })
}

/// Tension, bitension and both system residuals at `x`.
pub fn bitension(imm: &GraphImmersion, x: &[f64]) -> Result<BitensionValue> {
    let (frame, tau2) = bitension_vector(imm, x)?;
    let s = residuals_with_frame(imm, &frame)?;
    Ok(BitensionValue {
        tension: frame.tension(),
        bitension_normal: frame.normal_part(&tau2),
        bitension_tangent: frame.tangent_part(&tau2),
        bitension: tau2,
        normal_residual: s.normal,
        tangential_residual: s.tangential,
    })
}
