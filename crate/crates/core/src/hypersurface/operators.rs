//! Intrinsic calculus on `(M, g)` in the chart `Ω`: gradient, divergence
//! and the Laplace–Beltrami operator (trace of the Hessian, so `Δ x² = 2`
//! in the Euclidean line).

use nalgebra::DVector;

use super::immersion::GraphImmersion;
use crate::error::Result;
use crate::fd::{fd_jet, fd_jet_vec};

/// Scalar field on `Ω`.
pub type ScalarField<'a> = dyn Fn(&[f64]) -> Result<f64> + 'a;

/// Tangent vector field on `Ω`, as X-basis coefficients.
pub type TangentField<'a> = dyn Fn(&[f64]) -> Result<DVector<f64>> + 'a;

/// `Δh = (1/√g) ∂_a(√g g^{ab} ∂_b h)`, expanded by the product rule into
/// `g^{ab} ∂_a∂_b h + (1/√g) ∂_a(√g g^{ab}) ∂_b h`.
pub fn laplace_beltrami(imm: &GraphImmersion, h: &ScalarField<'_>, x: &[f64]) -> Result<f64> {
    let m = imm.m();
    let jet = fd_jet(h, x, 2, Some(imm.domain()))?;
    let g = imm.induced_metric(x)?;
    let g_inv = g.clone().try_inverse().expect("checked by induced_metric");
    let sqrt_det = g.determinant().sqrt();
    let flux = |q: &[f64]| -> Result<Vec<f64>> {
        let gq = imm.induced_metric(q)?;
        let s = gq.determinant().sqrt();
        let inv = gq.try_inverse().expect("checked by induced_metric");
        Ok((inv * s).as_slice().to_vec())
    };
    let dflux = fd_jet_vec(flux, x, 1, Some(imm.domain()))?;
    let mut lap = 0.0;
    for a in 0..m {
        for b in 0..m {
            lap += g_inv[(a, b)] * jet.hessian[(a, b)];
            // column-major: entry (a, b) of the flux matrix sits at b * m + a
            lap += dflux.first(a)[b * m + a] * jet.gradient[b] / sqrt_det;
        }
    }
    Ok(lap)
}

/// `(grad h)^a = g^{ab} ∂_b h`, X-basis coefficients.
pub fn intrinsic_grad(imm: &GraphImmersion, h: &ScalarField<'_>, x: &[f64]) -> Result<DVector<f64>> {
    let jet = fd_jet(h, x, 1, Some(imm.domain()))?;
    let g = imm.induced_metric(x)?;
    let g_inv = g.try_inverse().expect("checked by induced_metric");
    Ok(g_inv * jet.gradient)
}

/// `div W = (1/√g) ∂_a(√g W^a)`.
pub fn divergence(imm: &GraphImmersion, w: &TangentField<'_>, x: &[f64]) -> Result<f64> {
    let m = imm.m();
    let density = |q: &[f64]| -> Result<Vec<f64>> {
        let s = imm.induced_metric(q)?.determinant().sqrt();
        Ok(w(q)?.iter().map(|c| c * s).collect())
    };
    let jet = fd_jet_vec(density, x, 1, Some(imm.domain()))?;
    let sqrt_det = imm.induced_metric(x)?.determinant().sqrt();
    Ok((0..m).map(|a| jet.first(a)[a]).sum::<f64>() / sqrt_det)
}

/// `c^a ∂_a h` for X-basis coefficients `c`.
pub fn directional_derivative(imm: &GraphImmersion, h: &ScalarField<'_>, x: &[f64], c: &DVector<f64>) -> Result<f64> {
    let jet = fd_jet(h, x, 1, Some(imm.domain()))?;
    Ok(jet.gradient.dot(c))
}
