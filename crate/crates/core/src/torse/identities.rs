//! Residual checkers for the torse-forming identities on a hypersurface.
//!
//! Each checker returns its individual terms alongside the residual so
//! callers can inspect cancellations or build negative controls.

use nalgebra::DVector;

use super::field::{torse_residual_with, TorseFormingField};
use crate::error::{GeomError, Result};
use crate::tolerance::{passes, Tier};
use crate::hypersurface::{
    bitension_vector, directional_derivative, divergence, field_jet, intrinsic_grad, laplace_beltrami,
    GraphImmersion, HypersurfaceFrame,
};

/// Pointwise split `P = φ η + V` and the tangential data of `ω`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSplit {
    pub phi: f64,
    /// `V`, ambient components.
    pub tangential_ambient: DVector<f64>,
    /// `V`, X-basis coefficients.
    pub tangential: DVector<f64>,
    /// `ω(X_a)`.
    pub omega_on_basis: DVector<f64>,
    /// `ω♯_M`, X-basis coefficients.
    pub omega_sharp: DVector<f64>,
    /// `|ω|²_M = Σ_i ω(e_i)²`.
    pub omega_norm2: f64,
    pub mu: f64,
    /// `P`, ambient components.
    pub field: DVector<f64>,
}

pub fn point_split(data: &dyn TorseFormingField, frame: &HypersurfaceFrame) -> PointSplit {
    let p = data.field(&frame.point);
    let phi = frame.normal_part(&p);
    let tangential_ambient = &p - &frame.normal * phi;
    let tangential = frame.tangent_part(&p);
    let omega = data.generating_form(&frame.point);
    let omega_on_basis = DVector::from_fn(frame.m(), |a, _| omega.dot(&frame.tangents[a]));
    let omega_sharp = &frame.induced_inv * &omega_on_basis;
    let omega_norm2 = omega_on_basis.dot(&omega_sharp);
    PointSplit {
        phi,
        tangential_ambient,
        tangential,
        omega_on_basis,
        omega_sharp,
        omega_norm2,
        mu: data.conformal_scalar(&frame.point),
        field: p,
    }
}

/// [`PointSplit`] plus the intrinsic divergence of `ω♯_M`.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceSplit {
    pub point: PointSplit,
    pub omega_div: f64,
}

pub fn split(data: &dyn TorseFormingField, imm: &GraphImmersion, x: &[f64]) -> Result<SurfaceSplit> {
    let frame = imm.frame_with(x, 1)?;
    let point = point_split(data, &frame);
    let omega_div = omega_divergence(data, imm, x)?;
    Ok(SurfaceSplit { point, omega_div })
}

fn omega_divergence(data: &dyn TorseFormingField, imm: &GraphImmersion, x: &[f64]) -> Result<f64> {
    let w = |q: &[f64]| -> Result<DVector<f64>> { Ok(point_split(data, &imm.frame_with(q, 1)?).omega_sharp) };
    divergence(imm, &w, x)
}

fn phi_field<'a>(data: &'a dyn TorseFormingField, imm: &'a GraphImmersion) -> impl Fn(&[f64]) -> Result<f64> + 'a {
    move |q| {
        let fr = imm.frame_with(q, 1)?;
        Ok(fr.normal_part(&data.field(&fr.point)))
    }
}

fn mean_field(imm: &GraphImmersion) -> impl Fn(&[f64]) -> Result<f64> + '_ {
    move |q| Ok(imm.frame_with(q, 1)?.mean_curvature)
}

/// `∇̄_{X_a} H` for every basis direction, from one finite-difference layer.
fn nabla_mean_vector(imm: &GraphImmersion, frame: &HypersurfaceFrame) -> Result<Vec<DVector<f64>>> {
    let jet = field_jet(imm, &frame.x, 1, |fr| fr.mean_curvature_vector())?;
    let h = frame.mean_curvature_vector();
    Ok((0..frame.m())
        .map(|a| frame.ambient.covariant(&frame.tangents[a], &h, &DVector::from_column_slice(jet.first(a))))
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lemma1Terms {
    /// `∇_X V`, X-basis.
    pub nabla_v: DVector<f64>,
    pub mu_x: DVector<f64>,
    pub omega_v: DVector<f64>,
    pub phi_ax: DVector<f64>,
    /// `∇_X V − μX − ω(X)V − φA(X)`, X-basis.
    pub residual: DVector<f64>,
    /// Induced-metric norm of `residual`.
    pub magnitude: f64,
}

/// Residual of `∇_X V = μX + ω(X)V + φA(X)` for the tangent vector with
/// X-basis coefficients `xi`.
pub fn lemma1_residual(
    data: &dyn TorseFormingField,
    imm: &GraphImmersion,
    x: &[f64],
    xi: &DVector<f64>,
) -> Result<Lemma1Terms> {
    let frame = imm.frame_with(x, 1)?;
    let s = point_split(data, &frame);
    let jet = field_jet(imm, x, 1, |fr| {
        let p = data.field(&fr.point);
        let phi = fr.normal_part(&p);
        p - &fr.normal * phi
    })?;
    let mut nabla = DVector::zeros(frame.m() + 1);
    for a in 0..frame.m() {
        if xi[a] == 0.0 {
            continue;
        }
        let dv = DVector::from_column_slice(jet.first(a));
        nabla += frame.ambient.covariant(&frame.tangents[a], &s.tangential_ambient, &dv) * xi[a];
    }
    let nabla_v = frame.tangent_part(&nabla);
    let mu_x = xi * s.mu;
    let omega_v = &s.tangential * s.omega_on_basis.dot(xi);
    let phi_ax = frame.shape_apply(xi) * s.phi;
    let residual = &nabla_v - &mu_x - &omega_v - &phi_ax;
    let magnitude = frame.tangent_norm(&residual);
    Ok(Lemma1Terms {
        nabla_v,
        mu_x,
        omega_v,
        phi_ax,
        residual,
        magnitude,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lemma2Terms {
    pub grad_phi: DVector<f64>,
    pub phi_omega: DVector<f64>,
    pub a_v: DVector<f64>,
    /// `grad φ − φ ω♯_M + A(V)`, X-basis.
    pub residual: DVector<f64>,
    pub magnitude: f64,
}

/// Residual of `grad φ = φ ω♯_M − A(V)`.
pub fn lemma2_residual(data: &dyn TorseFormingField, imm: &GraphImmersion, x: &[f64]) -> Result<Lemma2Terms> {
    let frame = imm.frame_with(x, 1)?;
    let s = point_split(data, &frame);
    let grad_phi = intrinsic_grad(imm, &phi_field(data, imm), x)?;
    let phi_omega = &s.omega_sharp * s.phi;
    let a_v = frame.shape_apply(&s.tangential);
    let residual = &grad_phi - &phi_omega + &a_v;
    let magnitude = frame.tangent_norm(&residual);
    Ok(Lemma2Terms {
        grad_phi,
        phi_omega,
        a_v,
        residual,
        magnitude,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lemma3Terms {
    pub laplacian_phi: f64,
    pub phi_omega_norm2: f64,
    pub omega_a_v: f64,
    pub phi_omega_div: f64,
    pub v_of_f: f64,
    pub mu_f: f64,
    pub phi_shape_norm2: f64,
    /// `φ|ω|² − 2ω(A(V)) + φ div ω♯ − mV(f) − mμf − φ|A|²`.
    pub rhs: f64,
    /// `Δφ − rhs`.
    pub residual: f64,
    /// `Ric(η, V)`: the ambient-curvature contribution of the Codazzi
    /// equation, which vanishes when the ambient Ricci tensor has no
    /// normal–tangential component.
    pub ricci_normal_tangent: f64,
}

impl Lemma3Terms {
    /// `Δφ − rhs − Ric(η, V)`.
    pub fn residual_with_codazzi_term(&self) -> f64 {
        self.residual - self.ricci_normal_tangent
    }
}

/// Residual of
/// `Δφ = φ|ω|²_M − 2ω(A(V)) + φ div ω♯_M − mV(f) − mμf − φ|A|²`.
pub fn lemma3_residual(data: &dyn TorseFormingField, imm: &GraphImmersion, x: &[f64]) -> Result<Lemma3Terms> {
    let frame = imm.frame_at(x)?;
    let m = frame.m() as f64;
    let s = point_split(data, &frame);
    let f = frame.mean_curvature;
    let laplacian_phi = laplace_beltrami(imm, &phi_field(data, imm), x)?;
    let div = omega_divergence(data, imm, x)?;
    let v_of_f = directional_derivative(imm, &mean_field(imm), x, &s.tangential)?;
    let omega_a_v = s.omega_on_basis.dot(&frame.shape_apply(&s.tangential));
    let phi_omega_norm2 = s.phi * s.omega_norm2;
    let phi_omega_div = s.phi * div;
    let mu_f = s.mu * f;
    let phi_shape_norm2 = s.phi * frame.shape_norm2;
    let rhs = phi_omega_norm2 - 2.0 * omega_a_v + phi_omega_div - m * v_of_f - m * mu_f - phi_shape_norm2;
    let ricci_normal_tangent = frame.ambient.ricci(&frame.normal, &s.tangential_ambient)?;
    Ok(Lemma3Terms {
        laplacian_phi,
        phi_omega_norm2,
        omega_a_v,
        phi_omega_div,
        v_of_f,
        mu_f,
        phi_shape_norm2,
        rhs,
        residual: laplacian_phi - rhs,
        ricci_normal_tangent,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lemma4Terms {
    /// `Δ⟨H, P⟩`.
    pub laplacian_hp: f64,
    /// `f ⟨Ricci η, V⟩`.
    pub f_ricci_eta_v: f64,
    /// `f φ Ric(η, η)`.
    pub f_phi_ricci_nn: f64,
    /// `m μ |H|²`.
    pub m_mu_h2: f64,
    /// `⟨∇̄_{ω♯_M} H, P⟩`.
    pub nabla_omega_h_p: f64,
    /// `⟨H, P⟩ div ω♯_M`.
    pub hp_omega_div: f64,
    /// `⟨H, P⟩ |ω|²_M`.
    pub hp_omega_norm2: f64,
    pub rhs: f64,
    pub residual: f64,
    /// `|τ₂|` at the point, which gated the check.
    pub bitension_norm: f64,
}

/// Residual of the `Δ⟨H, P⟩` identity. Only defined on biharmonic
/// hypersurfaces: fails with [`GeomError::NotBiharmonic`] when
/// `|τ₂| > biharmonic_tol` at `x`.
pub fn lemma4_residual(
    data: &dyn TorseFormingField,
    imm: &GraphImmersion,
    x: &[f64],
    biharmonic_tol: f64,
) -> Result<Lemma4Terms> {
    let (frame, tau2) = bitension_vector(imm, x)?;
    let bitension_norm = frame.ambient.norm(&tau2);
    if !(bitension_norm <= biharmonic_tol) {
        return Err(GeomError::NotBiharmonic {
            norm: bitension_norm,
            tolerance: biharmonic_tol,
        });
    }
    let m = frame.m() as f64;
    let s = point_split(data, &frame);
    let f = frame.mean_curvature;
    let hp_field = |q: &[f64]| -> Result<f64> {
        let fr = imm.frame_with(q, 1)?;
        Ok(fr.ambient.inner(&fr.mean_curvature_vector(), &data.field(&fr.point)))
    };
    let laplacian_hp = laplace_beltrami(imm, &hp_field, x)?;
    let hp = f * s.phi;
    let div = omega_divergence(data, imm, x)?;
    let nabla_omega_h_p = nabla_omega_h_dot_p(imm, &frame, &s)?;
    let ricci_eta = frame.ambient.ricci_operator(&frame.normal)?;
    let f_ricci_eta_v = f * frame.ambient.inner(&ricci_eta, &s.tangential_ambient);
    let f_phi_ricci_nn = f * s.phi * frame.ambient.ricci(&frame.normal, &frame.normal)?;
    let m_mu_h2 = m * s.mu * f * f;
    let hp_omega_div = hp * div;
    let hp_omega_norm2 = hp * s.omega_norm2;
    let rhs = -f_ricci_eta_v - f_phi_ricci_nn - m_mu_h2 + 2.0 * nabla_omega_h_p + hp_omega_div + hp_omega_norm2;
    Ok(Lemma4Terms {
        laplacian_hp,
        f_ricci_eta_v,
        f_phi_ricci_nn,
        m_mu_h2,
        nabla_omega_h_p,
        hp_omega_div,
        hp_omega_norm2,
        rhs,
        residual: laplacian_hp - rhs,
        bitension_norm,
    })
}

fn nabla_omega_h_dot_p(imm: &GraphImmersion, frame: &HypersurfaceFrame, s: &PointSplit) -> Result<f64> {
    let nabla_h = nabla_mean_vector(imm, frame)?;
    let mut w = DVector::zeros(frame.m() + 1);
    for (a, d) in nabla_h.iter().enumerate() {
        w += d * s.omega_sharp[a];
    }
    Ok(frame.ambient.inner(&w, &s.field))
}

#[derive(Debug, Clone, PartialEq)]
pub struct T5T6Terms {
    /// `⟨∇̄_{ω♯_M} H, P⟩`.
    pub lhs: f64,
    /// `φ ω(grad f)`.
    pub phi_omega_grad_f: f64,
    /// `f ω(A(V))`.
    pub f_omega_a_v: f64,
    pub residual: f64,
}

/// Residual of `⟨∇̄_{ω♯_M} H, P⟩ = φ ω(grad f) − f ω(A(V))`, valid on any
/// hypersurface.
pub fn t5t6_check(data: &dyn TorseFormingField, imm: &GraphImmersion, x: &[f64]) -> Result<T5T6Terms> {
    let frame = imm.frame_with(x, 1)?;
    let s = point_split(data, &frame);
    let lhs = nabla_omega_h_dot_p(imm, &frame, &s)?;
    let grad_f = intrinsic_grad(imm, &mean_field(imm), x)?;
    let phi_omega_grad_f = s.phi * s.omega_on_basis.dot(&grad_f);
    let f_omega_a_v = frame.mean_curvature * s.omega_on_basis.dot(&frame.shape_apply(&s.tangential));
    Ok(T5T6Terms {
        lhs,
        phi_omega_grad_f,
        f_omega_a_v,
        residual: lhs - (phi_omega_grad_f - f_omega_a_v),
    })
}

/// `f Ric(η, V)`, which must vanish wherever the hypersurface is
/// biharmonic.
pub fn theorem1_scalar(data: &dyn TorseFormingField, imm: &GraphImmersion, x: &[f64]) -> Result<f64> {
    let frame = imm.frame_at(x)?;
    let s = point_split(data, &frame);
    Ok(frame.mean_curvature * frame.ambient.ricci(&frame.normal, &s.tangential_ambient)?)
}

/// One residual magnitude with its tolerance and verdict.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualEntry {
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl ResidualEntry {
    pub fn new(residual: f64, tolerance: f64) -> Self {
        Self {
            residual,
            tolerance,
            passed: passes(residual, tolerance),
        }
    }
}

/// Every identity residual at one point. The Lemma 4 and Theorem 1
/// entries are present only where the point is biharmonic.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityResiduals {
    pub r_tf: ResidualEntry,
    pub r_lemma1: ResidualEntry,
    pub r_lemma2: ResidualEntry,
    pub r_lemma3: ResidualEntry,
    pub r_lemma4: Option<ResidualEntry>,
    pub r_t5t6: ResidualEntry,
    pub r_theorem1: Option<ResidualEntry>,
    pub bitension_norm: f64,
}

impl IdentityResiduals {
    pub fn entries(&self) -> Vec<(&'static str, ResidualEntry)> {
        let mut out = vec![
            ("tf", self.r_tf),
            ("lemma1", self.r_lemma1),
            ("lemma2", self.r_lemma2),
            ("lemma3", self.r_lemma3),
        ];
        if let Some(e) = self.r_lemma4 {
            out.push(("lemma4", e));
        }
        out.push(("t5t6", self.r_t5t6));
        if let Some(e) = self.r_theorem1 {
            out.push(("theorem1", e));
        }
        out
    }

    pub fn all_passed(&self) -> bool {
        self.entries().iter().all(|(_, e)| e.passed)
    }
}

/// Runs every checker at `x`. Tolerances follow the differentiation depth
/// of each identity, one tier looser when the height has no analytic jets.
pub fn identity_residuals(
    data: &dyn TorseFormingField,
    imm: &GraphImmersion,
    x: &[f64],
    biharmonic_tol: f64,
) -> Result<IdentityResiduals> {
    let tier = |t: Tier| if imm.has_analytic_frames() { t } else { t.relaxed() };
    let (frame, tau2) = bitension_vector(imm, x)?;
    let bitension_norm = frame.ambient.norm(&tau2);
    let m = frame.m();

    let mut tf: f64 = 0.0;
    let mut l1: f64 = 0.0;
    for a in 0..m {
        let r = torse_residual_with(&frame.ambient, imm.ambient(), data, &frame.tangents[a])?;
        tf = tf.max(frame.ambient.norm(&r) / frame.ambient.norm(&frame.tangents[a]));
        let xi = DVector::from_fn(m, |b, _| if a == b { 1.0 } else { 0.0 });
        let t = lemma1_residual(data, imm, x, &xi)?;
        l1 = l1.max(t.magnitude / frame.tangent_norm(&xi));
    }
    let l2 = lemma2_residual(data, imm, x)?.magnitude;
    let l3 = lemma3_residual(data, imm, x)?.residual.abs();
    let t56 = t5t6_check(data, imm, x)?.residual.abs();
    let biharmonic = bitension_norm <= biharmonic_tol;
    let (r_lemma4, r_theorem1) = if biharmonic {
        let l4 = lemma4_residual(data, imm, x, biharmonic_tol)?.residual.abs();
        let th = theorem1_scalar(data, imm, x)?.abs();
        (
            Some(ResidualEntry::new(l4, tier(Tier::Nested).tolerance())),
            Some(ResidualEntry::new(th, 1e-8)),
        )
    } else {
        (None, None)
    };
    Ok(IdentityResiduals {
        r_tf: ResidualEntry::new(tf, Tier::Analytic.tolerance()),
        r_lemma1: ResidualEntry::new(l1, tier(Tier::OneLayer).tolerance()),
        r_lemma2: ResidualEntry::new(l2, tier(Tier::OneLayer).tolerance()),
        r_lemma3: ResidualEntry::new(l3, tier(Tier::Nested).tolerance()),
        r_lemma4,
        r_t5t6: ResidualEntry::new(t56, tier(Tier::Nested).tolerance()),
        r_theorem1,
        bitension_norm,
    })
}
