//! θ-Einstein fitting and the pointwise harmonicity predicate for
//! biharmonic hypersurfaces.

use nalgebra::{DVector, Matrix2, Vector2};

use super::field::TorseFormingData;
use super::identities::point_split;
use crate::error::{GeomError, Result};
use crate::hypersurface::{bitension_vector, GraphImmersion};
use crate::tensor::{AmbientGeometry, MetricField, Point};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaEinsteinFit {
    pub a: f64,
    pub b: f64,
    /// Largest `|Ric(E_i, E_j) − a δ_ij − b θ_i θ_j|` over the frame.
    pub residual: f64,
}

/// Least-squares fit of `Ric = a g + b θ⊗θ` in an orthonormal frame.
pub fn fit_at(geo: &AmbientGeometry, theta: &DVector<f64>) -> Result<ThetaEinsteinFit> {
    let frame = geo.orthonormal_frame();
    let n = frame.len();
    let th: Vec<f64> = frame.iter().map(|e| theta.dot(e)).collect();
    let mut ric = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            ric[i * n + j] = geo.ricci(&frame[i], &frame[j])?;
        }
    }
    let mut ata = Matrix2::zeros();
    let mut atb = Vector2::zeros();
    for i in 0..n {
        for j in i..n {
            let row = Vector2::new(if i == j { 1.0 } else { 0.0 }, th[i] * th[j]);
            ata += row * row.transpose();
            atb += row * ric[i * n + j];
        }
    }
    let scale = ata.amax().max(f64::MIN_POSITIVE);
    if ata.determinant().abs() <= 1e-12 * scale * scale {
        return Err(GeomError::DegenerateFit);
    }
    let sol = ata.lu().solve(&atb).ok_or(GeomError::DegenerateFit)?;
    let (a, b) = (sol[0], sol[1]);
    let mut residual: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            let model = if i == j { a } else { 0.0 } + b * th[i] * th[j];
            residual = residual.max((ric[i * n + j] - model).abs());
        }
    }
    Ok(ThetaEinsteinFit { a, b, residual })
}

/// Per-point fit of `Ric = a g + b θ⊗θ`; `theta` returns covector
/// components at a point.
pub fn theta_einstein_fit<T>(metric: &dyn MetricField, theta: T, points: &[Point]) -> Result<Vec<ThetaEinsteinFit>>
where
    T: Fn(&Point) -> DVector<f64>,
{
    points
        .iter()
        .map(|p| {
            let geo = AmbientGeometry::at(metric, p.as_slice(), 2)?;
            fit_at(&geo, &theta(p))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorollaryTolerances {
    /// `|τ₂|` at or below this marks a point biharmonic.
    pub biharmonic: f64,
    /// Largest accepted θ-Einstein fit residual.
    pub fit: f64,
    /// Threshold for `f`, `b`, `φ`, `|V|²` to count as vanishing.
    pub vanishing: f64,
}

impl Default for CorollaryTolerances {
    fn default() -> Self {
        Self {
            biharmonic: 1e-6,
            fit: 1e-8,
            vanishing: 1e-6,
        }
    }
}

/// Which quantity vanished at a biharmonic point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Witness {
    MeanCurvature,
    RicciCoefficient,
    NormalComponent,
    TangentialComponent,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorollaryPoint {
    pub x: Vec<f64>,
    pub bitension_norm: f64,
    pub mean_curvature: f64,
    pub b: f64,
    pub phi: f64,
    pub tangential_norm2: f64,
    pub fit_residual: f64,
    pub biharmonic: bool,
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CorollaryVerdict {
    NoBiharmonicPoints,
    Satisfied { biharmonic_points: usize },
    /// Indices into the sample of biharmonic points with no witness.
    Violated { points: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorollaryReport {
    pub verdict: CorollaryVerdict,
    pub points: Vec<CorollaryPoint>,
}

/// At every sampled biharmonic point, one of `f`, `b`, `φ`, `|V|²` must
/// vanish. `θ` is taken to be `P♭`.
pub fn corollary1_predicate(
    data: &TorseFormingData,
    imm: &GraphImmersion,
    xs: &[Vec<f64>],
    tol: CorollaryTolerances,
) -> Result<CorollaryReport> {
    let field = data.field();
    let mut points = Vec::with_capacity(xs.len());
    for x in xs {
        let (frame, tau2) = bitension_vector(imm, x)?;
        let geo = &frame.ambient;
        let theta = geo.flat(&field.field(&frame.point));
        let fit = fit_at(geo, &theta)?;
        if !(fit.residual <= tol.fit) {
            return Err(GeomError::NotThetaEinstein {
                residual: fit.residual,
                tolerance: tol.fit,
            });
        }
        let s = point_split(field, &frame);
        let bitension_norm = geo.norm(&tau2);
        let biharmonic = bitension_norm <= tol.biharmonic;
        let tangential_norm2 = frame.tangent_inner(&s.tangential, &s.tangential);
        let f = frame.mean_curvature;
        let witness = if !biharmonic {
            None
        } else if f.abs() <= tol.vanishing {
            Some(Witness::MeanCurvature)
        } else if fit.b.abs() <= tol.vanishing {
            Some(Witness::RicciCoefficient)
        } else if s.phi.abs() <= tol.vanishing {
            Some(Witness::NormalComponent)
        } else if tangential_norm2 <= tol.vanishing {
            Some(Witness::TangentialComponent)
        } else {
            None
        };
        points.push(CorollaryPoint {
            x: x.clone(),
            bitension_norm,
            mean_curvature: f,
            b: fit.b,
            phi: s.phi,
            tangential_norm2,
            fit_residual: fit.residual,
            biharmonic,
            witness,
        });
    }
    let bih: Vec<usize> = points.iter().enumerate().filter(|(_, p)| p.biharmonic).map(|(i, _)| i).collect();
    let verdict = if bih.is_empty() {
        CorollaryVerdict::NoBiharmonicPoints
    } else {
        let bad: Vec<usize> = bih.iter().copied().filter(|&i| points[i].witness.is_none()).collect();
        if bad.is_empty() {
            CorollaryVerdict::Satisfied {
                biharmonic_points: bih.len(),
            }
        } else {
            CorollaryVerdict::Violated { points: bad }
        }
    };
    Ok(CorollaryReport { verdict, points })
}
