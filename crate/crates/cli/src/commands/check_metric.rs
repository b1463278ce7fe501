//! Curvature symmetries, closed-form equivalence, θ-Einstein fit and
//! torse-forming certification over a grid of ambient points.

use std::sync::Arc;

use biharm_core::model::{closed_form_curvature, model_frame, theta_einstein_scalars};
use biharm_core::tensor::PerturbedJet;
use biharm_core::tolerance::relative_error;
use biharm_core::torse::{fit_at, stf_defect, torse_residual};
use biharm_core::{model_metric, stf_field, AmbientGeometry, MetricField, ModelParams, Point, Tier};
use nalgebra::DVector;
use rand::Rng;
use rayon::prelude::*;

use super::families::stream;
use crate::config::RunConfig;
use crate::error::Result;
use crate::report::{Record, ResidualReport};

pub const FLAT_TOL: f64 = 1e-10;
pub const FIT_TOL: f64 = 1e-8;
pub const FIT_SCALAR_TOL: f64 = 1e-6;
pub const STF_TOL: f64 = 1e-9;

/// Cell centres of a `grid^n` lattice over the configured box, with the
/// `t` axis clipped to the model interval.
pub fn grid_points(cfg: &RunConfig, params: &ModelParams) -> Vec<Vec<f64>> {
    let n = params.n();
    let g = cfg.grid;
    let (tlo, thi) = params.t_range();
    let bounds: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            if k + 1 == n {
                (tlo.max(-cfg.domain), thi.min(cfg.domain))
            } else {
                (-cfg.domain, cfg.domain)
            }
        })
        .collect();
    let total = g.pow(n as u32);
    (0..total)
        .map(|mut idx| {
            let mut p = vec![0.0; n];
            for (k, (lo, hi)) in bounds.iter().enumerate() {
                let j = idx % g;
                idx /= g;
                p[k] = lo + (hi - lo) * (j as f64 + 0.5) / g as f64;
            }
            p
        })
        .collect()
}

pub fn ambient(cfg: &RunConfig, params: &ModelParams) -> Arc<dyn MetricField> {
    if cfg.corrupt_jet != 0.0 {
        Arc::new(PerturbedJet {
            inner: model_metric(params),
            delta: cfg.corrupt_jet,
        })
    } else {
        Arc::new(model_metric(params))
    }
}

pub fn run(cfg: &RunConfig) -> Result<ResidualReport> {
    cfg.validate()?;
    let params = cfg.params()?;
    let metric = ambient(cfg, &params);
    let points = grid_points(cfg, &params);
    let chunks: Vec<Vec<Record>> = points
        .par_iter()
        .enumerate()
        .map(|(i, p)| point_records(cfg, &params, metric.as_ref(), i, p))
        .collect::<Result<_>>()?;
    Ok(ResidualReport::new("check-metric", cfg, chunks.into_iter().flatten().collect(), None))
}

fn random_vec(r: &mut impl Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| r.gen_range(-1.0..1.0))
}

fn point_records(
    cfg: &RunConfig,
    params: &ModelParams,
    metric: &dyn MetricField,
    idx: usize,
    p: &[f64],
) -> Result<Vec<Record>> {
    let n = params.n();
    let m = params.m();
    let t = p[m];
    let analytic = cfg.tolerance(Tier::Analytic.tolerance());
    let mut out = Vec::new();
    let mut push = |id: &str, res: f64, tol: f64| out.push(Record::new(id, idx, p, res, cfg.tolerance(tol)));

    let geo = AmbientGeometry::at(metric, p, 2)?;
    let mut rng = stream(cfg.seed, idx as u64);
    let (x, y, z, w) = (random_vec(&mut rng, n), random_vec(&mut rng, n), random_vec(&mut rng, n), random_vec(&mut rng, n));
    let r = |a: &DVector<f64>, b: &DVector<f64>, c: &DVector<f64>, d: &DVector<f64>| geo.riemann_lowered(a, b, c, d);
    let rxyzw = r(&x, &y, &z, &w)?;
    let bianchi = geo.riemann(&x, &y, &z)? + geo.riemann(&y, &z, &x)? + geo.riemann(&z, &x, &y)?;
    let rxy = geo.ricci(&x, &y)?;

    push("christoffel.torsion", geo.christoffel().torsion(), analytic);
    push("christoffel.compatibility", geo.compatibility_defect(), analytic);
    push("curvature.antisymmetry", (rxyzw + r(&y, &x, &z, &w)?).abs(), analytic);
    push("curvature.skew", (rxyzw + r(&x, &y, &w, &z)?).abs(), analytic);
    push("curvature.pair_symmetry", (rxyzw - r(&z, &w, &x, &y)?).abs(), analytic);
    push("curvature.bianchi", geo.norm(&bianchi), analytic);
    push(
        "ricci.symmetry",
        (rxy - geo.ricci(&y, &x)?).abs() + (geo.inner(&geo.ricci_operator(&x)?, &y) - rxy).abs(),
        analytic,
    );

    let floor = if params.is_flat_limit() { 1.0 } else { params.curvature_scale() };
    let e = model_frame(params, t);
    let cf = closed_form_curvature(params, t);
    let te = theta_einstein_scalars(params, t);
    let direct = m as f64 * params.v() * (params.u() - 2.0 * params.v() * t * t) / params.w(t).powi(2);
    let ricnn = geo.ricci(&e[m], &e[m])?;
    push("oracle.r_ijij", relative_error(r(&e[0], &e[1], &e[0], &e[1])?, cf.r_ijij, floor), analytic);
    push("oracle.r_inin", relative_error(r(&e[0], &e[m], &e[0], &e[m])?, cf.r_inin, floor), analytic);
    push("oracle.ricci_a", relative_error(geo.ricci(&e[0], &e[0])?, te.a, floor), analytic);
    push("oracle.ricci_a_plus_b", relative_error(ricnn, te.a + te.b, floor), analytic);
    push("oracle.ricci_frame_sum", relative_error(ricnn, direct, floor), analytic);

    let stf = stf_field(params);
    let fit = fit_at(&geo, &stf.theta())?;
    push("theta_einstein.fit", fit.residual, FIT_TOL);
    push(
        "theta_einstein.scalars",
        relative_error(fit.a, te.a, floor).max(relative_error(fit.b, te.b, floor)),
        FIT_SCALAR_TOL,
    );

    let point = Point::new(p.to_vec())?;
    let mut tf: f64 = 0.0;
    for k in 0..n {
        let res = torse_residual(metric, &stf, &point, &e[k])?;
        tf = tf.max(geo.norm(&res));
    }
    push("torse.residual", tf, analytic);
    push("torse.stf_form", stf_defect(metric, &stf, &point)?.unwrap_or(f64::NAN), STF_TOL);

    if params.is_flat_limit() {
        push("flat.christoffel", geo.christoffel().max_abs(), FLAT_TOL);
        push("flat.riemann", geo.riemann_max_abs()?, FLAT_TOL);
    }
    Ok(out)
}
