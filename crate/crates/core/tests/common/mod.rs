#![allow(dead_code)]

use std::sync::Arc;

use biharm_core::hypersurface::{GraphImmersion, HeightFunction, Polynomial, SineBump, Wave};
use biharm_core::{model_metric, BoxDomain, MetricField, ModelParams};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(r: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    r.gen_range(lo..hi)
}

pub fn random_vector(r: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| r.gen_range(-1.0..1.0))
}

pub fn random_point(r: &mut ChaCha8Rng, m: usize, t_lo: f64, t_hi: f64) -> Vec<f64> {
    let mut p: Vec<f64> = (0..m).map(|_| r.gen_range(-2.0..2.0)).collect();
    p.push(r.gen_range(t_lo..t_hi));
    p
}

pub fn random_quadratic(r: &mut ChaCha8Rng, m: usize) -> Polynomial {
    let q = DMatrix::from_fn(m, m, |_, _| r.gen_range(-0.4..0.4));
    let l = random_vector(r, m) * 0.5;
    Polynomial::quadratic(q, l, r.gen_range(-0.8..0.8)).unwrap()
}

pub fn random_cubic(r: &mut ChaCha8Rng, m: usize) -> Polynomial {
    let q = DMatrix::from_fn(m, m, |_, _| r.gen_range(-0.4..0.4));
    let l = random_vector(r, m) * 0.5;
    let c: Vec<f64> = (0..m * m * m).map(|_| r.gen_range(-0.15..0.15)).collect();
    Polynomial::cubic(q, l, r.gen_range(-0.8..0.8), c).unwrap()
}

pub fn random_sine(r: &mut ChaCha8Rng, m: usize) -> SineBump {
    let waves = (0..2)
        .map(|_| Wave {
            amplitude: r.gen_range(-0.3..0.3),
            wavevector: (0..m).map(|_| r.gen_range(-1.5..1.5)).collect(),
            phase: r.gen_range(0.0..6.0),
        })
        .collect();
    SineBump::new(m, r.gen_range(-0.5..0.5), waves).unwrap()
}

pub fn model(u: f64, v: f64, m: usize) -> (ModelParams, Arc<dyn MetricField>) {
    let p = ModelParams::new(u, v, m).unwrap();
    let metric: Arc<dyn MetricField> = Arc::new(model_metric(&p));
    (p, metric)
}

pub fn flat_model(m: usize) -> (ModelParams, Arc<dyn MetricField>) {
    let p = ModelParams::flat_limit(1.0, 0.0, m).unwrap();
    let metric: Arc<dyn MetricField> = Arc::new(model_metric(&p));
    (p, metric)
}

pub fn graph(height: impl HeightFunction + 'static, metric: &Arc<dyn MetricField>) -> GraphImmersion {
    let m = height.dim();
    GraphImmersion::new(Arc::new(height), BoxDomain::cube(m, 1.0).unwrap(), metric.clone()).unwrap()
}

pub fn interior_point(r: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    (0..m).map(|_| r.gen_range(-0.6..0.6)).collect()
}

/// Unit basis vector `e_i` of length `n`.
pub fn basis(n: usize, i: usize) -> DVector<f64> {
    DVector::from_fn(n, |k, _| if k == i { 1.0 } else { 0.0 })
}

pub fn rel_err(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / b.abs().max(floor)
}
