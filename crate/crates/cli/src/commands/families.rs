//! Seeded immersion families for randomized sweeps.

use std::sync::Arc;

use biharm_core::hypersurface::{GraphImmersion, HeightFunction, Polynomial, SineBump, Wave};
use biharm_core::{BoxDomain, MetricField, Result};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::Family;

/// Half-width of the parameter box of every sweep immersion.
pub const OMEGA: f64 = 1.0;
/// Sample points stay this far inside the parameter box.
pub const SAMPLE: f64 = 0.6;

/// Independent stream per `(seed, stream)` so parallel sweeps are
/// reproducible regardless of scheduling.
pub fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

pub fn quadratic(r: &mut ChaCha8Rng, m: usize) -> Result<Polynomial> {
    let q = DMatrix::from_fn(m, m, |_, _| r.gen_range(-0.4..0.4));
    let l = DVector::from_fn(m, |_, _| r.gen_range(-0.5..0.5));
    Polynomial::quadratic(q, l, r.gen_range(-0.8..0.8))
}

pub fn sine(r: &mut ChaCha8Rng, m: usize) -> Result<SineBump> {
    let waves = (0..2)
        .map(|_| Wave {
            amplitude: r.gen_range(-0.3..0.3),
            wavevector: (0..m).map(|_| r.gen_range(-1.5..1.5)).collect(),
            phase: r.gen_range(0.0..6.0),
        })
        .collect();
    SineBump::new(m, r.gen_range(-0.5..0.5), waves)
}

pub fn random_immersion(
    family: Family,
    index: usize,
    r: &mut ChaCha8Rng,
    m: usize,
    ambient: Arc<dyn MetricField>,
) -> Result<GraphImmersion> {
    let height: Arc<dyn HeightFunction> = match (family, index % 2) {
        (Family::Quadratic, _) | (Family::Mixed, 0) => Arc::new(quadratic(r, m)?),
        _ => Arc::new(sine(r, m)?),
    };
    GraphImmersion::new(height, BoxDomain::cube(m, OMEGA)?, ambient)
}

pub fn sample_points(r: &mut ChaCha8Rng, m: usize, count: usize) -> Vec<Vec<f64>> {
    (0..count).map(|_| (0..m).map(|_| r.gen_range(-SAMPLE..SAMPLE)).collect()).collect()
}
