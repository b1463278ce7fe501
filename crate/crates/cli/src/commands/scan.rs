//! Sweep of constant-height graphs `F ≡ c`: bracket sign changes of the
//! normal biharmonicity residual `N(c)` and bisect each bracket.

use std::sync::Arc;

use biharm_core::hypersurface::{bitension, GraphImmersion, Hyperplane};
use biharm_core::{model_metric, BoxDomain, MetricField, ModelParams};
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::report::{round12, Record, ResidualReport, Roots};

pub const BISECTION_WIDTH: f64 = 1e-12;
pub const ROOT_TOL: f64 = 1e-6;
pub const RESIDUAL_AT_ROOT: f64 = 1e-10;

/// Roots whose mean curvature is below this are harmonic, not proper.
pub const HARMONIC_TOL: f64 = 1e-9;

fn hyperplane(params: &ModelParams, metric: &Arc<dyn MetricField>, c: f64) -> Result<GraphImmersion> {
    let m = params.m();
    Ok(GraphImmersion::new(Arc::new(Hyperplane { m, c }), BoxDomain::cube(m, 1.0)?, metric.clone())?)
}

/// `N(c)` at the origin of the hyperplane `F ≡ c`.
pub fn normal_residual(params: &ModelParams, metric: &Arc<dyn MetricField>, c: f64) -> Result<f64> {
    let imm = hyperplane(params, metric, c)?;
    Ok(bitension(&imm, &vec![0.0; params.m()])?.normal_residual)
}

fn mean_curvature(params: &ModelParams, metric: &Arc<dyn MetricField>, c: f64) -> Result<f64> {
    Ok(hyperplane(params, metric, c)?.frame_at(&vec![0.0; params.m()])?.mean_curvature)
}

/// Bisects a bracket with `fa · fb < 0` down to `BISECTION_WIDTH`.
pub fn bisect<F>(f: F, mut a: f64, mut b: f64, mut fa: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    while b - a > BISECTION_WIDTH {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Samples `c_k = c_min + k (c_max − c_min)/samples`, `k = 1..=samples`.
pub fn samples(cfg: &RunConfig) -> Vec<f64> {
    let n = cfg.c_samples;
    (1..=n).map(|k| cfg.c_min + (cfg.c_max - cfg.c_min) * k as f64 / n as f64).collect()
}

pub struct Scan {
    /// Proper (non-harmonic) roots.
    pub roots: Vec<f64>,
    /// Roots where the hyperplane is minimal.
    pub harmonic: Vec<f64>,
    pub expected: Vec<f64>,
    pub scale: f64,
    pub residual_at_roots: Vec<f64>,
}

pub fn scan(cfg: &RunConfig) -> Result<Scan> {
    cfg.validate()?;
    let params = cfg.params()?;
    let (tlo, thi) = params.t_range();
    if !(cfg.c_min > tlo && cfg.c_max < thi) {
        return Err(CliError::config(format!(
            "c-range ({}, {}] must lie strictly inside the t-interval ({tlo}, {thi})",
            cfg.c_min, cfg.c_max
        )));
    }
    let metric: Arc<dyn MetricField> = Arc::new(model_metric(&params));
    let cs = samples(cfg);
    let ns: Vec<f64> = cs
        .par_iter()
        .map(|&c| normal_residual(&params, &metric, c))
        .collect::<Result<_>>()?;
    let scale = ns.iter().fold(0.0f64, |a, n| a.max(n.abs())).max(f64::MIN_POSITIVE);
    let f = |c: f64| normal_residual(&params, &metric, c);

    let mut roots = Vec::new();
    for k in 0..cs.len() {
        if ns[k] == 0.0 {
            let opposite = k > 0 && k + 1 < cs.len() && ns[k - 1] * ns[k + 1] < 0.0;
            if opposite {
                roots.push(cs[k]);
            }
            continue;
        }
        if k + 1 < cs.len() && ns[k] * ns[k + 1] < 0.0 {
            roots.push(bisect(f, cs[k], cs[k + 1], ns[k])?);
        }
    }
    let mut harmonic = Vec::new();
    let mut proper = Vec::new();
    for c in roots {
        if mean_curvature(&params, &metric, c)?.abs() <= HARMONIC_TOL {
            harmonic.push(c);
        } else {
            proper.push(c);
        }
    }
    let roots = proper;
    let residual_at_roots = roots.iter().map(|&c| f(c).map(f64::abs)).collect::<Result<_>>()?;
    let expected = params
        .biharmonic_heights()
        .into_iter()
        .filter(|&c| c > cfg.c_min && c <= cfg.c_max)
        .collect();
    Ok(Scan {
        roots,
        harmonic,
        expected,
        scale,
        residual_at_roots,
    })
}

pub fn run(cfg: &RunConfig) -> Result<ResidualReport> {
    let s = scan(cfg)?;
    let mut records = Vec::new();
    for (i, (&c, &nc)) in s.roots.iter().zip(&s.residual_at_roots).enumerate() {
        let dist = s.expected.iter().map(|e| (c - e).abs()).fold(f64::INFINITY, f64::min);
        records.push(Record::new("scan.root", i, &[c], dist, cfg.tolerance(ROOT_TOL)));
        records.push(Record::new("scan.residual_at_root", i, &[c], nc / s.scale, cfg.tolerance(RESIDUAL_AT_ROOT)));
    }
    let count_gap = (s.roots.len() as f64 - s.expected.len() as f64).abs();
    records.push(Record::new("scan.root_count", 0, &[cfg.c_min, cfg.c_max], count_gap, 0.0));
    let roots = Roots {
        found: s.roots.iter().copied().map(round12).collect(),
        expected: s.expected.iter().copied().map(round12).collect(),
        harmonic: s.harmonic.iter().copied().map(round12).collect(),
    };
    Ok(ResidualReport::new("scan-hyperplane", cfg, records, Some(roots)))
}
