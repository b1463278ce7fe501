//! Torse-forming identity sweeps: randomized graphs for the identities
//! valid everywhere, the biharmonic hyperplanes for the ones that need
//! biharmonicity, and the harmonicity predicate on several families.

use std::sync::Arc;

use biharm_core::hypersurface::{GraphImmersion, Hyperplane};
use biharm_core::torse::{
    corollary1_predicate, identity_residuals, lemma3_residual, lemma4_residual, theorem1_scalar,
    CorollaryTolerances, CorollaryVerdict, TorseFormingData,
};
use biharm_core::{model_metric, stf_field, BoxDomain, MetricField, ModelParams, Tier};
use rayon::prelude::*;

use super::families::{random_immersion, sample_points, stream};
use crate::config::RunConfig;
use crate::error::Result;
use crate::report::{Record, ResidualReport};

pub const BIHARMONIC_TOL: f64 = 1e-6;
pub const LEMMA4_TOL: f64 = 1e-6;
pub const THEOREM1_TOL: f64 = 1e-8;
/// Each surviving term of the hyperplane cancellation must be at least
/// this large.
pub const NONTRIVIAL_FLOOR: f64 = 1e-2;
/// Points sampled per hyperplane and per predicate family.
pub const HYPERPLANE_POINTS: usize = 5;

pub fn run(cfg: &RunConfig) -> Result<ResidualReport> {
    cfg.validate()?;
    let params = cfg.params()?;
    let metric: Arc<dyn MetricField> = Arc::new(model_metric(&params));
    let mut records: Vec<Record> = (0..cfg.immersions)
        .into_par_iter()
        .map(|i| random_records(cfg, &params, &metric, i))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    records.extend(hyperplane_records(cfg, &params, &metric)?);
    records.extend(corollary_records(cfg, &params, &metric)?);
    Ok(ResidualReport::new("verify-lemmas", cfg, records, None))
}

fn random_records(cfg: &RunConfig, params: &ModelParams, metric: &Arc<dyn MetricField>, i: usize) -> Result<Vec<Record>> {
    let m = params.m();
    let stf = stf_field(params);
    let mut rng = stream(cfg.seed, 1 + i as u64);
    let imm = random_immersion(cfg.family, i, &mut rng, m, metric.clone())?;
    let mut out = Vec::new();
    for (j, x) in sample_points(&mut rng, m, cfg.points).iter().enumerate() {
        let idx = i * cfg.points + j;
        let ir = identity_residuals(&stf, &imm, x, BIHARMONIC_TOL)?;
        for (name, e) in ir.entries() {
            out.push(Record::new(name, idx, x, e.residual, cfg.tolerance(e.tolerance)));
        }
        let l3 = lemma3_residual(&stf, &imm, x)?;
        out.push(Record::new(
            "lemma3.with_codazzi_term",
            idx,
            x,
            l3.residual_with_codazzi_term().abs(),
            cfg.tolerance(Tier::Nested.tolerance()),
        ));
    }
    Ok(out)
}

fn hyperplane(params: &ModelParams, metric: &Arc<dyn MetricField>, c: f64) -> Result<GraphImmersion> {
    let m = params.m();
    Ok(GraphImmersion::new(Arc::new(Hyperplane { m, c }), BoxDomain::cube(m, 1.0)?, metric.clone())?)
}

fn hyperplane_records(cfg: &RunConfig, params: &ModelParams, metric: &Arc<dyn MetricField>) -> Result<Vec<Record>> {
    let stf = stf_field(params);
    let mut rng = stream(cfg.seed, 0);
    let xs = sample_points(&mut rng, params.m(), HYPERPLANE_POINTS);
    let mut out = Vec::new();
    for (h, c) in params.biharmonic_heights().into_iter().enumerate() {
        let imm = hyperplane(params, metric, c)?;
        for (j, x) in xs.iter().enumerate() {
            let idx = h * HYPERPLANE_POINTS + j;
            let mut at = x.clone();
            at.push(c);
            let l4 = lemma4_residual(&stf, &imm, x, BIHARMONIC_TOL)?;
            out.push(Record::new("lemma4", idx, &at, l4.residual.abs(), cfg.tolerance(LEMMA4_TOL)));
            let smallest = l4.f_phi_ricci_nn.abs().min(l4.m_mu_h2.abs());
            out.push(Record::new("lemma4.nontrivial", idx, &at, NONTRIVIAL_FLOOR / smallest, 1.0));
            let th = theorem1_scalar(&stf, &imm, x)?.abs();
            out.push(Record::new("theorem1", idx, &at, th, cfg.tolerance(THEOREM1_TOL)));
        }
    }
    Ok(out)
}

fn corollary_records(cfg: &RunConfig, params: &ModelParams, metric: &Arc<dyn MetricField>) -> Result<Vec<Record>> {
    let data = TorseFormingData::trusted(Arc::new(stf_field(params)));
    let m = params.m();
    let tol = CorollaryTolerances {
        biharmonic: BIHARMONIC_TOL,
        ..CorollaryTolerances::default()
    };
    let mut rng = stream(cfg.seed, u64::MAX);
    let xs = sample_points(&mut rng, m, HYPERPLANE_POINTS);
    let mut families: Vec<(&str, GraphImmersion)> = Vec::new();
    if let Some(&c) = params.biharmonic_heights().last() {
        families.push(("corollary1.biharmonic_hyperplane", hyperplane(params, metric, c)?));
    }
    if !params.is_flat_limit() {
        let c = (params.u() / params.v()).sqrt();
        families.push(("corollary1.ricci_degenerate_hyperplane", hyperplane(params, metric, c)?));
    }
    families.push(("corollary1.random", random_immersion(cfg.family, 0, &mut rng, m, metric.clone())?));
    let mut out = Vec::new();
    for (id, imm) in families {
        let rep = corollary1_predicate(&data, &imm, &xs, tol)?;
        let violations = match &rep.verdict {
            CorollaryVerdict::Violated { points } => points.len(),
            _ => 0,
        };
        out.push(Record::new(id, 0, &[], violations as f64, 0.0));
    }
    Ok(out)
}
