mod common;

use biharm_core::hypersurface::{bitension, route_factor, GraphImmersion, Hyperplane};
use common::*;

struct Sample {
    m: usize,
    tau2_normal: f64,
    tau2_tangent: Vec<f64>,
    n: f64,
    t: Vec<f64>,
}

fn samples(m: usize, count: usize, seed: u64) -> Vec<(GraphImmersion, Vec<f64>)> {
    let mut r = rng(seed);
    let (_, metric) = model(uniform(&mut r, 0.5, 2.0), uniform(&mut r, 0.5, 2.0), m);
    (0..count)
        .map(|_| {
            let imm = graph(random_cubic(&mut r, m), &metric);
            let x = interior_point(&mut r, m);
            (imm, x)
        })
        .collect()
}

fn collect(m: usize, seed: u64) -> Vec<Sample> {
    samples(m, 25, seed)
        .into_iter()
        .map(|(imm, x)| {
            let b = bitension(&imm, &x).unwrap();
            Sample {
                m,
                tau2_normal: b.bitension_normal,
                tau2_tangent: b.bitension_tangent.as_slice().to_vec(),
                n: b.normal_residual,
                t: b.tangential_residual.as_slice().to_vec(),
            }
        })
        .collect()
}

/// One-parameter least squares `y ≈ k x`.
fn fit(pairs: impl Iterator<Item = (f64, f64)>) -> f64 {
    let (mut xy, mut xx) = (0.0, 0.0);
    for (x, y) in pairs {
        xy += x * y;
        xx += x * x;
    }
    xy / xx
}

#[test]
fn fitted_route_constants_equal_dimension() {
    for (m, seed) in [(2usize, 41u64), (3, 42)] {
        let s = collect(m, seed);
        let kn = fit(s.iter().map(|s| (s.n, s.tau2_normal)));
        let kt = fit(s.iter().flat_map(|s| s.t.iter().copied().zip(s.tau2_tangent.iter().copied())));
        assert!((kn - m as f64).abs() <= 1e-6, "normal factor {kn} for m={m}");
        assert!((kt - m as f64).abs() <= 1e-6, "tangential factor {kt} for m={m}");
        assert_eq!(route_factor(s[0].m), m as f64);
    }
}

#[test]
fn frozen_relation_holds_per_sample() {
    for (m, seed) in [(2usize, 43u64), (3, 44)] {
        for (imm, x) in samples(m, 25, seed) {
            let b = bitension(&imm, &x).unwrap();
            let fr = imm.frame_at(&x).unwrap();
            let d = b.route_discrepancy(&fr, 1e-8);
            assert!(d <= 1e-4, "discrepancy {d}");
            assert!(fr.ambient.norm(&b.bitension) > 1e-6);
        }
    }
}

#[test]
fn routes_agree_on_biharmonic_verdict() {
    let tol = 1e-6;
    for &(u, v) in &[(1.0, 1.0), (1.0, 3.0), (2.0, 0.5)] {
        let (params, metric) = model(u, v, 2);
        let cstar = params.biharmonic_heights()[1];
        for c in [cstar, -cstar, 0.5 * cstar, 1.7 * cstar, 0.9] {
            let imm = graph(Hyperplane { m: 2, c }, &metric);
            let b = bitension(&imm, &[0.0, 0.0]).unwrap();
            let fr = imm.frame_at(&[0.0, 0.0]).unwrap();
            let first = fr.ambient.norm(&b.bitension) <= tol;
            let second = b.normal_residual.abs().max(fr.tangent_norm(&b.tangential_residual)) <= tol / 2.0;
            assert_eq!(first, second, "c={c}");
            assert_eq!(first, (c.abs() - cstar).abs() < 1e-12);
        }
    }
}
