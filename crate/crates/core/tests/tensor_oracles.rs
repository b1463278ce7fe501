mod common;

use biharm_core::tensor::{gram_schmidt, AmbientGeometry, FdOnly, FlatMetric, MetricField, PerturbedJet};
use biharm_core::{model_metric, ModelParams};
use common::*;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

/// Christoffel symbols from a hand-rolled central difference of the metric
/// matrix and the Koszul formula.
fn koszul_oracle(metric: &dyn MetricField, p: &[f64]) -> Vec<f64> {
    let n = p.len();
    let h = 1e-5;
    let dg: Vec<DMatrix<f64>> = (0..n)
        .map(|k| {
            let mut a = p.to_vec();
            let mut b = p.to_vec();
            a[k] += h;
            b[k] -= h;
            (metric.matrix(&a) - metric.matrix(&b)) / (2.0 * h)
        })
        .collect();
    let ginv = metric.matrix(p).try_inverse().unwrap();
    let mut out = vec![0.0; n * n * n];
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for l in 0..n {
                    s += ginv[(k, l)] * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)]);
                }
                out[(k * n + i) * n + j] = 0.5 * s;
            }
        }
    }
    out
}

#[test]
fn christoffel_matches_fd_koszul_oracle() {
    let mut r = rng(11);
    for &(u, v, m) in &[(1.0, 1.0, 2), (2.0, 0.5, 3), (0.7, 3.0, 2)] {
        let params = ModelParams::new(u, v, m).unwrap();
        let metric = model_metric(&params);
        for _ in 0..20 {
            let p = random_point(&mut r, m, -2.0, 2.0);
            let geo = AmbientGeometry::at(&metric, &p, 1).unwrap();
            let oracle = koszul_oracle(&metric, &p);
            let n = m + 1;
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let got = geo.christoffel().get(k, i, j);
                        let want = oracle[(k * n + i) * n + j];
                        assert!((got - want).abs() < 1e-8, "Γ^{k}_{i}{j} {got} vs {want}");
                    }
                }
            }
        }
    }
}

#[test]
fn christoffel_coordinate_components() {
    let (u, v, m) = (1.3, 0.8, 3);
    let params = ModelParams::new(u, v, m).unwrap();
    let metric = model_metric(&params);
    for &t in &[-1.7, -0.3, 0.0, 0.9, 2.0] {
        let p = vec![0.2, -0.4, 1.1, t];
        let gamma = biharm_core::tensor::christoffel(&metric, &biharm_core::Point::new(p).unwrap()).unwrap();
        let w = u + v * t * t;
        for i in 0..m {
            assert!((gamma.get(m, i, i) - v * t / (w * w)).abs() < 1e-12);
            assert!((gamma.get(i, i, m) + v * t / w).abs() < 1e-12);
            assert!((gamma.get(i, m, i) + v * t / w).abs() < 1e-12);
        }
    }
}

#[test]
fn flat_limit_connection_and_curvature_vanish() {
    let params = ModelParams::flat_limit(1.0, 0.0, 3).unwrap();
    let metric = model_metric(&params);
    let mut r = rng(5);
    for _ in 0..20 {
        let p = random_point(&mut r, 3, -2.0, 2.0);
        let geo = AmbientGeometry::at(&metric, &p, 2).unwrap();
        assert!(geo.christoffel().max_abs() <= 1e-10);
        assert!(geo.riemann_max_abs().unwrap() <= 1e-10);
        assert!(geo.ricci_matrix().unwrap().amax() <= 1e-10);
    }
    let flat = FlatMetric::new(4);
    let geo = AmbientGeometry::at(&flat, &[0.1, 0.2, 0.3, 0.4], 2).unwrap();
    assert_eq!(geo.riemann_max_abs().unwrap(), 0.0);
}

#[test]
fn ricci_is_frame_independent() {
    let (_, metric) = model(1.0, 2.0, 3);
    let mut r = rng(21);
    for _ in 0..20 {
        let p = random_point(&mut r, 3, -2.0, 2.0);
        let geo = AmbientGeometry::at(metric.as_ref(), &p, 2).unwrap();
        let frame = |r: &mut rand_chacha::ChaCha8Rng| {
            let vs: Vec<DVector<f64>> = (0..4).map(|_| random_vector(r, 4)).collect();
            gram_schmidt(geo.metric(), &vs).unwrap()
        };
        let f1 = frame(&mut r);
        let f2 = frame(&mut r);
        let x = random_vector(&mut r, 4);
        let y = random_vector(&mut r, 4);
        let a = geo.ricci_in_frame(&f1, &x, &y).unwrap();
        let b = geo.ricci_in_frame(&f2, &x, &y).unwrap();
        let c = geo.ricci(&x, &y).unwrap();
        assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        assert!((a - c).abs() < 1e-8, "{a} vs {c}");
    }
}

#[test]
fn corrupted_first_jet_breaks_bianchi() {
    let params = ModelParams::new(1.0, 1.0, 2).unwrap();
    let bad = PerturbedJet {
        inner: model_metric(&params),
        delta: 0.3,
    };
    let p = [0.1, 0.2, 0.7];
    let geo = AmbientGeometry::at(&bad, &p, 2).unwrap();
    let mut worst: f64 = 0.0;
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                let (x, y, z) = (basis(3, a), basis(3, b), basis(3, c));
                let s = geo.riemann(&x, &y, &z).unwrap()
                    + geo.riemann(&y, &z, &x).unwrap()
                    + geo.riemann(&z, &x, &y).unwrap();
                worst = worst.max(s.amax());
            }
        }
    }
    assert!(worst > 1e-3, "Bianchi defect {worst}");
    assert!(geo.christoffel().torsion() > 1e-3);
}

fn symmetry_defects(geo: &AmbientGeometry, x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>, w: &DVector<f64>) -> [f64; 5] {
    let r = |a: &DVector<f64>, b: &DVector<f64>, c: &DVector<f64>, d: &DVector<f64>| geo.riemann_lowered(a, b, c, d).unwrap();
    let bianchi = geo.riemann(x, y, z).unwrap() + geo.riemann(y, z, x).unwrap() + geo.riemann(z, x, y).unwrap();
    [
        (r(x, y, z, w) + r(y, x, z, w)).abs(),
        (r(x, y, z, w) + r(x, y, w, z)).abs(),
        (r(x, y, z, w) - r(z, w, x, y)).abs(),
        geo.norm(&bianchi),
        (geo.ricci(x, y).unwrap() - geo.ricci(y, x).unwrap()).abs()
            + (geo.inner(&geo.ricci_operator(x).unwrap(), y) - geo.ricci(x, y).unwrap()).abs(),
    ]
}

fn vec4() -> impl Strategy<Value = DVector<f64>> {
    prop::collection::vec(-1.0..1.0f64, 4).prop_map(DVector::from_vec)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn connection_is_torsion_free_and_compatible(
        u in 0.3..3.0f64, v in 0.1..3.0f64, y in prop::collection::vec(-2.0..2.0f64, 3), t in -2.0..2.0f64,
    ) {
        let params = ModelParams::new(u, v, 3).unwrap();
        let mut p = y.clone();
        p.push(t);
        let analytic = AmbientGeometry::at(&model_metric(&params), &p, 1).unwrap();
        prop_assert!(analytic.christoffel().torsion() <= 1e-7);
        prop_assert!(analytic.compatibility_defect() <= 1e-7);
        let fd = AmbientGeometry::at(&FdOnly(model_metric(&params)), &p, 1).unwrap();
        prop_assert!(fd.christoffel().torsion() <= 1e-4);
        prop_assert!(fd.compatibility_defect() <= 1e-4);
    }

    #[test]
    fn curvature_symmetries_hold(
        u in 0.3..3.0f64, v in 0.1..3.0f64, t in -2.0..2.0f64,
        x in vec4(), y in vec4(), z in vec4(), w in vec4(),
    ) {
        let params = ModelParams::new(u, v, 3).unwrap();
        let p = [0.3, -0.2, 0.5, t];
        let geo = AmbientGeometry::at(&model_metric(&params), &p, 2).unwrap();
        for d in symmetry_defects(&geo, &x, &y, &z, &w) {
            prop_assert!(d <= 1e-7, "{d}");
        }
        let fd = AmbientGeometry::at(&FdOnly(model_metric(&params)), &p, 2).unwrap();
        for d in symmetry_defects(&fd, &x, &y, &z, &w) {
            prop_assert!(d <= 1e-4, "{d}");
        }
    }
}
