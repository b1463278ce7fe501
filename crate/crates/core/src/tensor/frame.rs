use nalgebra::{DMatrix, DVector};

/// Gram–Schmidt of `vectors` (in order) against the inner product `g`.
///
/// Returns `None` when a vector is (numerically) dependent on its
/// predecessors.
pub fn gram_schmidt(g: &DMatrix<f64>, vectors: &[DVector<f64>]) -> Option<Vec<DVector<f64>>> {
    let mut out: Vec<DVector<f64>> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut w = v.clone();
        // modified Gram–Schmidt, two passes for stability
        for _ in 0..2 {
            for e in &out {
                let c = (e.transpose() * g * &w)[(0, 0)];
                w -= e * c;
            }
        }
        let norm2 = (w.transpose() * g * &w)[(0, 0)];
        let ref2 = (v.transpose() * g * v)[(0, 0)];
        if !(norm2 > 1e-24 * ref2.max(f64::MIN_POSITIVE)) {
            return None;
        }
        out.push(w / norm2.sqrt());
    }
    Some(out)
}

/// Orthonormal frame obtained from the coordinate basis in index order.
pub fn coordinate_frame(g: &DMatrix<f64>) -> Vec<DVector<f64>> {
    let n = g.nrows();
    let basis: Vec<DVector<f64>> = (0..n)
        .map(|i| DVector::from_fn(n, |k, _| if k == i { 1.0 } else { 0.0 }))
        .collect();
    gram_schmidt(g, &basis).expect("coordinate basis of a positive definite metric")
}
