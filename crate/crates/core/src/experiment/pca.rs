use ndarray::{Array1, Array2, ArrayView2, Axis};

use crate::error::Result;
use crate::spectral::eigen::{top_eigenpairs, EigenSolver};

/// Scores of centered data on its `dims` leading principal components
/// (clamped to min(n, d)). Uses the d × d covariance when d ≤ n and the
/// n × n Gram matrix otherwise.
pub fn principal_scores(data: ArrayView2<'_, f64>, dims: usize) -> Result<Array2<f64>> {
    let (n, d) = data.dim();
    let dims = dims.clamp(1, d.min(n));
    let mean: Array1<f64> = data.mean_axis(Axis(0)).expect("n ≥ 1");
    let centered = &data - &mean;

    if d <= n {
        let cov = centered.t().dot(&centered) / (n as f64 - 1.0).max(1.0);
        let pairs = top_eigenpairs(cov.view(), dims, EigenSolver::Auto)?;
        Ok(centered.dot(&pairs.vectors))
    } else {
        let gram = centered.dot(&centered.t());
        let pairs = top_eigenpairs(gram.view(), dims, EigenSolver::Auto)?;
        let mut scores = pairs.vectors;
        for (mut col, &lambda) in scores.columns_mut().into_iter().zip(&pairs.values) {
            let s = lambda.max(0.0).sqrt();
            col.mapv_inplace(|v| v * s);
        }
        Ok(scores)
    }
}
