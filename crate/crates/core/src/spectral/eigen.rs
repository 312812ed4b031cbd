//! Leading eigenpairs of dense symmetric matrices.
//!
//! Small problems use a full dense decomposition. Large ones use block
//! Lanczos, which only needs matrix-vector products and converges quickly
//! for the few extreme eigenvalues spectral clustering asks for.

use nalgebra::{DMatrix, SymmetricEigen};
use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::rng_from_seed;

/// Above this size `Auto` switches from the dense solver to Lanczos.
pub const DENSE_LIMIT: usize = 3000;

/// Convergence tolerance of Lanczos Ritz residuals, relative to ‖A‖_F.
pub const LANCZOS_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum EigenSolver {
    #[default]
    Auto,
    Dense,
    Lanczos,
}

/// Eigenvalues in descending order with matching eigenvector columns.
#[derive(Debug, Clone)]
pub struct Eigenpairs {
    pub values: Vec<f64>,
    pub vectors: Array2<f64>,
}

impl Eigenpairs {
    /// max_j ‖A·u_j − λ_j·u_j‖₂.
    pub fn max_residual(&self, matrix: ArrayView2<'_, f64>) -> f64 {
        self.values
            .iter()
            .enumerate()
            .map(|(j, &lambda)| {
                let u = self.vectors.column(j);
                let au = matvec(matrix, u);
                au.iter()
                    .zip(u.iter())
                    .map(|(a, x)| (a - lambda * x).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }
}

pub fn frobenius_norm(matrix: ArrayView2<'_, f64>) -> f64 {
    matrix.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Row-parallel product; every entry is a sequential dot product, so the
/// result does not depend on the thread count.
fn matvec(matrix: ArrayView2<'_, f64>, x: ArrayView1<'_, f64>) -> Array1<f64> {
    let rows: Vec<f64> = (0..matrix.nrows())
        .into_par_iter()
        .map(|i| matrix.row(i).iter().zip(x.iter()).map(|(a, b)| a * b).sum())
        .collect();
    Array1::from(rows)
}

/// Makes the entry of largest magnitude (lowest index on ties) positive.
fn fix_sign(mut v: ndarray::ArrayViewMut1<'_, f64>) {
    let mut pivot = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[pivot].abs() {
            pivot = i;
        }
    }
    if v[pivot] < 0.0 {
        v.mapv_inplace(|x| -x);
    }
}

/// The `count` largest eigenpairs of a symmetric matrix.
pub fn top_eigenpairs(
    matrix: ArrayView2<'_, f64>,
    count: usize,
    solver: EigenSolver,
) -> Result<Eigenpairs> {
    let n = matrix.nrows();
    if matrix.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: matrix.ncols() });
    }
    if count == 0 || count > n {
        return Err(Error::Parameter(format!("cannot take {count} eigenpairs of a {n}×{n} matrix")));
    }
    let mut pairs = match solver {
        EigenSolver::Dense => dense(matrix, count)?,
        EigenSolver::Lanczos => lanczos(matrix, count, 0)?,
        EigenSolver::Auto if n <= DENSE_LIMIT => dense(matrix, count)?,
        EigenSolver::Auto => lanczos(matrix, count, 0)?,
    };
    for col in pairs.vectors.columns_mut() {
        fix_sign(col);
    }
    Ok(pairs)
}

fn dense(matrix: ArrayView2<'_, f64>, count: usize) -> Result<Eigenpairs> {
    let n = matrix.nrows();
    let m = DMatrix::from_fn(n, n, |i, j| matrix[[i, j]]);
    let eig = SymmetricEigen::try_new(m, f64::EPSILON, 1000 * n.max(10)).ok_or_else(|| {
        Error::Numerical {
            message: "dense symmetric eigensolver did not converge".into(),
            residual: f64::NAN,
        }
    })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let mut vectors = Array2::zeros((n, count));
    let mut values = Vec::with_capacity(count);
    for (col, &src) in order.iter().take(count).enumerate() {
        values.push(eig.eigenvalues[src]);
        for i in 0..n {
            vectors[[i, col]] = eig.eigenvectors[(i, src)];
        }
    }
    Ok(Eigenpairs { values, vectors })
}

fn orthogonalize(w: &mut Array1<f64>, basis: &[Array1<f64>]) {
    // Two passes of classical Gram-Schmidt.
    for _ in 0..2 {
        for q in basis {
            let h = q.dot(w);
            w.scaled_add(-h, q);
        }
    }
}

fn random_vector<R: Rng>(n: usize, rng: &mut R) -> Array1<f64> {
    (0..n).map(|_| rng.random::<f64>() - 0.5).collect()
}

/// Block Lanczos with full reorthogonalization and Rayleigh-Ritz
/// extraction. A block of `count + 2` vectors is grown into a Krylov basis
/// until the `count` largest Ritz pairs have residuals below
/// `LANCZOS_TOL · ‖A‖_F`, or the basis spans the whole space. The block
/// lets repeated eigenvalues (one per connected component of an affinity
/// graph) all be found.
pub fn lanczos(matrix: ArrayView2<'_, f64>, count: usize, seed: u64) -> Result<Eigenpairs> {
    let n = matrix.nrows();
    let norm = frobenius_norm(matrix).max(f64::MIN_POSITIVE);
    let tol = LANCZOS_TOL * norm;
    let block = (count + 2).min(n);
    let mut rng = rng_from_seed(seed);

    let mut basis: Vec<Array1<f64>> = Vec::new();
    let mut images: Vec<Array1<f64>> = Vec::new(); // A·q for each basis vector
    let mut frontier: Vec<Array1<f64>> = (0..block).map(|_| random_vector(n, &mut rng)).collect();
    let mut last_residual = f64::INFINITY;

    loop {
        let before = basis.len();
        for mut w in frontier.drain(..) {
            if basis.len() == n {
                break;
            }
            let mut accepted = false;
            for _ in 0..4 {
                let scale = w.dot(&w).sqrt();
                orthogonalize(&mut w, &basis);
                let norm_w = w.dot(&w).sqrt();
                if norm_w > 1e-10 * scale.max(f64::MIN_POSITIVE) {
                    w /= norm_w;
                    accepted = true;
                    break;
                }
                // Direction already spanned; replace by a random one.
                w = random_vector(n, &mut rng);
            }
            if accepted {
                images.push(matvec(matrix, w.view()));
                basis.push(w);
            }
        }
        if basis.len() == before {
            return Err(Error::Numerical {
                message: "Lanczos could not extend the Krylov basis".into(),
                residual: last_residual,
            });
        }

        let m = basis.len();
        if m >= count {
            let h = DMatrix::from_fn(m, m, |i, j| 0.5 * (basis[i].dot(&images[j]) + basis[j].dot(&images[i])));
            let eig = SymmetricEigen::try_new(h, f64::EPSILON, 1000 * m.max(10)).ok_or_else(|| {
                Error::Numerical {
                    message: "Rayleigh-Ritz eigensolver did not converge".into(),
                    residual: last_residual,
                }
            })?;
            let mut order: Vec<usize> = (0..m).collect();
            order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));

            let mut values = Vec::with_capacity(count);
            let mut vectors = Array2::zeros((n, count));
            let mut worst = 0.0f64;
            for (col, &j) in order.iter().take(count).enumerate() {
                let theta = eig.eigenvalues[j];
                let mut y = Array1::<f64>::zeros(n);
                let mut ay = Array1::<f64>::zeros(n);
                for i in 0..m {
                    let s = eig.eigenvectors[(i, j)];
                    y.scaled_add(s, &basis[i]);
                    ay.scaled_add(s, &images[i]);
                }
                ay.scaled_add(-theta, &y);
                worst = worst.max(ay.dot(&ay).sqrt());
                values.push(theta);
                vectors.column_mut(col).assign(&y);
            }
            last_residual = worst;
            if worst <= tol || m == n {
                return Ok(Eigenpairs { values, vectors });
            }
        }
        frontier = images[before..].to_vec();
    }
}

/// Smallest eigenvalue, by dense decomposition.
pub fn min_eigenvalue(matrix: ArrayView2<'_, f64>) -> Result<f64> {
    let n = matrix.nrows();
    let m = DMatrix::from_fn(n, n, |i, j| matrix[[i, j]]);
    let eig = SymmetricEigen::try_new(m, f64::EPSILON, 1000 * n.max(10)).ok_or_else(|| {
        Error::Numerical {
            message: "dense symmetric eigensolver did not converge".into(),
            residual: f64::NAN,
        }
    })?;
    Ok(eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min))
}
