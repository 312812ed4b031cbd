//! Normalized spectral clustering over a precomputed kernel.
//!
//! The affinity is the kernel itself (diagonal included unless the caller
//! zeroes it). With degrees D = diag(K·1) the embedding uses the top `c`
//! eigenvectors of D^{-1/2} K D^{-1/2}, each row rescaled to unit length,
//! followed by multi-restart k-means.

pub mod eigen;
pub mod kmeans;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

pub use eigen::EigenSolver;
pub use kmeans::{kmeans, within_cluster_ss, ClusteringResult};

use crate::error::{Error, Result};
use crate::kernel::KernelMatrix;

/// Relative bound on ‖L·u − λ·u‖₂ / ‖L‖_F accepted for every eigenpair.
pub const EIGEN_RESIDUAL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SpectralConfig {
    pub clusters: usize,
    pub kmeans_restarts: usize,
    pub kmeans_max_iters: usize,
    /// Stop once the summed squared centroid displacement drops below this.
    pub kmeans_tol: f64,
    pub seed: u64,
    pub eigen_solver: EigenSolver,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        SpectralConfig {
            clusters: 2,
            kmeans_restarts: 50,
            kmeans_max_iters: 300,
            kmeans_tol: 1e-9,
            seed: 0,
            eigen_solver: EigenSolver::Auto,
        }
    }
}

impl SpectralConfig {
    pub fn validate(&self) -> Result<()> {
        if self.clusters < 2 {
            return Err(Error::Parameter(format!(
                "need at least 2 clusters, got {}",
                self.clusters
            )));
        }
        if self.kmeans_restarts < 1 || self.kmeans_max_iters < 1 {
            return Err(Error::Parameter("k-means needs at least one restart and one iteration".into()));
        }
        if !(self.kmeans_tol >= 0.0) {
            return Err(Error::Parameter("k-means tolerance must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Embedding {
    /// n × c, rows of unit length (or exactly zero).
    pub coords: Array2<f64>,
    pub eigenvalues: Vec<f64>,
    /// max_j ‖L·u_j − λ_j·u_j‖₂ before row normalization.
    pub residual: f64,
}

impl Embedding {
    /// One row per point, shortest round-trip formatting.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> Result<()> {
        for row in self.coords.rows() {
            let fields: Vec<String> = row.iter().map(f64::to_string).collect();
            writeln!(out, "{}", fields.join(","))?;
        }
        Ok(())
    }
}

/// D^{-1/2} K D^{-1/2}. Fails if any degree is not positive.
pub fn normalized_affinity(kernel: &KernelMatrix) -> Result<Array2<f64>> {
    let k = kernel.values();
    let degrees: Vec<f64> = k.rows().into_iter().map(|r| r.sum()).collect();
    let isolated: Vec<usize> = degrees
        .iter()
        .enumerate()
        .filter(|(_, &d)| !(d > 0.0))
        .map(|(i, _)| i)
        .collect();
    if !isolated.is_empty() {
        return Err(Error::DegenerateAffinity { indices: isolated });
    }
    let inv_sqrt: Vec<f64> = degrees.iter().map(|d| 1.0 / d.sqrt()).collect();
    let n = kernel.n();
    let mut l = Array2::zeros((n, n));
    for i in 0..n {
        for j in i..n {
            let v = k[[i, j]] * inv_sqrt[i] * inv_sqrt[j];
            l[[i, j]] = v;
            l[[j, i]] = v;
        }
    }
    Ok(l)
}

/// Spectral embedding of the `clusters` leading eigenvectors.
pub fn spectral_embed(kernel: &KernelMatrix, clusters: usize, solver: EigenSolver) -> Result<Embedding> {
    let n = kernel.n();
    if clusters < 1 || clusters > n {
        return Err(Error::Parameter(format!("cannot embed {n} points into {clusters} dimensions")));
    }
    let l = normalized_affinity(kernel)?;
    let pairs = eigen::top_eigenpairs(l.view(), clusters, solver)?;
    let residual = pairs.max_residual(l.view());
    let bound = EIGEN_RESIDUAL_TOL * eigen::frobenius_norm(l.view());
    if !(residual <= bound) {
        return Err(Error::Numerical {
            message: format!("eigenpair residual exceeds {bound:e}"),
            residual,
        });
    }
    let mut coords = pairs.vectors;
    for mut row in coords.rows_mut() {
        let norm = row.dot(&row).sqrt();
        if norm > 0.0 {
            row.mapv_inplace(|v| v / norm);
        }
    }
    Ok(Embedding {
        coords,
        eigenvalues: pairs.values,
        residual,
    })
}

pub fn spectral_cluster(kernel: &KernelMatrix, config: &SpectralConfig) -> Result<ClusteringResult> {
    config.validate()?;
    let embedding = spectral_embed(kernel, config.clusters, config.eigen_solver)?;
    kmeans(embedding.coords.view(), config)
}
