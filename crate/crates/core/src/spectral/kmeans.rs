//! Lloyd's algorithm with k-means++ seeding and independent restarts.

use ndarray::{Array2, ArrayView1, ArrayView2};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::SpectralConfig;
use crate::error::{Error, Result};
use crate::seed::{rng_from_seed, stream_seed, tag};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusteringResult {
    pub labels: Vec<usize>,
    /// Within-cluster sum of squares of the winning restart.
    pub objective: f64,
    pub restarts_run: usize,
    pub chosen_restart: usize,
    pub restart_objectives: Vec<f64>,
}

impl ClusteringResult {
    pub fn n_clusters(&self) -> usize {
        self.labels.iter().max().map_or(0, |m| m + 1)
    }
}

fn sq_dist(a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Within-cluster sum of squares of a partition, each cluster measured
/// against its own mean.
pub fn within_cluster_ss(points: ArrayView2<'_, f64>, labels: &[usize], k: usize) -> f64 {
    let centroids = means(points, labels, k);
    points
        .rows()
        .into_iter()
        .zip(labels)
        .map(|(p, &l)| sq_dist(p, centroids.row(l)))
        .sum()
}

fn means(points: ArrayView2<'_, f64>, labels: &[usize], k: usize) -> Array2<f64> {
    let mut sums = Array2::<f64>::zeros((k, points.ncols()));
    let mut counts = vec![0usize; k];
    for (p, &l) in points.rows().into_iter().zip(labels) {
        sums.row_mut(l).scaled_add(1.0, &p);
        counts[l] += 1;
    }
    for (mut row, &c) in sums.rows_mut().into_iter().zip(&counts) {
        if c > 0 {
            row.mapv_inplace(|v| v / c as f64);
        }
    }
    sums
}

fn kmeans_plus_plus<R: Rng>(points: ArrayView2<'_, f64>, k: usize, rng: &mut R) -> Array2<f64> {
    let n = points.nrows();
    let mut centroids = Array2::zeros((k, points.ncols()));
    let first = rng.random_range(0..n);
    centroids.row_mut(0).assign(&points.row(first));
    let mut nearest: Vec<f64> = points.rows().into_iter().map(|p| sq_dist(p, points.row(first))).collect();
    for c in 1..k {
        let total: f64 = nearest.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut chosen = n - 1;
            for (i, &d) in nearest.iter().enumerate() {
                if target < d {
                    chosen = i;
                    break;
                }
                target -= d;
            }
            chosen
        } else {
            rng.random_range(0..n)
        };
        centroids.row_mut(c).assign(&points.row(pick));
        for (d, p) in nearest.iter_mut().zip(points.rows()) {
            *d = d.min(sq_dist(p, points.row(pick)));
        }
    }
    centroids
}

/// Nearest centroid of every point, ties to the lowest index, with the
/// squared distance to it.
fn assign(points: ArrayView2<'_, f64>, centroids: &Array2<f64>) -> (Vec<usize>, Vec<f64>) {
    points
        .rows()
        .into_iter()
        .map(|p| {
            let mut best = (0, f64::INFINITY);
            for (c, w) in centroids.rows().into_iter().enumerate() {
                let d = sq_dist(p, w);
                if d < best.1 {
                    best = (c, d);
                }
            }
            best
        })
        .unzip()
}

/// Gives every empty cluster the point farthest from its centroid, taken
/// from a cluster that keeps at least one member.
fn repair_empty(labels: &mut [usize], dists: &mut [f64], k: usize) {
    let mut counts = vec![0usize; k];
    for &l in labels.iter() {
        counts[l] += 1;
    }
    for empty in 0..k {
        if counts[empty] > 0 {
            continue;
        }
        let mut donor: Option<usize> = None;
        for i in 0..labels.len() {
            if counts[labels[i]] > 1 && donor.is_none_or(|j| dists[i] > dists[j]) {
                donor = Some(i);
            }
        }
        let i = donor.expect("n ≥ k leaves a cluster with a spare point");
        counts[labels[i]] -= 1;
        counts[empty] += 1;
        labels[i] = empty;
        dists[i] = 0.0;
    }
}

fn single_run(points: ArrayView2<'_, f64>, config: &SpectralConfig, seed: u64) -> (Vec<usize>, f64) {
    let k = config.clusters;
    let mut rng = rng_from_seed(seed);
    let mut centroids = kmeans_plus_plus(points, k, &mut rng);
    let mut labels = Vec::new();
    for _ in 0..config.kmeans_max_iters {
        let (mut l, mut d) = assign(points, &centroids);
        repair_empty(&mut l, &mut d, k);
        let updated = means(points, &l, k);
        let shift: f64 = updated
            .rows()
            .into_iter()
            .zip(centroids.rows())
            .map(|(a, b)| sq_dist(a, b))
            .sum();
        centroids = updated;
        labels = l;
        if shift < config.kmeans_tol {
            break;
        }
    }
    let objective = within_cluster_ss(points, &labels, k);
    (labels, objective)
}

/// Runs `kmeans_restarts` independent seeded runs and keeps the one with
/// the lowest within-cluster sum of squares (lowest restart index on ties).
/// The seed of restart r depends only on (seed, r), so adding restarts can
/// never make the selected objective worse.
pub fn kmeans(points: ArrayView2<'_, f64>, config: &SpectralConfig) -> Result<ClusteringResult> {
    config.validate()?;
    let n = points.nrows();
    if n < config.clusters {
        return Err(Error::Parameter(format!(
            "cannot form {} clusters from {n} points",
            config.clusters
        )));
    }
    let runs: Vec<(Vec<usize>, f64)> = (0..config.kmeans_restarts)
        .into_par_iter()
        .map(|r| single_run(points, config, stream_seed(config.seed, tag::KMEANS_RESTART, r as u64)))
        .collect();
    let mut chosen = 0;
    for (r, run) in runs.iter().enumerate() {
        if run.1 < runs[chosen].1 {
            chosen = r;
        }
    }
    let restart_objectives = runs.iter().map(|r| r.1).collect();
    let (labels, objective) = runs.into_iter().nth(chosen).expect("at least one restart");
    Ok(ClusteringResult {
        labels,
        objective,
        restarts_run: config.kmeans_restarts,
        chosen_restart: chosen,
        restart_objectives,
    })
}
