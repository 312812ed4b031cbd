use ndarray::{Array2, Axis};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use resample_kernel::data::generate_blobs;
use resample_kernel::encoder::{stack_layers, EncoderConfig};
use resample_kernel::kernel::{build_resample_kernel, normalize_kernel, KernelKind, KernelMatrix};
use resample_kernel::metrics::{accuracy, nmi};
use resample_kernel::seed::rng_from_seed;
use resample_kernel::spectral::eigen::{frobenius_norm, lanczos, top_eigenpairs, EigenSolver};
use resample_kernel::spectral::{
    kmeans, normalized_affinity, spectral_cluster, spectral_embed, within_cluster_ss, SpectralConfig,
};

fn config(c: usize) -> SpectralConfig {
    SpectralConfig { clusters: c, ..Default::default() }
}

#[test]
fn kmeans_matches_exhaustive_two_partitions() {
    for (n, seed) in [(6, 1), (9, 2), (12, 3)] {
        let ds = generate_blobs(2, n / 2, 2, 3.0, 1.0, seed).unwrap();
        let x = ds.features().view();
        let mut best = f64::INFINITY;
        for mask in 1u32..(1 << (n - 1)) {
            let labels: Vec<usize> = (0..n).map(|i| ((mask >> i) & 1) as usize).collect();
            best = best.min(within_cluster_ss(x, &labels, 2));
        }
        let r = kmeans(x, &config(2)).unwrap();
        assert!((r.objective - best).abs() < 1e-9 * best.max(1.0), "n={n}: {} vs {best}", r.objective);
    }
}

#[test]
fn kmeans_is_deterministic_and_label_invariant() {
    let ds = generate_blobs(3, 15, 3, 2.0, 1.0, 5).unwrap();
    let x = ds.features().view();
    let a = kmeans(x, &config(3)).unwrap();
    let b = kmeans(x, &config(3)).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.restart_objectives[a.chosen_restart], a.objective);
    assert!(a.restart_objectives.iter().all(|&o| o >= a.objective));
    let relabeled: Vec<usize> = a.labels.iter().map(|&l| (l + 1) % 3).collect();
    assert_eq!(within_cluster_ss(x, &relabeled, 3), within_cluster_ss(x, &a.labels, 3));
}

#[test]
fn residual_on_random_psd() {
    let mut rng = rng_from_seed(17);
    for _ in 0..20 {
        let b = Array2::from_shape_fn((10, 10), |_| rng.random_range(0.0..1.0));
        let psd = b.dot(&b.t());
        let k = KernelMatrix::from_values(psd, KernelKind::Linear, 1.0).unwrap();
        let l = normalized_affinity(&k).unwrap();
        let pairs = top_eigenpairs(l.view(), 3, EigenSolver::Dense).unwrap();
        for (j, &lambda) in pairs.values.iter().enumerate() {
            let u = pairs.vectors.column(j);
            let r = &l.dot(&u) - &(&u * lambda);
            assert!(r.dot(&r).sqrt() <= 1e-8 * frobenius_norm(l.view()));
        }
        let e = spectral_embed(&k, 3, EigenSolver::Dense).unwrap();
        for row in e.coords.rows() {
            let norm = row.dot(&row).sqrt();
            assert!((norm - 1.0).abs() < 1e-12 || norm == 0.0);
        }
    }
}

#[test]
fn lanczos_agrees_with_dense() {
    let mut rng = rng_from_seed(3);
    let n = 300;
    let g = Array2::from_shape_fn((n, 20), |_| StandardNormal.sample(&mut rng));
    let a: Array2<f64> = g.dot(&g.t());
    let dense = top_eigenpairs(a.view(), 5, EigenSolver::Dense).unwrap();
    let iter = lanczos(a.view(), 5, 9).unwrap();
    for (x, y) in dense.values.iter().zip(&iter.values) {
        assert!((x - y).abs() < 1e-8 * x.abs());
    }
    assert!(iter.max_residual(a.view()) <= 1e-8 * frobenius_norm(a.view()));
}

#[test]
fn block_diagonal_kernel_is_recovered() {
    let mut k = Array2::zeros((10, 10));
    for i in 0..10 {
        for j in 0..10 {
            if (i < 4) == (j < 4) {
                k[[i, j]] = 1.0;
            }
        }
    }
    let truth: Vec<usize> = (0..10).map(|i| (i >= 4) as usize).collect();
    let k = KernelMatrix::from_values(k, KernelKind::Linear, 1.0).unwrap();
    let r = spectral_cluster(&k, &config(2)).unwrap();
    assert_eq!(accuracy(&r.labels, &truth).unwrap(), 1.0);
}

#[test]
fn data_order_does_not_change_the_partition() {
    let ds = generate_blobs(2, 30, 2, 10.0, 0.5, 8).unwrap();
    let enc = EncoderConfig { units: 100, master_seed: 2, ..Default::default() };
    let cluster = |x: ndarray::ArrayView2<f64>| {
        let k = normalize_kernel(&build_resample_kernel(&stack_layers(x, &enc).unwrap())).unwrap();
        spectral_cluster(&k, &config(2)).unwrap().labels
    };
    let base = cluster(ds.features().view());
    assert_eq!(accuracy(&base, ds.labels().unwrap()).unwrap(), 1.0);

    let perm: Vec<usize> = (0..60).map(|i| (i * 37) % 60).collect();
    let shuffled = ds.features().select(Axis(0), &perm);
    let labels = cluster(shuffled.view());
    let unshuffled: Vec<usize> = {
        let mut out = vec![0; 60];
        for (pos, &orig) in perm.iter().enumerate() {
            out[orig] = labels[pos];
        }
        out
    };
    assert_eq!(nmi(&unshuffled, &base).unwrap(), 1.0);
}
