use ndarray::{array, Array2, Axis};
use proptest::prelude::*;
use rand::Rng;

use resample_kernel::encoder::{stack_layers, EncoderConfig, SparseCode};
use resample_kernel::kernel::{
    average_pairwise_distance, build_rbf_kernel, build_resample_kernel, normalize_kernel, RbfParams,
};
use resample_kernel::seed::rng_from_seed;
use resample_kernel::spectral::eigen::{top_eigenpairs, EigenSolver};
use resample_kernel::Error;

fn random_data(n: usize, d: usize, seed: u64) -> Array2<f64> {
    let mut rng = rng_from_seed(seed);
    Array2::from_shape_fn((n, d), |_| rng.random_range(0.0..5.0))
}

#[test]
fn random_codes_match_dense_gram() {
    let mut rng = rng_from_seed(2);
    let block_sizes = vec![3, 1, 4, 2, 5, 2];
    let active = Array2::from_shape_fn((8, 6), |(_, u)| rng.random_range(0..block_sizes[u] as u32));
    let codes = SparseCode::new(active, block_sizes).unwrap();
    let h = codes.to_dense();
    let k = build_resample_kernel(&codes);
    assert_eq!(k.values(), &h.dot(&h.t()));
}

#[test]
fn permutation_equivariance() {
    let x = random_data(30, 4, 9);
    let config = EncoderConfig { units: 20, master_seed: 1, ..Default::default() };
    let k = build_resample_kernel(&stack_layers(x.view(), &config).unwrap());

    let mut perm: Vec<usize> = (0..30).collect();
    perm.reverse();
    perm.swap(3, 17);
    // RBF: permute the data rows.
    let params = RbfParams::from_data(x.view(), 1.0).unwrap();
    let rbf = build_rbf_kernel(x.view(), &params).unwrap();
    let xp = x.select(Axis(0), &perm);
    let rbf_p = build_rbf_kernel(xp.view(), &params).unwrap();
    for i in 0..30 {
        for j in 0..30 {
            assert_eq!(rbf_p.values()[[i, j]], rbf.values()[[perm[i], perm[j]]]);
        }
    }

    // Resample: permute the code rows.
    let codes = stack_layers(x.view(), &config).unwrap();
    let permuted = SparseCode::new(codes.active().select(Axis(0), &perm), codes.block_sizes().to_vec()).unwrap();
    let kp = build_resample_kernel(&permuted);
    for i in 0..30 {
        for j in 0..30 {
            assert_eq!(kp.values()[[i, j]], k.values()[[perm[i], perm[j]]]);
        }
    }
}

#[test]
fn normalization_scales_eigenvalues() {
    let x = random_data(25, 5, 4);
    let v = 16;
    let k = build_resample_kernel(&stack_layers(x.view(), &EncoderConfig { units: v, ..Default::default() }).unwrap());
    let kn = normalize_kernel(&k).unwrap();
    let a = top_eigenpairs(k.values().view(), 4, EigenSolver::Dense).unwrap();
    let b = top_eigenpairs(kn.values().view(), 4, EigenSolver::Dense).unwrap();
    for (x, y) in a.values.iter().zip(&b.values) {
        assert!((x / v as f64 - y).abs() < 1e-12 * x.abs().max(1.0));
    }
    assert!((0..25).all(|i| kn.values()[[i, i]] == 1.0));
}

#[test]
fn average_distance_hand_enumeration() {
    let x = array![[0.0], [1.0], [2.0]];
    assert!((average_pairwise_distance(x.view()).unwrap() - 4.0 / 3.0).abs() < 1e-15);
    let same = Array2::from_elem((4, 2), 3.0);
    assert_eq!(average_pairwise_distance(same.view()).unwrap(), 0.0);
    assert!(matches!(RbfParams::from_data(same.view(), 1.0), Err(Error::DegenerateScale)));
}

#[test]
fn rbf_matches_scalar_loop() {
    let x = array![[0.0, 1.0], [2.0, -1.0], [0.5, 0.5], [3.0, 3.0]];
    let params = RbfParams::from_data(x.view(), 0.5).unwrap();
    let k = build_rbf_kernel(x.view(), &params).unwrap();
    for i in 0..4 {
        for j in 0..4 {
            let mut d2 = 0.0;
            for f in 0..2 {
                d2 += (x[[i, f]] - x[[j, f]]) * (x[[i, f]] - x[[j, f]]);
            }
            let expected = (-d2 / (2.0 * params.sigma * params.sigma)).exp();
            assert!((k.values()[[i, j]] - expected).abs() < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rbf_bounds_and_monotonicity(seed in any::<u64>(), n in 2usize..20, d in 1usize..6, m in -4i32..4) {
        let x = random_data(n, d, seed);
        prop_assume!(average_pairwise_distance(x.view()).unwrap() > 0.0);
        let wide = build_rbf_kernel(x.view(), &RbfParams::from_data(x.view(), 2f64.powi(m + 1)).unwrap()).unwrap();
        let narrow = build_rbf_kernel(x.view(), &RbfParams::from_data(x.view(), 2f64.powi(m)).unwrap()).unwrap();
        for i in 0..n {
            prop_assert_eq!(wide.values()[[i, i]], 1.0);
            for j in 0..n {
                let (w, s) = (wide.values()[[i, j]], narrow.values()[[i, j]]);
                prop_assert!(w > 0.0 && w <= 1.0);
                let same_point = x.row(i) == x.row(j);
                if !same_point && s > 0.0 {
                    prop_assert!(s < w);
                }
            }
        }
    }
}
