mod common;

use proptest::prelude::*;

use common::{all_label_vectors, assignment_oracle, first_appearance_vectors};
use resample_kernel::metrics::{
    accuracy, mean_sd, nmi, nmi_with, optimal_assignment, two_tailed_ttest, MetricsReport, NmiNormalization,
    RunMetrics,
};

fn relabel(labels: &[usize], perm: &[usize]) -> Vec<usize> {
    labels.iter().map(|&l| perm[l]).collect()
}

proptest! {
    #[test]
    fn nmi_is_symmetric(a in prop::collection::vec(0usize..4, 1..30), seed in any::<u64>()) {
        let b: Vec<usize> = a.iter().enumerate().map(|(i, &x)| (x + (seed as usize >> (i % 60)) % 3) % 5).collect();
        prop_assert_eq!(nmi(&a, &b).unwrap(), nmi(&b, &a).unwrap());
        let ar = nmi_with(&a, &b, NmiNormalization::Arithmetic).unwrap();
        prop_assert_eq!(ar, nmi_with(&b, &a, NmiNormalization::Arithmetic).unwrap());
    }

    #[test]
    fn relabeling_changes_nothing(
        pairs in prop::collection::vec((0usize..4, 0usize..4), 1..30),
        perm in Just(vec![0usize, 1, 2, 3]).prop_shuffle(),
    ) {
        let (a, b): (Vec<usize>, Vec<usize>) = pairs.into_iter().unzip();
        let a2 = relabel(&a, &perm);
        let b2 = relabel(&b, &perm);
        let base_nmi = nmi(&a, &b).unwrap();
        let base_acc = accuracy(&a, &b).unwrap();
        for (x, y) in [(&a2, &b), (&a, &b2), (&a2, &b2)] {
            prop_assert!((nmi(x, y).unwrap() - base_nmi).abs() < 1e-12);
            prop_assert_eq!(accuracy(x, y).unwrap(), base_acc);
        }
        prop_assert!((0.0..=1.0).contains(&base_nmi));
        prop_assert!((0.0..=1.0).contains(&base_acc));
    }

    #[test]
    fn report_is_recomputable(values in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 1..12)) {
        let runs: Vec<RunMetrics> = values.iter().map(|&(nmi, acc)| RunMetrics { nmi, acc }).collect();
        let report = MetricsReport::from_runs(runs);
        let (m, s) = mean_sd(&report.nmi_values());
        prop_assert_eq!((m, s), (report.nmi_mean, report.nmi_sd));
        let (m, s) = mean_sd(&report.acc_values());
        prop_assert_eq!((m, s), (report.acc_mean, report.acc_sd));
    }
}

#[test]
fn accuracy_floor_for_balanced_truth() {
    for n in [3, 6] {
        for c in [2, 3] {
            if n % c != 0 {
                continue;
            }
            for truth in first_appearance_vectors(n, c) {
                let mut sizes = vec![0; c];
                truth.iter().for_each(|&l| sizes[l] += 1);
                if sizes.iter().any(|&s| s != n / c) {
                    continue;
                }
                for pred in all_label_vectors(n, c) {
                    assert!(accuracy(&pred, &truth).unwrap() >= 1.0 / c as f64 - 1e-15);
                }
            }
        }
    }
}

#[test]
fn five_by_five_integer_assignment() {
    let cost: Vec<Vec<f64>> = (0..5)
        .map(|i| (0..5).map(|j| ((i * 7 + j * 13 + i * j * 3) % 11) as f64).collect())
        .collect();
    assert_eq!(optimal_assignment(&cost).cost, assignment_oracle(&cost));
}

#[test]
fn all_equal_costs_pick_identity() {
    let cost = vec![vec![2.0; 4]; 4];
    let a = optimal_assignment(&cost);
    assert_eq!(a.columns, vec![0, 1, 2, 3]);
    assert_eq!(a.cost, 8.0);
}

/// Two-tailed p-value from the t density by Simpson's rule, after the
/// substitution x = √ν·tan θ that maps the tail onto a finite interval.
fn p_value_by_quadrature(t: f64, df: f64) -> f64 {
    let f = |theta: f64| theta.cos().powf(df - 1.0);
    let simpson = |a: f64, b: f64| {
        let steps = 200_000;
        let h = (b - a) / steps as f64;
        let mut s = f(a) + f(b);
        for i in 1..steps {
            s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    };
    let half_pi = std::f64::consts::FRAC_PI_2;
    let theta_t = (t.abs() / df.sqrt()).atan();
    simpson(theta_t, half_pi) / simpson(0.0, half_pi)
}

fn welch_reference(a: &[f64], b: &[f64]) -> (f64, f64) {
    let stats = |x: &[f64]| {
        let n = x.len() as f64;
        let m = x.iter().sum::<f64>() / n;
        (m, x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0), n)
    };
    let (ma, va, na) = stats(a);
    let (mb, vb, nb) = stats(b);
    let se2 = va / na + vb / nb;
    let t = (ma - mb) / se2.sqrt();
    let df = se2 * se2 / ((va / na).powi(2) / (na - 1.0) + (vb / nb).powi(2) / (nb - 1.0));
    (t, df)
}

#[test]
fn ttest_matches_numerical_integration() {
    let a = [0.612, 0.598, 0.639, 0.598, 0.617, 0.638, 0.617, 0.618, 0.601, 0.627];
    let b = [0.601, 0.587, 0.605, 0.622, 0.579, 0.611, 0.596, 0.590, 0.615, 0.603];
    let (t_ref, df_ref) = welch_reference(&a, &b);
    let test = two_tailed_ttest(&a, &b, 0.05).unwrap();
    assert!((test.t - t_ref).abs() < 1e-12);
    assert!((test.df - df_ref).abs() < 1e-9);
    let p = p_value_by_quadrature(t_ref, df_ref);
    assert!((test.p_value - p).abs() < 1e-6, "{} vs {p}", test.p_value);

    let c = [0.43, 0.41, 0.47, 0.40, 0.45, 0.44, 0.39, 0.46, 0.42, 0.48];
    let test = two_tailed_ttest(&a, &c, 0.05).unwrap();
    let (t, df) = welch_reference(&a, &c);
    assert!((test.p_value - p_value_by_quadrature(t, df)).abs() < 1e-6);
}

#[test]
fn ttest_degenerate_and_dominant_cases() {
    let same = [0.5, 0.6, 0.7];
    let r = two_tailed_ttest(&same, &same, 0.05).unwrap();
    assert_eq!(r.p_value, 1.0);
    assert!(!r.significant);

    let r = two_tailed_ttest(&[0.0, 0.0, 0.0001, -0.0001], &[10.0, 10.0, 10.0001, 9.9999], 0.05).unwrap();
    assert!(r.significant);

    assert_eq!(two_tailed_ttest(&[1.0, 1.0], &[1.0, 1.0], 0.05).unwrap().p_value, 1.0);
    assert_eq!(two_tailed_ttest(&[1.0, 1.0], &[2.0, 2.0], 0.05).unwrap().p_value, 0.0);
    assert!(two_tailed_ttest(&[1.0], &[2.0, 3.0], 0.05).is_err());
}
