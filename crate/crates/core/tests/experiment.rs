use ndarray::Array2;

use resample_kernel::data::{generate_blobs, write_csv, Dataset};
use resample_kernel::experiment::report::{read_runs_csv, write_experiment_outputs, write_sweep_outputs, SummaryRow};
use resample_kernel::experiment::{
    compare_methods, run_experiment, run_experiment_on, run_sweep_on, ExperimentConfig, Method, RunStatus,
    SweepParam, SweepSpec, Tally, Verdict,
};
use resample_kernel::metrics::{mean_sd, MetricsReport, RunMetrics};
use resample_kernel::Error;

fn quick(method: Method) -> ExperimentConfig {
    ExperimentConfig { method, units: 100, repetitions: 3, kmeans_restarts: 10, ..Default::default() }
}

#[test]
fn separated_blobs_are_solved_by_every_method() {
    let ds = generate_blobs(2, 40, 2, 10.0, 0.5, 3).unwrap();
    for method in [Method::Resample, Method::Rbf, Method::KmeansRaw, Method::KmeansPca] {
        let config = ExperimentConfig { sigma_multiplier: 0.25, ..quick(method) };
        let report = run_experiment_on(&ds, &config).unwrap().report.unwrap();
        assert_eq!((report.nmi_mean, report.acc_mean), (1.0, 1.0), "{method}");
    }
}

#[test]
fn pca_dims_clamp_to_feature_count() {
    let ds = generate_blobs(3, 20, 1, 10.0, 0.5, 1).unwrap();
    let outcome = run_experiment_on(&ds, &quick(Method::KmeansPca)).unwrap();
    assert_eq!(outcome.report.unwrap().acc_mean, 1.0);
}

#[test]
fn single_repetition_has_zero_sd() {
    let ds = generate_blobs(2, 20, 2, 10.0, 0.5, 2).unwrap();
    let config = ExperimentConfig { repetitions: 1, ..quick(Method::Resample) };
    let report = run_experiment_on(&ds, &config).unwrap().report.unwrap();
    assert!(report.is_single_run());
    assert_eq!((report.nmi_sd, report.acc_sd), (0.0, 0.0));
}

#[test]
fn one_point_sweep_equals_experiment() {
    let ds = generate_blobs(3, 20, 3, 3.0, 1.0, 4).unwrap();
    let base = quick(Method::Resample);
    let spec = SweepSpec { param: SweepParam::Delta, grid: vec![0.4] };
    let sweep = run_sweep_on(&ds, &base, &spec).unwrap();
    let single = run_experiment_on(&ds, &ExperimentConfig { delta: 0.4, ..base }).unwrap();
    assert_eq!(sweep.points[0].outcome.as_ref().unwrap(), &single);
}

#[test]
fn failing_points_do_not_stop_the_sweep() {
    let ds = generate_blobs(2, 15, 2, 10.0, 0.5, 5).unwrap();
    let base = ExperimentConfig { zero_diagonal: true, ..quick(Method::Rbf) };
    let spec = SweepSpec { param: SweepParam::SigmaMultiplier, grid: vec![1e-4, 0.5, 1e-5] };
    let sweep = run_sweep_on(&ds, &base, &spec).unwrap();
    assert!(sweep.any_failed());
    assert!(sweep.points[0].failed() && sweep.points[2].failed());
    assert!(!sweep.points[1].failed());
    let failed = sweep.points[0].outcome.as_ref().unwrap();
    assert!(failed.runs.iter().all(|r| r.status == RunStatus::Failed && r.error.is_some()));
    assert_eq!(sweep.best_by(|r| r.nmi_mean).unwrap().index, 2);

    let dir = tempfile::tempdir().unwrap();
    write_sweep_outputs(&sweep, 0.05, dir.path()).unwrap();
    let table = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(table.lines().count(), 4);
    assert!(dir.path().join("sweep_nmi.svg").exists());
}

#[test]
fn summary_is_recomputable_from_runs() {
    let ds = generate_blobs(3, 20, 4, 2.5, 1.0, 6).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let outcomes = vec![
        run_experiment_on(&ds, &ExperimentConfig { repetitions: 4, ..quick(Method::Resample) }).unwrap(),
        run_experiment_on(&ds, &ExperimentConfig { repetitions: 4, ..quick(Method::Rbf) }).unwrap(),
    ];
    write_experiment_outputs(&outcomes, 0.05, dir.path()).unwrap();

    let runs = read_runs_csv(&dir.path().join("runs.csv")).unwrap();
    let mut reader = csv::Reader::from_path(dir.path().join("summary.csv")).unwrap();
    let rows: Vec<SummaryRow> = reader.deserialize().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 2);
    for row in &rows {
        let nmis: Vec<f64> = runs.iter().filter(|r| r.method == row.method).filter_map(|r| r.nmi).collect();
        let accs: Vec<f64> = runs.iter().filter(|r| r.method == row.method).filter_map(|r| r.acc).collect();
        assert_eq!(mean_sd(&nmis), (row.nmi_mean.unwrap(), row.nmi_sd.unwrap()));
        assert_eq!(mean_sd(&accs), (row.acc_mean.unwrap(), row.acc_sd.unwrap()));
    }
    assert!(rows[0].p_value.is_none() && rows[1].p_value.is_some());
    let md = std::fs::read_to_string(dir.path().join("summary.md")).unwrap();
    assert!(md.contains('%') && md.contains("| resample |"));
}

#[test]
fn unlabeled_data_cannot_be_evaluated() {
    let ds = Dataset::new("u", Array2::from_shape_fn((10, 2), |(i, j)| (i * 3 + j) as f64), None).unwrap();
    let err = run_experiment_on(&ds, &quick(Method::KmeansRaw)).unwrap_err();
    assert!(matches!(err, Error::CannotEvaluate(_)));
}

#[test]
fn zero_centroids_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("b.csv");
    write_csv(&generate_blobs(2, 5, 2, 10.0, 0.5, 1).unwrap(), &path).unwrap();
    let mut config = ExperimentConfig { delta: 0.05, ..quick(Method::Resample) };
    config.dataset.path = path;
    assert!(matches!(run_experiment(&config), Err(Error::Config(_))));
}

#[test]
fn invalid_configs_are_rejected() {
    let ds = generate_blobs(2, 5, 2, 10.0, 0.5, 1).unwrap();
    for config in [
        ExperimentConfig { repetitions: 0, ..quick(Method::Rbf) },
        ExperimentConfig { clusters: Some(1), ..quick(Method::Rbf) },
        ExperimentConfig { sigma_multiplier: -1.0, ..quick(Method::Rbf) },
        ExperimentConfig { delta: 1.0, ..quick(Method::Resample) },
    ] {
        assert!(matches!(run_experiment_on(&ds, &config), Err(Error::Config(_) | Error::Parameter(_))));
    }
}

fn report(values: &[f64]) -> MetricsReport {
    MetricsReport::from_runs(values.iter().map(|&v| RunMetrics { nmi: v, acc: v }).collect())
}

#[test]
fn comparison_verdicts() {
    let a = report(&[0.5, 0.6, 0.7]);
    let same = compare_methods(&a, &a, 0.05).unwrap();
    assert_eq!((same.nmi.verdict, same.nmi.p_value), (Verdict::Tied, 1.0));

    let high = report(&[0.9, 0.9001, 0.8999]);
    let low = report(&[0.5, 0.5001, 0.4999]);
    assert_eq!(compare_methods(&high, &low, 0.05).unwrap().acc.verdict, Verdict::Win);
    assert_eq!(compare_methods(&low, &high, 0.05).unwrap().acc.verdict, Verdict::Lose);

    assert!(matches!(compare_methods(&report(&[0.5]), &a, 0.05), Err(Error::Parameter(_))));

    let verdicts: Vec<Verdict> = (0..12)
        .map(|i| {
            let shift = (i as f64 - 5.5) * 0.05;
            let b = report(&[0.6 + shift, 0.61 + shift, 0.59 + shift]);
            compare_methods(&a, &b, 0.05).unwrap().nmi.verdict
        })
        .collect();
    let tally = Tally::from_verdicts(verdicts);
    assert_eq!(tally.total(), 12);
    assert!(tally.win > 0 && tally.lose > 0 && tally.tied > 0);
}

#[test]
fn config_json_round_trip() {
    let config = ExperimentConfig { delta: 0.3, pca_dims: Some(4), ..quick(Method::KmeansPca) };
    let text = serde_json::to_string_pretty(&config).unwrap();
    let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
    assert_eq!(back, config);
    let partial: ExperimentConfig = serde_json::from_str(r#"{"method": "rbf", "repetitions": 4}"#).unwrap();
    assert_eq!((partial.method, partial.repetitions, partial.units), (Method::Rbf, 4, 400));
}
