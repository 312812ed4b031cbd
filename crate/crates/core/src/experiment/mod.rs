//! Repeated-run experiments, parameter sweeps, baselines and method
//! comparison.
//!
//! Every repetition gets its own seed derived from the master seed and the
//! repetition index, and results are merged in index order, so the emitted
//! files are identical for any worker count.

pub mod pca;
pub mod plot;
pub mod report;

use std::fmt;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{self, DataFormat, Dataset, LabelColumn};
use crate::encoder::{stack_layers, EncoderConfig};
use crate::error::{Error, Result};
use crate::kernel::{
    average_pairwise_distance, build_rbf_kernel, build_resample_kernel, normalize_kernel, KernelMatrix,
    RbfParams,
};
use crate::metrics::{accuracy, nmi_with, two_tailed_ttest, MetricsReport, NmiNormalization, RunMetrics};
use crate::seed::{stream_seed, tag};
use crate::spectral::{
    kmeans, spectral_cluster, spectral_embed, ClusteringResult, EigenSolver, Embedding, SpectralConfig,
};

pub use report::{RunRecord, RunStatus};

/// Default δ grid: 0.1, 0.2, …, 0.9.
pub fn default_delta_grid() -> Vec<f64> {
    (1..=9).map(|i| i as f64 / 10.0).collect()
}

/// Default σ-multiplier grid: 2^-4, …, 2^4.
pub fn default_sigma_grid() -> Vec<f64> {
    (-4..=4).map(|m| 2f64.powi(m)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Spectral clustering on the resample kernel.
    Resample,
    /// Spectral clustering on a Gaussian RBF kernel.
    Rbf,
    /// k-means on the raw features.
    KmeansRaw,
    /// k-means on leading principal components.
    KmeansPca,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Resample => "resample",
            Method::Rbf => "rbf",
            Method::KmeansRaw => "kmeans_raw",
            Method::KmeansPca => "kmeans_pca",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DatasetSpec {
    pub path: PathBuf,
    pub format: DataFormat,
    pub label_column: LabelColumn,
    pub skip_header: bool,
    pub standardize: bool,
}

impl Default for DatasetSpec {
    fn default() -> Self {
        DatasetSpec {
            path: PathBuf::new(),
            format: DataFormat::Csv,
            label_column: LabelColumn::Last,
            skip_header: false,
            standardize: false,
        }
    }
}

impl DatasetSpec {
    pub fn load(&self) -> Result<Dataset> {
        let ds = data::load(&self.path, self.format, self.label_column, self.skip_header)?;
        Ok(if self.standardize { data::standardize(&ds) } else { ds })
    }
}

/// Full description of one experiment; serialized as the JSON config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub dataset: DatasetSpec,
    pub method: Method,
    pub delta: f64,
    pub feature_fraction: f64,
    pub units: usize,
    pub layers: usize,
    pub sigma_multiplier: f64,
    /// Cluster count; defaults to the number of ground-truth classes.
    pub clusters: Option<usize>,
    pub repetitions: usize,
    pub master_seed: u64,
    pub kmeans_restarts: usize,
    pub kmeans_max_iters: usize,
    pub kmeans_tol: f64,
    pub eigen_solver: EigenSolver,
    /// Divide the resample kernel by V before clustering.
    pub normalize_kernel: bool,
    pub zero_diagonal: bool,
    /// Principal components kept by the PCA baseline; defaults to c.
    pub pca_dims: Option<usize>,
    pub nmi_normalization: NmiNormalization,
    pub alpha: f64,
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let enc = EncoderConfig::default();
        let spec = SpectralConfig::default();
        ExperimentConfig {
            dataset: DatasetSpec::default(),
            method: Method::Resample,
            delta: enc.delta,
            feature_fraction: enc.feature_fraction,
            units: enc.units,
            layers: enc.layers,
            sigma_multiplier: 2f64.powi(-4),
            clusters: None,
            repetitions: 10,
            master_seed: 0,
            kmeans_restarts: spec.kmeans_restarts,
            kmeans_max_iters: spec.kmeans_max_iters,
            kmeans_tol: spec.kmeans_tol,
            eigen_solver: spec.eigen_solver,
            normalize_kernel: true,
            zero_diagonal: false,
            pca_dims: None,
            nmi_normalization: NmiNormalization::Geometric,
            alpha: 0.05,
            workers: None,
        }
    }
}

/// Named parameter presets without per-dataset tuning.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    /// Resample kernel with δ = 0.7, a = 0.5, V = 400.
    ResampleFixed,
    /// RBF kernel with σ = 2^-4 · A.
    RbfFixed,
}

impl ExperimentConfig {
    pub fn with_preset(mut self, preset: Preset) -> Self {
        match preset {
            Preset::ResampleFixed => {
                self.method = Method::Resample;
                self.delta = 0.7;
                self.feature_fraction = 0.5;
                self.units = 400;
                self.layers = 1;
            }
            Preset::RbfFixed => {
                self.method = Method::Rbf;
                self.sigma_multiplier = 2f64.powi(-4);
            }
        }
        self
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn encoder_config(&self, seed: u64) -> EncoderConfig {
        EncoderConfig {
            units: self.units,
            delta: self.delta,
            feature_fraction: self.feature_fraction,
            layers: self.layers,
            master_seed: seed,
        }
    }

    pub fn spectral_config(&self, clusters: usize, seed: u64) -> SpectralConfig {
        SpectralConfig {
            clusters,
            kmeans_restarts: self.kmeans_restarts,
            kmeans_max_iters: self.kmeans_max_iters,
            kmeans_tol: self.kmeans_tol,
            seed,
            eigen_solver: self.eigen_solver,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.repetitions < 1 {
            return Err(Error::Config("repetitions must be at least 1".into()));
        }
        if let Some(c) = self.clusters {
            if c < 2 {
                return Err(Error::Config(format!("cluster count must be at least 2, got {c}")));
            }
        }
        if matches!(self.workers, Some(0)) {
            return Err(Error::Config("worker count must be positive".into()));
        }
        match self.method {
            Method::Resample => self.encoder_config(0).validate()?,
            Method::Rbf if !(self.sigma_multiplier > 0.0) => {
                return Err(Error::Config(format!(
                    "sigma multiplier must be positive, got {}",
                    self.sigma_multiplier
                )))
            }
            _ => {}
        }
        self.spectral_config(self.clusters.unwrap_or(2), 0)
            .validate()
            .map_err(|e| Error::Config(e.to_string()))
    }

    /// Short parameter description used in reports.
    pub fn params_label(&self) -> String {
        match self.method {
            Method::Resample => format!(
                "delta={};a={};V={};layers={}",
                self.delta, self.feature_fraction, self.units, self.layers
            ),
            Method::Rbf => format!("sigma_mult={}", self.sigma_multiplier),
            Method::KmeansRaw => "restarts=".to_string() + &self.kmeans_restarts.to_string(),
            Method::KmeansPca => match self.pca_dims {
                Some(p) => format!("pca_dims={p}"),
                None => "pca_dims=c".into(),
            },
        }
    }
}

/// One experiment: per-repetition records and the aggregate over the
/// successful ones.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutcome {
    pub dataset: String,
    pub method: Method,
    pub params: String,
    pub runs: Vec<RunRecord>,
    /// `None` when every repetition failed.
    pub report: Option<MetricsReport>,
}

impl ExperimentOutcome {
    pub fn failures(&self) -> usize {
        self.runs.iter().filter(|r| r.status != RunStatus::Ok).count()
    }
}

/// Seed of repetition `r`.
pub fn repetition_seed(master_seed: u64, repetition: usize) -> u64 {
    stream_seed(master_seed, tag::REPETITION, repetition as u64)
}

/// Builds the affinity a spectral method clusters.
pub fn build_affinity(dataset: &Dataset, config: &ExperimentConfig, seed: u64) -> Result<KernelMatrix> {
    let x = dataset.features().view();
    let kernel = match config.method {
        Method::Resample => {
            let codes = stack_layers(x, &config.encoder_config(stream_seed(seed, tag::ENCODER, 0)))?;
            let k = build_resample_kernel(&codes);
            if config.normalize_kernel {
                normalize_kernel(&k)?
            } else {
                k
            }
        }
        Method::Rbf => {
            let a = average_pairwise_distance(x)?;
            build_rbf_kernel(x, &RbfParams::from_mean_distance(a, config.sigma_multiplier)?)?
        }
        Method::KmeansRaw | Method::KmeansPca => {
            return Err(Error::Config(format!("{} does not use a kernel", config.method)))
        }
    };
    Ok(if config.zero_diagonal { kernel.zero_diagonal() } else { kernel })
}

/// Clusters the dataset once with the configured method.
pub fn cluster_once(dataset: &Dataset, config: &ExperimentConfig, clusters: usize, seed: u64) -> Result<ClusteringResult> {
    let spectral = config.spectral_config(clusters, stream_seed(seed, tag::SPECTRAL, 0));
    match config.method {
        Method::Resample | Method::Rbf => spectral_cluster(&build_affinity(dataset, config, seed)?, &spectral),
        Method::KmeansRaw => kmeans(dataset.features().view(), &spectral),
        Method::KmeansPca => {
            let dims = config.pca_dims.unwrap_or(clusters);
            let scores = pca::principal_scores(dataset.features().view(), dims)?;
            kmeans(scores.view(), &spectral)
        }
    }
}

/// Spectral embedding used by [`cluster_once`] for the kernel methods.
pub fn embed_once(dataset: &Dataset, config: &ExperimentConfig, clusters: usize, seed: u64) -> Result<Embedding> {
    spectral_embed(&build_affinity(dataset, config, seed)?, clusters, config.eigen_solver)
}

fn cluster_count(dataset: &Dataset, config: &ExperimentConfig) -> Result<usize> {
    let truth_classes = dataset.n_classes().ok_or_else(|| {
        Error::CannotEvaluate(format!("dataset {:?} has no ground-truth labels", dataset.name()))
    })?;
    let c = config.clusters.unwrap_or(truth_classes);
    if c < 2 {
        return Err(Error::Config(format!("cluster count must be at least 2, got {c}")));
    }
    Ok(c)
}

fn in_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| Error::Config(format!("cannot start {w} workers: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn run_repetitions(dataset: &Dataset, config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    config.validate()?;
    let clusters = cluster_count(dataset, config)?;
    let truth = dataset.labels().expect("checked by cluster_count");
    if config.method == Method::Resample && crate::encoder::centroid_count(dataset.n(), config.delta) == 0 {
        return Err(Error::Config(format!(
            "delta = {} gives no centroids for n = {}",
            config.delta,
            dataset.n()
        )));
    }

    // Numerical failures are recorded per repetition; anything else is a
    // configuration or data problem and aborts the experiment.
    let runs: Vec<RunRecord> = (0..config.repetitions)
        .into_par_iter()
        .map(|r| {
            let seed = repetition_seed(config.master_seed, r);
            let outcome = cluster_once(dataset, config, clusters, seed).and_then(|res| {
                let nmi = nmi_with(truth, &res.labels, config.nmi_normalization)?;
                let acc = accuracy(&res.labels, truth)?;
                Ok((res, nmi, acc))
            });
            match outcome {
                Err(e) if !e.is_numerical() => Err(e),
                outcome => Ok(RunRecord::new(dataset.name(), config, r, seed, outcome)),
            }
        })
        .collect::<Result<_>>()?;

    let ok: Vec<RunMetrics> = runs.iter().filter_map(RunRecord::metrics).collect();
    Ok(ExperimentOutcome {
        dataset: dataset.name().to_string(),
        method: config.method,
        params: config.params_label(),
        report: (!ok.is_empty()).then(|| MetricsReport::from_runs(ok)),
        runs,
    })
}

/// Runs `config.repetitions` independent repetitions on an in-memory
/// dataset.
pub fn run_experiment_on(dataset: &Dataset, config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    in_pool(config.workers, || run_repetitions(dataset, config))?
}

/// Loads the configured dataset and runs the experiment.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let dataset = config.dataset.load()?;
    run_experiment_on(&dataset, config)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    Delta,
    SigmaMultiplier,
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepParam::Delta => "delta",
            SweepParam::SigmaMultiplier => "sigma_multiplier",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub grid: Vec<f64>,
}

impl SweepSpec {
    pub fn delta() -> Self {
        SweepSpec { param: SweepParam::Delta, grid: default_delta_grid() }
    }

    pub fn sigma() -> Self {
        SweepSpec { param: SweepParam::SigmaMultiplier, grid: default_sigma_grid() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::Config("sweep grid is empty".into()));
        }
        for &v in &self.grid {
            let ok = match self.param {
                SweepParam::Delta => v > 0.0 && v < 1.0,
                SweepParam::SigmaMultiplier => v > 0.0 && v.is_finite(),
            };
            if !ok {
                return Err(Error::Config(format!("invalid {} grid value {v}", self.param)));
            }
        }
        Ok(())
    }

    fn method(&self) -> Method {
        match self.param {
            SweepParam::Delta => Method::Resample,
            SweepParam::SigmaMultiplier => Method::Rbf,
        }
    }

    /// Config of grid point `index`.
    pub fn point_config(&self, base: &ExperimentConfig, index: usize) -> ExperimentConfig {
        let mut config = base.clone();
        config.method = self.method();
        match self.param {
            SweepParam::Delta => config.delta = self.grid[index],
            SweepParam::SigmaMultiplier => config.sigma_multiplier = self.grid[index],
        }
        config
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    /// 1-based, as on the x axis of the sweep plot.
    pub index: usize,
    pub value: f64,
    /// `Err` holds the message of a point that could not run at all.
    pub outcome: std::result::Result<ExperimentOutcome, String>,
}

impl SweepPoint {
    pub fn report(&self) -> Option<&MetricsReport> {
        self.outcome.as_ref().ok().and_then(|o| o.report.as_ref())
    }

    pub fn failed(&self) -> bool {
        self.report().is_none()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub dataset: String,
    pub spec: SweepSpec,
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    pub fn any_failed(&self) -> bool {
        self.points.iter().any(SweepPoint::failed)
    }

    /// Grid point with the highest mean of the chosen metric.
    pub fn best_by(&self, metric: impl Fn(&MetricsReport) -> f64) -> Option<&SweepPoint> {
        let mut best: Option<(&SweepPoint, f64)> = None;
        for p in &self.points {
            if let Some(r) = p.report() {
                let v = metric(r);
                if best.is_none_or(|(_, b)| v > b) {
                    best = Some((p, v));
                }
            }
        }
        best.map(|(p, _)| p)
    }
}

/// Runs one experiment per grid value. A failing point never stops the
/// others.
pub fn run_sweep_on(dataset: &Dataset, base: &ExperimentConfig, spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let points = in_pool(base.workers, || {
        (0..spec.grid.len())
            .into_par_iter()
            .map(|i| {
                let config = spec.point_config(base, i);
                SweepPoint {
                    index: i + 1,
                    value: spec.grid[i],
                    outcome: run_repetitions(dataset, &config).map_err(|e| e.to_string()),
                }
            })
            .collect::<Vec<_>>()
    })?;
    Ok(SweepResult {
        dataset: dataset.name().to_string(),
        spec: spec.clone(),
        points,
    })
}

pub fn run_sweep(base: &ExperimentConfig, spec: &SweepSpec) -> Result<SweepResult> {
    let dataset = base.dataset.load()?;
    run_sweep_on(&dataset, base, spec)
}

/// k-means on raw features and on principal components.
pub fn run_baselines_on(dataset: &Dataset, config: &ExperimentConfig) -> Result<Vec<ExperimentOutcome>> {
    [Method::KmeansRaw, Method::KmeansPca]
        .into_iter()
        .map(|method| {
            let c = ExperimentConfig { method, ..config.clone() };
            run_experiment_on(dataset, &c)
        })
        .collect()
}

pub fn run_baselines(config: &ExperimentConfig) -> Result<Vec<ExperimentOutcome>> {
    let dataset = config.dataset.load()?;
    run_baselines_on(&dataset, config)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Win,
    Tied,
    Lose,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Win => "win",
            Verdict::Tied => "tied",
            Verdict::Lose => "lose",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricComparison {
    pub mean_a: f64,
    pub mean_b: f64,
    pub p_value: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub nmi: MetricComparison,
    pub acc: MetricComparison,
}

fn compare_metric(a: &[f64], b: &[f64], alpha: f64) -> Result<MetricComparison> {
    let test = two_tailed_ttest(a, b, alpha)?;
    let mean_a = a.iter().sum::<f64>() / a.len() as f64;
    let mean_b = b.iter().sum::<f64>() / b.len() as f64;
    let verdict = if test.significant && mean_a > mean_b {
        Verdict::Win
    } else if test.significant && mean_a < mean_b {
        Verdict::Lose
    } else {
        Verdict::Tied
    };
    Ok(MetricComparison { mean_a, mean_b, p_value: test.p_value, verdict })
}

/// Win/tied/lose of `a` against `b` on each metric under Welch's t-test.
pub fn compare_methods(a: &MetricsReport, b: &MetricsReport, alpha: f64) -> Result<Comparison> {
    if a.runs < 2 || b.runs < 2 {
        return Err(Error::Parameter(format!(
            "comparison needs at least 2 runs per method, got {} and {}",
            a.runs, b.runs
        )));
    }
    Ok(Comparison {
        nmi: compare_metric(&a.nmi_values(), &b.nmi_values(), alpha)?,
        acc: compare_metric(&a.acc_values(), &b.acc_values(), alpha)?,
    })
}

/// Summary counts over several comparisons, e.g. one per dataset.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Tally {
    pub win: usize,
    pub tied: usize,
    pub lose: usize,
}

impl Tally {
    pub fn from_verdicts(verdicts: impl IntoIterator<Item = Verdict>) -> Self {
        let mut t = Tally::default();
        for v in verdicts {
            match v {
                Verdict::Win => t.win += 1,
                Verdict::Tied => t.tied += 1,
                Verdict::Lose => t.lose += 1,
            }
        }
        t
    }

    pub fn total(&self) -> usize {
        self.win + self.tied + self.lose
    }
}

impl fmt::Display for Tally {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "win:{}; tied:{}; lose:{}", self.win, self.tied, self.lose)
    }
}

