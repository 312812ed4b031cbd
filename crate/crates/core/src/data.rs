//! Datasets: loading, writing, synthetic generation and preprocessing.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use ndarray::{Array1, Array2, Axis};
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::rng_from_seed;

/// Where the class label lives in a CSV row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum LabelColumn {
    First,
    Last,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum DataFormat {
    Csv,
    Libsvm,
}

/// Dense n × d feature matrix with optional ground-truth labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    name: String,
    features: Array2<f64>,
    labels: Option<Vec<usize>>,
}

impl Dataset {
    /// Validates the dataset invariants: n ≥ 2, d ≥ 1, finite entries, and
    /// labels (if any) of length n covering every id in `0..c`.
    pub fn new(
        name: impl Into<String>,
        features: Array2<f64>,
        labels: Option<Vec<usize>>,
    ) -> Result<Self> {
        let (n, d) = features.dim();
        if n < 2 {
            return Err(Error::InvalidDataset(format!("need at least 2 points, got {n}")));
        }
        if d < 1 {
            return Err(Error::InvalidDataset("need at least 1 feature".into()));
        }
        if let Some((idx, _)) = features.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidDataset(format!(
                "non-finite value at row {}, column {}",
                idx / d,
                idx % d
            )));
        }
        if let Some(labels) = &labels {
            if labels.len() != n {
                return Err(Error::InvalidDataset(format!(
                    "{} labels for {n} points",
                    labels.len()
                )));
            }
            let c = labels.iter().max().map_or(0, |m| m + 1);
            let mut seen = vec![false; c];
            for &l in labels {
                seen[l] = true;
            }
            if let Some(missing) = seen.iter().position(|s| !s) {
                return Err(Error::InvalidDataset(format!(
                    "label ids are not contiguous: class {missing} is absent"
                )));
            }
        }
        Ok(Dataset {
            name: name.into(),
            features,
            labels,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn features(&self) -> &Array2<f64> {
        &self.features
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    pub fn n(&self) -> usize {
        self.features.nrows()
    }

    pub fn d(&self) -> usize {
        self.features.ncols()
    }

    /// Number of ground-truth classes, if labels are present.
    pub fn n_classes(&self) -> Option<usize> {
        self.labels
            .as_ref()
            .map(|l| l.iter().max().map_or(0, |m| m + 1))
    }

    /// Reorders points; `order[i]` is the source row of new row `i`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let features = self.features.select(Axis(0), order);
        let labels = self
            .labels
            .as_ref()
            .map(|l| order.iter().map(|&i| l[i]).collect());
        Dataset::new(self.name.clone(), features, labels)
    }
}

/// Maps arbitrary label tokens to contiguous ids in first-appearance order.
#[derive(Default)]
struct LabelMap {
    ids: HashMap<String, usize>,
}

impl LabelMap {
    fn id(&mut self, token: &str) -> usize {
        let next = self.ids.len();
        *self.ids.entry(token.to_string()).or_insert(next)
    }
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

/// Loads a comma-separated file (no quoting). Blank lines are ignored.
pub fn load_csv(path: &Path, label_column: LabelColumn, skip_header: bool) -> Result<Dataset> {
    let reader = BufReader::new(File::open(path)?);
    let mut rows: Vec<f64> = Vec::new();
    let mut labels = Vec::new();
    let mut label_map = LabelMap::default();
    let mut width: Option<usize> = None;

    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = lineno + 1;
        if skip_header && lineno == 1 {
            continue;
        }
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut fields: Vec<&str> = line.split(',').map(str::trim).collect();
        match width {
            None => width = Some(fields.len()),
            Some(w) if w != fields.len() => {
                return Err(parse_err(
                    path,
                    lineno,
                    format!("expected {w} fields, found {}", fields.len()),
                ));
            }
            _ => {}
        }
        let label = match label_column {
            LabelColumn::First => Some(fields.remove(0)),
            LabelColumn::Last => fields.pop(),
            LabelColumn::None => None,
        };
        if let Some(label) = label {
            labels.push(label_map.id(label));
        }
        for (col, cell) in fields.iter().enumerate() {
            let value: f64 = cell.parse().map_err(|_| {
                parse_err(path, lineno, format!("column {}: non-numeric value {cell:?}", col + 1))
            })?;
            rows.push(value);
        }
    }

    let n = if label_column == LabelColumn::None {
        rows.len() / width.unwrap_or(1).max(1)
    } else {
        labels.len()
    };
    let d = if n == 0 { 0 } else { rows.len() / n };
    if n < 2 {
        return Err(Error::InvalidDataset(format!(
            "{}: need at least 2 rows, found {n}",
            path.display()
        )));
    }
    let features = Array2::from_shape_vec((n, d), rows).expect("row-major buffer of n·d values");
    let labels = (label_column != LabelColumn::None).then_some(labels);
    Dataset::new(dataset_name(path), features, labels)
}

/// Loads a LIBSVM/SVMlight file: `label idx:val idx:val ...` with 1-based,
/// strictly ascending indices. Missing entries are zero.
pub fn load_libsvm(path: &Path) -> Result<Dataset> {
    let reader = BufReader::new(File::open(path)?);
    let mut sparse_rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut labels = Vec::new();
    let mut label_map = LabelMap::default();
    let mut d = 0usize;

    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = lineno + 1;
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let label = tokens.next().expect("non-empty line has a first token");
        labels.push(label_map.id(label));

        let mut row = Vec::new();
        let mut last = 0usize;
        for token in tokens {
            let (idx, val) = token
                .split_once(':')
                .ok_or_else(|| parse_err(path, lineno, format!("malformed entry {token:?}")))?;
            let idx: usize = idx
                .parse()
                .map_err(|_| parse_err(path, lineno, format!("bad index {idx:?}")))?;
            if idx == 0 {
                return Err(parse_err(path, lineno, "indices are 1-based"));
            }
            if idx <= last {
                return Err(parse_err(
                    path,
                    lineno,
                    format!("index {idx} does not ascend (previous {last})"),
                ));
            }
            let val: f64 = val
                .parse()
                .map_err(|_| parse_err(path, lineno, format!("bad value {val:?}")))?;
            last = idx;
            d = d.max(idx);
            row.push((idx - 1, val));
        }
        sparse_rows.push(row);
    }

    if sparse_rows.is_empty() {
        return Err(Error::InvalidDataset(format!("{}: no data lines", path.display())));
    }
    let mut features = Array2::zeros((sparse_rows.len(), d.max(1)));
    for (i, row) in sparse_rows.iter().enumerate() {
        for &(j, v) in row {
            features[[i, j]] = v;
        }
    }
    Dataset::new(dataset_name(path), features, Some(labels))
}

pub fn load(
    path: &Path,
    format: DataFormat,
    label_column: LabelColumn,
    skip_header: bool,
) -> Result<Dataset> {
    match format {
        DataFormat::Csv => load_csv(path, label_column, skip_header),
        DataFormat::Libsvm => load_libsvm(path),
    }
}

/// Writes features followed by the label id (if any) in the last column.
/// Values use the shortest round-trip representation.
pub fn write_csv(dataset: &Dataset, path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for (i, row) in dataset.features.rows().into_iter().enumerate() {
        let mut line = row.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",");
        if let Some(labels) = &dataset.labels {
            line.push(',');
            line.push_str(&labels[i].to_string());
        }
        writeln!(out, "{line}")?;
    }
    out.flush()?;
    Ok(())
}

fn dataset_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".into())
}

/// Isotropic Gaussian blobs. Center j sits at j·separation along the unit
/// diagonal (1, …, 1)/√d, so consecutive centers are exactly `separation`
/// apart and every single coordinate orders the clusters the same way.
/// Points are emitted cluster by cluster.
pub fn generate_blobs(
    c: usize,
    per_cluster: usize,
    d: usize,
    separation: f64,
    noise_sd: f64,
    seed: u64,
) -> Result<Dataset> {
    if c < 2 || per_cluster < 1 || d < 1 {
        return Err(Error::Parameter(format!(
            "blobs need c ≥ 2, per_cluster ≥ 1, d ≥ 1 (got {c}, {per_cluster}, {d})"
        )));
    }
    if !(separation > 0.0) || !(noise_sd >= 0.0) {
        return Err(Error::Parameter(format!(
            "blobs need separation > 0 and noise_sd ≥ 0 (got {separation}, {noise_sd})"
        )));
    }

    let step = separation / (d as f64).sqrt();
    let centers: Vec<Vec<f64>> = (0..c).map(|j| vec![j as f64 * step; d]).collect();

    let mut rng = rng_from_seed(seed);
    let noise = Normal::new(0.0, noise_sd).expect("noise_sd is finite and non-negative");
    let n = c * per_cluster;
    let mut features = Array2::zeros((n, d));
    let mut labels = Vec::with_capacity(n);
    for (k, center) in centers.iter().enumerate() {
        for p in 0..per_cluster {
            let mut row = features.row_mut(k * per_cluster + p);
            for (x, &mu) in row.iter_mut().zip(center) {
                *x = if noise_sd == 0.0 { mu } else { mu + noise.sample(&mut rng) };
            }
            labels.push(k);
        }
    }
    Dataset::new("blobs", features, Some(labels))
}

/// Centers every column and scales it to unit sample standard deviation.
/// Constant columns become all zeros.
pub fn standardize(dataset: &Dataset) -> Dataset {
    let n = dataset.n() as f64;
    let mean: Array1<f64> = dataset.features.sum_axis(Axis(0)) / n;
    let mut features = &dataset.features - &mean;
    for mut col in features.columns_mut() {
        let ss: f64 = col.iter().map(|v| v * v).sum();
        let sd = (ss / (n - 1.0)).sqrt();
        if sd > 0.0 {
            col.mapv_inplace(|v| v / sd);
        } else {
            col.fill(0.0);
        }
    }
    Dataset {
        name: dataset.name.clone(),
        features,
        labels: dataset.labels.clone(),
    }
}
