//! Ensemble of randomly resampled k-centroids quantizers.
//!
//! Each clustering unit keeps a random subset of the input features and a
//! random subset of the data points (restricted to those features) as its
//! centroids. There is no Lloyd iteration: a point is encoded by the index of
//! its nearest centroid, and the codes of all units are concatenated into a
//! sparse binary vector with exactly one active entry per unit.
//!
//! Layer 1 compares points by squared Euclidean distance. Stacked layers
//! train on the binary codes of the layer below and compare by dot product;
//! their centroids are stored sparsely as the positions of their ones.

use std::io::{BufRead, Write};

use ndarray::{Array2, ArrayView2};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::{child_seed, rng_from_seed};

/// Slack added before rounding so that decimal fractions such as 0.7 · 5
/// round the way their exact decimal value would.
const ROUNDING_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncoderConfig {
    /// Number of clustering units (V).
    pub units: usize,
    /// Fraction of points resampled as centroids (δ), k = ⌊δ·n⌋.
    pub delta: f64,
    /// Fraction of features kept per unit (a).
    pub feature_fraction: f64,
    pub layers: usize,
    pub master_seed: u64,
}

impl Default for EncoderConfig {
    fn default() -> Self {
        EncoderConfig {
            units: 400,
            delta: 0.7,
            feature_fraction: 0.5,
            layers: 1,
            master_seed: 0,
        }
    }
}

impl EncoderConfig {
    pub fn validate(&self) -> Result<()> {
        if self.units < 1 {
            return Err(Error::Config("the ensemble needs at least one unit (V ≥ 1)".into()));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::Config(format!("delta must lie in (0, 1), got {}", self.delta)));
        }
        if !(self.feature_fraction > 0.0 && self.feature_fraction <= 1.0) {
            return Err(Error::Config(format!(
                "feature fraction a must lie in (0, 1], got {}",
                self.feature_fraction
            )));
        }
        if self.layers < 1 {
            return Err(Error::Config("layer count must be at least 1".into()));
        }
        Ok(())
    }
}

/// d̂ = max(1, round_half_up(a·d)), never more than d.
pub fn feature_count(d: usize, a: f64) -> usize {
    let rounded = (a * d as f64 + 0.5 + ROUNDING_SLACK).floor() as usize;
    rounded.clamp(1, d.max(1))
}

/// k = ⌊δ·n⌋.
pub fn centroid_count(n: usize, delta: f64) -> usize {
    (delta * n as f64 + ROUNDING_SLACK).floor() as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    SquaredEuclidean,
    DotProduct,
}

impl Metric {
    pub fn for_layer(layer_index: usize) -> Metric {
        if layer_index <= 1 {
            Metric::SquaredEuclidean
        } else {
            Metric::DotProduct
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Metric::SquaredEuclidean => "squared_euclidean",
            Metric::DotProduct => "dot_product",
        }
    }

    fn parse(s: &str) -> Result<Metric> {
        match s {
            "squared_euclidean" => Ok(Metric::SquaredEuclidean),
            "dot_product" => Ok(Metric::DotProduct),
            other => Err(Error::Format(format!("unknown metric {other:?}"))),
        }
    }
}

/// Centroid storage of one unit: k rows of width d̂.
#[derive(Debug, Clone, PartialEq)]
pub enum Centroids {
    Dense(Array2<f64>),
    /// Binary rows, each given by the sorted positions of its ones.
    Binary { width: usize, ones: Vec<Vec<u32>> },
}

impl Centroids {
    pub fn len(&self) -> usize {
        match self {
            Centroids::Dense(m) => m.nrows(),
            Centroids::Binary { ones, .. } => ones.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn width(&self) -> usize {
        match self {
            Centroids::Dense(m) => m.ncols(),
            Centroids::Binary { width, .. } => *width,
        }
    }

    /// Row `i` as a dense vector.
    pub fn row_dense(&self, i: usize) -> Vec<f64> {
        match self {
            Centroids::Dense(m) => m.row(i).to_vec(),
            Centroids::Binary { width, ones } => {
                let mut row = vec![0.0; *width];
                for &p in &ones[i] {
                    row[p as usize] = 1.0;
                }
                row
            }
        }
    }

    fn squared_distance(&self, i: usize, point: &[f64]) -> f64 {
        match self {
            Centroids::Dense(m) => m
                .row(i)
                .iter()
                .zip(point)
                .map(|(w, x)| (w - x) * (w - x))
                .sum(),
            Centroids::Binary { ones, .. } => {
                let xx: f64 = point.iter().map(|x| x * x).sum();
                let wx: f64 = ones[i].iter().map(|&p| point[p as usize]).sum();
                xx - 2.0 * wx + ones[i].len() as f64
            }
        }
    }

    fn dot(&self, i: usize, point: &[f64]) -> f64 {
        match self {
            Centroids::Dense(m) => m.row(i).iter().zip(point).map(|(w, x)| w * x).sum(),
            Centroids::Binary { ones, .. } => ones[i].iter().map(|&p| point[p as usize]).sum(),
        }
    }
}

/// One k-centroids quantizer over a feature subset.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusteringUnit {
    pub feature_indices: Vec<usize>,
    pub centroids: Centroids,
    pub metric: Metric,
}

impl ClusteringUnit {
    pub fn k(&self) -> usize {
        self.centroids.len()
    }

    pub fn subset_dim(&self) -> usize {
        self.feature_indices.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleModel {
    pub units: Vec<ClusteringUnit>,
    pub input_dim: usize,
    pub layer_index: usize,
    pub config: EncoderConfig,
}

impl EnsembleModel {
    pub fn metric(&self) -> Metric {
        self.units[0].metric
    }
}

/// Concatenated one-hot codes, stored as one active index per (point, unit).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseCode {
    active: Array2<u32>,
    block_sizes: Vec<usize>,
}

impl SparseCode {
    pub fn new(active: Array2<u32>, block_sizes: Vec<usize>) -> Result<Self> {
        if active.ncols() != block_sizes.len() {
            return Err(Error::DimensionMismatch {
                expected: block_sizes.len(),
                actual: active.ncols(),
            });
        }
        for row in active.rows() {
            for (&a, &k) in row.iter().zip(&block_sizes) {
                if a as usize >= k {
                    return Err(Error::Parameter(format!("active index {a} outside block of size {k}")));
                }
            }
        }
        Ok(SparseCode { active, block_sizes })
    }

    pub fn active(&self) -> &Array2<u32> {
        &self.active
    }

    pub fn block_sizes(&self) -> &[usize] {
        &self.block_sizes
    }

    pub fn n(&self) -> usize {
        self.active.nrows()
    }

    pub fn units(&self) -> usize {
        self.block_sizes.len()
    }

    pub fn total_dim(&self) -> usize {
        self.block_sizes.iter().sum()
    }

    pub fn block_offsets(&self) -> Vec<usize> {
        let mut offsets = Vec::with_capacity(self.block_sizes.len());
        let mut acc = 0;
        for &k in &self.block_sizes {
            offsets.push(acc);
            acc += k;
        }
        offsets
    }

    /// Global positions of the ones in row `i`, ascending.
    pub fn row_positions<'a>(&'a self, i: usize, offsets: &'a [usize]) -> impl Iterator<Item = usize> + 'a {
        self.active
            .row(i)
            .into_iter()
            .zip(offsets)
            .map(|(&a, &off)| off + a as usize)
    }

    /// n × Σk dense 0/1 expansion.
    pub fn to_dense(&self) -> Array2<f64> {
        let offsets = self.block_offsets();
        let mut dense = Array2::zeros((self.n(), self.total_dim()));
        for i in 0..self.n() {
            for p in self.row_positions(i, &offsets) {
                dense[[i, p]] = 1.0;
            }
        }
        dense
    }
}

/// Training/encoding input: raw features or the codes of a lower layer.
#[derive(Debug, Clone, Copy)]
pub enum LayerInput<'a> {
    Dense(ArrayView2<'a, f64>),
    Codes(&'a SparseCode),
}

impl LayerInput<'_> {
    pub fn n(&self) -> usize {
        match self {
            LayerInput::Dense(x) => x.nrows(),
            LayerInput::Codes(c) => c.n(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            LayerInput::Dense(x) => x.ncols(),
            LayerInput::Codes(c) => c.total_dim(),
        }
    }
}

impl<'a> From<&'a Array2<f64>> for LayerInput<'a> {
    fn from(x: &'a Array2<f64>) -> Self {
        LayerInput::Dense(x.view())
    }
}

impl<'a> From<ArrayView2<'a, f64>> for LayerInput<'a> {
    fn from(x: ArrayView2<'a, f64>) -> Self {
        LayerInput::Dense(x)
    }
}

impl<'a> From<&'a SparseCode> for LayerInput<'a> {
    fn from(c: &'a SparseCode) -> Self {
        LayerInput::Codes(c)
    }
}

/// Uniformly samples d̂ distinct feature indices, returned sorted.
pub fn select_features<R: Rng + ?Sized>(d: usize, a: f64, rng: &mut R) -> Vec<usize> {
    let count = feature_count(d, a);
    let mut picked = rand::seq::index::sample(rng, d, count).into_vec();
    picked.sort_unstable();
    picked
}

/// Uniformly samples k = ⌊δ·n⌋ distinct rows, in selection order.
pub fn sample_centroid_rows<R: Rng + ?Sized>(n: usize, delta: f64, rng: &mut R) -> Result<Vec<usize>> {
    let k = centroid_count(n, delta);
    if k == 0 {
        return Err(Error::Config(format!(
            "delta = {delta} gives k = ⌊δ·n⌋ = 0 centroids for n = {n}; use delta ≥ {}",
            1.0 / n as f64
        )));
    }
    Ok(rand::seq::index::sample(rng, n, k).into_vec())
}

/// Copies k = ⌊δ·n⌋ distinct rows of `subset` as centroids.
pub fn sample_centroids<R: Rng + ?Sized>(
    subset: ArrayView2<'_, f64>,
    delta: f64,
    rng: &mut R,
) -> Result<Array2<f64>> {
    let rows = sample_centroid_rows(subset.nrows(), delta, rng)?;
    Ok(subset.select(ndarray::Axis(0), &rows))
}

fn best_index(scores: impl Iterator<Item = f64>, metric: Metric) -> usize {
    let mut best = 0;
    let mut best_score = match metric {
        Metric::SquaredEuclidean => f64::INFINITY,
        Metric::DotProduct => f64::NEG_INFINITY,
    };
    for (i, s) in scores.enumerate() {
        let better = match metric {
            Metric::SquaredEuclidean => s < best_score,
            Metric::DotProduct => s > best_score,
        };
        if better {
            best = i;
            best_score = s;
        }
    }
    best
}

/// Index of the closest centroid to `point` (already restricted to the
/// unit's features). Ties resolve to the lowest index.
pub fn assign_one_hot(point: &[f64], unit: &ClusteringUnit) -> Result<usize> {
    if point.len() != unit.subset_dim() {
        return Err(Error::DimensionMismatch {
            expected: unit.subset_dim(),
            actual: point.len(),
        });
    }
    let centroids = &unit.centroids;
    let idx = match unit.metric {
        Metric::SquaredEuclidean => best_index(
            (0..centroids.len()).map(|i| centroids.squared_distance(i, point)),
            unit.metric,
        ),
        Metric::DotProduct => {
            best_index((0..centroids.len()).map(|i| centroids.dot(i, point)), unit.metric)
        }
    };
    Ok(idx)
}

/// Per-unit lookup from global code position to position in the unit's
/// feature subset.
struct SubsetIndex {
    position: Vec<u32>,
}

impl SubsetIndex {
    const ABSENT: u32 = u32::MAX;

    fn new(total_dim: usize, features: &[usize]) -> Self {
        let mut position = vec![Self::ABSENT; total_dim];
        for (p, &g) in features.iter().enumerate() {
            position[g] = p as u32;
        }
        SubsetIndex { position }
    }

    /// Positions (within the subset) of the ones of code row `i`, ascending.
    fn restrict(&self, codes: &SparseCode, i: usize, offsets: &[usize]) -> Vec<u32> {
        codes
            .row_positions(i, offsets)
            .filter_map(|g| {
                let p = self.position[g];
                (p != Self::ABSENT).then_some(p)
            })
            .collect()
    }
}

fn train_unit(
    input: LayerInput<'_>,
    config: &EncoderConfig,
    layer_index: usize,
    unit_index: usize,
) -> Result<ClusteringUnit> {
    let mut rng = rng_from_seed(child_seed(config.master_seed, layer_index as u32, unit_index as u32));
    let features = select_features(input.dim(), config.feature_fraction, &mut rng);
    let rows = sample_centroid_rows(input.n(), config.delta, &mut rng)?;
    let centroids = match input {
        LayerInput::Dense(x) => {
            let mut c = Array2::zeros((rows.len(), features.len()));
            for (r, &src) in rows.iter().enumerate() {
                for (p, &f) in features.iter().enumerate() {
                    c[[r, p]] = x[[src, f]];
                }
            }
            Centroids::Dense(c)
        }
        LayerInput::Codes(codes) => {
            let index = SubsetIndex::new(codes.total_dim(), &features);
            let offsets = codes.block_offsets();
            Centroids::Binary {
                width: features.len(),
                ones: rows.iter().map(|&src| index.restrict(codes, src, &offsets)).collect(),
            }
        }
    };
    Ok(ClusteringUnit {
        feature_indices: features,
        centroids,
        metric: Metric::for_layer(layer_index),
    })
}

/// Trains V independent units. Unit v draws from its own stream seeded by
/// `child_seed(master_seed, layer_index, v)`, so the model does not depend
/// on the thread schedule.
pub fn train_ensemble<'a>(
    input: impl Into<LayerInput<'a>>,
    config: &EncoderConfig,
    layer_index: usize,
) -> Result<EnsembleModel> {
    let input = input.into();
    config.validate()?;
    if input.dim() < 1 {
        return Err(Error::InvalidDataset("input has no features".into()));
    }
    if centroid_count(input.n(), config.delta) == 0 {
        // Reported once instead of V times.
        sample_centroid_rows(input.n(), config.delta, &mut rng_from_seed(0))?;
    }
    let units = (0..config.units)
        .into_par_iter()
        .map(|v| train_unit(input, config, layer_index, v))
        .collect::<Result<Vec<_>>>()?;
    Ok(EnsembleModel {
        units,
        input_dim: input.dim(),
        layer_index,
        config: config.clone(),
    })
}

fn encode_unit(unit: &ClusteringUnit, input: LayerInput<'_>) -> Vec<u32> {
    match (input, &unit.centroids) {
        (LayerInput::Codes(codes), Centroids::Binary { ones, .. }) if unit.metric == Metric::DotProduct => {
            // Inverted index: subset position → centroids holding a one there.
            let mut holders: Vec<Vec<u32>> = vec![Vec::new(); unit.subset_dim()];
            for (c, positions) in ones.iter().enumerate() {
                for &p in positions {
                    holders[p as usize].push(c as u32);
                }
            }
            let index = SubsetIndex::new(codes.total_dim(), &unit.feature_indices);
            let offsets = codes.block_offsets();
            let mut scores = vec![0u32; unit.k()];
            (0..codes.n())
                .map(|i| {
                    scores.iter_mut().for_each(|s| *s = 0);
                    for p in index.restrict(codes, i, &offsets) {
                        for &c in &holders[p as usize] {
                            scores[c as usize] += 1;
                        }
                    }
                    // Lowest index among the maxima.
                    let mut best = 0;
                    for (c, &s) in scores.iter().enumerate() {
                        if s > scores[best] {
                            best = c;
                        }
                    }
                    best as u32
                })
                .collect()
        }
        (LayerInput::Dense(x), _) => {
            let mut buf = vec![0.0; unit.subset_dim()];
            x.rows()
                .into_iter()
                .map(|row| {
                    for (b, &f) in buf.iter_mut().zip(&unit.feature_indices) {
                        *b = row[f];
                    }
                    assign_one_hot(&buf, unit).expect("buffer sized to the unit") as u32
                })
                .collect()
        }
        (LayerInput::Codes(codes), _) => {
            let index = SubsetIndex::new(codes.total_dim(), &unit.feature_indices);
            let offsets = codes.block_offsets();
            let mut buf = vec![0.0; unit.subset_dim()];
            (0..codes.n())
                .map(|i| {
                    buf.iter_mut().for_each(|b| *b = 0.0);
                    for p in index.restrict(codes, i, &offsets) {
                        buf[p as usize] = 1.0;
                    }
                    assign_one_hot(&buf, unit).expect("buffer sized to the unit") as u32
                })
                .collect()
        }
    }
}

/// Encodes every point with every unit. Works on unseen points as well as
/// the training data.
pub fn encode<'a>(model: &EnsembleModel, input: impl Into<LayerInput<'a>>) -> Result<SparseCode> {
    let input = input.into();
    if input.dim() != model.input_dim {
        return Err(Error::DimensionMismatch {
            expected: model.input_dim,
            actual: input.dim(),
        });
    }
    let columns: Vec<Vec<u32>> = model
        .units
        .par_iter()
        .map(|unit| encode_unit(unit, input))
        .collect();
    let n = input.n();
    let v = model.units.len();
    let mut active = Array2::zeros((n, v));
    for (u, col) in columns.iter().enumerate() {
        for (i, &a) in col.iter().enumerate() {
            active[[i, u]] = a;
        }
    }
    Ok(SparseCode {
        active,
        block_sizes: model.units.iter().map(ClusteringUnit::k).collect(),
    })
}

/// Trains `config.layers` layers, each on the codes of the one below, and
/// returns every layer's model together with the top-layer code.
pub fn stack_layers_with_models(
    data: ArrayView2<'_, f64>,
    config: &EncoderConfig,
) -> Result<(Vec<EnsembleModel>, SparseCode)> {
    config.validate()?;
    let first = train_ensemble(data, config, 1)?;
    let mut code = encode(&first, data)?;
    let mut models = vec![first];
    for layer in 2..=config.layers {
        let model = train_ensemble(&code, config, layer)?;
        code = encode(&model, &code)?;
        models.push(model);
    }
    Ok((models, code))
}

pub fn stack_layers(data: ArrayView2<'_, f64>, config: &EncoderConfig) -> Result<SparseCode> {
    stack_layers_with_models(data, config).map(|(_, code)| code)
}

/// Encodes new points through an already trained stack.
pub fn encode_stack(models: &[EnsembleModel], data: ArrayView2<'_, f64>) -> Result<SparseCode> {
    let (first, rest) = models
        .split_first()
        .ok_or_else(|| Error::Parameter("empty model stack".into()))?;
    let mut code = encode(first, data)?;
    for model in rest {
        code = encode(model, &code)?;
    }
    Ok(code)
}

const MODEL_MAGIC: &str = "resample-kernel-model";
const MODEL_VERSION: u32 = 1;

/// Writes a model stack in the versioned text format:
///
/// ```text
/// resample-kernel-model 1
/// config <V> <delta> <a> <layers> <master_seed>
/// layers <L>
/// layer <index> <input_dim> <metric> <V>
/// unit <k> <d̂> <dense|binary>
/// f <d̂ feature indices>
/// c <d̂ values>          (dense: k lines)
/// b <positions of ones>  (binary: k lines, may be empty)
/// ```
///
/// Reals use Rust's shortest round-trip formatting, so a reload is exact.
pub fn save_models<W: Write>(models: &[EnsembleModel], mut out: W) -> Result<()> {
    let config = models
        .first()
        .map(|m| m.config.clone())
        .ok_or_else(|| Error::Parameter("empty model stack".into()))?;
    writeln!(out, "{MODEL_MAGIC} {MODEL_VERSION}")?;
    writeln!(
        out,
        "config {} {} {} {} {}",
        config.units, config.delta, config.feature_fraction, config.layers, config.master_seed
    )?;
    writeln!(out, "layers {}", models.len())?;
    for model in models {
        writeln!(
            out,
            "layer {} {} {} {}",
            model.layer_index,
            model.input_dim,
            model.metric().as_str(),
            model.units.len()
        )?;
        for unit in &model.units {
            let kind = match unit.centroids {
                Centroids::Dense(_) => "dense",
                Centroids::Binary { .. } => "binary",
            };
            writeln!(out, "unit {} {} {kind}", unit.k(), unit.subset_dim())?;
            writeln!(out, "f {}", join(unit.feature_indices.iter()))?;
            match &unit.centroids {
                Centroids::Dense(m) => {
                    for row in m.rows() {
                        writeln!(out, "c {}", join(row.iter()))?;
                    }
                }
                Centroids::Binary { ones, .. } => {
                    for row in ones {
                        writeln!(out, "b {}", join(row.iter()))?;
                    }
                }
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn join<T: ToString>(items: impl Iterator<Item = T>) -> String {
    items.map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

struct Lines<R> {
    inner: std::io::Lines<R>,
    line: usize,
}

impl<R: BufRead> Lines<R> {
    fn next_tagged(&mut self, tag: &str) -> Result<Vec<String>> {
        let line = self
            .inner
            .next()
            .ok_or_else(|| Error::Format(format!("unexpected end of file, expected {tag:?}")))??;
        self.line += 1;
        let mut tokens = line.split_whitespace().map(str::to_string);
        match tokens.next() {
            Some(t) if t == tag => Ok(tokens.collect()),
            other => Err(Error::Format(format!(
                "line {}: expected {tag:?}, found {:?}",
                self.line,
                other.unwrap_or_default()
            ))),
        }
    }
}

fn parse_tok<T: std::str::FromStr>(tok: Option<&String>, what: &str) -> Result<T> {
    tok.and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::Format(format!("bad or missing {what}")))
}

fn parse_all<T: std::str::FromStr>(tokens: &[String], what: &str) -> Result<Vec<T>> {
    tokens
        .iter()
        .map(|t| t.parse().map_err(|_| Error::Format(format!("bad {what} {t:?}"))))
        .collect()
}

/// Reads a model stack written by [`save_models`].
pub fn load_models<R: BufRead>(input: R) -> Result<Vec<EnsembleModel>> {
    let mut lines = Lines { inner: input.lines(), line: 0 };
    let header = lines.next_tagged(MODEL_MAGIC)?;
    let version: u32 = parse_tok(header.first(), "format version")?;
    if version != MODEL_VERSION {
        return Err(Error::Format(format!("unsupported model format version {version}")));
    }
    let c = lines.next_tagged("config")?;
    let config = EncoderConfig {
        units: parse_tok(c.first(), "V")?,
        delta: parse_tok(c.get(1), "delta")?,
        feature_fraction: parse_tok(c.get(2), "a")?,
        layers: parse_tok(c.get(3), "layers")?,
        master_seed: parse_tok(c.get(4), "seed")?,
    };
    let count: usize = parse_tok(lines.next_tagged("layers")?.first(), "layer count")?;
    let mut models = Vec::with_capacity(count);
    for _ in 0..count {
        let l = lines.next_tagged("layer")?;
        let layer_index: usize = parse_tok(l.first(), "layer index")?;
        let input_dim: usize = parse_tok(l.get(1), "input dim")?;
        let metric = Metric::parse(l.get(2).map(String::as_str).unwrap_or(""))?;
        let v: usize = parse_tok(l.get(3), "unit count")?;
        let mut units = Vec::with_capacity(v);
        for _ in 0..v {
            let u = lines.next_tagged("unit")?;
            let k: usize = parse_tok(u.first(), "k")?;
            let width: usize = parse_tok(u.get(1), "subset dim")?;
            let feature_indices: Vec<usize> = parse_all(&lines.next_tagged("f")?, "feature index")?;
            if feature_indices.len() != width {
                return Err(Error::Format(format!(
                    "line {}: {} feature indices, header says {width}",
                    lines.line,
                    feature_indices.len()
                )));
            }
            let centroids = match u.get(2).map(String::as_str) {
                Some("dense") => {
                    let mut m = Array2::zeros((k, width));
                    for r in 0..k {
                        let row: Vec<f64> = parse_all(&lines.next_tagged("c")?, "centroid value")?;
                        if row.len() != width {
                            return Err(Error::Format(format!("line {}: centroid width", lines.line)));
                        }
                        m.row_mut(r).assign(&ndarray::ArrayView1::from(&row));
                    }
                    Centroids::Dense(m)
                }
                Some("binary") => {
                    let ones = (0..k)
                        .map(|_| parse_all(&lines.next_tagged("b")?, "position"))
                        .collect::<Result<Vec<Vec<u32>>>>()?;
                    Centroids::Binary { width, ones }
                }
                other => return Err(Error::Format(format!("unknown centroid storage {other:?}"))),
            };
            units.push(ClusteringUnit {
                feature_indices,
                centroids,
                metric,
            });
        }
        models.push(EnsembleModel {
            units,
            input_dim,
            layer_index,
            config: config.clone(),
        });
    }
    Ok(models)
}
