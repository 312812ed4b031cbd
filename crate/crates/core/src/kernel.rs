//! Kernel matrices: the resample kernel (Gram matrix of sparse codes) and
//! the Gaussian RBF baseline.

use std::io::{Read, Write};

use ndarray::{Array2, ArrayView2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::encoder::SparseCode;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    /// Raw agreement counts, entries in {0..V}.
    Resample,
    /// Agreement counts divided by V, entries in [0, 1].
    NormalizedResample,
    Rbf,
    Linear,
}

impl KernelKind {
    fn code(self) -> u8 {
        match self {
            KernelKind::Resample => 0,
            KernelKind::NormalizedResample => 1,
            KernelKind::Rbf => 2,
            KernelKind::Linear => 3,
        }
    }

    fn from_code(code: u8) -> Result<Self> {
        Ok(match code {
            0 => KernelKind::Resample,
            1 => KernelKind::NormalizedResample,
            2 => KernelKind::Rbf,
            3 => KernelKind::Linear,
            other => return Err(Error::Format(format!("unknown kernel kind code {other}"))),
        })
    }
}

/// Symmetric n × n similarity matrix. `scale` is V for resample kernels,
/// σ for RBF kernels and 1 for the linear kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    values: Array2<f64>,
    kind: KernelKind,
    scale: f64,
}

impl KernelMatrix {
    /// Wraps an arbitrary square matrix; it must be exactly symmetric.
    pub fn from_values(values: Array2<f64>, kind: KernelKind, scale: f64) -> Result<Self> {
        let (r, c) = values.dim();
        if r != c {
            return Err(Error::DimensionMismatch { expected: r, actual: c });
        }
        for i in 0..r {
            for j in i + 1..r {
                if values[[i, j]] != values[[j, i]] {
                    return Err(Error::Parameter(format!("kernel is not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(KernelMatrix { values, kind, scale })
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn into_values(self) -> Array2<f64> {
        self.values
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    /// Copy with the diagonal set to zero.
    pub fn zero_diagonal(&self) -> KernelMatrix {
        let mut values = self.values.clone();
        values.diag_mut().fill(0.0);
        KernelMatrix { values, kind: self.kind, scale: self.scale }
    }

    /// One row per line, comma separated, shortest round-trip formatting.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        for row in self.values.rows() {
            let line = row.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",");
            writeln!(out, "{line}")?;
        }
        out.flush()?;
        Ok(())
    }

    /// Binary layout, all little endian:
    ///
    /// ```text
    /// offset  size   field
    /// 0       4      magic b"RKMX"
    /// 4       4      u32 format version (1)
    /// 8       8      u64 n
    /// 16      1      u8 kind (0 resample, 1 normalized resample, 2 rbf, 3 linear)
    /// 17      8      f64 scale
    /// 25      8·n²   f64 values, row major
    /// ```
    pub fn write_binary<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(KERNEL_MAGIC)?;
        out.write_all(&KERNEL_VERSION.to_le_bytes())?;
        out.write_all(&(self.n() as u64).to_le_bytes())?;
        out.write_all(&[self.kind.code()])?;
        out.write_all(&self.scale.to_le_bytes())?;
        for v in self.values.iter() {
            out.write_all(&v.to_le_bytes())?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_binary<R: Read>(mut input: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        input.read_exact(&mut magic)?;
        if &magic != KERNEL_MAGIC {
            return Err(Error::Format("not a kernel matrix file".into()));
        }
        let mut b4 = [0u8; 4];
        input.read_exact(&mut b4)?;
        let version = u32::from_le_bytes(b4);
        if version != KERNEL_VERSION {
            return Err(Error::Format(format!("unsupported kernel format version {version}")));
        }
        let mut b8 = [0u8; 8];
        input.read_exact(&mut b8)?;
        let n = u64::from_le_bytes(b8) as usize;
        let mut kind = [0u8; 1];
        input.read_exact(&mut kind)?;
        let kind = KernelKind::from_code(kind[0])?;
        input.read_exact(&mut b8)?;
        let scale = f64::from_le_bytes(b8);
        let mut values = Vec::with_capacity(n * n);
        for _ in 0..n * n {
            input.read_exact(&mut b8)?;
            values.push(f64::from_le_bytes(b8));
        }
        let values = Array2::from_shape_vec((n, n), values).expect("n² values");
        KernelMatrix::from_values(values, kind, scale)
    }
}

const KERNEL_MAGIC: &[u8; 4] = b"RKMX";
const KERNEL_VERSION: u32 = 1;

/// K(i, j) = number of units on which points i and j share a centroid,
/// i.e. the dot product of their one-hot codes. Dense codes are never
/// materialized.
pub fn build_resample_kernel(codes: &SparseCode) -> KernelMatrix {
    let n = codes.n();
    let active = codes.active();

    // members[v][c]: points assigned to centroid c of unit v.
    let members: Vec<Vec<Vec<u32>>> = codes
        .block_sizes()
        .par_iter()
        .enumerate()
        .map(|(v, &k)| {
            let mut buckets = vec![Vec::new(); k];
            for i in 0..n {
                buckets[active[[i, v]] as usize].push(i as u32);
            }
            buckets
        })
        .collect();

    let mut values = Array2::<f64>::zeros((n, n));
    values
        .axis_iter_mut(ndarray::Axis(0))
        .into_par_iter()
        .enumerate()
        .for_each(|(i, mut row)| {
            let mut counts = vec![0u32; n];
            for (v, buckets) in members.iter().enumerate() {
                for &j in &buckets[active[[i, v]] as usize] {
                    counts[j as usize] += 1;
                }
            }
            for (r, c) in row.iter_mut().zip(counts) {
                *r = c as f64;
            }
        });
    KernelMatrix {
        values,
        kind: KernelKind::Resample,
        scale: codes.units() as f64,
    }
}

/// Divides a resample kernel by V, giving a unit diagonal.
pub fn normalize_kernel(kernel: &KernelMatrix) -> Result<KernelMatrix> {
    if kernel.kind != KernelKind::Resample {
        return Err(Error::Parameter(format!(
            "only raw resample kernels can be normalized, got {:?}",
            kernel.kind
        )));
    }
    Ok(KernelMatrix {
        values: kernel.values.mapv(|v| v / kernel.scale),
        kind: KernelKind::NormalizedResample,
        scale: kernel.scale,
    })
}

fn squared_distance(a: ndarray::ArrayView1<'_, f64>, b: ndarray::ArrayView1<'_, f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Mean Euclidean distance over unordered pairs of distinct indices.
pub fn average_pairwise_distance(data: ArrayView2<'_, f64>) -> Result<f64> {
    let n = data.nrows();
    if n < 2 {
        return Err(Error::InvalidDataset(format!("need at least 2 points, got {n}")));
    }
    let row_sums: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            (i + 1..n)
                .map(|j| squared_distance(data.row(i), data.row(j)).sqrt())
                .sum()
        })
        .collect();
    let total: f64 = row_sums.iter().sum();
    Ok(2.0 * total / (n as f64 * (n as f64 - 1.0)))
}

/// Width of a Gaussian RBF kernel expressed as a multiple of the mean
/// pairwise distance A.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RbfParams {
    pub sigma_multiplier: f64,
    pub mean_distance: f64,
    pub sigma: f64,
}

impl RbfParams {
    /// σ = multiplier · A. Fails when all points coincide (A = 0).
    pub fn from_data(data: ArrayView2<'_, f64>, sigma_multiplier: f64) -> Result<Self> {
        let a = average_pairwise_distance(data)?;
        Self::from_mean_distance(a, sigma_multiplier)
    }

    pub fn from_mean_distance(mean_distance: f64, sigma_multiplier: f64) -> Result<Self> {
        if !(mean_distance > 0.0) {
            return Err(Error::DegenerateScale);
        }
        if !(sigma_multiplier > 0.0) {
            return Err(Error::Parameter(format!(
                "sigma multiplier must be positive, got {sigma_multiplier}"
            )));
        }
        Ok(RbfParams {
            sigma_multiplier,
            mean_distance,
            sigma: sigma_multiplier * mean_distance,
        })
    }
}

/// K(i, j) = exp(−‖xᵢ − xⱼ‖² / (2σ²)).
pub fn build_rbf_kernel(data: ArrayView2<'_, f64>, params: &RbfParams) -> Result<KernelMatrix> {
    let sigma = params.sigma;
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::Parameter(format!("sigma must be positive, got {sigma}")));
    }
    let n = data.nrows();
    let denom = 2.0 * sigma * sigma;
    let upper: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (i + 1..n)
                .map(|j| (-squared_distance(data.row(i), data.row(j)) / denom).exp())
                .collect()
        })
        .collect();
    let mut values = Array2::<f64>::eye(n);
    for (i, row) in upper.iter().enumerate() {
        for (offset, &v) in row.iter().enumerate() {
            let j = i + 1 + offset;
            values[[i, j]] = v;
            values[[j, i]] = v;
        }
    }
    Ok(KernelMatrix {
        values,
        kind: KernelKind::Rbf,
        scale: sigma,
    })
}

/// Plain inner products, for debugging.
pub fn build_linear_kernel(data: ArrayView2<'_, f64>) -> KernelMatrix {
    let n = data.nrows();
    let mut values = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in i..n {
            let v = data.row(i).dot(&data.row(j));
            values[[i, j]] = v;
            values[[j, i]] = v;
        }
    }
    KernelMatrix {
        values,
        kind: KernelKind::Linear,
        scale: 1.0,
    }
}
