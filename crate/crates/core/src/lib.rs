//! Kernel learning from an ensemble of randomly resampled k-centroids
//! quantizers, plus the spectral clustering harness used to evaluate it.
//!
//! The pipeline is
//!
//! 1. [`encoder`]: V clustering units, each with a random feature subset and
//!    ⌊δ·n⌋ data points as centroids, map every point to a sparse one-hot code.
//! 2. [`kernel`]: the Gram matrix of the codes counts, for each pair of
//!    points, the units in which they share a nearest centroid.
//! 3. [`spectral`]: normalized spectral clustering on any precomputed kernel.
//! 4. [`metrics`] and [`experiment`]: NMI, clustering accuracy, t-tests,
//!    repeated runs, parameter sweeps and baselines.
//!
//! ```
//! use resample_kernel::{data, encoder, kernel, spectral};
//!
//! let blobs = data::generate_blobs(2, 20, 2, 10.0, 0.5, 1).unwrap();
//! let config = encoder::EncoderConfig { units: 50, ..Default::default() };
//! let codes = encoder::stack_layers(blobs.features().view(), &config).unwrap();
//! let k = kernel::normalize_kernel(&kernel::build_resample_kernel(&codes)).unwrap();
//! let spec = spectral::SpectralConfig { clusters: 2, ..Default::default() };
//! let result = spectral::spectral_cluster(&k, &spec).unwrap();
//! assert_eq!(result.labels.len(), 40);
//! ```

pub mod data;
pub mod encoder;
pub mod error;
pub mod experiment;
pub mod kernel;
pub mod metrics;
pub mod seed;
pub mod spectral;

pub use error::{Error, Result};
