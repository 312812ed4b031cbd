//! Spectral clustering of well separated blobs with the normalized
//! resample kernel.

use resample_kernel::data::generate_blobs;
use resample_kernel::encoder::{stack_layers, EncoderConfig};
use resample_kernel::kernel::{build_resample_kernel, normalize_kernel};
use resample_kernel::metrics::{accuracy, nmi};
use resample_kernel::spectral::{spectral_cluster, spectral_embed, EigenSolver, SpectralConfig};

fn main() -> resample_kernel::Result<()> {
    let ds = generate_blobs(3, 60, 2, 10.0, 0.5, 42)?;
    let truth = ds.labels().expect("blobs are labeled");
    let codes = stack_layers(ds.features().view(), &EncoderConfig { master_seed: 1, ..Default::default() })?;
    let k = normalize_kernel(&build_resample_kernel(&codes))?;

    let embedding = spectral_embed(&k, 3, EigenSolver::Auto)?;
    println!("top eigenvalues {:?}", embedding.eigenvalues);
    println!("eigen residual {:.2e}", embedding.residual);

    let result = spectral_cluster(&k, &SpectralConfig { clusters: 3, seed: 5, ..Default::default() })?;
    println!(
        "k-means objective {:.4} from restart {} of {}",
        result.objective, result.chosen_restart, result.restarts_run
    );
    println!("NMI {:.4}  ACC {:.4}", nmi(truth, &result.labels)?, accuracy(&result.labels, truth)?);
    Ok(())
}
