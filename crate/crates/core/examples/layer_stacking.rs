//! Stacking encoder layers: each layer resamples centroids from the binary
//! codes of the layer below.

use resample_kernel::data::generate_blobs;
use resample_kernel::experiment::{run_experiment_on, ExperimentConfig};

fn main() -> resample_kernel::Result<()> {
    let ds = generate_blobs(3, 40, 4, 3.0, 1.0, 21)?;
    for layers in 1..=3 {
        let config = ExperimentConfig { layers, units: 150, repetitions: 5, ..Default::default() };
        let outcome = run_experiment_on(&ds, &config)?;
        let r = outcome.report.expect("runs succeed");
        println!("layers {layers}: NMI {:.4}±{:.4}  ACC {:.4}±{:.4}", r.nmi_mean, r.nmi_sd, r.acc_mean, r.acc_sd);
    }
    Ok(())
}
