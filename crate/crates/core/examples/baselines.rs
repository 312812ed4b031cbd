//! k-means on raw features and on the leading principal components.

use resample_kernel::data::generate_blobs;
use resample_kernel::experiment::report::{summarize, summary_markdown};
use resample_kernel::experiment::{run_baselines_on, ExperimentConfig};

fn main() -> resample_kernel::Result<()> {
    let ds = generate_blobs(4, 40, 6, 5.0, 1.0, 9)?;
    let config = ExperimentConfig { repetitions: 5, ..Default::default() };
    let outcomes = run_baselines_on(&ds, &config)?;
    print!("{}", summary_markdown(&summarize(&outcomes, config.alpha)));

    let narrow = ExperimentConfig { pca_dims: Some(1), ..config };
    let outcomes = run_baselines_on(&ds, &narrow)?;
    println!("\nwith a single principal component:");
    print!("{}", summary_markdown(&summarize(&outcomes[1..], narrow.alpha)));
    Ok(())
}
