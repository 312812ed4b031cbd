//! Ten repetitions of the fixed resample preset on a labeled file with the class in the first column.
//!
//!     cargo run --release --example wine_experiment -- data/wine.data

use std::path::PathBuf;

use resample_kernel::data::LabelColumn;
use resample_kernel::experiment::report::{summary_markdown, write_experiment_outputs};
use resample_kernel::experiment::{run_experiment, ExperimentConfig, Preset};

fn main() -> resample_kernel::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "data/wine.data".into());
    let mut config = ExperimentConfig::default().with_preset(Preset::ResampleFixed);
    config.dataset.path = PathBuf::from(path);
    config.dataset.label_column = LabelColumn::First;

    let outcome = run_experiment(&config)?;
    for run in &outcome.runs {
        println!("rep {:>2}: nmi {:?} acc {:?}", run.repetition, run.nmi, run.acc);
    }
    let out = std::env::temp_dir().join("resample_kernel_wine");
    let rows = write_experiment_outputs(&[outcome], config.alpha, &out)?;
    print!("{}", summary_markdown(&rows));
    println!("outputs in {}", out.display());
    Ok(())
}
