//! Sweep δ for the resample kernel and σ for the RBF kernel, writing the
//! sweep tables and SVG charts.
//!
//!     cargo run --release --example parameter_sweep -- data/wine.data

use std::path::PathBuf;

use resample_kernel::data::LabelColumn;
use resample_kernel::experiment::report::write_sweep_outputs;
use resample_kernel::experiment::{run_sweep, ExperimentConfig, SweepSpec};

fn main() -> resample_kernel::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "data/wine.data".into());
    let mut config = ExperimentConfig::default();
    config.dataset.path = PathBuf::from(path);
    config.dataset.label_column = LabelColumn::First;

    for (name, spec) in [("delta", SweepSpec::delta()), ("sigma", SweepSpec::sigma())] {
        let sweep = run_sweep(&config, &spec)?;
        let out = std::env::temp_dir().join(format!("resample_kernel_sweep_{name}"));
        write_sweep_outputs(&sweep, config.alpha, &out)?;
        println!("{name} sweep:");
        for p in &sweep.points {
            match p.report() {
                Some(r) => println!("  {:>2} {:<8} nmi {:.4} acc {:.4}", p.index, p.value, r.nmi_mean, r.acc_mean),
                None => println!("  {:>2} {:<8} failed", p.index, p.value),
            }
        }
        if let Some(best) = sweep.best_by(|r| r.nmi_mean) {
            println!("  best NMI at index {} (value {})", best.index, best.value);
        }
        println!("  written to {}", out.display());
    }
    Ok(())
}
