//! Resample kernel against the RBF kernel over several synthetic datasets,
//! with win/tied/lose counts from Welch's t-test.

use resample_kernel::data::generate_blobs;
use resample_kernel::experiment::{compare_methods, run_experiment_on, ExperimentConfig, Method, Tally};

fn main() -> resample_kernel::Result<()> {
    let mut nmi = Vec::new();
    let mut acc = Vec::new();
    for (i, &(c, d, sep, noise)) in [(2, 2, 4.0, 1.0), (3, 5, 3.0, 1.0), (4, 3, 3.0, 0.8), (3, 8, 2.5, 1.0)]
        .iter()
        .enumerate()
    {
        let ds = generate_blobs(c, 40, d, sep, noise, i as u64)?;
        let base = ExperimentConfig { repetitions: 6, units: 100, ..Default::default() };
        let ours = run_experiment_on(&ds, &ExperimentConfig { method: Method::Resample, ..base.clone() })?;
        let rbf = run_experiment_on(&ds, &ExperimentConfig { method: Method::Rbf, sigma_multiplier: 0.5, ..base })?;
        let (Some(a), Some(b)) = (&ours.report, &rbf.report) else { continue };
        let cmp = compare_methods(a, b, 0.05)?;
        println!(
            "c={c} d={d}: NMI {:.3} vs {:.3} ({}), ACC {:.3} vs {:.3} ({})",
            cmp.nmi.mean_a, cmp.nmi.mean_b, cmp.nmi.verdict, cmp.acc.mean_a, cmp.acc.mean_b, cmp.acc.verdict
        );
        nmi.push(cmp.nmi.verdict);
        acc.push(cmp.acc.verdict);
    }
    println!("NMI {}", Tally::from_verdicts(nmi));
    println!("ACC {}", Tally::from_verdicts(acc));
    Ok(())
}
