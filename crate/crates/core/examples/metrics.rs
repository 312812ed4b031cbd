//! NMI, clustering accuracy, the assignment solver and Welch's t-test.

use resample_kernel::metrics::{
    accuracy, nmi, nmi_with, optimal_assignment, two_tailed_ttest, ContingencyTable, MetricsReport,
    NmiNormalization, RunMetrics,
};

fn main() -> resample_kernel::Result<()> {
    let truth = [0, 0, 0, 1, 1, 1, 2, 2, 2];
    let pred = [2, 2, 1, 0, 0, 0, 1, 1, 1];

    let table = ContingencyTable::new(&truth, &pred)?;
    println!("contingency {:?}", table.counts);
    println!("NMI geometric  {:.4}", nmi(&truth, &pred)?);
    println!("NMI arithmetic {:.4}", nmi_with(&truth, &pred, NmiNormalization::Arithmetic)?);
    println!("ACC {:.4}", accuracy(&pred, &truth)?);

    let cost = vec![vec![4.0, 1.0, 3.0], vec![2.0, 0.0, 5.0], vec![3.0, 2.0, 2.0]];
    let a = optimal_assignment(&cost);
    println!("assignment {:?} with cost {}", a.columns, a.cost);

    let ours = [0.64, 0.62, 0.65, 0.63, 0.61, 0.64, 0.66, 0.62, 0.63, 0.64];
    let theirs = [0.43, 0.44, 0.42, 0.43, 0.45, 0.41, 0.43, 0.44, 0.42, 0.43];
    let t = two_tailed_ttest(&ours, &theirs, 0.05)?;
    println!("t = {:.3}, df = {:.2}, p = {:.3e}, significant {}", t.t, t.df, t.p_value, t.significant);

    let report = MetricsReport::from_runs(ours.iter().map(|&v| RunMetrics { nmi: v, acc: v }).collect());
    println!("mean {:.4} sd {:.4} over {} runs", report.nmi_mean, report.nmi_sd, report.runs);
    Ok(())
}
