//! External clustering metrics and the significance test used to compare
//! methods.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

/// Counts of (true class, predicted cluster) pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    pub counts: Vec<Vec<usize>>,
    pub n: usize,
}

fn dense_ids(labels: &[usize]) -> (Vec<usize>, usize) {
    let mut ids = BTreeMap::new();
    for &l in labels {
        let next = ids.len();
        ids.entry(l).or_insert(next);
    }
    // Renumber in sorted order so the table layout does not depend on the
    // order in which labels first appear.
    for (rank, v) in ids.values_mut().enumerate() {
        *v = rank;
    }
    (labels.iter().map(|l| ids[l]).collect(), ids.len())
}

impl ContingencyTable {
    pub fn new(truth: &[usize], pred: &[usize]) -> Result<Self> {
        if truth.len() != pred.len() {
            return Err(Error::DimensionMismatch {
                expected: truth.len(),
                actual: pred.len(),
            });
        }
        let (t, rows) = dense_ids(truth);
        let (p, cols) = dense_ids(pred);
        let mut counts = vec![vec![0; cols]; rows];
        for (&a, &b) in t.iter().zip(&p) {
            counts[a][b] += 1;
        }
        Ok(ContingencyTable { counts, n: truth.len() })
    }

    pub fn row_sums(&self) -> Vec<usize> {
        self.counts.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<usize> {
        let cols = self.counts.first().map_or(0, Vec::len);
        (0..cols).map(|j| self.counts.iter().map(|r| r[j]).sum()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum NmiNormalization {
    /// I / sqrt(H_a · H_b)
    #[default]
    Geometric,
    /// I / ((H_a + H_b) / 2)
    Arithmetic,
}

fn entropy(marginal: &[usize], n: f64) -> f64 {
    marginal
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// Normalized mutual information with natural logarithms. Two trivial
/// partitions score 1; exactly one trivial partition scores 0.
pub fn nmi(labels_a: &[usize], labels_b: &[usize]) -> Result<f64> {
    nmi_with(labels_a, labels_b, NmiNormalization::Geometric)
}

pub fn nmi_with(labels_a: &[usize], labels_b: &[usize], norm: NmiNormalization) -> Result<f64> {
    let table = ContingencyTable::new(labels_a, labels_b)?;
    if table.n == 0 {
        return Err(Error::Parameter("NMI of empty labelings".into()));
    }
    let n = table.n as f64;
    let rows = table.row_sums();
    let cols = table.col_sums();
    let ha = entropy(&rows, n);
    let hb = entropy(&cols, n);
    if ha == 0.0 && hb == 0.0 {
        return Ok(1.0);
    }
    if ha == 0.0 || hb == 0.0 {
        return Ok(0.0);
    }
    // Summed in sorted order so that swapping the arguments, which only
    // transposes the table, gives a bit-identical result.
    let mut terms = Vec::new();
    for (i, row) in table.counts.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            if c > 0 {
                let c = c as f64;
                terms.push(c / n * (n * c / (rows[i] as f64 * cols[j] as f64)).ln());
            }
        }
    }
    terms.sort_by(f64::total_cmp);
    let mi: f64 = terms.iter().sum();
    let denom = match norm {
        NmiNormalization::Geometric => (ha * hb).sqrt(),
        NmiNormalization::Arithmetic => 0.5 * (ha + hb),
    };
    Ok((mi / denom).clamp(0.0, 1.0))
}

/// Best fraction of points labeled correctly under a one-to-one mapping of
/// predicted clusters to true classes.
pub fn accuracy(pred: &[usize], truth: &[usize]) -> Result<f64> {
    let table = ContingencyTable::new(pred, truth)?;
    if table.n == 0 {
        return Err(Error::Parameter("accuracy of empty labelings".into()));
    }
    let cost: Vec<Vec<f64>> = table
        .counts
        .iter()
        .map(|r| r.iter().map(|&c| -(c as f64)).collect())
        .collect();
    let assignment = optimal_assignment(&cost);
    Ok(-assignment.cost / table.n as f64)
}

/// Minimum-cost perfect matching on the zero-padded square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    /// `columns[i]` is the column matched to row i of the padded square;
    /// indices at or beyond the original shape are padding.
    pub columns: Vec<usize>,
    pub cost: f64,
}

/// Hungarian algorithm (shortest augmenting paths with potentials), then
/// the lexicographically smallest optimal matching is selected among ties.
pub fn optimal_assignment(cost: &[Vec<f64>]) -> Assignment {
    let rows = cost.len();
    let cols = cost.first().map_or(0, Vec::len);
    let m = rows.max(cols);
    if m == 0 {
        return Assignment { columns: Vec::new(), cost: 0.0 };
    }
    let at = |i: usize, j: usize| if i < rows && j < cols { cost[i][j] } else { 0.0 };

    // 1-based arrays; index 0 is the virtual root.
    let mut u = vec![0.0; m + 1];
    let mut v = vec![0.0; m + 1];
    let mut owner = vec![0usize; m + 1]; // owner[j]: row matched to column j
    let mut way = vec![0usize; m + 1];
    for i in 1..=m {
        owner[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=m {
                if !used[j] {
                    let cur = at(i0 - 1, j - 1) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut col_of = vec![0usize; m];
    let mut row_of = vec![0usize; m];
    for j in 1..=m {
        col_of[owner[j] - 1] = j - 1;
        row_of[j - 1] = owner[j] - 1;
    }

    let scale = (0..m)
        .flat_map(|i| (0..m).map(move |j| (i, j)))
        .map(|(i, j)| at(i, j).abs())
        .fold(1.0, f64::max);
    let eps = 1e-9 * scale;
    let tight = |i: usize, j: usize| (at(i, j) - u[i + 1] - v[j + 1]).abs() <= eps;
    lexicographic_tight_matching(m, &tight, &mut col_of, &mut row_of);

    let total = (0..m).map(|i| at(i, col_of[i])).sum();
    Assignment { columns: col_of, cost: total }
}

/// Rewrites a perfect matching of the tight subgraph into the
/// lexicographically smallest one. Every perfect matching of the tight
/// subgraph is optimal, so this only changes how ties are resolved.
fn lexicographic_tight_matching(
    m: usize,
    tight: &dyn Fn(usize, usize) -> bool,
    col_of: &mut [usize],
    row_of: &mut [usize],
) {
    let mut col_fixed = vec![false; m];
    for i in 0..m {
        for j in 0..m {
            if col_fixed[j] || !tight(i, j) {
                continue;
            }
            if col_of[i] == j {
                break;
            }
            // Give column j to row i: its current owner must reach the
            // column row i releases through an alternating path.
            let target = col_of[i];
            let start = row_of[j];
            let mut parent_col: Vec<Option<usize>> = vec![None; m]; // how each row was reached
            let mut seen_col = vec![false; m];
            seen_col[j] = true;
            let mut queue = std::collections::VecDeque::from([start]);
            let mut reached = None;
            let mut visited_row = vec![false; m];
            visited_row[start] = true;
            let mut via: Vec<usize> = vec![usize::MAX; m]; // column → row that reached it
            while let Some(r) = queue.pop_front() {
                for c in 0..m {
                    if seen_col[c] || col_fixed[c] || !tight(r, c) {
                        continue;
                    }
                    seen_col[c] = true;
                    via[c] = r;
                    if c == target {
                        reached = Some(c);
                        break;
                    }
                    let next = row_of[c];
                    if next != i && !visited_row[next] {
                        visited_row[next] = true;
                        parent_col[next] = Some(c);
                        queue.push_back(next);
                    }
                }
                if reached.is_some() {
                    break;
                }
            }
            let Some(mut c) = reached else { continue };
            // Flip the path back to `start`.
            loop {
                let r = via[c];
                let previous = parent_col[r];
                col_of[r] = c;
                row_of[c] = r;
                match previous {
                    Some(pc) if r != start => c = pc,
                    _ => break,
                }
            }
            col_of[i] = j;
            row_of[j] = i;
            break;
        }
        col_fixed[col_of[i]] = true;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTest {
    pub t: f64,
    pub df: f64,
    pub p_value: f64,
    pub significant: bool,
}

fn mean_and_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// Welch's unequal-variance two-sample t-test, two tailed. When both
/// samples have zero variance the p-value is 1 for equal means and 0
/// otherwise.
pub fn two_tailed_ttest(sample_a: &[f64], sample_b: &[f64], alpha: f64) -> Result<TTest> {
    if sample_a.len() < 2 || sample_b.len() < 2 {
        return Err(Error::Parameter(format!(
            "t-test needs at least 2 values per sample, got {} and {}",
            sample_a.len(),
            sample_b.len()
        )));
    }
    let (ma, va) = mean_and_var(sample_a);
    let (mb, vb) = mean_and_var(sample_b);
    let sa = va / sample_a.len() as f64;
    let sb = vb / sample_b.len() as f64;
    let se2 = sa + sb;
    if se2 == 0.0 {
        let p_value = if ma == mb { 1.0 } else { 0.0 };
        let t = if ma == mb { 0.0 } else { f64::INFINITY.copysign(ma - mb) };
        return Ok(TTest { t, df: f64::INFINITY, p_value, significant: p_value < alpha });
    }
    let t = (ma - mb) / se2.sqrt();
    let df = se2 * se2
        / (sa * sa / (sample_a.len() as f64 - 1.0) + sb * sb / (sample_b.len() as f64 - 1.0));
    let dist = StudentsT::new(0.0, 1.0, df).map_err(|e| Error::Numerical {
        message: format!("t distribution with df = {df}: {e}"),
        residual: f64::NAN,
    })?;
    let p_value = (2.0 * dist.sf(t.abs())).min(1.0);
    Ok(TTest { t, df, p_value, significant: p_value < alpha })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub nmi: f64,
    pub acc: f64,
}

/// Mean and sample standard deviation of per-run metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub nmi_mean: f64,
    pub nmi_sd: f64,
    pub acc_mean: f64,
    pub acc_sd: f64,
    pub runs: usize,
    pub per_run: Vec<RunMetrics>,
}

/// Mean and sample standard deviation; a single value has sd 0.
pub fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    if n == 1 {
        return (xs[0], 0.0);
    }
    let (mean, var) = mean_and_var(xs);
    (mean, var.sqrt())
}

impl MetricsReport {
    pub fn from_runs(per_run: Vec<RunMetrics>) -> Self {
        let nmis: Vec<f64> = per_run.iter().map(|r| r.nmi).collect();
        let accs: Vec<f64> = per_run.iter().map(|r| r.acc).collect();
        let (nmi_mean, nmi_sd) = mean_sd(&nmis);
        let (acc_mean, acc_sd) = mean_sd(&accs);
        MetricsReport {
            nmi_mean,
            nmi_sd,
            acc_mean,
            acc_sd,
            runs: per_run.len(),
            per_run,
        }
    }

    pub fn nmi_values(&self) -> Vec<f64> {
        self.per_run.iter().map(|r| r.nmi).collect()
    }

    pub fn acc_values(&self) -> Vec<f64> {
        self.per_run.iter().map(|r| r.acc).collect()
    }

    /// Standard deviations are not meaningful for fewer than two runs.
    pub fn is_single_run(&self) -> bool {
        self.runs < 2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nmi_examples() {
        assert_eq!(nmi(&[0, 1, 2, 1], &[0, 1, 2, 1]).unwrap(), 1.0);
        assert!((nmi(&[0, 0, 1, 1], &[1, 1, 0, 0]).unwrap() - 1.0).abs() < 1e-15);
        assert!(nmi(&[0, 0, 1, 1], &[0, 1, 0, 1]).unwrap().abs() < 1e-15);
        assert_eq!(nmi(&[3, 3, 3], &[1, 1, 1]).unwrap(), 1.0);
        assert_eq!(nmi(&[3, 3, 3], &[0, 1, 1]).unwrap(), 0.0);
        assert!(matches!(nmi(&[0, 1], &[0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn arithmetic_normalization() {
        // Balanced 2-class vs 4-class refinement: I = ln2, H = ln2, ln4.
        let a = [0, 0, 1, 1];
        let b = [0, 1, 2, 3];
        let geo = nmi_with(&a, &b, NmiNormalization::Geometric).unwrap();
        let ari = nmi_with(&a, &b, NmiNormalization::Arithmetic).unwrap();
        assert!((geo - 1.0 / 2f64.sqrt()).abs() < 1e-12);
        assert!((ari - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn accuracy_examples() {
        assert_eq!(accuracy(&[1, 1, 0, 0], &[0, 0, 1, 1]).unwrap(), 1.0);
        assert_eq!(accuracy(&[0, 0, 0, 1], &[0, 0, 1, 1]).unwrap(), 0.75);
        assert!(matches!(accuracy(&[0], &[0, 1]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn assignment_examples() {
        let a = optimal_assignment(&[vec![0.0, 9.0], vec![9.0, 0.0]]);
        assert_eq!(a.columns, vec![0, 1]);
        assert_eq!(a.cost, 0.0);
        let a = optimal_assignment(&[vec![9.0, 0.0], vec![0.0, 9.0]]);
        assert_eq!(a.columns, vec![1, 0]);
        let flat = vec![vec![2.5; 4]; 4];
        let a = optimal_assignment(&flat);
        assert_eq!(a.columns, vec![0, 1, 2, 3]);
        assert_eq!(a.cost, 10.0);
    }

    #[test]
    fn rectangular_assignment() {
        let a = optimal_assignment(&[vec![5.0, 1.0, 3.0]]);
        assert_eq!(a.cost, 1.0);
        assert_eq!(a.columns[0], 1);
        assert_eq!(a.columns.len(), 3);
    }

    #[test]
    fn ttest_degenerate_cases() {
        let t = two_tailed_ttest(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0], 0.05).unwrap();
        assert_eq!(t.p_value, 1.0);
        assert!(!t.significant);
        let t = two_tailed_ttest(&[0.5, 0.5], &[0.5, 0.5], 0.05).unwrap();
        assert_eq!(t.p_value, 1.0);
        let t = two_tailed_ttest(&[0.5, 0.5], &[0.7, 0.7], 0.05).unwrap();
        assert_eq!(t.p_value, 0.0);
        assert!(t.significant);
        let t = two_tailed_ttest(&[0.0, 0.0, 0.0001, -0.0001], &[10.0, 10.0, 10.0001, 9.9999], 0.05)
            .unwrap();
        assert!(t.significant);
        assert!(matches!(two_tailed_ttest(&[1.0], &[1.0, 2.0], 0.05), Err(Error::Parameter(_))));
    }

    #[test]
    fn report_statistics() {
        let r = MetricsReport::from_runs(vec![
            RunMetrics { nmi: 0.5, acc: 0.75 },
            RunMetrics { nmi: 0.7, acc: 0.75 },
        ]);
        assert!((r.nmi_mean - 0.6).abs() < 1e-15);
        assert!((r.nmi_sd - 0.02f64.sqrt()).abs() < 1e-15);
        assert_eq!(r.acc_sd, 0.0);
        let single = MetricsReport::from_runs(vec![RunMetrics { nmi: 0.5, acc: 0.5 }]);
        assert_eq!(single.nmi_sd, 0.0);
        assert!(single.is_single_run());
    }
}
