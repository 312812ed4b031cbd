//! CSV and Markdown outputs: per-run rows, summaries and sweep tables.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ExperimentConfig, ExperimentOutcome, Method, SweepResult};
use crate::error::{Error, Result};
use crate::metrics::{two_tailed_ttest, MetricsReport, RunMetrics};
use crate::spectral::ClusteringResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    Ok,
    Failed,
}

/// One row of `runs.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub dataset: String,
    pub method: Method,
    pub params: String,
    /// 1-based sweep index; empty outside sweeps.
    pub grid_index: Option<usize>,
    pub repetition: usize,
    pub seed: u64,
    pub status: RunStatus,
    pub nmi: Option<f64>,
    pub acc: Option<f64>,
    pub objective: Option<f64>,
    pub chosen_restart: Option<usize>,
    pub error: Option<String>,
}

impl RunRecord {
    pub fn new(
        dataset: &str,
        config: &ExperimentConfig,
        repetition: usize,
        seed: u64,
        outcome: Result<(ClusteringResult, f64, f64)>,
    ) -> Self {
        let mut record = RunRecord {
            dataset: dataset.to_string(),
            method: config.method,
            params: config.params_label(),
            grid_index: None,
            repetition,
            seed,
            status: RunStatus::Ok,
            nmi: None,
            acc: None,
            objective: None,
            chosen_restart: None,
            error: None,
        };
        match outcome {
            Ok((res, nmi, acc)) => {
                record.nmi = Some(nmi);
                record.acc = Some(acc);
                record.objective = Some(res.objective);
                record.chosen_restart = Some(res.chosen_restart);
            }
            Err(e) => {
                record.status = RunStatus::Failed;
                record.error = Some(e.to_string());
            }
        }
        record
    }

    pub fn metrics(&self) -> Option<RunMetrics> {
        match (self.status, self.nmi, self.acc) {
            (RunStatus::Ok, Some(nmi), Some(acc)) => Some(RunMetrics { nmi, acc }),
            _ => None,
        }
    }
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Format(format!("{other:?}")),
    }
}

pub fn write_runs<W: Write>(records: &[RunRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_runs_csv(records: &[RunRecord], path: &Path) -> Result<()> {
    write_runs(records, File::create(path)?)
}

pub fn read_runs_csv(path: &Path) -> Result<Vec<RunRecord>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_error)?;
    r.deserialize().map(|row| row.map_err(csv_error)).collect()
}

/// Groups runs by (dataset, method, params, grid_index) in order of first
/// appearance and aggregates the successful ones.
pub fn reports_from_runs(records: &[RunRecord]) -> Vec<(RunRecord, Option<MetricsReport>, usize)> {
    let mut groups: Vec<(RunRecord, Vec<RunMetrics>, usize)> = Vec::new();
    for r in records {
        let key = |g: &RunRecord| {
            g.dataset == r.dataset && g.method == r.method && g.params == r.params && g.grid_index == r.grid_index
        };
        let pos = match groups.iter().position(|(g, _, _)| key(g)) {
            Some(p) => p,
            None => {
                groups.push((r.clone(), Vec::new(), 0));
                groups.len() - 1
            }
        };
        match r.metrics() {
            Some(m) => groups[pos].1.push(m),
            None => groups[pos].2 += 1,
        }
    }
    groups
        .into_iter()
        .map(|(head, ok, failed)| {
            let report = (!ok.is_empty()).then(|| MetricsReport::from_runs(ok));
            (head, report, failed)
        })
        .collect()
}

/// One row of `summary.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub dataset: String,
    pub method: Method,
    pub params: String,
    pub nmi_mean: Option<f64>,
    pub nmi_sd: Option<f64>,
    pub acc_mean: Option<f64>,
    pub acc_sd: Option<f64>,
    /// NMI p-value against the first row of the same table.
    pub p_value: Option<f64>,
    pub runs: usize,
    pub failed: usize,
    pub single_run: bool,
}

/// Summary rows; every row after the first carries the NMI p-value of a
/// Welch test against the first.
pub fn summarize(outcomes: &[ExperimentOutcome], alpha: f64) -> Vec<SummaryRow> {
    let reference = outcomes.first().and_then(|o| o.report.as_ref());
    outcomes
        .iter()
        .enumerate()
        .map(|(i, o)| {
            let r = o.report.as_ref();
            let p_value = match (i, reference, r) {
                (1.., Some(a), Some(b)) if a.runs >= 2 && b.runs >= 2 => {
                    two_tailed_ttest(&a.nmi_values(), &b.nmi_values(), alpha).ok().map(|t| t.p_value)
                }
                _ => None,
            };
            SummaryRow {
                dataset: o.dataset.clone(),
                method: o.method,
                params: o.params.clone(),
                nmi_mean: r.map(|r| r.nmi_mean),
                nmi_sd: r.map(|r| r.nmi_sd),
                acc_mean: r.map(|r| r.acc_mean),
                acc_sd: r.map(|r| r.acc_sd),
                p_value,
                runs: r.map_or(0, |r| r.runs),
                failed: o.failures(),
                single_run: r.is_some_and(MetricsReport::is_single_run),
            }
        })
        .collect()
}

pub fn write_summary_csv(rows: &[SummaryRow], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    for r in rows {
        w.serialize(r).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// `xx.xx%±yy.yy%`.
pub fn percent(mean: f64, sd: f64) -> String {
    format!("{:.2}%±{:.2}%", 100.0 * mean, 100.0 * sd)
}

pub fn summary_markdown(rows: &[SummaryRow]) -> String {
    let mut s = String::from("| dataset | method | params | NMI | ACC | p (NMI) | runs | failed |\n");
    s.push_str("|---|---|---|---|---|---|---|---|\n");
    for r in rows {
        let cell = |m: Option<f64>, sd: Option<f64>| match (m, sd) {
            (Some(m), Some(sd)) => percent(m, sd),
            _ => "n/a".to_string(),
        };
        let p = r.p_value.map_or("".to_string(), |p| format!("{p:.4}"));
        s.push_str(&format!(
            "| {} | {} | {} | {} | {} | {} | {} | {} |\n",
            r.dataset,
            r.method,
            r.params,
            cell(r.nmi_mean, r.nmi_sd),
            cell(r.acc_mean, r.acc_sd),
            p,
            r.runs,
            r.failed
        ));
    }
    s
}

/// Writes `runs.csv`, `summary.csv` and `summary.md` into `out_dir`.
pub fn write_experiment_outputs(outcomes: &[ExperimentOutcome], alpha: f64, out_dir: &Path) -> Result<Vec<SummaryRow>> {
    std::fs::create_dir_all(out_dir)?;
    let records: Vec<RunRecord> = outcomes.iter().flat_map(|o| o.runs.iter().cloned()).collect();
    write_runs_csv(&records, &out_dir.join("runs.csv"))?;
    let rows = summarize(outcomes, alpha);
    write_summary_csv(&rows, &out_dir.join("summary.csv"))?;
    std::fs::write(out_dir.join("summary.md"), summary_markdown(&rows))?;
    Ok(rows)
}

/// One row of `sweep.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub grid_index: usize,
    pub value: f64,
    pub nmi_mean: Option<f64>,
    pub nmi_sd: Option<f64>,
    pub acc_mean: Option<f64>,
    pub acc_sd: Option<f64>,
    pub runs: usize,
    pub failed: usize,
    pub error: Option<String>,
}

pub fn sweep_rows(sweep: &SweepResult) -> Vec<SweepRow> {
    sweep
        .points
        .iter()
        .map(|p| {
            let r = p.report();
            let (failed, error) = match &p.outcome {
                Ok(o) => (o.failures(), None),
                Err(e) => (0, Some(e.clone())),
            };
            SweepRow {
                grid_index: p.index,
                value: p.value,
                nmi_mean: r.map(|r| r.nmi_mean),
                nmi_sd: r.map(|r| r.nmi_sd),
                acc_mean: r.map(|r| r.acc_mean),
                acc_sd: r.map(|r| r.acc_sd),
                runs: r.map_or(0, |r| r.runs),
                failed,
                error,
            }
        })
        .collect()
}

/// Writes `sweep.csv`, `runs.csv` (keyed by grid index), `summary.csv`,
/// `summary.md` and the two SVG charts.
pub fn write_sweep_outputs(sweep: &SweepResult, alpha: f64, out_dir: &Path) -> Result<()> {
    std::fs::create_dir_all(out_dir)?;
    let mut w = csv::Writer::from_path(out_dir.join("sweep.csv")).map_err(csv_error)?;
    for row in sweep_rows(sweep) {
        w.serialize(row).map_err(csv_error)?;
    }
    w.flush()?;

    let outcomes: Vec<ExperimentOutcome> = sweep
        .points
        .iter()
        .filter_map(|p| {
            p.outcome.as_ref().ok().map(|o| {
                let mut o = o.clone();
                for r in &mut o.runs {
                    r.grid_index = Some(p.index);
                }
                o
            })
        })
        .collect();
    let records: Vec<RunRecord> = outcomes.iter().flat_map(|o| o.runs.iter().cloned()).collect();
    write_runs_csv(&records, &out_dir.join("runs.csv"))?;
    let rows = summarize(&outcomes, alpha);
    write_summary_csv(&rows, &out_dir.join("summary.csv"))?;
    std::fs::write(out_dir.join("summary.md"), summary_markdown(&rows))?;

    super::plot::write_sweep_svgs(sweep, out_dir)
}
