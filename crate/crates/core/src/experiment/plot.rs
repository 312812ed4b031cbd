//! SVG line charts of sweep results against the 1-based grid index.

use std::path::Path;

use plotters::prelude::*;

use super::SweepResult;
use crate::error::{Error, Result};
use crate::metrics::MetricsReport;

fn plot_error<E: std::fmt::Display>(e: E) -> Error {
    Error::Io(std::io::Error::other(e.to_string()))
}

/// Contiguous runs of successful points; failed points split the line.
fn segments(sweep: &SweepResult, metric: fn(&MetricsReport) -> f64) -> Vec<Vec<(f64, f64)>> {
    let mut out: Vec<Vec<(f64, f64)>> = vec![Vec::new()];
    for p in &sweep.points {
        match p.report() {
            Some(r) => out.last_mut().expect("nonempty").push((p.index as f64, metric(r))),
            None => out.push(Vec::new()),
        }
    }
    out.retain(|s| !s.is_empty());
    out
}

pub fn render_sweep_svg(sweep: &SweepResult, label: &str, metric: fn(&MetricsReport) -> f64) -> Result<String> {
    let mut svg = String::new();
    {
        let root = SVGBackend::with_string(&mut svg, (640, 420)).into_drawing_area();
        root.fill(&WHITE).map_err(plot_error)?;
        let last = sweep.points.len().max(1) as f64;
        let mut chart = ChartBuilder::on(&root)
            .caption(format!("{} on {} vs {} index", label, sweep.dataset, sweep.spec.param), ("sans-serif", 18))
            .margin(12)
            .x_label_area_size(36)
            .y_label_area_size(48)
            .build_cartesian_2d(0.5..last + 0.5, 0.0..1.0)
            .map_err(plot_error)?;
        chart
            .configure_mesh()
            .x_desc("parameter index")
            .y_desc(label)
            .x_labels(sweep.points.len().max(1))
            .x_label_formatter(&|x| format!("{}", x.round() as i64))
            .draw()
            .map_err(plot_error)?;
        for segment in segments(sweep, metric) {
            chart
                .draw_series(LineSeries::new(segment.iter().copied(), BLUE.stroke_width(2)))
                .map_err(plot_error)?;
            chart
                .draw_series(segment.iter().map(|&(x, y)| Circle::new((x, y), 3, BLUE.filled())))
                .map_err(plot_error)?;
        }
        root.present().map_err(plot_error)?;
    }
    Ok(svg)
}

/// Writes `sweep_nmi.svg` and `sweep_acc.svg`.
pub fn write_sweep_svgs(sweep: &SweepResult, out_dir: &Path) -> Result<()> {
    std::fs::write(out_dir.join("sweep_nmi.svg"), render_sweep_svg(sweep, "NMI", |r| r.nmi_mean)?)?;
    std::fs::write(out_dir.join("sweep_acc.svg"), render_sweep_svg(sweep, "ACC", |r| r.acc_mean)?)?;
    Ok(())
}
