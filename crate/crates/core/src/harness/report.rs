use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use plotters::prelude::*;

use super::{GroundTruth, RunRecord};
use crate::device::{save_map_csv, save_map_png};
use crate::error::{Error, Result};
use crate::metrics::{gradient_norm_map, optimal_curve};

/// CSV with one row per `n`; estimate columns are filled at decision points only.
pub fn curves_csv(record: &RunRecord, optimal: &[f64], gridscan: Option<&RunRecord>) -> String {
    let mut est = vec![None; record.r_curve.len()];
    for e in &record.events {
        if let (Some(x), Some(slot)) = (e.estimate, est.get_mut(e.n)) {
            *slot = Some(x);
        }
    }
    let mut s = String::from("n,actual,est_mean,est_lo90,est_hi90,optimal,gridscan\n");
    for (n, r) in record.r_curve.iter().enumerate() {
        let (m, lo, hi) = match est[n] {
            Some(e) => (e.mean.to_string(), e.lo90.to_string(), e.hi90.to_string()),
            None => Default::default(),
        };
        let opt = optimal.get(n).map(|x| x.to_string()).unwrap_or_default();
        let grid = gridscan.and_then(|g| g.r_at(n)).map(|x| x.to_string()).unwrap_or_default();
        let _ = writeln!(s, "{n},{r},{m},{lo},{hi},{opt},{grid}");
    }
    s
}

/// Line plot of `r(n)` curves on `[0, n_max] x [0, 1]`.
///
/// The plot carries no text so that it renders without system fonts: series
/// are drawn in the order blue, red, green, black, magenta, cyan, over light
/// grid lines at every quarter of each axis. The CSV output holds the labels.
pub fn plot_curves(path: impl AsRef<Path>, series: &[Vec<(f64, f64)>]) -> Result<()> {
    let path = path.as_ref();
    let render = || -> std::result::Result<(), Box<dyn std::error::Error>> {
        let x_max = series.iter().flat_map(|p| p.iter().map(|q| q.0)).fold(1.0, f64::max);
        let root = BitMapBackend::new(path, (800, 500)).into_drawing_area();
        root.fill(&WHITE)?;
        let mut chart = ChartBuilder::on(&root).margin(12).build_cartesian_2d(0.0..x_max, 0.0..1.0)?;
        let grid = RGBColor(220, 220, 220);
        for k in 0..=4 {
            let f = k as f64 / 4.0;
            chart.draw_series(LineSeries::new([(0.0, f), (x_max, f)], grid))?;
            chart.draw_series(LineSeries::new([(f * x_max, 0.0), (f * x_max, 1.0)], grid))?;
        }
        for (i, pts) in series.iter().enumerate() {
            chart.draw_series(LineSeries::new(pts.iter().copied(), PALETTE[i % PALETTE.len()].stroke_width(2)))?;
        }
        root.present()?;
        Ok(())
    };
    render().map_err(|e| Error::Render(e.to_string()))
}

const PALETTE: [RGBColor; 6] = [BLUE, RED, GREEN, BLACK, MAGENTA, CYAN];

pub fn dense_series(curve: &[f64]) -> Vec<(f64, f64)> {
    let step = (curve.len() / 2000).max(1);
    curve
        .iter()
        .enumerate()
        .filter(|(n, _)| n % step == 0 || *n + 1 == curve.len())
        .map(|(n, &r)| (n as f64, r))
        .collect()
}

/// Writes the record, ground-truth map, curves and plot into `dir`. The plot
/// shows the run (blue), the optimal bound (red) and the grid scan (green).
pub fn write_run_outputs(
    dir: impl AsRef<Path>,
    record: &RunRecord,
    truth: &GroundTruth,
    gridscan: Option<&RunRecord>,
) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    record.save(dir.join("record.jsonl"))?;
    save_map_csv(&truth.map, dir.join("truth.csv"))?;
    save_map_png(&truth.map.values, dir.join("truth.png"))?;
    let optimal = optimal_curve(&gradient_norm_map(&truth.map.values))?;
    fs::write(dir.join("curves.csv"), curves_csv(record, &optimal, gridscan))?;
    let mut series = vec![dense_series(&record.r_curve), dense_series(&optimal)];
    if let Some(g) = gridscan {
        series.push(dense_series(&g.r_curve));
    }
    plot_curves(dir.join("curves.png"), &series)?;
    Ok(())
}
