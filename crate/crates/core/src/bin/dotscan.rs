use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dotscan::device::{save_map_csv, save_map_png};
use dotscan::harness::{
    compare_runs, dense_series, plot_curves, run_active, run_gridscan, write_run_outputs, ExperimentConfig, GroundTruth, Mode,
    RunRecord, StopMode,
};
use dotscan::metrics::Remaining;
use dotscan::Result;

#[derive(Parser)]
#[command(name = "dotscan", version, about = "Adaptive measurement of quantum-dot current maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a device and write its current map and segmentation.
    Simulate(Common),
    /// Active acquisition against a simulated device.
    Run(Common),
    /// Alternating grid-scan baseline.
    Gridscan(Common),
    /// Compare run records measured on the same ground truth.
    Compare {
        /// Record files (`record.jsonl`); the first is the baseline.
        #[arg(required = true, num_args = 2..)]
        records: Vec<PathBuf>,
        #[arg(long, default_value = "out/compare")]
        out: PathBuf,
    },
    /// Active acquisition against a recorded CSV map.
    Replay {
        /// Recorded map (CSV with `# axis1` / `# axis2` headers).
        #[arg(long)]
        map: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Clone)]
struct Common {
    /// JSON experiment configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Seed of the algorithm's random draws.
    #[arg(long)]
    seed: Option<u64>,
    /// Seed of the simulated device.
    #[arg(long)]
    device_seed: Option<u64>,
    #[arg(long)]
    mode: Option<Mode>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Stopping rule: off, infinite or budget.
    #[arg(long)]
    stop: Option<StopMode>,
    /// Total budget T in pixels (for `--stop budget`).
    #[arg(long)]
    budget: Option<f64>,
    /// Diagrams remaining after this one, an integer or `inf`.
    #[arg(long)]
    remaining: Option<Remaining>,
}

impl Common {
    fn config(&self, default_out: &str) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::from_json_file(p)?,
            None => ExperimentConfig::default(),
        };
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(s) = self.device_seed {
            cfg.device_seed = s;
        }
        if let Some(m) = self.mode {
            cfg.mode = m;
        }
        if let Some(s) = self.stop {
            cfg.stop.mode = s;
        }
        if let Some(b) = self.budget {
            cfg.stop.total_budget = Some(b);
        }
        if let Some(k) = self.remaining {
            cfg.stop.remaining = k;
        }
        cfg.out_dir = Some(self.out.clone().or(cfg.out_dir).unwrap_or_else(|| PathBuf::from(default_out)));
        cfg.validate()?;
        Ok(cfg)
    }
}

fn out_dir(cfg: &ExperimentConfig) -> &Path {
    cfg.out_dir.as_deref().expect("set by Common::config")
}

fn report(record: &RunRecord) {
    let s = &record.summary;
    println!(
        "{}: {} of {} pixels, {:.1} s simulated, final r = {:.4}",
        s.mode,
        s.measured,
        s.n_pixels,
        s.total_time,
        record.r_curve.last().copied().unwrap_or(1.0)
    );
    if let (Some(n), Some(t)) = (s.stop_n, s.stop_time) {
        println!("stopping rule fired at n = {n} after {t:.1} s (r = {:.4})", record.r_curve[n]);
    }
}

fn simulate(common: &Common) -> Result<()> {
    let cfg = common.config("out/simulate")?;
    let truth = GroundTruth::simulated(&cfg)?;
    let dir = out_dir(&cfg);
    fs::create_dir_all(dir)?;
    save_map_csv(&truth.map, dir.join("current.csv"))?;
    save_map_png(&truth.map.values, dir.join("current.png"))?;
    if let Some(seg) = &truth.segmentation {
        save_map_png(&seg.labels.mapv(f64::from), dir.join("segmentation.png"))?;
    }
    if let Some(p) = &truth.params {
        fs::write(dir.join("params.json"), serde_json::to_string_pretty(p)?)?;
    }
    println!("wrote {}x{} map to {}", truth.map.rows(), truth.map.cols(), dir.display());
    Ok(())
}

fn run(mut cfg: ExperimentConfig) -> Result<()> {
    let truth = GroundTruth::from_config(&cfg)?;
    if cfg.mode == Mode::Gridscan {
        let grid = run_gridscan(&cfg, &truth)?;
        write_run_outputs(out_dir(&cfg), &grid, &truth, None)?;
        report(&grid);
        return Ok(());
    }
    let record = run_active(&cfg, &truth)?;
    cfg.mode = Mode::Gridscan;
    let grid = run_gridscan(&cfg, &truth).ok();
    write_run_outputs(out_dir(&cfg), &record, &truth, grid.as_ref())?;
    report(&record);
    Ok(())
}

fn compare(paths: &[PathBuf], out: &Path) -> Result<()> {
    let records = paths.iter().map(RunRecord::load).collect::<Result<Vec<_>>>()?;
    let rep = compare_runs(&records)?;
    fs::create_dir_all(out)?;
    fs::write(out.join("comparison.csv"), rep.to_csv())?;
    let mut series: Vec<_> = records.iter().map(|r| dense_series(&r.r_curve)).collect();
    series.push(dense_series(&rep.optimal));
    plot_curves(out.join("curves.png"), &series)?;
    println!("{:<20} {:>8} {:>8} {:>12} {:>8} {:>9}", "mode", "measured", "stop_n", "time (s)", "speedup", "mean gap");
    for r in &rep.rows {
        println!(
            "{:<20} {:>8} {:>8} {:>12.1} {:>8.2} {:>9.4}",
            r.mode.to_string(),
            r.measured,
            r.stop_n.map(|n| n.to_string()).unwrap_or_else(|| "-".into()),
            r.time_to_stop,
            r.speedup,
            r.mean_gap
        );
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate(c) => simulate(&c),
        Command::Run(c) => run(c.config("out/run")?),
        Command::Gridscan(c) => {
            let mut cfg = c.config("out/gridscan")?;
            cfg.mode = Mode::Gridscan;
            run(cfg)
        }
        Command::Compare { records, out } => compare(&records, &out),
        Command::Replay { map, common } => {
            let mut cfg = common.config("out/replay")?;
            let truth = GroundTruth::replayed(&map)?;
            cfg.window = truth.map.window.clone();
            cfg.time_model = dotscan::harness::TimeModel::calibrated(&cfg.window);
            cfg.recorded_map = Some(map);
            run(cfg)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
