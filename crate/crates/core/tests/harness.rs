mod common;

use std::collections::HashSet;
use std::process::Command;

use dotscan::device::save_map_csv;
use dotscan::grid::Pixel;
use dotscan::harness::{
    compare_runs_with_truth, run_active, run_experiment, run_gridscan, GroundTruth, Mode, RunRecord, StopMode,
};
use dotscan::posterior::{export_diagnostics, export_ensemble, MhDiagnostics, ObservationSet, ReconstructionEnsemble};
use dotscan::Error;

use common::small_config;

fn assert_each_pixel_once(rec: &RunRecord) {
    let n = rec.config.window.n_pixels();
    assert_eq!(rec.order.len(), n);
    let unique: HashSet<Pixel> = rec.order.iter().copied().collect();
    assert_eq!(unique.len(), n);
    assert_eq!(rec.r_curve.len(), n + 1);
    assert!(rec.r_curve[n] <= 1e-12);
}

#[test]
fn full_runs_measure_every_pixel_once() {
    for (i, mode) in [Mode::Batch, Mode::SegmentationBatch, Mode::Pixelwise].into_iter().enumerate() {
        let mut cfg = small_config(16, 1 + i as u64, 5);
        cfg.mode = mode;
        cfg.stop.mode = StopMode::Off;
        let rec = run_experiment(&cfg).unwrap();
        assert_each_pixel_once(&rec);
        // The record's measured count equals n at every logged step.
        for e in &rec.events {
            assert_eq!(e.n, rec.order.iter().take(e.n).count());
            assert!(e.locations.iter().all(|p| !rec.order[..e.n].contains(p)));
        }
    }
}

#[test]
fn single_member_ensemble_falls_back_to_row_major() {
    let mut cfg = small_config(16, 3, 6);
    cfg.ensemble_size = 1;
    cfg.stop.mode = StopMode::Off;
    let rec = run_experiment(&cfg).unwrap();
    assert_each_pixel_once(&rec);
    // With no disagreement the first batch is the first unmeasured pixels in row-major order.
    let first = &rec.events[0];
    let measured: HashSet<Pixel> = rec.order[..first.n].iter().copied().collect();
    let mut expected: Vec<Pixel> = (0..256)
        .map(|i| Pixel::from_index(i, 16))
        .filter(|p| !measured.contains(p))
        .take(first.locations.len())
        .collect();
    let mut got = first.locations.clone();
    expected.sort();
    got.sort();
    assert_eq!(got, expected);
}

#[test]
fn pixelwise_first_choice_is_in_the_first_batch() {
    let mut cfg = small_config(16, 4, 7);
    cfg.stop.mode = StopMode::Off;
    cfg.max_measurements = Some(65);
    cfg.mode = Mode::Pixelwise;
    let pixelwise = run_experiment(&cfg).unwrap();
    cfg.mode = Mode::Batch;
    cfg.batch_base = 1;
    cfg.max_measurements = Some(66);
    let batch = run_experiment(&cfg).unwrap();
    assert_eq!(batch.events[0].n, 64);
    assert!(batch.events[0].locations.contains(&pixelwise.order[64]));
}

#[test]
fn runs_are_reproducible_from_config_and_seeds() {
    let cfg = small_config(16, 8, 9);
    let a = run_experiment(&cfg).unwrap();
    let b = run_experiment(&cfg).unwrap();
    assert_eq!(a.order, b.order);
    assert_eq!(a.r_curve, b.r_curve);
    assert_eq!(a.times, b.times);
    let strip = |r: &RunRecord| {
        let mut s = r.summary.clone();
        s.compute_seconds = 0.0;
        (serde_json::to_string(&r.events).unwrap(), s)
    };
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn record_round_trips_through_jsonl() {
    let cfg = small_config(16, 10, 11);
    let rec = run_experiment(&cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("record.jsonl");
    rec.save(&path).unwrap();
    let back = RunRecord::load(&path).unwrap();
    assert_eq!(back, rec);
}

#[test]
fn compare_rejects_other_ground_truths() {
    let mut cfg = small_config(16, 12, 13);
    cfg.mode = Mode::Gridscan;
    let truth = GroundTruth::from_config(&cfg).unwrap();
    let rec = run_gridscan(&cfg, &truth).unwrap();
    cfg.device_seed += 1;
    let other = GroundTruth::from_config(&cfg).unwrap();
    let foreign = run_gridscan(&cfg, &other).unwrap();
    assert!(matches!(
        compare_runs_with_truth(&[rec.clone(), foreign], &truth),
        Err(Error::GroundTruthMismatch(_))
    ));
    assert!(matches!(compare_runs_with_truth(&[rec], &truth), Err(Error::Config(_))));
}

#[test]
fn budget_mode_caps_the_measurement_count() {
    let mut cfg = small_config(16, 14, 15);
    cfg.stop.mode = StopMode::Budget;
    cfg.stop.total_budget = Some(100.0);
    cfg.stop.halt_on_stop = false;
    let truth = GroundTruth::from_config(&cfg).unwrap();
    let rec = run_active(&cfg, &truth).unwrap();
    assert!(rec.order.len() <= 100);
}

#[test]
fn ensemble_snapshots_export_as_csv() {
    let cfg = small_config(8, 16, 17);
    let truth = GroundTruth::from_config(&cfg).unwrap();
    let member = dotscan::posterior::Reconstruction {
        latent: dotscan::posterior::LatentVector(vec![0.0]),
        map: truth.map.clone(),
        clamped: false,
    };
    let ens = ReconstructionEnsemble::new(vec![member.clone(), member], 1.0, &ObservationSet::new(8, 8)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    export_ensemble(&ens, dir.path()).unwrap();
    let weights = std::fs::read_to_string(dir.path().join("weights.csv")).unwrap();
    assert_eq!(weights.lines().count(), 3);
    assert!(dir.path().join("member_0001.csv").exists());
    let diag = MhDiagnostics {
        acceptance_rates: vec![0.5, 0.25],
        log_likelihood_trace: vec![-3.0, -2.0, -1.5],
        clamped: 0,
    };
    export_diagnostics(&diag, dir.path()).unwrap();
    let trace = std::fs::read_to_string(dir.path().join("log_likelihood.csv")).unwrap();
    assert_eq!(trace.lines().count(), 4);
}

fn dotscan() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_dotscan"));
    cmd.env("RUST_LOG", "warn");
    cmd
}

#[test]
fn cli_runs_end_to_end_and_reports_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small_config(16, 20, 21);
    cfg.stop.mode = StopMode::Off;
    let config = dir.path().join("config.json");
    std::fs::write(&config, serde_json::to_string(&cfg).unwrap()).unwrap();
    let out = |name: &str| dir.path().join(name);

    let status = |cmd: &mut Command| cmd.status().unwrap().code().unwrap();
    assert_eq!(status(dotscan().args(["simulate", "--config"]).arg(&config).arg("--out").arg(out("sim"))), 0);
    assert!(out("sim").join("current.csv").exists());
    assert_eq!(status(dotscan().args(["run", "--config"]).arg(&config).arg("--out").arg(out("run"))), 0);
    assert_eq!(status(dotscan().args(["gridscan", "--config"]).arg(&config).arg("--out").arg(out("grid"))), 0);
    assert!(out("run").join("curves.csv").exists());
    assert_eq!(
        status(
            dotscan()
                .arg("compare")
                .arg(out("grid").join("record.jsonl"))
                .arg(out("run").join("record.jsonl"))
                .arg("--out")
                .arg(out("cmp"))
        ),
        0
    );
    let csv = std::fs::read_to_string(out("cmp").join("comparison.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);

    let truth = GroundTruth::from_config(&cfg).unwrap();
    save_map_csv(&truth.map, out("recorded.csv")).unwrap();
    assert_eq!(
        status(dotscan().args(["replay", "--config"]).arg(&config).arg("--map").arg(out("recorded.csv")).arg("--out").arg(out("replay"))),
        0
    );

    assert_eq!(status(dotscan().args(["run", "--mode", "sideways"])), 1);
    assert_eq!(status(dotscan().args(["run", "--config"]).arg(out("missing.json"))), 1);
    std::fs::write(out("bad.csv"), "# axis1 0 1\n1,2\n3\n").unwrap();
    assert_eq!(status(dotscan().args(["replay", "--map"]).arg(out("bad.csv")).arg("--out").arg(out("bad"))), 3);
}
