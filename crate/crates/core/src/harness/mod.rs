//! Experiment orchestration: ground truth, the acquisition loop, the grid-scan
//! baseline, the measurement-time model and run comparison.

mod compare;
mod config;
mod gridscan;
mod record;
mod report;
mod run;
mod time;
mod truth;

pub use compare::{compare_runs, compare_runs_with_truth, edge_error_curve, ComparisonReport, ComparisonRow};
pub use config::{AugmentationConfig, ExperimentConfig, Mode, StopConfig, StopMode, SuiteConfig, TruthNoise};
pub use gridscan::gridscan_order;
pub use record::{RunRecord, RunSummary, StepEvent};
pub use report::{curves_csv, dense_series, plot_curves, write_run_outputs};
pub use run::{augmentation_profiles, run_active, run_experiment, run_gridscan};
pub use time::{simulated_time, TimeModel, DEFAULT_SETTLE_SECONDS, FULL_SPAN_RAMP_SECONDS, GRIDSCAN_REFERENCE_SECONDS};
pub use truth::{fingerprint, GroundTruth};
