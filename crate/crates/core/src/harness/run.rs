use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{gridscan_order, GroundTruth, Mode, RunRecord, RunSummary, StepEvent, StopMode};
use super::ExperimentConfig;
use crate::acquisition::{
    information_gain_map, plan_tour, segmentation_disagreement_map, select_batch, select_pixel, top_locations,
    AcquisitionMap, RampMetric,
};
use crate::device::{synthesize_noise_profile, CurrentMap, NoiseProfile};
use crate::error::{Error, Result};
use crate::grid::{uniform_subgrid, Pixel};
use crate::metrics::{
    augmented_r_estimates, error_curve, gradient_norm_map, stopping_decide, GradientMap, Remaining, StopDecision,
    StoppingState,
};
use crate::posterior::{
    augment_noisy, mh_resample, prior_ensemble, ConditioningInput, ObservationSet, PhysicsBackend,
    ReconstructionEnsemble,
};

/// Runs the configured mode against the configured ground truth.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunRecord> {
    config.validate()?;
    let truth = GroundTruth::from_config(config)?;
    match config.mode {
        Mode::Gridscan => run_gridscan(config, &truth),
        _ => run_active(config, &truth),
    }
}

fn truth_gradient(truth: &GroundTruth) -> Result<GradientMap> {
    let g = gradient_norm_map(&truth.map.values);
    if !(g.total() > 0.0) {
        return Err(Error::GroundTruth("ground-truth map is flat; r(n) is undefined".into()));
    }
    Ok(g)
}

/// Probe position and simulated clock.
struct Clock<'a> {
    metric: RampMetric,
    per_pixel: f64,
    at: (f64, f64),
    t: f64,
    order: Vec<Pixel>,
    times: Vec<f64>,
    window: &'a crate::grid::VoltageWindow,
}

impl<'a> Clock<'a> {
    fn new(config: &'a ExperimentConfig) -> Self {
        let tm = &config.time_model;
        Self {
            metric: tm.metric(&config.window),
            per_pixel: tm.settle_time + tm.per_pixel_read,
            at: config.window.origin(),
            t: 0.0,
            order: Vec::new(),
            times: Vec::new(),
            window: &config.window,
        }
    }

    fn visit(&mut self, p: Pixel) {
        let v = self.window.voltages(p);
        self.t += self.per_pixel + self.metric.between(self.at, v);
        self.at = v;
        self.order.push(p);
        self.times.push(self.t);
    }
}

fn measurement_limit(config: &ExperimentConfig) -> usize {
    let mut limit = config.window.n_pixels();
    if let Some(m) = config.max_measurements {
        limit = limit.min(m);
    }
    if config.stop.mode == StopMode::Budget {
        if let Some(t) = config.stop.total_budget {
            limit = limit.min(t.floor() as usize);
        }
    }
    limit
}

/// Alternating grid-scan baseline.
pub fn run_gridscan(config: &ExperimentConfig, truth: &GroundTruth) -> Result<RunRecord> {
    config.validate()?;
    check_truth_shape(config, truth)?;
    let (rows, cols) = config.window.resolution;
    let stages = gridscan_order(rows, cols, config.initial_grid)?;
    let gradient = truth_gradient(truth)?;
    let limit = measurement_limit(config);
    let mut clock = Clock::new(config);
    let mut events = Vec::new();
    for (b, stage) in stages.into_iter().enumerate() {
        let n = clock.order.len();
        if n >= limit {
            break;
        }
        let take: Vec<Pixel> = stage.into_iter().take(limit - n).collect();
        events.push(StepEvent {
            n,
            batch_index: b,
            locations: take.clone(),
            acquisition_stats: None,
            weight_entropy: None,
            mh_acceptance: None,
            elapsed: clock.t,
            r: None,
            estimate: None,
            decision: None,
        });
        take.into_iter().for_each(|p| clock.visit(p));
    }
    let r_curve = error_curve(&clock.order, &gradient)?;
    for e in &mut events {
        e.r = Some(r_curve[e.n]);
    }
    Ok(RunRecord {
        summary: RunSummary {
            mode: Mode::Gridscan,
            n_pixels: config.window.n_pixels(),
            measured: clock.order.len(),
            truth_fingerprint: truth.fingerprint,
            stop_n: None,
            stop_time: None,
            total_time: clock.t,
            compute_seconds: 0.0,
        },
        config: config.clone(),
        events,
        order: clock.order,
        times: clock.times,
        r_curve,
    })
}

fn check_truth_shape(config: &ExperimentConfig, truth: &GroundTruth) -> Result<()> {
    if truth.map.values.dim() != config.window.resolution {
        return Err(Error::GroundTruthMismatch(format!(
            "ground truth is {:?}, configured window is {:?}",
            truth.map.values.dim(),
            config.window.resolution
        )));
    }
    Ok(())
}

/// Noise profiles for the estimate augmentation, generators cycled in order.
pub fn augmentation_profiles(
    config: &ExperimentConfig,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<NoiseProfile>> {
    let (rows, cols) = config.window.resolution;
    let kinds = &config.augmentation.kinds;
    (0..config.augmentation.profiles)
        .map(|j| synthesize_noise_profile(&kinds[j % kinds.len()], rows, cols, j + 1, rng))
        .collect()
}

struct ActiveState<'a> {
    config: &'a ExperimentConfig,
    backend: PhysicsBackend,
    scaled: CurrentMap,
    cond: ConditioningInput,
    obs: ObservationSet,
    ens: ReconstructionEnsemble,
    profiles: Vec<NoiseProfile>,
    clock: Clock<'a>,
    gradient: GradientMap,
    measured_mass: f64,
    events: Vec<StepEvent>,
    stop: Option<(usize, f64)>,
    compute: f64,
    rng: ChaCha8Rng,
}

impl ActiveState<'_> {
    fn r_now(&self) -> f64 {
        (1.0 - self.measured_mass / self.gradient.total()).clamp(0.0, 1.0)
    }

    fn acquire(&mut self, p: Pixel) -> Result<()> {
        let y = self.scaled.at(p);
        self.obs.push(p, y)?;
        self.ens = self.ens.update_weights_incremental(p, y)?;
        self.measured_mass += self.gradient.values[[p.row, p.col]];
        self.clock.visit(p);
        Ok(())
    }

    fn acquisition_map(&self) -> Result<AcquisitionMap> {
        match self.config.mode {
            Mode::SegmentationBatch => {
                segmentation_disagreement_map(&self.ens, &self.backend, &self.obs, self.config.segmentation_noise)
            }
            _ => information_gain_map(&self.ens, &self.obs),
        }
    }

    fn resample(&mut self) -> Result<f64> {
        let (ens, diag) = mh_resample(&self.ens, &self.obs, &self.cond, &self.backend, &self.config.mh, &mut self.rng)?;
        self.ens = ens;
        Ok(diag.mean_acceptance())
    }

    /// Estimates and stopping decision for measuring `planned` next.
    fn evaluate(&self, planned: &[Pixel]) -> Result<(crate::metrics::RealTimeEstimate, Option<StopDecision>)> {
        let aug = augment_noisy(&self.ens, &self.profiles, &self.config.augmentation.snr_levels)?;
        let est = augmented_r_estimates(&aug, self.obs.mask(), planned)?;
        let summary = est.summary()?;
        let stop = &self.config.stop;
        let decision = match stop.mode {
            StopMode::Off => None,
            _ if planned.is_empty() => None,
            mode => {
                let (total, remaining) = match mode {
                    StopMode::Budget => (stop.total_budget.unwrap_or(f64::INFINITY), stop.remaining),
                    _ => (f64::INFINITY, Remaining::Infinite),
                };
                let state = StoppingState {
                    t: self.obs.len() as f64,
                    total,
                    remaining,
                    delta: planned.len(),
                    n_pixels: self.config.window.n_pixels(),
                };
                Some(stopping_decide(&state, &est.now, &est.next)?)
            }
        };
        Ok((summary, decision))
    }

    fn unmeasured(&self) -> Vec<Pixel> {
        let cols = self.config.window.cols();
        self.obs
            .mask()
            .iter()
            .enumerate()
            .filter(|(_, &m)| !m)
            .map(|(i, _)| Pixel::from_index(i, cols))
            .collect()
    }

    fn record_stop(&mut self, decision: &Option<StopDecision>) -> bool {
        if let Some(d) = decision {
            if d.stop && self.stop.is_none() {
                self.stop = Some((self.obs.len(), self.clock.t));
                log::info!("stopping rule fired at n = {} (beta {:.3e} < {:.3e})", self.obs.len(), d.beta, d.threshold);
                return self.config.stop.halt_on_stop;
            }
        }
        false
    }
}

/// Active acquisition in batch, pixelwise or segmentation-batch mode.
pub fn run_active(config: &ExperimentConfig, truth: &GroundTruth) -> Result<RunRecord> {
    config.validate()?;
    check_truth_shape(config, truth)?;
    if config.mode == Mode::Gridscan {
        return run_gridscan(config, truth);
    }
    let (rows, cols) = config.window.resolution;
    let n_pixels = rows * cols;
    let limit = measurement_limit(config);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let (ri, ci) = config.initial_shape();
    let init = uniform_subgrid(rows, cols, ri, ci);
    let scaled = truth.map.rescaled(&init)?;
    let backend = PhysicsBackend::new(config.prior.clone(), config.window.clone())?;
    let cond = ConditioningInput::from_map(&scaled, &init);
    let profiles = augmentation_profiles(config, &mut rng)?;

    let mut obs = ObservationSet::new(rows, cols);
    let mut clock = Clock::new(config);
    let gradient = truth_gradient(truth)?;
    let mut measured_mass = 0.0;
    for &p in init.iter().take(limit) {
        obs.push(p, scaled.at(p))?;
        clock.visit(p);
        measured_mass += gradient.values[[p.row, p.col]];
    }
    let started = Instant::now();
    let ens = prior_ensemble(&backend, &cond, config.ensemble_size, config.lambda, &obs, &mut rng)?;
    let mut st = ActiveState {
        config,
        backend,
        scaled,
        cond,
        obs,
        ens,
        profiles,
        clock,
        gradient,
        measured_mass,
        events: Vec::new(),
        stop: None,
        compute: started.elapsed().as_secs_f64(),
        rng,
    };

    let outcome = drive(&mut st, init.len().max(1), limit);
    let r_curve = error_curve(&st.clock.order, &st.gradient)?;
    let record = RunRecord {
        summary: RunSummary {
            mode: config.mode,
            n_pixels,
            measured: st.clock.order.len(),
            truth_fingerprint: truth.fingerprint,
            stop_n: st.stop.map(|s| s.0),
            stop_time: st.stop.map(|s| s.1),
            total_time: st.clock.t,
            compute_seconds: st.compute,
        },
        config: config.clone(),
        events: st.events,
        order: st.clock.order,
        times: st.clock.times,
        r_curve,
    };
    if let Err(e) = outcome {
        if let Some(dir) = &config.out_dir {
            let path = dir.join("record.partial.jsonl");
            if std::fs::create_dir_all(dir).and(Ok(())).is_ok() && record.save(&path).is_ok() {
                log::error!("run failed after {} measurements; state saved to {}", record.summary.measured, path.display());
            }
        }
        return Err(e);
    }
    Ok(record)
}

fn drive(st: &mut ActiveState<'_>, first_resample: usize, limit: usize) -> Result<()> {
    let config = st.config;
    let n_pixels = config.window.n_pixels();
    let mut next_resample = first_resample;
    let mut batch_index = 0usize;
    while st.obs.len() < limit {
        let n = st.obs.len();
        let tic = Instant::now();
        let mut acceptance = None;
        if n >= next_resample {
            acceptance = Some(st.resample()?);
            while next_resample <= n {
                next_resample *= 2;
            }
        }
        let decision_point = acceptance.is_some() || st.events.is_empty();

        let (plan, stats, planned_for_stop) = match config.mode {
            Mode::Pixelwise => {
                let acq = st.acquisition_map()?;
                let p = select_pixel(&acq)?;
                let planned = if decision_point { top_locations(&acq, n.max(1).min(n_pixels - n)) } else { Vec::new() };
                (vec![p], Some(acq.stats()), planned)
            }
            _ => {
                let scheduled = config
                    .batch_base
                    .checked_shl(batch_index as u32 + 1)
                    .unwrap_or(usize::MAX)
                    .min(n_pixels - n);
                let (locations, stats) = if scheduled == n_pixels - n {
                    (plan_tour(&st.unmeasured(), st.clock.at, &st.clock.metric), None)
                } else {
                    let acq = st.acquisition_map()?;
                    let plan = select_batch(&acq, scheduled, batch_index, st.clock.at, &st.clock.metric)?;
                    (plan.locations, Some(acq.stats()))
                };
                (locations.clone(), stats, locations)
            }
        };
        let (estimate, decision) = if planned_for_stop.is_empty() {
            (None, None)
        } else {
            let (e, d) = st.evaluate(&planned_for_stop)?;
            (Some(e), d)
        };
        let spent = tic.elapsed().as_secs_f64();
        st.compute += spent;
        if config.include_compute_time {
            st.clock.t += spent;
        }

        let plan: Vec<Pixel> = plan.into_iter().take(limit - n).collect();
        st.events.push(StepEvent {
            n,
            batch_index,
            locations: plan.clone(),
            acquisition_stats: stats,
            weight_entropy: Some(st.ens.entropy()),
            mh_acceptance: acceptance,
            elapsed: st.clock.t,
            r: Some(st.r_now()),
            estimate,
            decision,
        });
        if st.record_stop(&decision) {
            break;
        }
        for p in plan {
            st.acquire(p)?;
        }
        batch_index += 1;
    }

    Ok(())
}
