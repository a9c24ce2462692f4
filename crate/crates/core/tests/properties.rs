mod common;

use dotscan::acquisition::pixel_information_gain;
use dotscan::device::CurrentMap;
use dotscan::grid::{uniform_subgrid, Pixel};
use dotscan::harness::gridscan_order;
use dotscan::metrics::{
    error_curve, error_r, gradient_norm_map, optimal_r, stopping_decide, weighted_percentile, Remaining, StoppingState,
};
use dotscan::posterior::{
    fit_affine_l1, posterior_weights, softmax, LatentVector, ObservationSet, Reconstruction, ReconstructionEnsemble,
};
use ndarray::Array2;
use proptest::prelude::*;

use common::unit_window;

fn map_strategy(max_side: usize) -> impl Strategy<Value = Array2<f64>> {
    (1..=max_side, 1..=max_side).prop_flat_map(|(r, c)| {
        prop::collection::vec(-5.0..5.0f64, r * c).prop_map(move |v| Array2::from_shape_vec((r, c), v).unwrap())
    })
}

fn ensemble_from(maps: &[Vec<f64>], side: usize, lambda: f64) -> ReconstructionEnsemble {
    let window = unit_window(side, side);
    let members = maps
        .iter()
        .enumerate()
        .map(|(k, v)| Reconstruction {
            latent: LatentVector(vec![k as f64]),
            map: CurrentMap::new(window.clone(), Array2::from_shape_vec((side, side), v.clone()).unwrap()),
            clamped: false,
        })
        .collect();
    ReconstructionEnsemble::new(members, lambda, &ObservationSet::new(side, side)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn softmax_lands_on_the_simplex(logw in prop::collection::vec(-1e4..1e4f64, 1..50)) {
        let w = softmax(&logw).unwrap();
        prop_assert!(w.iter().all(|x| *x >= 0.0));
        prop_assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn information_gain_is_non_negative(
        values in prop::collection::vec(-3.0..3.0f64, 1..8),
        raw in prop::collection::vec(0.01..1.0f64, 8),
        lambda in 0.0..5.0f64,
    ) {
        let w: Vec<f64> = raw[..values.len()].to_vec();
        let total: f64 = w.iter().sum();
        let w: Vec<f64> = w.iter().map(|x| x / total).collect();
        let ig = pixel_information_gain(&values, &w, lambda, &mut Vec::new());
        prop_assert!(ig >= 0.0 && ig.is_finite());
        let same = vec![values[0]; values.len()];
        prop_assert!(pixel_information_gain(&same, &w, lambda, &mut Vec::new()).abs() < 1e-12);
    }

    #[test]
    fn incremental_weights_equal_batch_recompute(
        maps in prop::collection::vec(prop::collection::vec(-2.0..2.0f64, 16), 1..6),
        steps in prop::collection::vec((0usize..16, -2.0..2.0f64), 1..30),
        lambda in 0.0..4.0f64,
    ) {
        let base = ensemble_from(&maps, 4, lambda);
        let mut ens = base.clone();
        let mut obs = ObservationSet::new(4, 4);
        for (i, y) in steps {
            let x = Pixel::from_index(i, 4);
            if obs.contains(x) {
                prop_assert!(ens.update_weights_incremental(x, y).is_err());
                continue;
            }
            obs.push(x, y).unwrap();
            ens = ens.update_weights_incremental(x, y).unwrap();
            let batch = posterior_weights(&base, &obs).unwrap();
            for (a, b) in ens.weights().iter().zip(&batch) {
                prop_assert!((a - b).abs() <= 1e-12);
            }
            prop_assert!((ens.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn closer_reconstruction_never_loses_weight(
        truth in prop::collection::vec(-2.0..2.0f64, 16),
        offsets in prop::collection::vec(0.0..1.0f64, 16),
        extra in prop::collection::vec(0.0..1.0f64, 16),
        observed in prop::collection::vec(any::<bool>(), 16),
    ) {
        let near: Vec<f64> = truth.iter().zip(&offsets).map(|(t, o)| t + o).collect();
        let far: Vec<f64> = truth.iter().zip(offsets.iter().zip(&extra)).map(|(t, (o, e))| t + o + e).collect();
        let mut ens = ensemble_from(&[near, far], 4, 1.0);
        for (i, &m) in observed.iter().enumerate() {
            if m {
                ens = ens.update_weights_incremental(Pixel::from_index(i, 4), truth[i]).unwrap();
            }
        }
        prop_assert!(ens.weights()[0] >= ens.weights()[1]);
    }

    #[test]
    fn error_curve_is_non_increasing_and_above_optimal(y in map_strategy(10), seed in any::<u64>()) {
        let g = gradient_norm_map(&y);
        prop_assume!(g.total() > 0.0);
        let (rows, cols) = y.dim();
        let mut order: Vec<Pixel> = (0..rows * cols).map(|i| Pixel::from_index(i, cols)).collect();
        let mut s = seed;
        for i in (1..order.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            order.swap(i, (s >> 33) as usize % (i + 1));
        }
        let curve = error_curve(&order, &g).unwrap();
        prop_assert!(curve.windows(2).all(|w| w[1] <= w[0]));
        for (n, r) in curve.iter().enumerate() {
            prop_assert!(optimal_r(&g, n).unwrap() <= r + 1e-12);
            prop_assert!((error_r(&order[..n], &g).unwrap() - r).abs() <= 1e-12);
        }
    }

    #[test]
    fn finite_budget_threshold_never_exceeds_alpha(
        n_pixels in 1usize..20_000,
        t in 0.0..50_000.0f64,
        extra in 0.0..50_000.0f64,
        delta in 1usize..5_000,
        k in 1u64..5,
    ) {
        let finite = StoppingState { t, total: t + extra, remaining: Remaining::Finite(k), delta, n_pixels };
        let alpha = finite.alpha();
        prop_assert!(finite.threshold() <= alpha * (1.0 + 1e-12));
        prop_assert!(finite.threshold() >= 0.0);
        let infinite = StoppingState { remaining: Remaining::Infinite, ..finite };
        prop_assert_eq!(infinite.threshold(), alpha);
    }

    #[test]
    fn steep_members_never_stop(
        now in prop::collection::vec(0.0..1.0f64, 1..20),
        excess in prop::collection::vec(1.001..10.0f64, 20),
        delta in 1usize..500,
    ) {
        let state = StoppingState { t: 0.0, total: f64::INFINITY, remaining: Remaining::Infinite, delta, n_pixels: 1000 };
        let next: Vec<f64> = now.iter().zip(&excess).map(|(r, e)| r - e * state.alpha() * delta as f64).collect();
        let d = stopping_decide(&state, &now, &next).unwrap();
        prop_assert!(!d.stop);
        prop_assert!(d.beta > state.alpha());
    }

    #[test]
    fn rescaling_normalises_the_initial_grid(y in map_strategy(16)) {
        let (rows, cols) = y.dim();
        let init = uniform_subgrid(rows, cols, rows.min(8), cols.min(8));
        let scale = init.iter().map(|p| y[[p.row, p.col]].abs()).fold(0.0, f64::max);
        prop_assume!(scale > 0.0);
        let map = CurrentMap::new(unit_window(rows, cols), y);
        let scaled = map.rescaled(&init).unwrap();
        let max = init.iter().map(|&p| scaled.at(p).abs()).fold(0.0, f64::max);
        prop_assert!((max - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gridscan_visits_every_pixel_once(log_r in 3u32..8, log_c in 3u32..8) {
        let (rows, cols) = (1usize << log_r, 1usize << log_c);
        let stages = gridscan_order(rows, cols, 8).unwrap();
        let mut seen = vec![false; rows * cols];
        for p in stages.iter().flatten() {
            prop_assert!(!seen[p.index(cols)]);
            seen[p.index(cols)] = true;
        }
        prop_assert!(seen.iter().all(|s| *s));
    }

    #[test]
    fn affine_l1_fit_beats_nearby_candidates(
        raw in prop::collection::vec(0.0..4.0f64, 2..64),
        a in -2.0..2.0f64,
        b in 0.0..3.0f64,
        noise in prop::collection::vec(-0.5..0.5f64, 64),
    ) {
        let target: Vec<f64> = raw.iter().zip(&noise).map(|(x, e)| a + b * x + e).collect();
        let cost = |o: f64, s: f64| raw.iter().zip(&target).map(|(x, t)| (t - o - s * x).abs()).sum::<f64>();
        let (o, s) = fit_affine_l1(&raw, &target);
        prop_assert!(s >= 0.0);
        let best = cost(o, s);
        for (d_o, d_s) in [(0.01, 0.0), (-0.01, 0.0), (0.0, 0.01), (0.0, -0.01), (0.01, 0.01), (-0.01, -0.01)] {
            if s + d_s >= 0.0 {
                prop_assert!(best <= cost(o + d_o, s + d_s) + 1e-6);
            }
        }
        prop_assert!(best <= cost(a, b) + 1e-6);
    }

    #[test]
    fn weighted_percentile_is_bracketed_and_monotone(
        values in prop::collection::vec(-10.0..10.0f64, 1..30),
        raw in prop::collection::vec(0.01..1.0f64, 30),
        q1 in 0.0..1.0f64,
        q2 in 0.0..1.0f64,
    ) {
        let w = &raw[..values.len()];
        let (lo, hi) = (q1.min(q2), q1.max(q2));
        let a = weighted_percentile(&values, w, lo).unwrap();
        let b = weighted_percentile(&values, w, hi).unwrap();
        prop_assert!(a <= b);
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(min <= a && b <= max);
    }

    #[test]
    fn pixel_index_round_trips(row in 0usize..500, col in 0usize..500, cols in 500usize..1000) {
        let p = Pixel::new(row, col);
        prop_assert_eq!(Pixel::from_index(p.index(cols), cols), p);
    }

    #[test]
    fn remaining_round_trips_through_text(k in any::<u64>()) {
        let r = Remaining::Finite(k);
        prop_assert_eq!(r.to_string().parse::<Remaining>().unwrap(), r);
    }
}
