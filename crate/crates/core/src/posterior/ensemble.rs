use std::sync::Arc;

use super::{LatentVector, ObservationSet};
use crate::device::CurrentMap;
use crate::error::{Error, Result};
use crate::grid::Pixel;

#[derive(Clone, Debug)]
pub struct Reconstruction {
    pub latent: LatentVector,
    pub map: CurrentMap,
    pub clamped: bool,
}

/// `-lambda * sum |y - recon(x)|` over the given pairs.
pub fn log_likelihood(pairs: &[(Pixel, f64)], recon: &CurrentMap, lambda: f64) -> f64 {
    let mut s = 0.0;
    for &(x, y) in pairs {
        s += (y - recon.at(x)).abs();
    }
    -lambda * s
}

/// Normalised `exp(log_w)` with max-subtraction.
pub fn softmax(log_w: &[f64]) -> Result<Vec<f64>> {
    let max = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return Err(Error::DegenerateEnsemble(
            "every reconstruction has zero or undefined likelihood".into(),
        ));
    }
    let mut w: Vec<f64> = log_w.iter().map(|l| (l - max).exp()).collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    Ok(w)
}

/// Discrete posterior `P_n(m)` over a fixed set of reconstructions.
///
/// Members were drawn given the first `n_s` observations, so only the pairs
/// after `n_s` reweight them. Weight updates return a new ensemble that
/// shares the member maps with the old one.
#[derive(Clone, Debug)]
pub struct ReconstructionEnsemble {
    members: Arc<Vec<Reconstruction>>,
    log_lik: Vec<f64>,
    weights: Vec<f64>,
    n_s: usize,
    n: usize,
    measured: Vec<bool>,
    lambda: f64,
}

impl ReconstructionEnsemble {
    /// Uniform-weight ensemble sampled given every pair in `obs`.
    pub fn new(members: Vec<Reconstruction>, lambda: f64, obs: &ObservationSet) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::DegenerateEnsemble("ensemble has no members".into()));
        }
        let (rows, cols) = members[0].map.values.dim();
        if members.iter().any(|m| m.map.values.dim() != (rows, cols)) {
            return Err(Error::Domain("reconstructions must share one resolution".into()));
        }
        if obs.shape() != (rows, cols) {
            return Err(Error::Domain("observation grid does not match reconstruction resolution".into()));
        }
        let m = members.len();
        Ok(Self {
            members: Arc::new(members),
            log_lik: vec![0.0; m],
            weights: vec![1.0 / m as f64; m],
            n_s: obs.len(),
            n: obs.len(),
            measured: obs.mask().to_vec(),
            lambda,
        })
    }

    pub fn members(&self) -> &[Reconstruction] {
        &self.members
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Unnormalised log-weights (log-likelihood of the pairs after `n_s`).
    pub fn log_weights(&self) -> &[f64] {
        &self.log_lik
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn n_s(&self) -> usize {
        self.n_s
    }

    /// Number of observations reflected in the weights.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn shape(&self) -> (usize, usize) {
        self.members[0].map.values.dim()
    }

    pub fn is_measured(&self, x: Pixel) -> bool {
        self.measured[x.index(self.shape().1)]
    }

    pub fn measured_mask(&self) -> &[bool] {
        &self.measured
    }

    /// Weight entropy in nats.
    pub fn entropy(&self) -> f64 {
        -self.weights.iter().filter(|&&w| w > 0.0).map(|w| w * w.ln()).sum::<f64>()
    }

    /// Multiplies each weight by `exp(-lambda |y - recon_m(x)|)` and renormalises.
    pub fn update_weights_incremental(&self, x: Pixel, y: f64) -> Result<Self> {
        let (rows, cols) = self.shape();
        if x.row >= rows || x.col >= cols {
            return Err(Error::Domain(format!("location ({}, {}) lies outside the grid", x.row, x.col)));
        }
        if self.is_measured(x) {
            return Err(Error::DuplicateMeasurement { row: x.row, col: x.col });
        }
        let log_lik: Vec<f64> = self
            .log_lik
            .iter()
            .zip(self.members.iter())
            .map(|(l, m)| l + (-self.lambda * (y - m.map.at(x)).abs()))
            .collect();
        let weights = softmax(&log_lik)?;
        let mut measured = self.measured.clone();
        measured[x.index(cols)] = true;
        Ok(Self {
            members: Arc::clone(&self.members),
            log_lik,
            weights,
            n_s: self.n_s,
            n: self.n + 1,
            measured,
            lambda: self.lambda,
        })
    }

    /// Ensemble reweighted from scratch by every pair of `obs` after `n_s`.
    pub fn reweighted(&self, obs: &ObservationSet) -> Result<Self> {
        let log_lik = post_sampling_log_likelihoods(self, obs)?;
        let weights = softmax(&log_lik)?;
        Ok(Self {
            members: Arc::clone(&self.members),
            log_lik,
            weights,
            n_s: self.n_s,
            n: obs.len(),
            measured: obs.mask().to_vec(),
            lambda: self.lambda,
        })
    }
}

fn post_sampling_log_likelihoods(ensemble: &ReconstructionEnsemble, obs: &ObservationSet) -> Result<Vec<f64>> {
    if obs.len() < ensemble.n_s {
        return Err(Error::Domain(format!(
            "{} observations but the ensemble was sampled after {}",
            obs.len(),
            ensemble.n_s
        )));
    }
    let pairs = obs.slice(ensemble.n_s, obs.len());
    Ok(ensemble
        .members
        .iter()
        .map(|m| {
            // Accumulate in acquisition order so that incremental updates agree bitwise.
            let mut l = 0.0;
            for &(x, y) in pairs {
                l += -ensemble.lambda * (y - m.map.at(x)).abs();
            }
            l
        })
        .collect())
}

/// `P_n(m; n_s)`: softmax of the log-likelihoods of the observations after `n_s`.
pub fn posterior_weights(ensemble: &ReconstructionEnsemble, obs: &ObservationSet) -> Result<Vec<f64>> {
    softmax(&post_sampling_log_likelihoods(ensemble, obs)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::VoltageWindow;
    use ndarray::Array2;

    fn member(values: Array2<f64>) -> Reconstruction {
        let (r, c) = values.dim();
        Reconstruction {
            latent: LatentVector(vec![0.0]),
            map: CurrentMap::new(VoltageWindow::default().with_resolution(r, c), values),
            clamped: false,
        }
    }

    #[test]
    fn zero_residual_log_likelihood() {
        let m = member(Array2::from_shape_fn((2, 2), |(r, c)| (r * 2 + c) as f64));
        let pairs = vec![(Pixel::new(0, 1), 1.0), (Pixel::new(1, 1), 3.0)];
        assert_eq!(log_likelihood(&pairs, &m.map, 1.0), 0.0);
        assert_eq!(log_likelihood(&[(Pixel::new(0, 0), 2.0)], &m.map, 1.0), -2.0);
    }

    #[test]
    fn log_likelihood_is_additive() {
        let m = member(Array2::from_shape_fn((3, 3), |(r, c)| (r as f64 - c as f64) * 0.3));
        let pairs: Vec<_> = (0..9).map(|i| (Pixel::from_index(i, 3), i as f64 * 0.1)).collect();
        let full = log_likelihood(&pairs, &m.map, 1.3);
        let split = log_likelihood(&pairs[..4], &m.map, 1.3) + log_likelihood(&pairs[4..], &m.map, 1.3);
        assert!((full - split).abs() < 1e-12);
    }

    #[test]
    fn uniform_before_new_data() {
        let obs = ObservationSet::new(2, 2);
        let e = ReconstructionEnsemble::new(
            vec![member(Array2::zeros((2, 2))), member(Array2::ones((2, 2)))],
            1.0,
            &obs,
        )
        .unwrap();
        assert_eq!(posterior_weights(&e, &obs).unwrap(), vec![0.5, 0.5]);
    }

    #[test]
    fn two_thirds_one_third() {
        let obs0 = ObservationSet::new(1, 1);
        let a = member(Array2::zeros((1, 1)));
        let b = member(Array2::from_elem((1, 1), std::f64::consts::LN_2));
        let e = ReconstructionEnsemble::new(vec![a, b], 1.0, &obs0).unwrap();
        let mut obs = obs0.clone();
        obs.push(Pixel::new(0, 0), 0.0).unwrap();
        let w = posterior_weights(&e, &obs).unwrap();
        assert!((w[0] - 2.0 / 3.0).abs() < 1e-15 && (w[1] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn softmax_shift_invariance_and_underflow() {
        let a = softmax(&[-1.0, -2.0, -5.0]).unwrap();
        let b = softmax(&[-1001.0, -1002.0, -1005.0]).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-15);
        }
        assert!(softmax(&[f64::NEG_INFINITY; 3]).is_err());
    }

    #[test]
    fn identical_residuals_leave_weights() {
        let obs = ObservationSet::new(1, 2);
        let e = ReconstructionEnsemble::new(
            vec![
                member(Array2::from_shape_vec((1, 2), vec![0.0, 1.0]).unwrap()),
                member(Array2::from_shape_vec((1, 2), vec![0.0, 2.0]).unwrap()),
            ],
            1.0,
            &obs,
        )
        .unwrap();
        let e2 = e.update_weights_incremental(Pixel::new(0, 0), 0.7).unwrap();
        assert_eq!(e2.weights(), e.weights());
        assert!(matches!(
            e2.update_weights_incremental(Pixel::new(0, 0), 0.7),
            Err(Error::DuplicateMeasurement { .. })
        ));
    }
}
