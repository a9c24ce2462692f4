//! Random-walk Metropolis-Hastings refresh of the ensemble's latent vectors.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{ConditioningInput, GenerativeBackend, LatentVector, ObservationSet, Reconstruction, ReconstructionEnsemble};
use crate::error::{Error, Result};
use crate::grid::Pixel;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MhConfig {
    pub iterations: usize,
    /// Per-coordinate standard deviation of the Gaussian proposal (0.5 gives
    /// covariance I/4).
    pub proposal_std: f64,
}

impl Default for MhConfig {
    fn default() -> Self {
        Self {
            iterations: 400,
            proposal_std: 0.5,
        }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct MhDiagnostics {
    /// Fraction of accepted proposals, per chain.
    pub acceptance_rates: Vec<f64>,
    /// Mean log-likelihood over chains after each iteration.
    pub log_likelihood_trace: Vec<f64>,
    /// Chains whose final latent vector needed clamping.
    pub clamped: usize,
}

impl MhDiagnostics {
    pub fn mean_acceptance(&self) -> f64 {
        if self.acceptance_rates.is_empty() {
            0.0
        } else {
            self.acceptance_rates.iter().sum::<f64>() / self.acceptance_rates.len() as f64
        }
    }
}

fn log_prior(z: &[f64]) -> f64 {
    -0.5 * z.iter().map(|x| x * x).sum::<f64>()
}

struct ObservedPixels {
    pixels: Vec<Pixel>,
    values: Vec<f64>,
}

fn chain_log_likelihood<B: GenerativeBackend + ?Sized>(
    backend: &B,
    z: &LatentVector,
    cond: &ConditioningInput,
    obs: &ObservedPixels,
    lambda: f64,
) -> Result<f64> {
    if lambda == 0.0 || obs.pixels.is_empty() {
        return Ok(0.0);
    }
    let pred = backend.decode_at(z, cond, &obs.pixels)?;
    let mut s = 0.0;
    for (p, y) in pred.iter().zip(&obs.values) {
        s += (y - p).abs();
    }
    Ok(-lambda * s)
}

/// Runs one chain per member, starting from the member's latent vector, with
/// target `p(z) * exp(log_likelihood(obs, decode(z)))`. The final chain
/// states become the new members with uniform weights and `n_s = obs.len()`.
pub fn mh_resample<B, R>(
    ensemble: &ReconstructionEnsemble,
    obs: &ObservationSet,
    cond: &ConditioningInput,
    backend: &B,
    config: &MhConfig,
    rng: &mut R,
) -> Result<(ReconstructionEnsemble, MhDiagnostics)>
where
    B: GenerativeBackend + ?Sized,
    R: Rng + ?Sized,
{
    if config.iterations == 0 {
        return Err(Error::Config("MH needs at least one iteration".into()));
    }
    if !(config.proposal_std >= 0.0 && config.proposal_std.is_finite()) {
        return Err(Error::Config("proposal_std must be finite and >= 0".into()));
    }
    let lambda = ensemble.lambda();
    let observed = ObservedPixels {
        pixels: obs.locations().collect(),
        values: obs.pairs().iter().map(|(_, y)| *y).collect(),
    };
    let seeds: Vec<u64> = (0..ensemble.len()).map(|_| rng.random()).collect();

    let mut states = Vec::with_capacity(ensemble.len());
    let mut diag = MhDiagnostics {
        log_likelihood_trace: vec![0.0; config.iterations],
        ..Default::default()
    };
    for (member, seed) in ensemble.members().iter().zip(seeds) {
        let mut crng = ChaCha8Rng::seed_from_u64(seed);
        let mut z = member.latent.clone();
        let mut ll = chain_log_likelihood(backend, &z, cond, &observed, lambda)?;
        let mut lp = log_prior(&z.0);
        let mut accepted = 0usize;
        for it in 0..config.iterations {
            let proposal = LatentVector(
                z.0.iter()
                    .map(|x| {
                        let e: f64 = StandardNormal.sample(&mut crng);
                        x + config.proposal_std * e
                    })
                    .collect(),
            );
            let u: f64 = crng.random();
            let ll_new = chain_log_likelihood(backend, &proposal, cond, &observed, lambda)?;
            let lp_new = log_prior(&proposal.0);
            let log_ratio = (lp_new + ll_new) - (lp + ll);
            if log_ratio >= 0.0 || u.ln() < log_ratio {
                z = proposal;
                ll = ll_new;
                lp = lp_new;
                accepted += 1;
            }
            diag.log_likelihood_trace[it] += ll;
        }
        diag.acceptance_rates.push(accepted as f64 / config.iterations as f64);
        states.push(z);
    }
    let m = states.len() as f64;
    diag.log_likelihood_trace.iter_mut().for_each(|x| *x /= m);

    let mut members = Vec::with_capacity(states.len());
    for z in states {
        let d = backend.decode(&z, cond)?;
        diag.clamped += d.clamped as usize;
        members.push(Reconstruction {
            latent: z,
            map: d.map,
            clamped: d.clamped,
        });
    }
    Ok((ReconstructionEnsemble::new(members, lambda, obs)?, diag))
}

/// Decodes `m` draws from the standard-normal latent prior.
pub fn prior_ensemble<B, R>(
    backend: &B,
    cond: &ConditioningInput,
    m: usize,
    lambda: f64,
    obs: &ObservationSet,
    rng: &mut R,
) -> Result<ReconstructionEnsemble>
where
    B: GenerativeBackend + ?Sized,
    R: Rng + ?Sized,
{
    let d = backend.latent_dim();
    let mut members = Vec::with_capacity(m);
    for _ in 0..m {
        let z = LatentVector((0..d).map(|_| StandardNormal.sample(rng)).collect());
        let dec = backend.decode(&z, cond)?;
        members.push(Reconstruction {
            latent: z,
            map: dec.map,
            clamped: dec.clamped,
        });
    }
    ReconstructionEnsemble::new(members, lambda, obs)
}
