use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Constant-interaction parameters of a single dot.
///
/// Capacitances, energies and voltages share one arbitrary unit system with
/// the electron charge set to 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviceParams {
    pub c_source: f64,
    pub c_drain: f64,
    pub c_gate: f64,
    /// Background-charge offset N0.
    pub n_offset: f64,
    /// Single-particle energies E_1, E_2, ... (nondecreasing). Their count is
    /// the number of dot levels that are simulated.
    pub level_spacings: Vec<f64>,
    /// Capacitances for the N-th electron are scaled by `1 + slope * (N - 1)`.
    pub cap_scale_slope: f64,
    /// Excited-state offset above the ground transition, per N.
    #[serde(default)]
    pub transition_levels: Option<Vec<f64>>,
    #[serde(default)]
    pub rng_seed: u64,
}

impl DeviceParams {
    pub fn c_total(&self) -> f64 {
        self.c_source + self.c_drain + self.c_gate
    }

    pub fn n_levels(&self) -> usize {
        self.level_spacings.len()
    }

    pub fn validate(&self) -> Result<()> {
        for (name, c) in [("c_source", self.c_source), ("c_drain", self.c_drain), ("c_gate", self.c_gate)] {
            if !(c.is_finite() && c > 0.0) {
                return Err(Error::Domain(format!("{name} must be finite and > 0, got {c}")));
            }
        }
        if !self.n_offset.is_finite() || !self.cap_scale_slope.is_finite() {
            return Err(Error::Domain("n_offset and cap_scale_slope must be finite".into()));
        }
        if self.level_spacings.iter().any(|e| !e.is_finite() || *e < 0.0) {
            return Err(Error::Domain("level energies must be finite and >= 0".into()));
        }
        if self.level_spacings.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Domain("level energies must be nondecreasing".into()));
        }
        if let Some(t) = &self.transition_levels {
            if t.iter().any(|d| !d.is_finite()) {
                return Err(Error::Domain("transition levels must be finite".into()));
            }
        }
        for n in 1..=self.n_levels().max(1) {
            self.cap_scale(n)?;
        }
        Ok(())
    }

    /// Linear capacitance scale applied while the dot holds `n` electrons.
    pub fn cap_scale(&self, n: usize) -> Result<f64> {
        let f = 1.0 + self.cap_scale_slope * (n as f64 - 1.0);
        if f > 0.0 {
            Ok(f)
        } else {
            Err(Error::Domain(format!("capacitance scale for N={n} is non-positive ({f})")))
        }
    }

    /// E_N, extended with the last listed energy for N beyond the list.
    pub fn level_energy(&self, n: usize) -> f64 {
        if n == 0 || self.level_spacings.is_empty() {
            return 0.0;
        }
        let i = (n - 1).min(self.level_spacings.len() - 1);
        self.level_spacings[i]
    }

    pub fn transition_offset(&self, n: usize) -> Option<f64> {
        self.transition_levels.as_ref().and_then(|t| t.get(n.checked_sub(1)?).copied())
    }
}

/// Uniform ranges from which device parameters are drawn.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PriorConfig {
    pub c_source: (f64, f64),
    pub c_drain: (f64, f64),
    pub c_gate: (f64, f64),
    pub n_offset: (f64, f64),
    pub cap_scale_slope: (f64, f64),
    /// Number of dot levels. E_1 is 0 and each further level adds an
    /// increment drawn from `level_increment`.
    pub n_levels: usize,
    pub level_increment: (f64, f64),
    /// Probability that a sampled device carries excited-state transitions.
    pub transition_probability: f64,
    pub transition_offset: (f64, f64),
}

impl Default for PriorConfig {
    fn default() -> Self {
        Self {
            c_source: (0.25, 0.5),
            c_drain: (0.2, 0.4),
            c_gate: (0.35, 0.6),
            n_offset: (0.0, 1.0),
            cap_scale_slope: (-0.03, 0.03),
            n_levels: 8,
            level_increment: (0.0, 0.4),
            transition_probability: 0.3,
            transition_offset: (0.3, 2.0),
        }
    }
}

fn check_range(name: &str, r: (f64, f64)) -> Result<()> {
    if r.0.is_finite() && r.1.is_finite() && r.0 <= r.1 {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} range {r:?} is empty or non-finite")))
    }
}

impl PriorConfig {
    pub fn validate(&self) -> Result<()> {
        check_range("c_source", self.c_source)?;
        check_range("c_drain", self.c_drain)?;
        check_range("c_gate", self.c_gate)?;
        check_range("n_offset", self.n_offset)?;
        check_range("cap_scale_slope", self.cap_scale_slope)?;
        check_range("level_increment", self.level_increment)?;
        check_range("transition_offset", self.transition_offset)?;
        for (name, r) in [("c_source", self.c_source), ("c_drain", self.c_drain), ("c_gate", self.c_gate)] {
            if r.0 <= 0.0 {
                return Err(Error::Config(format!("{name} range must be strictly positive")));
            }
        }
        if self.level_increment.0 < 0.0 {
            return Err(Error::Config("level increments must be >= 0".into()));
        }
        if self.n_levels == 0 {
            return Err(Error::Config("n_levels must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.transition_probability) {
            return Err(Error::Config("transition_probability must lie in [0, 1]".into()));
        }
        let worst = self.cap_scale_slope.0.min(0.0) * (self.n_levels as f64 - 1.0);
        if 1.0 + worst <= 0.0 {
            return Err(Error::Config("cap_scale_slope range allows non-positive capacitances".into()));
        }
        Ok(())
    }

    /// Builds parameters from unit-interval coordinates, one per free parameter,
    /// in the order used by the latent encoding.
    pub fn params_from_unit(&self, u: &[f64], transitions: Option<Vec<f64>>, rng_seed: u64) -> DeviceParams {
        let lerp = |r: (f64, f64), t: f64| r.0 + (r.1 - r.0) * t;
        let mut spacings = Vec::with_capacity(self.n_levels);
        let mut e = 0.0;
        spacings.push(e);
        for k in 1..self.n_levels {
            e += lerp(self.level_increment, u[5 + k - 1]);
            spacings.push(e);
        }
        DeviceParams {
            c_source: lerp(self.c_source, u[0]),
            c_drain: lerp(self.c_drain, u[1]),
            c_gate: lerp(self.c_gate, u[2]),
            n_offset: lerp(self.n_offset, u[3]),
            cap_scale_slope: lerp(self.cap_scale_slope, u[4]),
            level_spacings: spacings,
            transition_levels: transitions,
            rng_seed,
        }
    }

    /// Number of unit coordinates consumed by [`Self::params_from_unit`].
    pub fn n_free(&self) -> usize {
        5 + self.n_levels - 1
    }
}

/// Draws device parameters uniformly from the configured ranges.
pub fn sample_device_params<R: Rng + ?Sized>(rng: &mut R, config: &PriorConfig) -> Result<DeviceParams> {
    config.validate()?;
    let u: Vec<f64> = (0..config.n_free()).map(|_| rng.random::<f64>()).collect();
    let transitions = if rng.random::<f64>() < config.transition_probability {
        let (lo, hi) = config.transition_offset;
        Some((0..config.n_levels).map(|_| lo + (hi - lo) * rng.random::<f64>()).collect())
    } else {
        None
    };
    let seed = rng.random::<u64>();
    Ok(config.params_from_unit(&u, transitions, seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn degenerate_ranges_are_deterministic() {
        let cfg = PriorConfig {
            c_source: (0.3, 0.3),
            c_drain: (0.2, 0.2),
            c_gate: (0.5, 0.5),
            n_offset: (0.1, 0.1),
            cap_scale_slope: (0.0, 0.0),
            level_increment: (0.1, 0.1),
            transition_probability: 0.0,
            ..PriorConfig::default()
        };
        let a = sample_device_params(&mut ChaCha8Rng::seed_from_u64(1), &cfg).unwrap();
        let b = sample_device_params(&mut ChaCha8Rng::seed_from_u64(2), &cfg).unwrap();
        assert_eq!(a.c_source, 0.3);
        assert_eq!(a.level_spacings, b.level_spacings);
        assert_eq!((a.c_gate, a.n_offset), (b.c_gate, b.n_offset));
    }

    #[test]
    fn draws_stay_in_support() {
        let cfg = PriorConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10_000 {
            let p = sample_device_params(&mut rng, &cfg).unwrap();
            assert!((cfg.c_source.0..=cfg.c_source.1).contains(&p.c_source));
            assert!((cfg.c_drain.0..=cfg.c_drain.1).contains(&p.c_drain));
            assert!((cfg.c_gate.0..=cfg.c_gate.1).contains(&p.c_gate));
            assert!((cfg.n_offset.0..=cfg.n_offset.1).contains(&p.n_offset));
            assert!((cfg.cap_scale_slope.0..=cfg.cap_scale_slope.1).contains(&p.cap_scale_slope));
            for w in p.level_spacings.windows(2) {
                let inc = w[1] - w[0];
                assert!(inc >= cfg.level_increment.0 - 1e-12 && inc <= cfg.level_increment.1 + 1e-12);
            }
            if let Some(t) = &p.transition_levels {
                assert!(t.iter().all(|d| (cfg.transition_offset.0..=cfg.transition_offset.1).contains(d)));
            }
            p.validate().unwrap();
        }
    }

    #[test]
    fn seeding() {
        let cfg = PriorConfig::default();
        let a = sample_device_params(&mut ChaCha8Rng::seed_from_u64(3), &cfg).unwrap();
        let b = sample_device_params(&mut ChaCha8Rng::seed_from_u64(3), &cfg).unwrap();
        let c = sample_device_params(&mut ChaCha8Rng::seed_from_u64(4), &cfg).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn invalid_range_is_config_error() {
        let cfg = PriorConfig {
            c_gate: (0.6, 0.3),
            ..PriorConfig::default()
        };
        let err = sample_device_params(&mut ChaCha8Rng::seed_from_u64(0), &cfg).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn json_is_flat() {
        let p = sample_device_params(&mut ChaCha8Rng::seed_from_u64(5), &PriorConfig::default()).unwrap();
        let v = serde_json::to_value(&p).unwrap();
        assert!(v.as_object().unwrap().values().all(|x| !x.is_object()));
        let back: DeviceParams = serde_json::from_value(v).unwrap();
        assert_eq!(back, p);
    }
}
