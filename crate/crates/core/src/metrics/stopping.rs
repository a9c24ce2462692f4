use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of diagrams still to be measured after this one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Remaining {
    Infinite,
    Finite(u64),
}

impl FromStr for Remaining {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inf" | "infinite" => Ok(Remaining::Infinite),
            _ => s
                .parse()
                .map(Remaining::Finite)
                .map_err(|_| Error::Config(format!("remaining diagrams must be an integer or 'inf', got '{s}'"))),
        }
    }
}

impl fmt::Display for Remaining {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Remaining::Infinite => write!(f, "inf"),
            Remaining::Finite(k) => write!(f, "{k}"),
        }
    }
}

/// Budget bookkeeping at a decision point. One pixel costs 1.0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StoppingState {
    /// Budget spent so far.
    pub t: f64,
    /// Total budget.
    pub total: f64,
    pub remaining: Remaining,
    /// Size of the next batch.
    pub delta: usize,
    /// Pixels per map.
    pub n_pixels: usize,
}

impl StoppingState {
    pub fn alpha(&self) -> f64 {
        1.0 / self.n_pixels as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.delta == 0 {
            return Err(Error::Domain("batch size must be at least 1".into()));
        }
        if self.n_pixels == 0 {
            return Err(Error::Domain("map has no pixels".into()));
        }
        if !(self.t >= 0.0 && self.t <= self.total) {
            return Err(Error::Domain(format!("spent budget {} outside [0, {}]", self.t, self.total)));
        }
        Ok(())
    }

    /// Slope below which the next batch is not worth its cost.
    pub fn threshold(&self) -> f64 {
        let alpha = self.alpha();
        match self.remaining {
            Remaining::Infinite => alpha,
            Remaining::Finite(k) => {
                let cap = self.n_pixels as f64 * k as f64;
                let left = self.total - self.t;
                let d = self.delta as f64;
                alpha * (left.min(cap) - (left - d).min(cap)) / d
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StopDecision {
    pub stop: bool,
    pub beta: f64,
    pub threshold: f64,
}

/// `beta = min_m |r_m(n + delta) - r_m(n)| / delta`, stop iff `beta < threshold`.
pub fn stopping_decide(state: &StoppingState, now: &[f64], next: &[f64]) -> Result<StopDecision> {
    state.validate()?;
    if now.len() != next.len() || now.is_empty() {
        return Err(Error::Domain("need matching, non-empty estimates at n and n + delta".into()));
    }
    let d = state.delta as f64;
    let beta = now
        .iter()
        .zip(next)
        .map(|(a, b)| (b - a).abs() / d)
        .fold(f64::INFINITY, f64::min);
    let threshold = state.threshold();
    Ok(StopDecision {
        stop: beta < threshold,
        beta,
        threshold,
    })
}
