//! Recursive Bayesian goal-intent filter.
//!
//! Each tick the posterior over goals is proportional to
//!
//! ```text
//! likelihood(z | g) * sum_g' P(g | g') prior(g') * action(g)
//! ```
//!
//! where the likelihood combines the heading-relative bearing and the planner
//! path length to each goal (min-max normalized across goals, then passed
//! through `exp(-z / w)`), the transition keeps the previous goal with
//! probability `1 - delta`, and the action factor carries explicit operator
//! clicks (see [`airm`]).

pub mod airm;
mod belief;
mod filter;
mod observation;

pub use airm::{airm_activate, airm_factor, decay_rate, AirmResidual, AirmState};
pub use belief::{argmax, predict_intent, Belief, SUM_TOLERANCE};
pub use filter::{boir_update, transition_predict, transition_row, BoirFilter};
pub use observation::{
    normalize_minmax, normalize_observations, observation_likelihood, NormalizedObservations,
    Observation, ObservationSet,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum EstimatorError {
    #[error("at least 2 goals are required, got {0}")]
    TooFewGoals(usize),
    #[error("invalid belief: {0}")]
    InvalidBelief(String),
    #[error("posterior mass vanished")]
    ZeroMass,
    #[error("expected {expected} observations, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("goal index {0} out of range")]
    UnknownGoal(usize),
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
}

/// Filter parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimatorParams {
    /// Weight of the bearing evidence.
    pub w_phi: f64,
    /// Weight of the path-length evidence.
    pub w_len: f64,
    /// Probability of switching goals between ticks.
    pub delta: f64,
    /// Prior mass put on a clicked goal (lambda).
    pub activated_belief: f64,
    /// Floor of the clicked goal's action factor (tB).
    pub threshold_belief: f64,
    /// Click horizon T in seconds.
    pub horizon_secs: f64,
    /// Ticks per second.
    pub tick_rate: f64,
    /// Action factor of the goals that were not clicked.
    pub airm_residual: AirmResidual,
}

impl Default for EstimatorParams {
    fn default() -> Self {
        Self {
            w_phi: 0.6,
            w_len: 0.4,
            delta: 0.2,
            activated_belief: 0.95,
            threshold_belief: 0.35,
            horizon_secs: 10.0,
            tick_rate: 10.0,
            airm_residual: AirmResidual::Shared,
        }
    }
}

impl EstimatorParams {
    pub fn validate(&self) -> Result<(), EstimatorError> {
        let bad = |msg: String| Err(EstimatorError::InvalidParams(msg));
        let open_unit = |v: f64| v > 0.0 && v < 1.0;
        if !open_unit(self.w_phi) || !open_unit(self.w_len) {
            return bad(format!(
                "weights must lie in (0, 1), got w_phi={} w_len={}",
                self.w_phi, self.w_len
            ));
        }
        if (self.w_phi + self.w_len - 1.0).abs() > 1e-12 {
            return bad(format!(
                "weights must sum to 1, got {}",
                self.w_phi + self.w_len
            ));
        }
        if !(self.delta >= 0.0 && self.delta < 1.0) {
            return bad(format!("delta must lie in [0, 1), got {}", self.delta));
        }
        if !(self.threshold_belief > 0.0
            && self.threshold_belief < self.activated_belief
            && self.activated_belief < 1.0)
        {
            return bad(format!(
                "need 0 < threshold_belief < activated_belief < 1, got {} and {}",
                self.threshold_belief, self.activated_belief
            ));
        }
        if !(self.horizon_secs > 0.0 && self.horizon_secs.is_finite()) {
            return bad(format!("horizon must be positive, got {}", self.horizon_secs));
        }
        if !(self.tick_rate > 0.0 && self.tick_rate.is_finite()) {
            return bad(format!("tick rate must be positive, got {}", self.tick_rate));
        }
        Ok(())
    }

    /// Click horizon in ticks.
    pub fn horizon_ticks(&self) -> u64 {
        (self.horizon_secs * self.tick_rate).round() as u64
    }
}
