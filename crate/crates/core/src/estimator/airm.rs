//! Explicit intent clicks.
//!
//! A click on goal `y` relabels the prior to `lambda` on `y` with the rest
//! shared equally, then for the horizon multiplies `y`'s posterior mass by a
//! factor decaying linearly from `lambda` at rate `(lambda - tB) / T`,
//! never below `tB`. The remaining goals either split what the clicked goal
//! does not take (`shared`, the default) or are left at 1 (`unit`).

use serde::{Deserialize, Serialize};

use super::{Belief, EstimatorError, EstimatorParams};
use crate::world::GoalId;

/// How the action factor treats goals other than the clicked one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AirmResidual {
    /// `(1 - f) / (N - 1)` each, so the factor is a distribution over goals.
    #[default]
    Shared,
    /// 1 each; only the clicked goal is scaled.
    Unit,
}

/// An active click episode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AirmState {
    pub selected: GoalId,
    pub activation_tick: u64,
    pub horizon_ticks: u64,
    /// Decay per second.
    pub rate: f64,
}

impl AirmState {
    pub fn is_active(&self, tick: u64) -> bool {
        tick >= self.activation_tick && tick - self.activation_tick < self.horizon_ticks
    }

    /// Seconds left in the horizon at `tick`, zero when inactive.
    pub fn remaining_secs(&self, tick: u64, tick_rate: f64) -> f64 {
        if !self.is_active(tick) {
            return 0.0;
        }
        (self.activation_tick + self.horizon_ticks - tick) as f64 / tick_rate
    }
}

/// `(lambda - tB) / T`.
pub fn decay_rate(params: &EstimatorParams) -> f64 {
    (params.activated_belief - params.threshold_belief) / params.horizon_secs
}

/// Starts an episode for goal `selected` at `tick` and returns the
/// relabeled prior that replaces the current belief.
pub fn airm_activate(
    belief: &Belief,
    selected: GoalId,
    tick: u64,
    params: &EstimatorParams,
) -> Result<(Belief, AirmState), EstimatorError> {
    let n = belief.len();
    if selected.index() >= n {
        return Err(EstimatorError::UnknownGoal(selected.index()));
    }
    let lambda = params.activated_belief;
    let rest = (1.0 - lambda) / (n - 1) as f64;
    let probs = (0..n)
        .map(|i| if i == selected.index() { lambda } else { rest })
        .collect();
    let state = AirmState {
        selected,
        activation_tick: tick,
        horizon_ticks: params.horizon_ticks(),
        rate: decay_rate(params),
    };
    Ok((Belief::from_probs(probs)?, state))
}

/// Per-goal action factor at `tick`.
pub fn airm_factor(airm: Option<&AirmState>, n: usize, tick: u64, params: &EstimatorParams) -> Vec<f64> {
    let mut factor = vec![1.0; n];
    if let Some(state) = airm.filter(|s| s.is_active(tick)) {
        let elapsed = (tick - state.activation_tick) as f64 / params.tick_rate;
        let value = (params.activated_belief - state.rate * elapsed).max(params.threshold_belief);
        let rest = match params.airm_residual {
            AirmResidual::Shared => (1.0 - value) / (n - 1) as f64,
            AirmResidual::Unit => 1.0,
        };
        for (i, slot) in factor.iter_mut().enumerate() {
            *slot = if i == state.selected.index() { value } else { rest };
        }
    }
    factor
}
