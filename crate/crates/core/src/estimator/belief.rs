use serde::{Deserialize, Serialize};

use super::EstimatorError;
use crate::world::GoalId;

pub const SUM_TOLERANCE: f64 = 1e-9;

/// Probability vector over the goal set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Belief(Vec<f64>);

impl Belief {
    /// Uniform prior over `n` goals.
    pub fn uniform(n: usize) -> Result<Belief, EstimatorError> {
        if n < 2 {
            return Err(EstimatorError::TooFewGoals(n));
        }
        Ok(Belief(vec![1.0 / n as f64; n]))
    }

    /// Wraps an already normalized vector after checking it.
    pub fn from_probs(probs: Vec<f64>) -> Result<Belief, EstimatorError> {
        if probs.len() < 2 {
            return Err(EstimatorError::TooFewGoals(probs.len()));
        }
        if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(EstimatorError::InvalidBelief(
                "entries must be finite and non-negative".into(),
            ));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(EstimatorError::InvalidBelief(format!(
                "entries sum to {sum}"
            )));
        }
        Ok(Belief(probs))
    }

    /// Normalizes non-negative masses into a belief.
    pub fn from_masses(masses: Vec<f64>) -> Result<Belief, EstimatorError> {
        if masses.len() < 2 {
            return Err(EstimatorError::TooFewGoals(masses.len()));
        }
        if masses.iter().any(|m| !(m.is_finite() && *m >= 0.0)) {
            return Err(EstimatorError::InvalidBelief(
                "unnormalized masses must be finite and non-negative".into(),
            ));
        }
        let total: f64 = masses.iter().sum();
        if !(total > 0.0) {
            return Err(EstimatorError::ZeroMass);
        }
        Ok(Belief(masses.into_iter().map(|m| m / total).collect()))
    }

    /// Columns of a stochastic matrix applied to a belief stay normalized.
    pub(crate) fn from_raw(probs: Vec<f64>) -> Belief {
        Belief(probs)
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, goal: GoalId) -> f64 {
        self.0[goal.index()]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn is_valid(&self) -> bool {
        self.0.iter().all(|p| *p >= 0.0) && (self.0.iter().sum::<f64>() - 1.0).abs() <= SUM_TOLERANCE
    }
}

/// Argmax of a score vector, lowest index on ties.
pub fn argmax(values: &[f64]) -> GoalId {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    GoalId(best)
}

/// Most probable goal; ties go to the lowest goal id.
pub fn predict_intent(belief: &Belief) -> GoalId {
    argmax(belief.probs())
}
