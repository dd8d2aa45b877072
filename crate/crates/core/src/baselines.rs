//! Comparison estimators.
//!
//! * ECF: memoryless confidence `exp(-d / d0) * exp(-phi / phi0)` per goal,
//!   with `d` the straight-line distance and `phi` the bearing angle.
//! * RBII-1: recursive Bayes with the same goal-persistence transition as
//!   the main filter, but with min-max normalized straight-line distance as
//!   its only evidence.

use serde::{Deserialize, Serialize};

use crate::estimator::{normalize_minmax, transition_predict, Belief, EstimatorError};
use crate::planner::{bearing_angle, euclidean_distance};
use crate::world::{Goal, Pose2D};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EcfParams {
    /// Distance decay scale, meters.
    pub distance_decay: f64,
    /// Angle decay scale, radians.
    pub angle_decay: f64,
}

impl Default for EcfParams {
    fn default() -> Self {
        Self {
            distance_decay: 1.0,
            angle_decay: 1.0,
        }
    }
}

impl EcfParams {
    pub fn validate(&self) -> Result<(), EstimatorError> {
        if !(self.distance_decay > 0.0 && self.angle_decay > 0.0) {
            return Err(EstimatorError::InvalidParams(
                "ecf decay scales must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RbiiParams {
    /// Scale applied to the normalized distance.
    pub distance_scale: f64,
    pub delta: f64,
}

impl Default for RbiiParams {
    fn default() -> Self {
        Self {
            distance_scale: 0.5,
            delta: 0.2,
        }
    }
}

impl RbiiParams {
    pub fn validate(&self) -> Result<(), EstimatorError> {
        if !(self.distance_scale > 0.0) {
            return Err(EstimatorError::InvalidParams(
                "rbii distance scale must be positive".into(),
            ));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(EstimatorError::InvalidParams(
                "rbii delta must lie in (0, 1)".into(),
            ));
        }
        Ok(())
    }
}

/// Per-goal confidences in `(0, 1]`.
pub fn ecf_confidence(pose: &Pose2D, goals: &[Goal], params: &EcfParams) -> Vec<f64> {
    goals
        .iter()
        .map(|g| {
            let d = euclidean_distance(pose, g.position);
            let phi = bearing_angle(pose, g.position);
            (-d / params.distance_decay).exp() * (-phi / params.angle_decay).exp()
        })
        .collect()
}

/// Confidences scaled to sum to one; argmax is unchanged.
pub fn ecf_distribution(confidences: &[f64]) -> Result<Belief, EstimatorError> {
    Belief::from_masses(confidences.to_vec())
}

pub fn rbii_likelihood(pose: &Pose2D, goals: &[Goal], params: &RbiiParams) -> Vec<f64> {
    let distances: Vec<f64> = goals
        .iter()
        .map(|g| euclidean_distance(pose, g.position))
        .collect();
    normalize_minmax(&distances)
        .into_iter()
        .map(|d| (-d / params.distance_scale).exp())
        .collect()
}

pub fn rbii_update(
    prior: &Belief,
    pose: &Pose2D,
    goals: &[Goal],
    params: &RbiiParams,
) -> Result<Belief, EstimatorError> {
    if goals.len() != prior.len() {
        return Err(EstimatorError::DimensionMismatch {
            expected: prior.len(),
            found: goals.len(),
        });
    }
    let predicted = transition_predict(prior, params.delta);
    let masses = rbii_likelihood(pose, goals, params)
        .iter()
        .zip(predicted.probs())
        .map(|(l, p)| l * p)
        .collect();
    Belief::from_masses(masses)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimator::predict_intent;
    use crate::world::{GoalId, Point2};

    fn goals(points: &[(f64, f64)]) -> Vec<Goal> {
        points
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| Goal {
                id: GoalId(i),
                label: (b'a' + i as u8) as char,
                position: Point2::new(x, y),
            })
            .collect()
    }

    #[test]
    fn ecf_examples() {
        let params = EcfParams::default();
        let g = goals(&[(1.0, 0.0), (0.0, 3.0)]);
        let at_goal = Pose2D::new(1.0, 0.0, 0.0);
        assert_eq!(ecf_confidence(&at_goal, &g, &params)[0], 1.0);

        let one_meter = Pose2D::new(0.0, 0.0, 0.0);
        let c = ecf_confidence(&one_meter, &g, &params);
        assert!((c[0] - 0.367_879_441_171_442_3).abs() < 1e-15);

        let sym = goals(&[(1.0, 1.0), (1.0, -1.0)]);
        let c = ecf_confidence(&Pose2D::new(0.0, 0.0, 0.0), &sym, &params);
        assert!((c[0] - c[1]).abs() < 1e-15);
    }

    #[test]
    fn ecf_distribution_preserves_argmax() {
        let conf = [0.1, 0.4, 0.2];
        let dist = ecf_distribution(&conf).unwrap();
        assert!(dist.is_valid());
        assert_eq!(predict_intent(&dist), GoalId(1));
    }

    #[test]
    fn rbii_equidistant_keeps_uniform() {
        let g = goals(&[(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0)]);
        let prior = Belief::uniform(3).unwrap();
        let post = rbii_update(&prior, &Pose2D::new(0.0, 0.0, 0.0), &g, &RbiiParams::default()).unwrap();
        for p in post.probs() {
            assert!((p - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn rbii_prefers_nearest() {
        let g = goals(&[(1.0, 0.0), (5.0, 0.0)]);
        let prior = Belief::uniform(2).unwrap();
        let post = rbii_update(&prior, &Pose2D::new(0.0, 0.0, 0.0), &g, &RbiiParams::default()).unwrap();
        // likelihoods 1 and e^-2
        let expected = 1.0 / (1.0 + (-2.0f64).exp());
        assert!((post.probs()[0] - expected).abs() < 1e-15);
    }

    #[test]
    fn param_validation() {
        assert!(EcfParams { distance_decay: 0.0, angle_decay: 1.0 }.validate().is_err());
        assert!(RbiiParams { distance_scale: 0.5, delta: 1.0 }.validate().is_err());
        RbiiParams::default().validate().unwrap();
    }
}
