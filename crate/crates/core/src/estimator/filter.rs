use super::airm::{airm_activate, airm_factor, AirmState};
use super::observation::{normalize_observations, observation_likelihood, ObservationSet};
use super::{Belief, EstimatorError, EstimatorParams};
use crate::world::GoalId;

/// Goal-persistence prediction: stay with `1 - delta`, switch uniformly to
/// any other goal otherwise.
pub fn transition_predict(prior: &Belief, delta: f64) -> Belief {
    let n = prior.len();
    let switch = delta / (n - 1) as f64;
    let masses = prior
        .probs()
        .iter()
        .map(|p| (1.0 - delta) * p + switch * (1.0 - p))
        .collect();
    Belief::from_raw(masses)
}

/// Row `from` of the implied transition matrix.
pub fn transition_row(n: usize, from: usize, delta: f64) -> Vec<f64> {
    (0..n)
        .map(|to| if to == from { 1.0 - delta } else { delta / (n - 1) as f64 })
        .collect()
}

/// One recursive update: likelihood x predicted prior x action factor,
/// normalized.
pub fn boir_update(
    prior: &Belief,
    obs: &ObservationSet,
    airm: Option<&AirmState>,
    tick: u64,
    params: &EstimatorParams,
) -> Result<Belief, EstimatorError> {
    let n = prior.len();
    if obs.len() != n {
        return Err(EstimatorError::DimensionMismatch {
            expected: n,
            found: obs.len(),
        });
    }
    let likelihood = observation_likelihood(&normalize_observations(obs), params);
    let predicted = transition_predict(prior, params.delta);
    let action = airm_factor(airm, n, tick, params);
    let masses = likelihood
        .iter()
        .zip(predicted.probs())
        .zip(&action)
        .map(|((l, p), a)| l * p * a)
        .collect();
    Belief::from_masses(masses)
}

/// Stateful filter fed one observation set per tick.
#[derive(Debug, Clone)]
pub struct BoirFilter {
    params: EstimatorParams,
    belief: Belief,
    airm: Option<AirmState>,
    tick: u64,
}

impl BoirFilter {
    pub fn new(n_goals: usize, params: EstimatorParams) -> Result<Self, EstimatorError> {
        params.validate()?;
        Ok(Self {
            params,
            belief: Belief::uniform(n_goals)?,
            airm: None,
            tick: 0,
        })
    }

    pub fn belief(&self) -> &Belief {
        &self.belief
    }

    pub fn params(&self) -> &EstimatorParams {
        &self.params
    }

    /// Index of the next tick to be processed.
    pub fn tick(&self) -> u64 {
        self.tick
    }

    pub fn airm(&self) -> Option<&AirmState> {
        self.airm.as_ref()
    }

    pub fn airm_active(&self) -> bool {
        self.airm.is_some_and(|a| a.is_active(self.tick))
    }

    /// Registers an explicit click, effective from the next update. Replaces
    /// any running episode.
    pub fn activate(&mut self, goal: GoalId) -> Result<(), EstimatorError> {
        let (relabeled, state) = airm_activate(&self.belief, goal, self.tick, &self.params)?;
        self.belief = relabeled;
        self.airm = Some(state);
        Ok(())
    }

    pub fn update(&mut self, obs: &ObservationSet) -> Result<&Belief, EstimatorError> {
        let posterior = boir_update(&self.belief, obs, self.airm.as_ref(), self.tick, &self.params)?;
        self.belief = posterior;
        self.tick += 1;
        Ok(&self.belief)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimator::observation::Observation;

    fn obs(pairs: &[(f64, f64)]) -> ObservationSet {
        ObservationSet::new(
            pairs
                .iter()
                .map(|&(phi, path_len)| Observation { phi, path_len })
                .collect(),
        )
    }

    #[test]
    fn transition_examples() {
        let prior = Belief::from_probs(vec![1.0, 0.0, 0.0]).unwrap();
        let out = transition_predict(&prior, 0.2);
        let expected = [0.8, 0.1, 0.1];
        for (o, e) in out.probs().iter().zip(expected) {
            assert!((o - e).abs() < 1e-15);
        }
        let uniform = Belief::uniform(4).unwrap();
        for p in transition_predict(&uniform, 0.2).probs() {
            assert!((p - 0.25).abs() < 1e-15);
        }
        let b = Belief::from_probs(vec![0.3, 0.7]).unwrap();
        assert_eq!(transition_predict(&b, 0.0), b);
    }

    #[test]
    fn symmetric_evidence_keeps_uniform() {
        let params = EstimatorParams::default();
        let prior = Belief::uniform(3).unwrap();
        let post = boir_update(&prior, &obs(&[(0.5, 3.0); 3]), None, 0, &params).unwrap();
        for p in post.probs() {
            assert!((p - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn two_goal_scalar_oracle() {
        let params = EstimatorParams::default();
        let prior = Belief::uniform(2).unwrap();
        let post = boir_update(&prior, &obs(&[(0.0, 1.0), (2.0, 5.0)]), None, 0, &params).unwrap();
        // 1 / (1 + e^{-(1/0.6 + 1/0.4)})
        assert!((post.probs()[0] - 0.984_732_846_119_625_6).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch() {
        let params = EstimatorParams::default();
        let prior = Belief::uniform(3).unwrap();
        assert!(matches!(
            boir_update(&prior, &obs(&[(0.0, 1.0); 2]), None, 0, &params),
            Err(EstimatorError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn click_makes_goal_dominant_under_neutral_evidence() {
        let mut filter = BoirFilter::new(3, EstimatorParams::default()).unwrap();
        filter.update(&obs(&[(0.5, 3.0); 3])).unwrap();
        filter.activate(GoalId(2)).unwrap();
        assert!(filter.airm_active());
        let b = filter.update(&obs(&[(0.5, 3.0); 3])).unwrap().clone();
        assert_eq!(crate::estimator::predict_intent(&b), GoalId(2));
    }

    #[test]
    fn reactivation_replaces_episode() {
        let mut filter = BoirFilter::new(3, EstimatorParams::default()).unwrap();
        filter.activate(GoalId(0)).unwrap();
        filter.update(&obs(&[(0.5, 3.0); 3])).unwrap();
        filter.activate(GoalId(1)).unwrap();
        let airm = filter.airm().unwrap();
        assert_eq!(airm.selected, GoalId(1));
        assert_eq!(airm.activation_tick, 1);
        assert!((filter.belief().probs()[1] - 0.95).abs() < 1e-15);
    }
}
