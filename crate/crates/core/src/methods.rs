//! The estimators a trial can run side by side.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::baselines::{ecf_confidence, ecf_distribution, rbii_update};
use crate::config::Config;
use crate::estimator::{predict_intent, Belief, BoirFilter, EstimatorError, ObservationSet};
use crate::world::{Goal, GoalId, Pose2D};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "boir")]
    Boir,
    #[serde(rename = "boir-airm")]
    BoirAirm,
    #[serde(rename = "rbii1")]
    Rbii1,
    #[serde(rename = "ecf")]
    Ecf,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Boir, Method::BoirAirm, Method::Rbii1, Method::Ecf];

    pub fn name(self) -> &'static str {
        match self {
            Method::Boir => "boir",
            Method::BoirAirm => "boir-airm",
            Method::Rbii1 => "rbii1",
            Method::Ecf => "ecf",
        }
    }

    /// Parses a comma separated list such as `boir,rbii1,ecf`.
    pub fn parse_list(list: &str) -> Result<Vec<Method>, String> {
        let mut out = Vec::new();
        for part in list.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let m: Method = part.parse()?;
            if !out.contains(&m) {
                out.push(m);
            }
        }
        if out.is_empty() {
            return Err("at least one method is required".into());
        }
        Ok(out)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "boir" => Ok(Method::Boir),
            "boir-airm" | "boir_airm" | "airm" => Ok(Method::BoirAirm),
            "rbii1" | "rbii-1" | "rbii" => Ok(Method::Rbii1),
            "ecf" => Ok(Method::Ecf),
            other => Err(format!(
                "unknown method {other:?} (expected boir, boir-airm, rbii1 or ecf)"
            )),
        }
    }
}

#[derive(Debug, Clone)]
enum State {
    Boir(BoirFilter),
    Rbii(Belief),
    Ecf,
}

/// Output of one method for one tick.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub method: Method,
    /// Distribution over goals. ECF confidences are normalized.
    pub belief: Belief,
    pub prediction: GoalId,
}

/// All requested estimators, updated in lock step.
#[derive(Debug, Clone)]
pub struct EstimatorBank {
    config: Config,
    members: Vec<(Method, State)>,
}

impl EstimatorBank {
    pub fn new(methods: &[Method], n_goals: usize, config: &Config) -> Result<Self, EstimatorError> {
        config.validate()?;
        let members = methods
            .iter()
            .map(|&m| {
                let state = match m {
                    Method::Boir | Method::BoirAirm => {
                        State::Boir(BoirFilter::new(n_goals, config.estimator)?)
                    }
                    Method::Rbii1 => State::Rbii(Belief::uniform(n_goals)?),
                    Method::Ecf => {
                        Belief::uniform(n_goals)?;
                        State::Ecf
                    }
                };
                Ok((m, state))
            })
            .collect::<Result<_, EstimatorError>>()?;
        Ok(Self {
            config: *config,
            members,
        })
    }

    pub fn methods(&self) -> impl Iterator<Item = Method> + '_ {
        self.members.iter().map(|(m, _)| *m)
    }

    /// Forwards an explicit intent click. Only the click-aware filter reacts.
    pub fn click(&mut self, goal: GoalId) -> Result<(), EstimatorError> {
        for (m, state) in &mut self.members {
            if let (Method::BoirAirm, State::Boir(filter)) = (*m, state) {
                filter.activate(goal)?;
            }
        }
        Ok(())
    }

    /// Whether the click-aware filter has a running episode for the next tick.
    pub fn airm_active(&self) -> bool {
        self.members.iter().any(|(m, s)| match (m, s) {
            (Method::BoirAirm, State::Boir(f)) => f.airm_active(),
            _ => false,
        })
    }

    /// Seconds left in the running click horizon, if any.
    pub fn airm_remaining_secs(&self) -> Option<f64> {
        self.members.iter().find_map(|(m, s)| match (m, s) {
            (Method::BoirAirm, State::Boir(f)) => f
                .airm()
                .filter(|a| a.is_active(f.tick()))
                .map(|a| a.remaining_secs(f.tick(), self.config.tick_rate())),
            _ => None,
        })
    }

    pub fn update(
        &mut self,
        pose: &Pose2D,
        goals: &[Goal],
        obs: &ObservationSet,
    ) -> Result<Vec<Estimate>, EstimatorError> {
        let config = self.config;
        self.members
            .iter_mut()
            .map(|(m, state)| {
                let belief = match state {
                    State::Boir(filter) => filter.update(obs)?.clone(),
                    State::Rbii(prior) => {
                        *prior = rbii_update(prior, pose, goals, &config.rbii)?;
                        prior.clone()
                    }
                    State::Ecf => ecf_distribution(&ecf_confidence(pose, goals, &config.ecf))?,
                };
                Ok(Estimate {
                    method: *m,
                    prediction: predict_intent(&belief),
                    belief,
                })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_methods() {
        assert_eq!(
            Method::parse_list("boir,rbii1,ecf").unwrap(),
            vec![Method::Boir, Method::Rbii1, Method::Ecf]
        );
        assert_eq!(Method::parse_list("boir-airm").unwrap(), vec![Method::BoirAirm]);
        assert!(Method::parse_list("").is_err());
        assert!(Method::parse_list("boir,kalman").is_err());
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
    }
}
