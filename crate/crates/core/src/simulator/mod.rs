//! Tick-based 2D robot simulation. Each tick the operator command is
//! integrated, fresh geometric evidence is computed for every goal, every
//! requested estimator is updated and the result is logged.

mod log;
mod policy;
mod robot;
mod trial;

pub use log::{
    belief_snapshot, EndReason, GoalProbability, LogEnd, LogHeader, LogReadError, MethodEstimate,
    ParsedLog, PoseRecord, TickRecord, TrialLog, LOG_FORMAT_VERSION,
};
pub use policy::{line_of_sight, Policy, PolicyView, ReplayPolicy, ScriptedPolicy};
pub use robot::{step, OperatorCommand, RobotState};
pub use trial::{observe, run_scripted_trial, run_trial, Trial, TrialStatus};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::estimator::EstimatorError;
use crate::planner::PlannerError;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("goal '{0}' is unreachable from the robot position")]
    Unreachable(char),
    #[error("trial already finished")]
    Finished,
    #[error("no methods requested")]
    NoMethods,
    #[error(transparent)]
    Planner(#[from] PlannerError),
    #[error(transparent)]
    Estimator(#[from] EstimatorError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimParams {
    /// m/s
    pub v_max: f64,
    /// rad/s
    pub omega_max: f64,
    /// Distance to the final goal that ends a trial, meters.
    pub capture_radius: f64,
    pub tick_budget: u64,
    /// Standard deviation of the scripted driver's heading noise, radians.
    pub heading_noise: f64,
    /// How far ahead along the planned path the scripted driver aims, cells.
    pub lookahead_cells: usize,
    /// Obstacle inflation used for the planner's cost fields, cells.
    pub inflation_radius: usize,
}

impl Default for SimParams {
    fn default() -> Self {
        Self {
            v_max: 1.0,
            omega_max: 1.5,
            capture_radius: 0.5,
            tick_budget: 5000,
            heading_noise: 0.1,
            lookahead_cells: 4,
            inflation_radius: 0,
        }
    }
}

impl SimParams {
    pub fn validate(&self) -> Result<(), EstimatorError> {
        let ok = self.v_max > 0.0
            && self.omega_max > 0.0
            && self.capture_radius > 0.0
            && self.tick_budget > 0
            && self.heading_noise >= 0.0
            && self.heading_noise.is_finite();
        if ok {
            Ok(())
        } else {
            Err(EstimatorError::InvalidParams(format!(
                "invalid simulator parameters: {self:?}"
            )))
        }
    }
}
