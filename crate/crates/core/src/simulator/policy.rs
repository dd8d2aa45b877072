//! Operator surrogates.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::robot::{OperatorCommand, RobotState};
use super::{SimError, SimParams};
use crate::planner::CostFields;
use crate::world::{wrap_angle, GoalId, OccupancyGrid, Point2, Scenario};

/// What a policy may look at when choosing the next command.
pub struct PolicyView<'a> {
    pub tick: u64,
    pub tick_rate: f64,
    pub robot: &'a RobotState,
    pub scenario: &'a Scenario,
    pub fields: &'a CostFields,
    pub true_goal: GoalId,
    pub params: &'a SimParams,
}

pub trait Policy {
    fn command(&mut self, view: &PolicyView<'_>) -> Result<OperatorCommand, SimError>;

    /// Short description recorded in trial logs.
    fn describe(&self) -> String;
}

/// Drives toward the scripted goal by pure pursuit along the planner's
/// descent path, and plays back the scenario's click script.
#[derive(Debug, Clone)]
pub struct ScriptedPolicy {
    sigma: f64,
    noise: Option<Normal<f64>>,
    rng: ChaCha8Rng,
}

/// Turn gain, rad/s per rad of heading error.
const TURN_GAIN: f64 = 2.5;
/// Heading error above which the robot turns on the spot.
const TURN_IN_PLACE: f64 = std::f64::consts::FRAC_PI_2;

impl ScriptedPolicy {
    /// `sigma` is the standard deviation (radians) of the per-tick heading
    /// noise; zero gives a noiseless driver.
    pub fn new(sigma: f64, seed: u64) -> Self {
        let noise = (sigma > 0.0).then(|| Normal::new(0.0, sigma).expect("finite sigma"));
        Self {
            sigma,
            noise,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn lookahead_target(view: &PolicyView<'_>, goal: GoalId) -> Result<Point2, SimError> {
        let field = view.fields.get(goal);
        let grid = field.grid();
        let pose = view.robot.pose;
        let goal_pos = view.scenario.world.goals[goal.index()].position;
        let start = grid
            .cell_of(pose.position())
            .map_err(|_| SimError::Unreachable(label(view, goal)))?;
        if field.cost(start).is_infinite() {
            return Err(SimError::Unreachable(label(view, goal)));
        }
        if line_of_sight(grid, pose.position(), goal_pos) {
            return Ok(goal_pos);
        }
        let mut target = grid.cell_center(start);
        let mut cell = start;
        for _ in 0..view.params.lookahead_cells {
            let Some(next) = field.descend(cell) else {
                break;
            };
            let center = grid.cell_center(next);
            if !line_of_sight(grid, pose.position(), center) {
                break;
            }
            target = center;
            cell = next;
        }
        Ok(target)
    }
}

fn label(view: &PolicyView<'_>, goal: GoalId) -> char {
    view.scenario.world.goals[goal.index()].label
}

/// Every sample along the segment lies on a free cell.
pub fn line_of_sight(grid: &OccupancyGrid, from: Point2, to: Point2) -> bool {
    let len = from.distance(&to);
    let steps = ((len / (grid.resolution() * 0.25)).ceil() as usize).max(1);
    (0..=steps).all(|i| {
        let t = i as f64 / steps as f64;
        grid.is_free_point(Point2::new(
            from.x + (to.x - from.x) * t,
            from.y + (to.y - from.y) * t,
        ))
    })
}

impl Policy for ScriptedPolicy {
    fn command(&mut self, view: &PolicyView<'_>) -> Result<OperatorCommand, SimError> {
        let airm_click = view
            .scenario
            .airm_clicks_at(view.tick, view.tick_rate)
            .last();
        let goal = view.true_goal;
        let pose = view.robot.pose;
        let goal_pos = view.scenario.world.goals[goal.index()].position;
        let target = Self::lookahead_target(view, goal)?;
        // Draw every tick so the noise stream does not depend on the path.
        let noise = match &self.noise {
            Some(n) => n.sample(&mut self.rng),
            None => 0.0,
        };
        if pose.position().distance(&goal_pos) <= view.params.capture_radius {
            return Ok(OperatorCommand {
                airm_click,
                ..OperatorCommand::IDLE
            });
        }
        let desired = (target.y - pose.y).atan2(target.x - pose.x) + noise;
        let error = wrap_angle(desired - pose.heading());
        let angular = (TURN_GAIN * error).clamp(-view.params.omega_max, view.params.omega_max);
        let linear = if error.abs() >= TURN_IN_PLACE {
            0.0
        } else {
            view.params.v_max * error.cos()
        };
        Ok(OperatorCommand {
            linear,
            angular,
            airm_click,
        })
    }

    fn describe(&self) -> String {
        format!("scripted sigma={}", self.sigma)
    }
}

/// Replays a recorded command sequence; idles once it runs out.
#[derive(Debug, Clone)]
pub struct ReplayPolicy {
    commands: Vec<OperatorCommand>,
}

impl ReplayPolicy {
    pub fn new(commands: Vec<OperatorCommand>) -> Self {
        Self { commands }
    }
}

impl Policy for ReplayPolicy {
    fn command(&mut self, view: &PolicyView<'_>) -> Result<OperatorCommand, SimError> {
        Ok(self
            .commands
            .get(view.tick as usize)
            .copied()
            .unwrap_or(OperatorCommand::IDLE))
    }

    fn describe(&self) -> String {
        format!("replay commands={}", self.commands.len())
    }
}
