use serde::{Deserialize, Serialize};

use crate::world::{GoalId, OccupancyGrid, Pose2D};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobotState {
    pub pose: Pose2D,
    pub linear_vel: f64,
    pub angular_vel: f64,
}

impl RobotState {
    pub fn at(pose: Pose2D) -> Self {
        Self {
            pose,
            linear_vel: 0.0,
            angular_vel: 0.0,
        }
    }
}

/// Operator input for one tick.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct OperatorCommand {
    pub linear: f64,
    pub angular: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub airm_click: Option<GoalId>,
}

impl OperatorCommand {
    pub const IDLE: OperatorCommand = OperatorCommand {
        linear: 0.0,
        angular: 0.0,
        airm_click: None,
    };

    pub fn drive(linear: f64, angular: f64) -> Self {
        Self {
            linear,
            angular,
            airm_click: None,
        }
    }

    /// Same command with velocities clamped to the given limits.
    pub fn clamped(self, v_max: f64, omega_max: f64) -> Self {
        let clamp = |v: f64, max: f64| if v.is_finite() { v.clamp(-max, max) } else { 0.0 };
        Self {
            linear: clamp(self.linear, v_max),
            angular: clamp(self.angular, omega_max),
            ..self
        }
    }
}

/// Unicycle integration over `dt`. Rotation is applied first, then the
/// translation along the new heading. A translation that would end outside
/// the grid or in an occupied cell is dropped and the linear velocity set to
/// zero; the rotation still happens.
pub fn step(
    robot: &RobotState,
    command: &OperatorCommand,
    grid: &OccupancyGrid,
    dt: f64,
    v_max: f64,
    omega_max: f64,
) -> RobotState {
    let cmd = command.clamped(v_max, omega_max);
    let mut pose = robot.pose;
    pose.set_heading(pose.heading() + cmd.angular * dt);
    let heading = pose.heading();
    let next = Pose2D::new(
        pose.x + cmd.linear * dt * heading.cos(),
        pose.y + cmd.linear * dt * heading.sin(),
        heading,
    );
    if grid.is_free_point(next.position()) {
        RobotState {
            pose: next,
            linear_vel: cmd.linear,
            angular_vel: cmd.angular,
        }
    } else {
        RobotState {
            pose,
            linear_vel: 0.0,
            angular_vel: cmd.angular,
        }
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_2, PI};

    use super::*;
    use crate::world::load_map;

    fn open() -> OccupancyGrid {
        OccupancyGrid::free(10, 10, 1.0).unwrap()
    }

    #[test]
    fn straight_step() {
        let r = RobotState::at(Pose2D::new(2.0, 2.0, 0.0));
        let next = step(&r, &OperatorCommand::drive(1.0, 0.0), &open(), 0.1, 1.0, 1.5);
        assert!((next.pose.x - 2.1).abs() < 1e-12);
        assert_eq!(next.pose.y, 2.0);
        assert_eq!(next.linear_vel, 1.0);
    }

    #[test]
    fn rotation_in_place() {
        let r = RobotState::at(Pose2D::new(2.0, 2.0, 0.0));
        let next = step(&r, &OperatorCommand::drive(0.0, PI), &open(), 0.5, 1.0, 4.0);
        assert!((next.pose.heading() - FRAC_PI_2).abs() < 1e-12);
        assert_eq!(next.pose.position(), r.pose.position());
    }

    #[test]
    fn wall_blocks_translation() {
        let world = load_map("resolution 1\n.#a\nS#.\n").unwrap();
        let r = RobotState::at(Pose2D::new(0.95, 0.5, 0.0));
        let next = step(&r, &OperatorCommand::drive(1.0, 0.0), &world.grid, 0.1, 1.0, 1.5);
        assert_eq!(next.pose.position(), r.pose.position());
        assert_eq!(next.linear_vel, 0.0);
    }

    #[test]
    fn leaving_the_grid_is_blocked() {
        let r = RobotState::at(Pose2D::new(0.05, 5.0, PI));
        let next = step(&r, &OperatorCommand::drive(1.0, 0.0), &open(), 0.1, 1.0, 1.5);
        assert_eq!(next.pose.position(), r.pose.position());
    }

    #[test]
    fn limits_are_enforced() {
        let r = RobotState::at(Pose2D::new(2.0, 2.0, 0.0));
        let next = step(&r, &OperatorCommand::drive(5.0, -9.0), &open(), 0.1, 1.0, 1.5);
        assert_eq!(next.linear_vel, 1.0);
        assert_eq!(next.angular_vel, -1.5);
    }
}
