//! Shortest-path cost fields on the occupancy grid.
//!
//! Each field is an 8-connected Dijkstra expansion from one goal cell.
//! Straight moves cost one cell, diagonal moves cost `sqrt(2)` cells, and a
//! diagonal is only allowed when both orthogonal neighbours it passes are
//! free. Path costs are kept as exact counts of straight and diagonal moves,
//! so comparisons are exact and the metric cost is a single rounding of
//! `resolution * (straight + diagonal * sqrt(2))`.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::f64::consts::SQRT_2;

use thiserror::Error;

use crate::world::{CellIndex, Goal, GoalId, OccupancyGrid, Point2, Pose2D, World, WorldError};

#[derive(Debug, Error, PartialEq)]
pub enum PlannerError {
    #[error("goal {0} is not on a free cell")]
    GoalBlocked(char),
    #[error(transparent)]
    World(#[from] WorldError),
}

/// Path cost as `straight + diagonal * sqrt(2)` cell steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StepCost {
    pub straight: u32,
    pub diagonal: u32,
}

impl StepCost {
    pub const ZERO: StepCost = StepCost {
        straight: 0,
        diagonal: 0,
    };

    pub fn add_move(self, diagonal: bool) -> StepCost {
        if diagonal {
            StepCost {
                diagonal: self.diagonal + 1,
                ..self
            }
        } else {
            StepCost {
                straight: self.straight + 1,
                ..self
            }
        }
    }

    pub fn meters(self, resolution: f64) -> f64 {
        resolution * (self.straight as f64 + self.diagonal as f64 * SQRT_2)
    }
}

impl Ord for StepCost {
    fn cmp(&self, other: &Self) -> Ordering {
        // a1 + b1*r  vs  a2 + b2*r  with r = sqrt(2): compare da with db*r
        let da = self.straight as i64 - other.straight as i64;
        let db = other.diagonal as i64 - self.diagonal as i64;
        match (da.signum(), db.signum()) {
            (0, 0) => Ordering::Equal,
            (x, y) if x != y && x >= 0 && y <= 0 => Ordering::Greater,
            (x, y) if x != y && x <= 0 && y >= 0 => Ordering::Less,
            (1, 1) => (da * da).cmp(&(2 * db * db)),
            _ => (2 * db * db).cmp(&(da * da)),
        }
    }
}

impl PartialOrd for StepCost {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

const MOVES: [(i64, i64); 8] = [
    (1, 0),
    (-1, 0),
    (0, 1),
    (0, -1),
    (1, 1),
    (1, -1),
    (-1, 1),
    (-1, -1),
];

/// Free 8-connected neighbours of `cell`, with a flag marking diagonal moves.
/// Diagonals that would cut an occupied corner are skipped.
pub fn neighbors(grid: &OccupancyGrid, cell: CellIndex) -> impl Iterator<Item = (CellIndex, bool)> + '_ {
    MOVES.iter().filter_map(move |&(dc, dr)| {
        let col = cell.col as i64 + dc;
        let row = cell.row as i64 + dr;
        if col < 0 || row < 0 {
            return None;
        }
        let next = CellIndex::new(col as usize, row as usize);
        if !grid.is_free(next) {
            return None;
        }
        let diagonal = dc != 0 && dr != 0;
        if diagonal {
            let side_a = CellIndex::new(col as usize, cell.row);
            let side_b = CellIndex::new(cell.col, row as usize);
            if !grid.is_free(side_a) || !grid.is_free(side_b) {
                return None;
            }
        }
        Some((next, diagonal))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PlannerOptions {
    /// Obstacle inflation radius in cells. Zero disables inflation.
    pub inflation_radius: usize,
}

/// Path cost from every cell to one goal.
#[derive(Debug, Clone, PartialEq)]
pub struct CostField {
    goal: GoalId,
    grid: OccupancyGrid,
    steps: Vec<Option<StepCost>>,
    costs: Vec<f64>,
}

impl CostField {
    pub fn goal(&self) -> GoalId {
        self.goal
    }

    pub fn grid(&self) -> &OccupancyGrid {
        &self.grid
    }

    /// Per-cell costs in meters, `+inf` where unreachable or occupied.
    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    pub fn cost(&self, cell: CellIndex) -> f64 {
        if self.grid.contains(cell) {
            self.costs[self.grid.index(cell)]
        } else {
            f64::INFINITY
        }
    }

    pub fn steps(&self, cell: CellIndex) -> Option<StepCost> {
        if self.grid.contains(cell) {
            self.steps[self.grid.index(cell)]
        } else {
            None
        }
    }

    /// Neighbour of `cell` with the lowest cost, if it improves on `cell`.
    pub fn descend(&self, cell: CellIndex) -> Option<CellIndex> {
        let here = self.steps(cell)?;
        neighbors(&self.grid, cell)
            .filter_map(|(n, _)| self.steps(n).map(|s| (s, n)))
            .filter(|(s, _)| *s < here)
            .min_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)))
            .map(|(_, n)| n)
    }
}

/// Dijkstra expansion from `goal` over `grid`.
pub fn dijkstra_field(
    grid: &OccupancyGrid,
    goal: &Goal,
    options: PlannerOptions,
) -> Result<CostField, PlannerError> {
    let grid = grid.inflated(options.inflation_radius);
    let source = grid.cell_of(goal.position)?;
    if !grid.is_free(source) {
        return Err(PlannerError::GoalBlocked(goal.label));
    }
    let mut steps: Vec<Option<StepCost>> = vec![None; grid.len()];
    let mut settled = vec![false; grid.len()];
    let mut heap = BinaryHeap::new();
    steps[grid.index(source)] = Some(StepCost::ZERO);
    heap.push(Reverse((StepCost::ZERO, grid.index(source))));
    while let Some(Reverse((cost, idx))) = heap.pop() {
        if settled[idx] {
            continue;
        }
        settled[idx] = true;
        let cell = grid.cell_at(idx);
        for (next, diagonal) in neighbors(&grid, cell) {
            let ni = grid.index(next);
            if settled[ni] {
                continue;
            }
            let candidate = cost.add_move(diagonal);
            if steps[ni].is_none_or(|s| candidate < s) {
                steps[ni] = Some(candidate);
                heap.push(Reverse((candidate, ni)));
            }
        }
    }
    let res = grid.resolution();
    let costs = steps
        .iter()
        .map(|s| s.map_or(f64::INFINITY, |s| s.meters(res)))
        .collect();
    Ok(CostField {
        goal: goal.id,
        grid,
        steps,
        costs,
    })
}

/// Planner path length from the pose's cell to the field's goal.
pub fn path_length(field: &CostField, pose: &Pose2D) -> f64 {
    match field.grid().cell_of(pose.position()) {
        Ok(cell) => field.cost(cell),
        Err(_) => f64::INFINITY,
    }
}

const COINCIDENT_EPS: f64 = 1e-9;

/// Absolute angle in `[0, pi]` between the robot heading and the direction
/// to the goal. A goal at the robot position gives 0.
pub fn bearing_angle(pose: &Pose2D, goal: Point2) -> f64 {
    let dx = goal.x - pose.x;
    let dy = goal.y - pose.y;
    if dx.hypot(dy) <= COINCIDENT_EPS {
        return 0.0;
    }
    crate::world::wrap_angle(dy.atan2(dx) - pose.heading()).abs()
}

pub fn euclidean_distance(pose: &Pose2D, goal: Point2) -> f64 {
    pose.position().distance(&goal)
}

/// One cost field per goal of a world, indexed by goal id.
#[derive(Debug, Clone)]
pub struct CostFields {
    fields: Vec<CostField>,
}

impl CostFields {
    pub fn build(world: &World, options: PlannerOptions) -> Result<Self, PlannerError> {
        let fields = world
            .goals
            .iter()
            .map(|g| dijkstra_field(&world.grid, g, options))
            .collect::<Result<_, _>>()?;
        Ok(Self { fields })
    }

    pub fn get(&self, goal: GoalId) -> &CostField {
        &self.fields[goal.index()]
    }

    pub fn iter(&self) -> impl Iterator<Item = &CostField> {
        self.fields.iter()
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }
}
