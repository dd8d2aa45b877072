//! Text map format.
//!
//! ```text
//! resolution 0.5
//! #######
//! #a...b#
//! #..S..#
//! #######
//! ```
//!
//! `.` free, `#` occupied, `S` start, `a`-`z` goals. The first text row is
//! the top of the map; rows are flipped so world `+y` points up.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::grid::{Cell, CellIndex, Goal, GoalId, OccupancyGrid, Pose2D};
use super::{MapError, MapErrorKind};

/// A parsed map: grid, goals ordered by label, and the start pose.
#[derive(Debug, Clone, PartialEq)]
pub struct World {
    pub grid: OccupancyGrid,
    pub goals: Vec<Goal>,
    pub start: Pose2D,
}

impl World {
    pub fn goal(&self, id: GoalId) -> Option<&Goal> {
        self.goals.get(id.index())
    }

    pub fn goal_by_label(&self, label: char) -> Option<&Goal> {
        self.goals.iter().find(|g| g.label == label)
    }

    pub fn labels(&self) -> Vec<String> {
        self.goals.iter().map(|g| g.label.to_string()).collect()
    }

    /// Renders the world back into the text map format.
    pub fn to_map_text(&self) -> String {
        let grid = &self.grid;
        let mut chars: Vec<Vec<char>> = (0..grid.height())
            .map(|row| {
                (0..grid.width())
                    .map(|col| match grid.get(CellIndex::new(col, row)) {
                        Some(Cell::Occupied) => '#',
                        _ => '.',
                    })
                    .collect()
            })
            .collect();
        for goal in &self.goals {
            if let Ok(c) = grid.cell_of(goal.position) {
                chars[c.row][c.col] = goal.label;
            }
        }
        if let Ok(c) = grid.cell_of(self.start.position()) {
            chars[c.row][c.col] = 'S';
        }
        let mut out = String::new();
        let _ = writeln!(out, "resolution {}", grid.resolution());
        for row in chars.iter().rev() {
            out.extend(row.iter());
            out.push('\n');
        }
        out
    }
}

fn err(line: usize, column: usize, kind: MapErrorKind) -> MapError {
    MapError { line, column, kind }
}

/// Parses the text map format into a [`World`].
pub fn load_map(text: &str) -> Result<World, MapError> {
    let mut lines = text.lines().enumerate();
    let resolution = loop {
        let Some((i, line)) = lines.next() else {
            return Err(err(1, 1, MapErrorKind::MissingResolution));
        };
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let mut parts = trimmed.split_whitespace();
        if parts.next() != Some("resolution") {
            return Err(err(i + 1, 1, MapErrorKind::MissingResolution));
        }
        let value = parts
            .next()
            .and_then(|v| v.parse::<f64>().ok())
            .filter(|v| v.is_finite() && *v > 0.0);
        match (value, parts.next()) {
            (Some(v), None) => break v,
            _ => return Err(err(i + 1, 1, MapErrorKind::BadResolution)),
        }
    };

    let mut rows: Vec<(usize, Vec<char>)> = Vec::new();
    for (i, line) in lines {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        rows.push((i + 1, line.chars().collect()));
    }
    let Some((first_line, first)) = rows.first() else {
        return Err(err(2, 1, MapErrorKind::NoRows));
    };
    let width = first.len();
    let first_line = *first_line;
    let height = rows.len();

    let mut cells = vec![Cell::Free; width * height];
    let mut goal_cells: BTreeMap<char, (CellIndex, usize, usize)> = BTreeMap::new();
    let mut start: Option<CellIndex> = None;

    for (text_row, (line_no, chars)) in rows.iter().enumerate() {
        if chars.len() != width {
            return Err(err(
                *line_no,
                chars.len().min(width) + 1,
                MapErrorKind::RaggedRow {
                    expected: width,
                    found: chars.len(),
                },
            ));
        }
        let row = height - 1 - text_row;
        for (col, ch) in chars.iter().copied().enumerate() {
            let cell = CellIndex::new(col, row);
            let column = col + 1;
            match ch {
                '.' => {}
                '#' => cells[row * width + col] = Cell::Occupied,
                'S' => {
                    if start.is_some() {
                        return Err(err(*line_no, column, MapErrorKind::DuplicateStart));
                    }
                    start = Some(cell);
                }
                'a'..='z' => {
                    if goal_cells.insert(ch, (cell, *line_no, column)).is_some() {
                        return Err(err(*line_no, column, MapErrorKind::DuplicateGoal(ch)));
                    }
                }
                other => {
                    return Err(err(*line_no, column, MapErrorKind::UnknownChar(other)));
                }
            }
        }
    }

    let grid = OccupancyGrid::new(width, height, resolution, cells)
        .map_err(|e| err(first_line, 1, MapErrorKind::Grid(e.to_string())))?;
    let start = start.ok_or_else(|| err(first_line, 1, MapErrorKind::MissingStart))?;
    if goal_cells.is_empty() {
        return Err(err(first_line, 1, MapErrorKind::NoGoals));
    }
    let goals = goal_cells
        .into_iter()
        .enumerate()
        .map(|(i, (label, (cell, _, _)))| Goal {
            id: GoalId(i),
            label,
            position: grid.cell_center(cell),
        })
        .collect();
    let p = grid.cell_center(start);
    Ok(World {
        grid,
        goals,
        start: Pose2D::new(p.x, p.y, 0.0),
    })
}
