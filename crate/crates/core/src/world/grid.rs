use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::WorldError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Cell {
    Free,
    Occupied,
}

/// Integer cell coordinates. `row` 0 is the bottom row of the world frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellIndex {
    pub col: usize,
    pub row: usize,
}

impl CellIndex {
    pub const fn new(col: usize, row: usize) -> Self {
        Self { col, row }
    }
}

/// A point in the world frame, meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_angle(angle: f64) -> f64 {
    let mut a = angle % (2.0 * PI);
    if a <= -PI {
        a += 2.0 * PI;
    } else if a > PI {
        a -= 2.0 * PI;
    }
    a
}

/// Robot pose. The heading is always kept wrapped to `(-pi, pi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose2D {
    pub x: f64,
    pub y: f64,
    heading: f64,
}

impl Pose2D {
    pub fn new(x: f64, y: f64, heading: f64) -> Self {
        Self {
            x,
            y,
            heading: wrap_angle(heading),
        }
    }

    pub fn heading(&self) -> f64 {
        self.heading
    }

    pub fn set_heading(&mut self, heading: f64) {
        self.heading = wrap_angle(heading);
    }

    pub fn position(&self) -> Point2 {
        Point2::new(self.x, self.y)
    }
}

/// Occupancy grid in the world frame: column-major along +x, rows along +y
/// with row 0 at the bottom. Cells are stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyGrid {
    width: usize,
    height: usize,
    resolution: f64,
    cells: Vec<Cell>,
}

impl OccupancyGrid {
    pub fn new(
        width: usize,
        height: usize,
        resolution: f64,
        cells: Vec<Cell>,
    ) -> Result<Self, WorldError> {
        if width == 0 || height == 0 {
            return Err(WorldError::InvalidGrid("grid must be at least 1x1".into()));
        }
        if !(resolution.is_finite() && resolution > 0.0) {
            return Err(WorldError::InvalidGrid(format!(
                "resolution must be positive, got {resolution}"
            )));
        }
        if cells.len() != width * height {
            return Err(WorldError::InvalidGrid(format!(
                "expected {} cells, got {}",
                width * height,
                cells.len()
            )));
        }
        Ok(Self {
            width,
            height,
            resolution,
            cells,
        })
    }

    pub fn free(width: usize, height: usize, resolution: f64) -> Result<Self, WorldError> {
        Self::new(width, height, resolution, vec![Cell::Free; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn index(&self, cell: CellIndex) -> usize {
        cell.row * self.width + cell.col
    }

    pub fn cell_at(&self, index: usize) -> CellIndex {
        CellIndex::new(index % self.width, index / self.width)
    }

    pub fn contains(&self, cell: CellIndex) -> bool {
        cell.col < self.width && cell.row < self.height
    }

    pub fn get(&self, cell: CellIndex) -> Option<Cell> {
        self.contains(cell).then(|| self.cells[self.index(cell)])
    }

    pub fn set(&mut self, cell: CellIndex, value: Cell) {
        let i = self.index(cell);
        self.cells[i] = value;
    }

    pub fn is_free(&self, cell: CellIndex) -> bool {
        self.get(cell) == Some(Cell::Free)
    }

    /// Continuous coordinates of a cell's center.
    pub fn cell_center(&self, cell: CellIndex) -> Point2 {
        Point2::new(
            (cell.col as f64 + 0.5) * self.resolution,
            (cell.row as f64 + 0.5) * self.resolution,
        )
    }

    pub fn extent(&self) -> (f64, f64) {
        (
            self.width as f64 * self.resolution,
            self.height as f64 * self.resolution,
        )
    }

    /// Maps a world point to the cell containing it. Points on the far edge
    /// of the grid belong to the last cell.
    pub fn cell_of(&self, point: Point2) -> Result<CellIndex, WorldError> {
        let (max_x, max_y) = self.extent();
        if !(point.x >= 0.0 && point.x <= max_x && point.y >= 0.0 && point.y <= max_y) {
            return Err(WorldError::OutOfBounds {
                x: point.x,
                y: point.y,
            });
        }
        let col = ((point.x / self.resolution).floor() as usize).min(self.width - 1);
        let row = ((point.y / self.resolution).floor() as usize).min(self.height - 1);
        Ok(CellIndex::new(col, row))
    }

    /// Returns true when `point` lies inside the grid on a free cell.
    pub fn is_free_point(&self, point: Point2) -> bool {
        self.cell_of(point).is_ok_and(|c| self.is_free(c))
    }

    /// Grows every occupied cell by `radius` cells (Chebyshev metric).
    pub fn inflated(&self, radius: usize) -> OccupancyGrid {
        if radius == 0 {
            return self.clone();
        }
        let mut out = self.clone();
        for (i, cell) in self.cells.iter().enumerate() {
            if *cell != Cell::Occupied {
                continue;
            }
            let c = self.cell_at(i);
            let c0 = c.col.saturating_sub(radius);
            let r0 = c.row.saturating_sub(radius);
            let c1 = (c.col + radius).min(self.width - 1);
            let r1 = (c.row + radius).min(self.height - 1);
            for row in r0..=r1 {
                for col in c0..=c1 {
                    out.set(CellIndex::new(col, row), Cell::Occupied);
                }
            }
        }
        out
    }
}

/// Zero-based goal index. Goals are ordered by label, so index 0 is `a`
/// when present.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GoalId(pub usize);

impl GoalId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Goal {
    pub id: GoalId,
    pub label: char,
    pub position: Point2,
}
