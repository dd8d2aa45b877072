//! Map, pose and goal data model, plus map and scenario file ingestion.

mod grid;
mod map;
mod scenario;

pub use grid::{wrap_angle, Cell, CellIndex, Goal, GoalId, OccupancyGrid, Point2, Pose2D};
pub use map::{load_map, World};
pub use scenario::{time_to_tick, AirmClickEvent, IntentSwitch, RandomPair, Scenario};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum WorldError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("point ({x}, {y}) is outside the grid")]
    OutOfBounds { x: f64, y: f64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MapErrorKind {
    MissingResolution,
    BadResolution,
    NoRows,
    RaggedRow { expected: usize, found: usize },
    UnknownChar(char),
    DuplicateGoal(char),
    DuplicateStart,
    MissingStart,
    NoGoals,
    Grid(String),
}

impl std::fmt::Display for MapErrorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::MissingResolution => write!(f, "expected `resolution <meters-per-cell>`"),
            Self::BadResolution => write!(f, "resolution must be a positive number"),
            Self::NoRows => write!(f, "map has no rows"),
            Self::RaggedRow { expected, found } => {
                write!(f, "ragged row: expected {expected} columns, found {found}")
            }
            Self::UnknownChar(c) => write!(f, "unknown character {c:?}"),
            Self::DuplicateGoal(c) => write!(f, "duplicate goal label '{c}'"),
            Self::DuplicateStart => write!(f, "more than one start cell 'S'"),
            Self::MissingStart => write!(f, "no start cell 'S'"),
            Self::NoGoals => write!(f, "map has no goals"),
            Self::Grid(msg) => write!(f, "{msg}"),
        }
    }
}

/// Map parse failure with a 1-based line/column into the source text.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("map line {line}, column {column}: {kind}")]
pub struct MapError {
    pub line: usize,
    pub column: usize,
    pub kind: MapErrorKind,
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("scenario document: {0}")]
    Parse(String),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error("unknown goal {0:?}")]
    UnknownGoal(String),
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error("no bundled scenario named {0:?}")]
    UnknownBuiltin(String),
}
