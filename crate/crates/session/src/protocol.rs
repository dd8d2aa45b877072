//! Wire messages. Every frame is one JSON object with a `type` tag.

use intentnav_core::simulator::{GoalProbability, MethodEstimate, PoseRecord};
use intentnav_core::{Method, Scenario};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoalMarker {
    pub label: String,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapSnapshot {
    pub scenario: String,
    pub width: usize,
    pub height: usize,
    /// Meters per cell.
    pub resolution: f64,
    /// Map rows, top row first, in the text map alphabet (`.` free, `#`
    /// occupied).
    pub rows: Vec<String>,
    pub goals: Vec<GoalMarker>,
    pub start: PoseRecord,
    pub methods: Vec<Method>,
    pub tick_rate: f64,
}

impl MapSnapshot {
    pub fn of(scenario: &Scenario, methods: &[Method], tick_rate: f64) -> Self {
        let grid = &scenario.world.grid;
        let rows = (0..grid.height())
            .rev()
            .map(|row| {
                (0..grid.width())
                    .map(|col| {
                        if grid.is_free(intentnav_core::world::CellIndex::new(col, row)) {
                            '.'
                        } else {
                            '#'
                        }
                    })
                    .collect()
            })
            .collect();
        let start = scenario.world.start;
        MapSnapshot {
            scenario: scenario.id.clone(),
            width: grid.width(),
            height: grid.height(),
            resolution: grid.resolution(),
            rows,
            goals: scenario
                .world
                .goals
                .iter()
                .map(|g| GoalMarker {
                    label: g.label.to_string(),
                    x: g.position.x,
                    y: g.position.y,
                })
                .collect(),
            start: PoseRecord {
                x: start.x,
                y: start.y,
                heading: start.heading(),
            },
            methods: methods.to_vec(),
            tick_rate,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TickState {
    pub tick: u64,
    pub time: f64,
    pub pose: PoseRecord,
    pub true_goal: String,
    pub estimates: Vec<MethodEstimate>,
    pub airm_active: bool,
    /// Seconds left in the click horizon; absent when no episode runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub airm_remaining: Option<f64>,
}

impl TickState {
    pub fn belief(&self, method: Method) -> Option<&[GoalProbability]> {
        self.estimates
            .iter()
            .find(|e| e.method == method)
            .map(|e| e.belief.as_slice())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodScore {
    pub method: Method,
    pub accuracy: f64,
    pub log_loss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialEnd {
    /// `captured`, `tick_budget` or `interrupted`.
    pub reason: String,
    pub ticks: u64,
    pub scores: Vec<MethodScore>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log_file: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReply {
    pub code: String,
    pub message: String,
}

/// Server to client.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ServerMessage {
    MapSnapshot(MapSnapshot),
    TickState(TickState),
    TrialEnd(TrialEnd),
    Error(ErrorReply),
}

/// Client to server.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClientMessage {
    /// Velocity command, m/s and rad/s. Held until replaced.
    Command { linear: f64, angular: f64 },
    /// Explicit intent for the goal with this label.
    AirmClick { goal: String },
    /// Restart, optionally on another bundled scenario.
    Reset {
        #[serde(default)]
        scenario: Option<String>,
    },
}

pub const UNKNOWN_TYPE: &str = "unknown_type";
pub const MALFORMED: &str = "malformed";

const CLIENT_TYPES: [&str; 3] = ["command", "airm_click", "reset"];

impl ErrorReply {
    pub fn new(code: &str, message: impl Into<String>) -> Self {
        Self {
            code: code.to_string(),
            message: message.into(),
        }
    }
}

pub fn encode(msg: &ServerMessage) -> String {
    serde_json::to_string(msg).expect("server messages always serialize")
}

/// Parses a client frame. Failures come back as the error frame to send.
pub fn decode(frame: &str) -> Result<ClientMessage, ErrorReply> {
    let value: serde_json::Value = serde_json::from_str(frame)
        .map_err(|e| ErrorReply::new(MALFORMED, format!("invalid JSON: {e}")))?;
    let kind = value
        .get("type")
        .and_then(|t| t.as_str())
        .ok_or_else(|| ErrorReply::new(MALFORMED, "missing string field `type`"))?;
    if !CLIENT_TYPES.contains(&kind) {
        return Err(ErrorReply::new(
            UNKNOWN_TYPE,
            format!("unknown message type `{kind}`"),
        ));
    }
    serde_json::from_value(value).map_err(|e| ErrorReply::new(MALFORMED, e.to_string()))
}
