//! Trial logs: one JSON record per line. The first line is a header, then
//! one record per tick, then an end marker.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::estimator::Belief;
use crate::methods::{Estimate, Method};
use crate::world::Goal;

pub const LOG_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogHeader {
    pub format: u32,
    pub scenario: String,
    pub tick_rate: f64,
    pub seed: u64,
    pub policy: String,
    pub methods: Vec<Method>,
    pub goals: Vec<String>,
    pub config: Config,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoseRecord {
    pub x: f64,
    pub y: f64,
    pub heading: f64,
}

/// Probability assigned to one goal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoalProbability {
    pub goal: String,
    pub probability: f64,
}

/// Serialized belief: ordered `(goal label, probability)` pairs.
pub fn belief_snapshot(belief: &Belief, goals: &[Goal]) -> Vec<GoalProbability> {
    goals
        .iter()
        .zip(belief.probs())
        .map(|(g, p)| GoalProbability {
            goal: g.label.to_string(),
            probability: *p,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodEstimate {
    pub method: Method,
    pub belief: Vec<GoalProbability>,
    pub prediction: String,
}

impl MethodEstimate {
    pub fn from_estimate(estimate: &Estimate, goals: &[Goal]) -> Self {
        Self {
            method: estimate.method,
            belief: belief_snapshot(&estimate.belief, goals),
            prediction: goals[estimate.prediction.index()].label.to_string(),
        }
    }

    pub fn probability_of(&self, goal: &str) -> Option<f64> {
        self.belief
            .iter()
            .find(|p| p.goal == goal)
            .map(|p| p.probability)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TickRecord {
    pub tick: u64,
    pub time: f64,
    pub pose: PoseRecord,
    pub true_goal: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub airm_click: Option<String>,
    pub estimates: Vec<MethodEstimate>,
}

impl TickRecord {
    pub fn estimate(&self, method: Method) -> Option<&MethodEstimate> {
        self.estimates.iter().find(|e| e.method == method)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndReason {
    /// The final scripted goal was reached.
    Captured,
    /// Tick budget ran out before capture.
    TickBudget,
    /// An interactive session stopped before capture.
    Interrupted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogEnd {
    pub complete: bool,
    pub ticks: u64,
    pub reason: EndReason,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
enum LogLine {
    Header(LogHeader),
    Tick(TickRecord),
    End(LogEnd),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialLog {
    pub header: LogHeader,
    pub ticks: Vec<TickRecord>,
    pub end: LogEnd,
}

/// Problems found while reading a log.
#[derive(Debug, thiserror::Error)]
pub enum LogReadError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("log has no header record")]
    MissingHeader,
    #[error("log has no end record")]
    MissingEnd,
    #[error("log has no valid records")]
    Empty,
}

/// A parsed log plus the lines that had to be skipped.
#[derive(Debug)]
pub struct ParsedLog {
    pub log: TrialLog,
    pub skipped_lines: Vec<usize>,
}

impl TrialLog {
    pub fn is_complete(&self) -> bool {
        self.end.complete
    }

    pub fn write_jsonl<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let mut line = |record: &LogLine| -> std::io::Result<()> {
            serde_json::to_writer(&mut out, record)?;
            out.write_all(b"\n")
        };
        line(&LogLine::Header(self.header.clone()))?;
        for tick in &self.ticks {
            line(&LogLine::Tick(tick.clone()))?;
        }
        line(&LogLine::End(self.end.clone()))?;
        out.flush()
    }

    pub fn to_jsonl(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("serde_json emits utf-8")
    }

    /// Reads a log, skipping lines that fail to parse. Tick records that
    /// are out of order are also skipped.
    pub fn read_jsonl<R: BufRead>(input: R) -> Result<ParsedLog, LogReadError> {
        let mut header = None;
        let mut end = None;
        let mut ticks: Vec<TickRecord> = Vec::new();
        let mut skipped_lines = Vec::new();
        let mut any = false;
        for (i, line) in input.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            match serde_json::from_str::<LogLine>(&line) {
                Ok(LogLine::Header(h)) if header.is_none() => {
                    header = Some(h);
                    any = true;
                }
                Ok(LogLine::Tick(t)) if ticks.last().is_none_or(|last| t.tick > last.tick) => {
                    ticks.push(t);
                    any = true;
                }
                Ok(LogLine::End(e)) if end.is_none() => {
                    end = Some(e);
                    any = true;
                }
                _ => skipped_lines.push(i + 1),
            }
        }
        if !any {
            return Err(LogReadError::Empty);
        }
        let header = header.ok_or(LogReadError::MissingHeader)?;
        let end = end.ok_or(LogReadError::MissingEnd)?;
        Ok(ParsedLog {
            log: TrialLog { header, ticks, end },
            skipped_lines,
        })
    }
}
