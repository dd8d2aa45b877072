//! Accuracy and log-loss per method, and descriptive statistics over trials.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::methods::Method;
use crate::simulator::TrialLog;

/// Probabilities are clamped to `[PROB_FLOOR, 1]` before taking logs.
pub const PROB_FLOOR: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("log has no tick records")]
    EmptyLog,
    #[error("method {0} is not present in the log")]
    MissingMethod(Method),
    #[error("tick {tick}: belief has no entry for goal {goal:?}")]
    MissingGoal { tick: u64, goal: String },
    #[error("no scores to aggregate")]
    NoScores,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogBase {
    /// Natural log (nats).
    #[default]
    E,
    /// Base 2 (bits).
    #[serde(rename = "2")]
    Two,
}

impl LogBase {
    fn ln_to_base(self, nats: f64) -> f64 {
        match self {
            LogBase::E => nats,
            LogBase::Two => nats / std::f64::consts::LN_2,
        }
    }
}

/// Fraction of ticks whose prediction equals the scripted goal.
pub fn accuracy(log: &TrialLog, method: Method) -> Result<f64, MetricsError> {
    if log.ticks.is_empty() {
        return Err(MetricsError::EmptyLog);
    }
    let mut correct = 0usize;
    for tick in &log.ticks {
        let est = tick.estimate(method).ok_or(MetricsError::MissingMethod(method))?;
        if est.prediction == tick.true_goal {
            correct += 1;
        }
    }
    Ok(correct as f64 / log.ticks.len() as f64)
}

/// Mean negative log probability of the scripted goal. Each tick's belief is
/// renormalized first so unnormalized confidences are handled too.
pub fn log_loss(log: &TrialLog, method: Method, base: LogBase) -> Result<f64, MetricsError> {
    if log.ticks.is_empty() {
        return Err(MetricsError::EmptyLog);
    }
    let mut total = 0.0;
    for tick in &log.ticks {
        let est = tick.estimate(method).ok_or(MetricsError::MissingMethod(method))?;
        let mass: f64 = est.belief.iter().map(|p| p.probability).sum();
        let p_true = est
            .probability_of(&tick.true_goal)
            .ok_or_else(|| MetricsError::MissingGoal {
                tick: tick.tick,
                goal: tick.true_goal.clone(),
            })?;
        let p = if mass > 0.0 { p_true / mass } else { 0.0 };
        total -= p.clamp(PROB_FLOOR, 1.0).ln();
    }
    Ok(base.ln_to_base(total / log.ticks.len() as f64).max(0.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialScore {
    pub scenario: String,
    pub method: Method,
    pub accuracy: f64,
    pub log_loss: f64,
    pub tick_count: usize,
}

/// Scores every method recorded in `log`.
pub fn score_trial(log: &TrialLog, base: LogBase) -> Result<Vec<TrialScore>, MetricsError> {
    log.header
        .methods
        .iter()
        .map(|&method| {
            Ok(TrialScore {
                scenario: log.header.scenario.clone(),
                method,
                accuracy: accuracy(log, method)?,
                log_loss: log_loss(log, method, base)?,
                tick_count: log.ticks.len(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    /// Sample (n - 1) standard deviation; 0 for a single value.
    pub sd: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Option<Summary> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let sd = if values.len() < 2 || values.iter().all(|v| *v == values[0]) {
            0.0
        } else {
            let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
            (ss / (n - 1.0)).sqrt()
        };
        Some(Summary { mean, sd })
    }
}

/// Statistics for one (scenario, method) cell of the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub scenario: String,
    pub method: Method,
    pub trials: usize,
    pub accuracy: Summary,
    pub log_loss: Summary,
    /// Set when only one trial contributed, so the SD is not meaningful.
    pub degenerate: bool,
}

/// Groups scores by scenario and method, ordered by scenario id then method.
pub fn aggregate(scores: &[TrialScore]) -> Result<Vec<AggregateRow>, MetricsError> {
    if scores.is_empty() {
        return Err(MetricsError::NoScores);
    }
    let mut groups: BTreeMap<(String, Method), Vec<&TrialScore>> = BTreeMap::new();
    for s in scores {
        groups
            .entry((s.scenario.clone(), s.method))
            .or_default()
            .push(s);
    }
    Ok(groups
        .into_iter()
        .map(|((scenario, method), group)| {
            let acc: Vec<f64> = group.iter().map(|s| s.accuracy).collect();
            let ll: Vec<f64> = group.iter().map(|s| s.log_loss).collect();
            AggregateRow {
                scenario,
                method,
                trials: group.len(),
                accuracy: Summary::of(&acc).expect("non-empty group"),
                log_loss: Summary::of(&ll).expect("non-empty group"),
                degenerate: group.len() < 2,
            }
        })
        .collect())
}

/// Writes the report as CSV: one row per scenario and method.
pub fn write_report<W: Write>(rows: &[AggregateRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "scenario",
        "method",
        "trials",
        "accuracy_mean",
        "accuracy_sd",
        "log_loss_mean",
        "log_loss_sd",
        "degenerate",
    ])?;
    for r in rows {
        w.write_record([
            r.scenario.clone(),
            r.method.to_string(),
            r.trials.to_string(),
            format!("{:.6}", r.accuracy.mean),
            format!("{:.6}", r.accuracy.sd),
            format!("{:.6}", r.log_loss.mean),
            format!("{:.6}", r.log_loss.sd),
            r.degenerate.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
