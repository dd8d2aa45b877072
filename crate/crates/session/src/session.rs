//! Tick-driven session state, independent of any transport. The service
//! feeds decoded client messages in and calls [`SessionCore::tick`] at the
//! tick rate.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use intentnav_core::metrics::score_trial;
use intentnav_core::planner::{CostFields, PlannerOptions};
use intentnav_core::simulator::{EndReason, SimError, TrialLog};
use intentnav_core::world::GoalId;
use intentnav_core::{Config, Method, OperatorCommand, Scenario, Trial};
use thiserror::Error;

use crate::protocol::{
    ClientMessage, ErrorReply, MapSnapshot, MethodScore, ServerMessage, TickState, TrialEnd,
};

#[derive(Debug, Error)]
pub enum SessionError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("writing session log: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone)]
pub struct SessionOptions {
    pub methods: Vec<Method>,
    pub config: Config,
    /// Seed of the first trial; later trials use `seed + n`.
    pub seed: u64,
    /// Where finished trial logs go. `None` keeps them in memory only.
    pub log_dir: Option<PathBuf>,
}

impl Default for SessionOptions {
    fn default() -> Self {
        Self {
            methods: Method::ALL.to_vec(),
            config: Config::default(),
            seed: 0,
            log_dir: None,
        }
    }
}

pub struct SessionCore {
    scenario: Scenario,
    fields: Arc<CostFields>,
    options: SessionOptions,
    trial: Trial,
    trial_index: u64,
    held: OperatorCommand,
    click: Option<GoalId>,
    applied: Vec<OperatorCommand>,
    last_log: Option<TrialLog>,
}

impl SessionCore {
    pub fn new(scenario: Scenario, options: SessionOptions) -> Result<Self, SessionError> {
        options.config.validate().map_err(SimError::from)?;
        let fields = Arc::new(build_fields(&scenario, &options.config)?);
        let trial = start_trial(&scenario, &fields, &options, options.seed)?;
        Ok(Self {
            scenario,
            fields,
            options,
            trial,
            trial_index: 0,
            held: OperatorCommand::IDLE,
            click: None,
            applied: Vec::new(),
            last_log: None,
        })
    }

    pub fn map_snapshot(&self) -> ServerMessage {
        ServerMessage::MapSnapshot(MapSnapshot::of(
            &self.scenario,
            &self.options.methods,
            self.options.config.tick_rate(),
        ))
    }

    pub fn trial(&self) -> &Trial {
        &self.trial
    }

    pub fn seed(&self) -> u64 {
        self.options.seed + self.trial_index
    }

    /// Commands applied so far in the current trial, one per tick.
    pub fn applied_commands(&self) -> &[OperatorCommand] {
        &self.applied
    }

    /// Log of the most recently finished trial.
    pub fn last_log(&self) -> Option<&TrialLog> {
        self.last_log.as_ref()
    }

    /// Applies one client message. Commands and clicks take effect at the
    /// next tick; a reset answers with a fresh map snapshot.
    pub fn handle(&mut self, msg: ClientMessage) -> Result<Vec<ServerMessage>, ErrorReply> {
        match msg {
            ClientMessage::Command { linear, angular } => {
                if !(linear.is_finite() && angular.is_finite()) {
                    return Err(ErrorReply::new("invalid_command", "velocities must be finite"));
                }
                self.held = OperatorCommand::drive(linear, angular);
                Ok(Vec::new())
            }
            ClientMessage::AirmClick { goal } => {
                let id = goal
                    .chars()
                    .next()
                    .filter(|_| goal.chars().count() == 1)
                    .and_then(|c| self.scenario.world.goal_by_label(c))
                    .map(|g| g.id)
                    .ok_or_else(|| {
                        ErrorReply::new("unknown_goal", format!("no goal labelled `{goal}`"))
                    })?;
                self.click = Some(id);
                Ok(Vec::new())
            }
            ClientMessage::Reset { scenario } => {
                let next = match scenario {
                    Some(id) => {
                        let next = Scenario::builtin(&id)
                            .map_err(|e| ErrorReply::new("unknown_scenario", e.to_string()))?;
                        let fields = build_fields(&next, &self.options.config)
                            .map_err(|e| ErrorReply::new("unknown_scenario", e.to_string()))?;
                        Some((next, fields))
                    }
                    None => None,
                };
                let mut out = Vec::new();
                if let Some(end) = self.close().map_err(internal)? {
                    out.push(ServerMessage::TrialEnd(end));
                }
                if let Some((scenario, fields)) = next {
                    self.scenario = scenario;
                    self.fields = Arc::new(fields);
                }
                self.restart().map_err(internal)?;
                out.push(self.map_snapshot());
                Ok(out)
            }
        }
    }

    /// Advances one tick with the latest command and any pending click.
    /// When the trial ends the returned messages include its summary, and a
    /// new trial is already set up.
    pub fn tick(&mut self) -> Result<Vec<ServerMessage>, SessionError> {
        let command = OperatorCommand {
            airm_click: self.click.take(),
            ..self.held
        };
        let record = self.trial.advance(&command)?.clone();
        self.applied.push(command);
        let state = TickState {
            tick: record.tick,
            time: record.time,
            pose: record.pose,
            true_goal: record.true_goal,
            estimates: record.estimates,
            airm_active: self.trial.airm_active(),
            airm_remaining: self.trial.airm_remaining_secs(),
        };
        let mut out = vec![ServerMessage::TickState(state)];
        if !self.trial.is_running() {
            if let Some(end) = self.close()? {
                out.push(ServerMessage::TrialEnd(end));
            }
        }
        Ok(out)
    }

    /// Ends the current trial, writes its log, starts the next one and
    /// returns the summary. `None` when no tick has run yet.
    pub fn close(&mut self) -> Result<Option<TrialEnd>, SessionError> {
        if self.trial.records().is_empty() {
            return Ok(None);
        }
        let log = self.trial.snapshot_log();
        let path = match &self.options.log_dir {
            Some(dir) => Some(write_log(dir, &log)?),
            None => None,
        };
        let scores = score_trial(&log, self.options.config.metrics.log_base)
            .map(|s| {
                s.into_iter()
                    .map(|s| MethodScore {
                        method: s.method,
                        accuracy: s.accuracy,
                        log_loss: s.log_loss,
                    })
                    .collect()
            })
            .unwrap_or_default();
        let end = TrialEnd {
            reason: match log.end.reason {
                EndReason::Captured => "captured",
                EndReason::TickBudget => "tick_budget",
                EndReason::Interrupted => "interrupted",
            }
            .to_string(),
            ticks: log.end.ticks,
            scores,
            log_file: path.map(|p| p.display().to_string()),
        };
        self.last_log = Some(log);
        self.trial_index += 1;
        self.restart()?;
        Ok(Some(end))
    }

    fn restart(&mut self) -> Result<(), SessionError> {
        self.trial = start_trial(&self.scenario, &self.fields, &self.options, self.seed())?;
        self.held = OperatorCommand::IDLE;
        self.click = None;
        self.applied.clear();
        Ok(())
    }
}

fn internal(e: SessionError) -> ErrorReply {
    ErrorReply::new("internal", e.to_string())
}

fn build_fields(scenario: &Scenario, config: &Config) -> Result<CostFields, SimError> {
    Ok(CostFields::build(
        &scenario.world,
        PlannerOptions {
            inflation_radius: config.simulator.inflation_radius,
        },
    )?)
}

fn start_trial(
    scenario: &Scenario,
    fields: &Arc<CostFields>,
    options: &SessionOptions,
    seed: u64,
) -> Result<Trial, SimError> {
    Trial::with_fields(
        scenario.for_seed(seed),
        fields.clone(),
        &options.methods,
        &options.config,
        seed,
        "interactive",
    )
}

/// Writes `log` under `dir` through a temporary file so readers never see
/// a partial log.
pub fn write_log(dir: &Path, log: &TrialLog) -> std::io::Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let stamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or_default();
    let path = dir.join(format!(
        "session-{}-seed{}-{stamp}.jsonl",
        log.header.scenario, log.header.seed
    ));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    log.write_jsonl(std::io::BufWriter::new(tmp.as_file_mut()))?;
    tmp.as_file_mut().flush()?;
    tmp.persist(&path).map_err(|e| e.error)?;
    Ok(path)
}
