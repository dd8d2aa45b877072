use std::sync::Arc;

use super::log::{EndReason, LogEnd, LogHeader, MethodEstimate, PoseRecord, TickRecord, TrialLog};
use super::policy::{Policy, PolicyView, ScriptedPolicy};
use super::robot::{step, OperatorCommand, RobotState};
use super::{SimError, LOG_FORMAT_VERSION};
use crate::config::Config;
use crate::estimator::{Observation, ObservationSet};
use crate::methods::{Estimate, EstimatorBank, Method};
use crate::planner::{bearing_angle, path_length, CostFields, PlannerOptions};
use crate::world::{GoalId, Pose2D, Scenario};

/// Bearing and path length to every goal from `pose`.
pub fn observe(scenario: &Scenario, fields: &CostFields, pose: &Pose2D) -> ObservationSet {
    ObservationSet::new(
        scenario
            .world
            .goals
            .iter()
            .map(|g| Observation {
                phi: bearing_angle(pose, g.position),
                path_len: path_length(fields.get(g.id), pose),
            })
            .collect(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrialStatus {
    Running,
    Captured,
    BudgetExhausted,
}

/// One trial, advanced a tick at a time by whoever owns it (a scripted
/// loop or an interactive session).
#[derive(Debug, Clone)]
pub struct Trial {
    scenario: Scenario,
    fields: Arc<CostFields>,
    config: Config,
    robot: RobotState,
    bank: EstimatorBank,
    tick: u64,
    status: TrialStatus,
    header: LogHeader,
    records: Vec<TickRecord>,
    last_estimates: Vec<Estimate>,
}

impl Trial {
    /// `scenario` must already be resolved for the seed (see
    /// [`Scenario::for_seed`]).
    pub fn new(
        scenario: Scenario,
        methods: &[Method],
        config: &Config,
        seed: u64,
        policy: &str,
    ) -> Result<Self, SimError> {
        let fields = CostFields::build(
            &scenario.world,
            PlannerOptions {
                inflation_radius: config.simulator.inflation_radius,
            },
        )?;
        Self::with_fields(scenario, Arc::new(fields), methods, config, seed, policy)
    }

    pub fn with_fields(
        scenario: Scenario,
        fields: Arc<CostFields>,
        methods: &[Method],
        config: &Config,
        seed: u64,
        policy: &str,
    ) -> Result<Self, SimError> {
        if methods.is_empty() {
            return Err(SimError::NoMethods);
        }
        let bank = EstimatorBank::new(methods, scenario.world.goals.len(), config)?;
        let header = LogHeader {
            format: LOG_FORMAT_VERSION,
            scenario: scenario.id.clone(),
            tick_rate: config.tick_rate(),
            seed,
            policy: policy.to_string(),
            methods: methods.to_vec(),
            goals: scenario.world.labels(),
            config: *config,
        };
        Ok(Self {
            robot: RobotState::at(scenario.world.start),
            scenario,
            fields,
            config: *config,
            bank,
            tick: 0,
            status: TrialStatus::Running,
            header,
            records: Vec::new(),
            last_estimates: Vec::new(),
        })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn fields(&self) -> &CostFields {
        &self.fields
    }

    pub fn robot(&self) -> &RobotState {
        &self.robot
    }

    pub fn config(&self) -> &Config {
        &self.config
    }

    /// Index of the next tick.
    pub fn tick_index(&self) -> u64 {
        self.tick
    }

    pub fn status(&self) -> TrialStatus {
        self.status
    }

    pub fn is_running(&self) -> bool {
        self.status == TrialStatus::Running
    }

    pub fn records(&self) -> &[TickRecord] {
        &self.records
    }

    pub fn last_estimates(&self) -> &[Estimate] {
        &self.last_estimates
    }

    pub fn airm_active(&self) -> bool {
        self.bank.airm_active()
    }

    pub fn airm_remaining_secs(&self) -> Option<f64> {
        self.bank.airm_remaining_secs()
    }

    /// Goal the script says the operator wants at the next tick.
    pub fn true_goal(&self) -> GoalId {
        self.scenario.true_goal_at(self.tick, self.config.tick_rate())
    }

    pub fn policy_view(&self) -> PolicyView<'_> {
        PolicyView {
            tick: self.tick,
            tick_rate: self.config.tick_rate(),
            robot: &self.robot,
            scenario: &self.scenario,
            fields: &self.fields,
            true_goal: self.true_goal(),
            params: &self.config.simulator,
        }
    }

    /// Applies one operator command and updates every estimator.
    pub fn advance(&mut self, command: &OperatorCommand) -> Result<&TickRecord, SimError> {
        if !self.is_running() {
            return Err(SimError::Finished);
        }
        let rate = self.config.tick_rate();
        let sim = &self.config.simulator;
        let true_goal = self.true_goal();
        self.robot = step(
            &self.robot,
            command,
            &self.scenario.world.grid,
            1.0 / rate,
            sim.v_max,
            sim.omega_max,
        );
        let pose = self.robot.pose;
        let goals = &self.scenario.world.goals;
        if let Some(click) = command.airm_click {
            self.bank.click(click)?;
        }
        let obs = observe(&self.scenario, &self.fields, &pose);
        let estimates = self.bank.update(&pose, goals, &obs)?;
        let record = TickRecord {
            tick: self.tick,
            time: self.tick as f64 / rate,
            pose: PoseRecord {
                x: pose.x,
                y: pose.y,
                heading: pose.heading(),
            },
            true_goal: goals[true_goal.index()].label.to_string(),
            airm_click: command
                .airm_click
                .map(|g| goals[g.index()].label.to_string()),
            estimates: estimates
                .iter()
                .map(|e| MethodEstimate::from_estimate(e, goals))
                .collect(),
        };
        self.last_estimates = estimates;
        self.records.push(record);

        let final_goal = &goals[self.scenario.final_goal().index()];
        if self.tick >= self.scenario.final_switch_tick(rate)
            && pose.position().distance(&final_goal.position) <= sim.capture_radius
        {
            self.status = TrialStatus::Captured;
        } else if self.tick + 1 >= sim.tick_budget {
            self.status = TrialStatus::BudgetExhausted;
        }
        self.tick += 1;
        Ok(self.records.last().expect("just pushed"))
    }

    /// Finishes the log. A trial stopped while still running is marked
    /// interrupted.
    pub fn into_log(self) -> TrialLog {
        let reason = match self.status {
            TrialStatus::Captured => EndReason::Captured,
            TrialStatus::BudgetExhausted => EndReason::TickBudget,
            TrialStatus::Running => EndReason::Interrupted,
        };
        TrialLog {
            header: self.header,
            end: LogEnd {
                complete: reason == EndReason::Captured,
                ticks: self.records.len() as u64,
                reason,
            },
            ticks: self.records,
        }
    }

    pub fn snapshot_log(&self) -> TrialLog {
        self.clone().into_log()
    }
}

/// Runs `policy` on `scenario` until capture or the tick budget.
pub fn run_trial(
    scenario: &Scenario,
    policy: &mut dyn Policy,
    methods: &[Method],
    config: &Config,
    seed: u64,
) -> Result<TrialLog, SimError> {
    config.validate()?;
    let scenario = scenario.for_seed(seed);
    let mut trial = Trial::new(scenario, methods, config, seed, &policy.describe())?;
    while trial.is_running() {
        let command = policy.command(&trial.policy_view())?;
        trial.advance(&command)?;
    }
    Ok(trial.into_log())
}

/// [`run_trial`] with the scripted driver, noise from the config and
/// randomness from `seed`.
pub fn run_scripted_trial(
    scenario: &Scenario,
    methods: &[Method],
    config: &Config,
    seed: u64,
) -> Result<TrialLog, SimError> {
    let mut policy = ScriptedPolicy::new(config.simulator.heading_noise, seed);
    run_trial(scenario, &mut policy, methods, config, seed)
}
