//! Goal-intent recognition for teleoperated mobile robots.
//!
//! Given a known grid map with a set of candidate goals, the estimators in
//! this crate infer which goal the operator is driving toward from the
//! robot's motion alone, optionally sharpened by explicit "this one" clicks
//! from the operator. The crate also carries the comparison baselines, a
//! deterministic tick-based simulator with a scripted driver, and the
//! accuracy / log-loss evaluation used to compare methods.

pub mod baselines;
pub mod config;
pub mod estimator;
pub mod methods;
pub mod metrics;
pub mod planner;
pub mod simulator;
pub mod world;

pub use config::Config;
pub use estimator::{predict_intent, Belief, BoirFilter, EstimatorParams, ObservationSet};
pub use methods::{Estimate, EstimatorBank, Method};
pub use simulator::{run_scripted_trial, run_trial, OperatorCommand, Trial, TrialLog};
pub use world::{Goal, GoalId, OccupancyGrid, Pose2D, Scenario, World};
