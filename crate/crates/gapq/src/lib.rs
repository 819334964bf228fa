//! Gap-acceptance queueing analysis for a minor road crossing a major road.
//!
//! The head of the minor-street queue crosses as soon as a gap between
//! major-street cars is at least their critical headway; until then the
//! queue behind them grows. This crate provides exact transform-based
//! capacity and delay formulas for three driver populations (one shared
//! headway, a fresh draw per attempt, one draw per driver), optional
//! impatience that shrinks the headway attempt by attempt, and a
//! discrete-event simulator that validates the formulas independently.

pub mod analytic;
pub mod cli;
pub mod headway;
pub mod scenarios;
pub mod sim;

pub use analytic::queue::{QueueMetrics, QueuePmf};
pub use analytic::{capacity_sweep, AnalyticError, ServiceCharacterization, SweepColumn};
pub use headway::{
    Behavior, HeadwayDistribution, ImpatiencePolicy, ModelSpec, ModelTemplate, SpecError,
};
pub use scenarios::{
    find_capacity_argmax, find_crossover, run_example, CapacityArgmax, Scenario, ScenarioError,
};
pub use sim::{estimate_service_time, simulate, Estimate, SimConfig, SimError, SimResult};
