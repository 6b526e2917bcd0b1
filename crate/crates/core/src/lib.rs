//! Downlink multi-AP WiFi with coordinated spatial reuse: a channel model,
//! a scenario generator, allocation evaluation and feasibility checking, and
//! three allocators (exhaustive, greedy heuristic, non-coordinated baseline).

pub mod baseline;
pub mod error;
pub mod eval;
pub mod exact;
pub mod feasibility;
pub mod heuristic;
pub mod model;
pub mod propagation;
#[cfg(any(test, feature = "testkit"))]
pub mod testkit;

pub use error::{ModelError, Result};
pub use eval::{compute_sinr, evaluate, gain_percent, throughput_gain};
pub use feasibility::{check_feasibility, Constraint, FeasibilityReport, Violation};
pub use model::{
    Allocation, ApGrouping, EvaluationResult, GainMatrix, NetworkParams, Point, Scenario,
};
