//! Demonstration discovery for sparse-reward control tasks.
//!
//! A kinodynamic RRT grows trees through deterministic environment dynamics
//! until it reaches the goal set; the best-return branches become
//! demonstrations that train a random-Fourier-feature Bayesian regression
//! policy. The [`harness`] module measures planner failure probabilities,
//! fits exponential tail bounds and checks the expected sample complexity.

pub mod env;
pub mod envs;
pub mod error;
pub mod experts;
pub mod harness;
pub mod imitation;
pub mod planner;
pub mod policy;
pub mod rng;
pub mod store;

pub use env::{ActionVec, BoundsBox, EnvSpec, Environment, StateVec, StepResult};
pub use envs::make_env;
pub use error::{Error, Result};
pub use imitation::{evaluate_policy, EvalReport, RffConfig, RffPolicy};
pub use planner::{grow_tree, p2d2_collect, PlannerConfig, SuccessCriterion, Trajectory, Tree};
pub use policy::Policy;
pub use store::DemoSet;
