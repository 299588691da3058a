use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Planner settings. `seed` is the master seed for a collection run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlannerConfig {
    /// Tree-growth iterations per tree.
    pub budget_k: usize,
    /// Probability of drawing the random sample from the goal set.
    pub goal_bias: f64,
    pub gamma: f64,
    /// Weight of the return coordinate in the metric; zero disables it.
    pub return_weight: f64,
    /// Return threshold; when set, success also needs `disc_return >= min_return`.
    pub min_return: Option<f64>,
    pub seed: u64,
    /// Depth limit; `None` means the environment horizon.
    pub max_depth: Option<usize>,
    /// Stop growing as soon as a successful node appears.
    pub stop_on_first_goal: bool,
    /// Total trees a collection run may grow; `None` means 50 per demonstration.
    pub attempt_cap: Option<usize>,
}

pub const DEFAULT_ATTEMPTS_PER_DEMO: usize = 50;

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            budget_k: 20_000,
            goal_bias: 0.05,
            gamma: 0.99,
            return_weight: 0.0,
            min_return: None,
            seed: 0,
            max_depth: None,
            stop_on_first_goal: false,
            attempt_cap: None,
        }
    }
}

impl PlannerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.goal_bias) {
            return Err(Error::Input(format!("goal_bias {} outside [0, 1]", self.goal_bias)));
        }
        if !(0.0..1.0).contains(&self.gamma) {
            return Err(Error::Input(format!("gamma {} outside [0, 1)", self.gamma)));
        }
        if !self.return_weight.is_finite() || self.return_weight < 0.0 {
            return Err(Error::Input("return_weight must be finite and nonnegative".into()));
        }
        if matches!(self.min_return, Some(r) if !r.is_finite()) {
            return Err(Error::Input("min_return must be finite".into()));
        }
        if self.max_depth == Some(0) {
            return Err(Error::Input("max_depth must be positive".into()));
        }
        Ok(())
    }

    pub fn criterion(&self) -> SuccessCriterion {
        match self.min_return {
            None => SuccessCriterion::Goal,
            Some(r) => SuccessCriterion::GoalWithReturn(r),
        }
    }

    pub fn attempt_cap_for(&self, demos: usize) -> usize {
        self.attempt_cap
            .unwrap_or(DEFAULT_ATTEMPTS_PER_DEMO.saturating_mul(demos))
    }
}

/// What makes a node an acceptable trajectory end.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SuccessCriterion {
    Goal,
    /// Goal membership plus a minimum discounted return.
    GoalWithReturn(f64),
}

impl SuccessCriterion {
    pub fn accepts(&self, in_goal: bool, disc_return: f64) -> bool {
        match *self {
            SuccessCriterion::Goal => in_goal,
            SuccessCriterion::GoalWithReturn(r) => in_goal && disc_return >= r,
        }
    }
}
