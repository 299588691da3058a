use serde::{Deserialize, Serialize};

use crate::env::{ActionVec, Environment, StateVec};
use crate::error::{Error, Result};

/// Alternating state/action sequence `s0, a0, s1, ..., sn`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub env_name: String,
    /// Seed of the tree that produced it (or of the rollout episode).
    pub seed: u64,
    pub states: Vec<StateVec>,
    pub actions: Vec<ActionVec>,
    pub rewards: Vec<f64>,
    pub disc_return: f64,
    pub undisc_return: f64,
    pub success: bool,
}

/// Tolerance on recomputed returns.
pub const RETURN_TOLERANCE: f64 = 1e-9;

impl Trajectory {
    /// Number of transitions.
    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn start(&self) -> &StateVec {
        &self.states[0]
    }

    pub fn end(&self) -> &StateVec {
        self.states.last().expect("trajectory has a start state")
    }

    /// State-action pairs `(s_t, a_t)`.
    pub fn pairs(&self) -> impl Iterator<Item = (&StateVec, &ActionVec)> {
        self.states.iter().zip(&self.actions)
    }

    /// Check the shape invariants and replay every transition through `env`:
    /// successors and rewards must match bit for bit, returns within
    /// [`RETURN_TOLERANCE`], and a successful trajectory must end in the goal
    /// set without passing through a terminal goal state earlier.
    pub fn validate(&self, env: &dyn Environment, gamma: f64) -> Result<()> {
        let bad = |step, message: String| Error::InvalidTrajectory { step, message };
        if self.states.len() != self.actions.len() + 1 || self.rewards.len() != self.actions.len() {
            return Err(bad(0, "states must outnumber actions and rewards by one".into()));
        }
        let mut disc = 0.0;
        let mut undisc = 0.0;
        let mut discount = 1.0;
        for t in 0..self.len() {
            let r = env.step(&self.states[t], &self.actions[t])?;
            if !r.next_state.bit_eq(&self.states[t + 1]) {
                return Err(bad(
                    t,
                    format!("replayed successor {:?} != stored {:?}", r.next_state.0, self.states[t + 1].0),
                ));
            }
            if r.reward.to_bits() != self.rewards[t].to_bits() {
                return Err(bad(t, format!("replayed reward {} != stored {}", r.reward, self.rewards[t])));
            }
            if r.terminal && t + 1 < self.len() {
                return Err(bad(t, "passes through a terminal state".into()));
            }
            disc += discount * r.reward;
            undisc += r.reward;
            discount *= gamma;
        }
        if (disc - self.disc_return).abs() > RETURN_TOLERANCE {
            return Err(bad(self.len(), format!("discounted return {} != stored {}", disc, self.disc_return)));
        }
        if (undisc - self.undisc_return).abs() > RETURN_TOLERANCE {
            return Err(bad(
                self.len(),
                format!("undiscounted return {} != stored {}", undisc, self.undisc_return),
            ));
        }
        if self.success && !env.is_goal(self.end()) {
            return Err(bad(self.len(), "flagged successful but ends outside the goal set".into()));
        }
        Ok(())
    }
}
