//! Deterministic state-feedback policies.

use crate::env::{ActionVec, StateVec};

/// A deterministic controller. Implementors must be shareable across the
/// threads that run evaluation episodes.
pub trait Policy: Sync {
    fn act(&self, s: &StateVec) -> ActionVec;
}

impl<F> Policy for F
where
    F: Fn(&StateVec) -> ActionVec + Sync,
{
    fn act(&self, s: &StateVec) -> ActionVec {
        self(s)
    }
}

/// Outputs the same action everywhere.
#[derive(Debug, Clone)]
pub struct ConstantPolicy(pub ActionVec);

impl Policy for ConstantPolicy {
    fn act(&self, _s: &StateVec) -> ActionVec {
        self.0.clone()
    }
}
