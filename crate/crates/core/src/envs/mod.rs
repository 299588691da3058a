//! Sparse-reward classic-control environments.
//!
//! Dynamics and constants follow the canonical Gym implementations
//! (`MountainCarContinuous`, `Pendulum`, `Acrobot` book dynamics and the
//! cart-pole equations); rewards, goal sets and horizons are the sparse
//! variants: `-1` per step unless the goal set says otherwise.

pub mod acrobot;
pub mod cartpole;
pub mod mountain_car;
pub mod pendulum;

use std::sync::Arc;

pub use acrobot::Acrobot;
pub use cartpole::CartpoleSwingup;
pub use mountain_car::MountainCar;
pub use pendulum::Pendulum;

use crate::env::Environment;
use crate::error::{Error, Result};

pub const ENV_NAMES: [&str; 4] = ["mountaincar", "pendulum", "acrobot", "cartpole_swingup"];

/// Look up an environment by registry name.
pub fn make_env(name: &str) -> Result<Arc<dyn Environment>> {
    Ok(match name {
        "mountaincar" => Arc::new(MountainCar::new()),
        "pendulum" => Arc::new(Pendulum::new()),
        "acrobot" => Arc::new(Acrobot::new()),
        "cartpole_swingup" => Arc::new(CartpoleSwingup::new()),
        other => return Err(Error::UnknownEnv(other.to_string())),
    })
}

macro_rules! impl_with_start {
    ($t:ty) => {
        impl $t {
            /// Replace the initial-state distribution.
            pub fn with_start(mut self, start: $crate::env::StartDistribution) -> Self {
                self.spec.initial = start;
                self
            }
        }
    };
}
pub(crate) use impl_with_start;
