//! Kinodynamic RRT in MDPs and the demonstration collection loop.

mod collect;
mod config;
mod grow;
mod index;
mod trajectory;
mod tree;

pub use collect::p2d2_collect;
pub use config::{PlannerConfig, SuccessCriterion, DEFAULT_ATTEMPTS_PER_DEMO};
pub use grow::grow_tree;
pub use index::NearestIndex;
pub use trajectory::{Trajectory, RETURN_TOLERANCE};
pub use tree::{GrowthStats, Tree, TreeNode};
