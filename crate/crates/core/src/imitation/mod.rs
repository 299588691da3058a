//! Random-Fourier-feature Bayesian linear regression policies trained on
//! demonstrations, and policy evaluation.

mod blr;
mod eval;
mod features;
mod policy;

pub use blr::{BlrFit, BlrPosterior};
pub use eval::{evaluate_policy, rollout, EpisodeRow, EvalReport};
pub use features::RffFeatureMap;
pub use policy::{
    fit, fit_pairs, load_policy, read_policy, save_policy, write_policy, RffConfig, RffPolicy, POLICY_FORMAT,
    POLICY_VERSION,
};
