use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::env::Environment;
use crate::error::Result;
use crate::imitation::{evaluate_policy, fit_pairs, EvalReport, RffConfig, RffPolicy};
use crate::planner::{p2d2_collect, PlannerConfig};
use crate::rng::{child_rng, derive_seed, Stream};
use crate::store::DemoSet;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub demos: usize,
    pub eval_episodes: usize,
    pub seed: u64,
    pub planner: PlannerConfig,
    pub rff: RffConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self { demos: 10, eval_episodes: 100, seed: 0, planner: PlannerConfig::default(), rff: RffConfig::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub env: String,
    pub seed: u64,
    pub demos_requested: usize,
    pub demos_collected: usize,
    pub attempts: usize,
    pub shortfall: bool,
    pub timed_out: bool,
    pub total_env_steps: u64,
    pub demo_steps: usize,
    pub demo_mean_undisc_return: f64,
    pub trained_pairs: usize,
    pub eval_episodes: usize,
    pub imitation_success_rate: f64,
    pub imitation_mean_undisc_return: f64,
    pub imitation_mean_steps: f64,
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub report: PipelineReport,
    pub demos: DemoSet,
    pub policy: RffPolicy,
    pub eval: EvalReport,
}

/// Collect demonstrations, fit the imitation policy and evaluate it. Stage
/// seeds are derived from `config.seed`; the planner seed inside `config` is
/// ignored.
pub fn end_to_end(env: &dyn Environment, config: &PipelineConfig, deadline: Option<Instant>) -> Result<PipelineOutput> {
    let mut planner = config.planner.clone();
    planner.seed = derive_seed(config.seed, Stream::Pipeline, 0);
    let demos = p2d2_collect(env, &planner, config.demos, deadline)?;
    let mut feature_rng = child_rng(config.seed, Stream::Features, 0);
    let policy = fit_pairs(env, demos.trajectories.iter().flat_map(|t| t.pairs()), &config.rff, &mut feature_rng)?;
    let eval = evaluate_policy(&policy, env, config.eval_episodes, derive_seed(config.seed, Stream::Pipeline, 1))?;
    let report = PipelineReport {
        env: env.spec().name.clone(),
        seed: config.seed,
        demos_requested: config.demos,
        demos_collected: demos.trajectories.len(),
        attempts: demos.attempts,
        shortfall: demos.shortfall,
        timed_out: demos.timed_out,
        total_env_steps: demos.total_env_steps,
        demo_steps: demos.pair_count(),
        demo_mean_undisc_return: demos.mean_undisc_return().unwrap_or(f64::NAN),
        trained_pairs: policy.trained_pairs,
        eval_episodes: eval.episodes,
        imitation_success_rate: eval.success_rate,
        imitation_mean_undisc_return: eval.mean_undisc_return,
        imitation_mean_steps: eval.mean_steps,
    };
    Ok(PipelineOutput { report, demos, policy, eval })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{StartDistribution, StateVec};
    use crate::envs::MountainCar;
    use crate::error::Error;

    #[test]
    fn start_in_goal_has_no_pairs() {
        let env = MountainCar::new().with_start(StartDistribution::Fixed(StateVec(vec![0.5, 0.0])));
        let cfg = PipelineConfig { demos: 2, eval_episodes: 2, ..Default::default() };
        assert!(matches!(end_to_end(&env, &cfg, None), Err(Error::Fit(_))));
    }
}
