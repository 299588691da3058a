use std::time::Instant;

use rayon::prelude::*;

use super::config::PlannerConfig;
use super::grow::grow_tree;
use super::trajectory::Trajectory;
use crate::env::{sample_initial, Environment};
use crate::error::Result;
use crate::rng::{child_rng, derive_seed, Stream};
use crate::store::DemoSet;

struct Attempt {
    trajectory: Option<Trajectory>,
    env_steps: u64,
}

fn run_attempt(env: &dyn Environment, config: &PlannerConfig, index: u64) -> Result<Attempt> {
    let seed = derive_seed(config.seed, Stream::Attempt, index);
    let mut rng = child_rng(config.seed, Stream::Attempt, index);
    let root = sample_initial(env.spec(), &mut rng);
    let mut cfg = config.clone();
    cfg.seed = seed;
    let tree = grow_tree(env, &cfg, root, &mut rng)?;
    Ok(Attempt {
        trajectory: tree.extract_best(cfg.criterion()),
        env_steps: tree.stats.env_steps,
    })
}

/// Collect `n` successful demonstrations by growing trees from fresh initial
/// states until enough succeed or the attempt cap (or deadline) is reached.
///
/// Trees are grown in parallel batches but consumed strictly in attempt
/// order, so the result does not depend on the thread count. Steps spent on
/// attempts past the last consumed one are not counted.
pub fn p2d2_collect(env: &dyn Environment, config: &PlannerConfig, n: usize, deadline: Option<Instant>) -> Result<DemoSet> {
    config.validate()?;
    let cap = config.attempt_cap_for(n);
    let mut set = DemoSet::new(env, config.clone(), n);
    let batch = rayon::current_num_threads().max(1);
    let mut next = 0usize;
    'outer: while set.trajectories.len() < n && next < cap {
        if deadline.is_some_and(|d| Instant::now() >= d) {
            set.timed_out = true;
            break;
        }
        let end = (next + batch).min(cap);
        let results: Vec<Result<Attempt>> = (next..end)
            .into_par_iter()
            .map(|i| run_attempt(env, config, i as u64))
            .collect();
        for r in results {
            let attempt = r?;
            set.attempts += 1;
            set.total_env_steps += attempt.env_steps;
            if let Some(t) = attempt.trajectory {
                set.trajectories.push(t);
                if set.trajectories.len() == n {
                    break 'outer;
                }
            }
        }
        next = end;
    }
    set.shortfall = set.trajectories.len() < n;
    Ok(set)
}
