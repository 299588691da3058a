use rayon::prelude::*;

use crate::env::{sample_initial, Environment, StateVec};
use crate::error::{Error, Result};
use crate::planner::Trajectory;
use crate::policy::Policy;
use crate::rng::{child_rng, derive_seed, Stream};

/// One evaluation episode.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeRow {
    pub episode: usize,
    /// The goal set was visited at some step, the start included.
    pub success: bool,
    pub undisc_return: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub episodes: usize,
    pub success_rate: f64,
    pub mean_undisc_return: f64,
    pub mean_steps: f64,
    pub rows: Vec<EpisodeRow>,
}

/// Roll `policy` out from `s0` for at most one horizon. Stops at a terminal
/// goal, or at any goal state when `stop_at_goal` is set. The stored actions
/// are the clamped ones the environment actually applied.
pub fn rollout(
    policy: &dyn Policy,
    env: &dyn Environment,
    s0: StateVec,
    seed: u64,
    gamma: f64,
    stop_at_goal: bool,
) -> Result<(Trajectory, bool)> {
    let spec = env.spec();
    let mut visited = env.is_goal(&s0);
    let mut traj = Trajectory {
        env_name: spec.name.clone(),
        seed,
        states: vec![s0],
        actions: Vec::new(),
        rewards: Vec::new(),
        disc_return: 0.0,
        undisc_return: 0.0,
        success: false,
    };
    let start_done = visited && (stop_at_goal || env.goal_terminates());
    if !start_done {
        let mut discount = 1.0;
        for _ in 0..spec.horizon {
            let s = traj.end().clone();
            let mut a = policy.act(&s);
            if !a.is_finite() {
                return Err(Error::NonFinite("policy action"));
            }
            spec.action_bounds.clamp(&mut a.0);
            let r = env.step(&s, &a)?;
            traj.disc_return += discount * r.reward;
            traj.undisc_return += r.reward;
            discount *= gamma;
            traj.actions.push(a);
            traj.rewards.push(r.reward);
            traj.states.push(r.next_state);
            visited |= r.in_goal;
            if r.terminal || (stop_at_goal && r.in_goal) {
                break;
            }
        }
    }
    traj.success = env.is_goal(traj.end());
    Ok((traj, visited))
}

/// Run `episodes` rollouts from initial states drawn with per-episode
/// generators derived from `seed`. Episodes run in parallel; aggregation is in
/// episode order.
pub fn evaluate_policy(policy: &dyn Policy, env: &dyn Environment, episodes: usize, seed: u64) -> Result<EvalReport> {
    if episodes == 0 {
        return Err(Error::Input("need at least one evaluation episode".into()));
    }
    let rows = (0..episodes)
        .into_par_iter()
        .map(|i| {
            let mut rng = child_rng(seed, Stream::Episode, i as u64);
            let s0 = sample_initial(env.spec(), &mut rng);
            let (traj, visited) = rollout(policy, env, s0, derive_seed(seed, Stream::Episode, i as u64), 1.0, false)?;
            Ok(EpisodeRow { episode: i, success: visited, undisc_return: traj.undisc_return, steps: traj.len() })
        })
        .collect::<Result<Vec<_>>>()?;
    let n = rows.len() as f64;
    Ok(EvalReport {
        episodes,
        success_rate: rows.iter().filter(|r| r.success).count() as f64 / n,
        mean_undisc_return: rows.iter().map(|r| r.undisc_return).sum::<f64>() / n,
        mean_steps: rows.iter().map(|r| r.steps as f64).sum::<f64>() / n,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{ActionVec, StartDistribution};
    use crate::envs::{MountainCar, Pendulum};
    use crate::policy::ConstantPolicy;

    #[test]
    fn zero_policy_never_leaves_the_valley() {
        let r = evaluate_policy(&ConstantPolicy(ActionVec(vec![0.0])), &MountainCar::new(), 50, 1).unwrap();
        assert_eq!(r.success_rate, 0.0);
        assert_eq!(r.mean_undisc_return, -200.0);
        assert_eq!(r.mean_steps, 200.0);
    }

    #[test]
    fn pendulum_starting_upright() {
        let env = Pendulum::new().with_start(StartDistribution::Fixed(StateVec(vec![0.0, 0.0])));
        let r = evaluate_policy(&ConstantPolicy(ActionVec(vec![0.0])), &env, 3, 0).unwrap();
        assert_eq!(r.success_rate, 1.0);
        assert!(r.mean_undisc_return > -100.0);
    }

    #[test]
    fn zero_episodes_rejected_and_deterministic() {
        let p = ConstantPolicy(ActionVec(vec![1.0]));
        assert!(evaluate_policy(&p, &MountainCar::new(), 0, 0).is_err());
        let a = evaluate_policy(&p, &Pendulum::new(), 16, 9).unwrap();
        let b = evaluate_policy(&p, &Pendulum::new(), 16, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn goal_stopped_rollouts_are_valid_demos() {
        let env = MountainCar::new();
        let p = |s: &StateVec| ActionVec(vec![if s[1] >= 0.0 { 1.0 } else { -1.0 }]);
        let (t, visited) = rollout(&p, &env, StateVec(vec![-0.5, 0.0]), 0, 0.99, true).unwrap();
        assert!(visited && t.success);
        t.validate(&env, 0.99).unwrap();
    }
}
