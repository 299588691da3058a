use rand::Rng;

use super::config::PlannerConfig;
use super::tree::{Tree, TreeNode};
use crate::env::{sample_action, sample_state, wrap_angle, Environment, Metric, StateVec};
use crate::error::Result;
use crate::rng::SimRng;

/// Grow one kinodynamic RRT from `root`.
///
/// Each iteration draws a uniform state (replaced by a goal-set draw with
/// probability `goal_bias`), finds the nearest node, executes a uniformly
/// random action there and adds the successor. Nodes at the depth limit and
/// terminal goal nodes are not expandable; an iteration that selects one is
/// consumed without growth.
pub fn grow_tree(env: &dyn Environment, config: &PlannerConfig, root: StateVec, rng: &mut SimRng) -> Result<Tree> {
    config.validate()?;
    let spec = env.spec();
    spec.check_state(&root)?;
    let mut root = root;
    for &i in &spec.angular_dims {
        root.0[i] = wrap_angle(root.0[i]);
    }
    let criterion = config.criterion();
    let max_depth = config.max_depth.unwrap_or(spec.horizon);
    let metric = Metric::new(spec, None, config.return_weight)?;
    let augmented = metric.augmented();
    let horizon = spec.horizon as f64;

    let in_goal = env.is_goal(&root);
    let root_node = TreeNode {
        id: 0,
        state: root,
        parent: None,
        action_in: None,
        reward_in: 0.0,
        depth: 0,
        disc_return: 0.0,
        undisc_return: 0.0,
        in_goal,
        terminal: in_goal && env.goal_terminates(),
    };
    let mut tree = Tree::with_root(&spec.name, config.seed, config.gamma, metric, root_node);
    if criterion.accepts(in_goal, 0.0) {
        tree.stats.first_success = Some(0);
        if config.stop_on_first_goal {
            return Ok(tree);
        }
    }

    let mut query = Vec::with_capacity(tree.metric().dim());
    for iteration in 1..=config.budget_k {
        tree.stats.iterations = iteration;
        let mut target = sample_state(spec, rng);
        let mut target_ret = if augmented { rng.random_range(-horizon..=horizon) } else { 0.0 };
        let u: f64 = rng.random();
        if u <= config.goal_bias {
            target = env.sample_goal(rng);
            if augmented {
                let lo = config.min_return.unwrap_or(-horizon).clamp(-horizon, horizon);
                target_ret = rng.random_range(lo..=horizon);
            }
        }
        query.clear();
        tree.metric().embed_into(&target, target_ret, &mut query);
        let near = tree.nearest_embedded(&query);
        let parent = &tree.nodes[near];
        if parent.depth >= max_depth || parent.terminal {
            tree.stats.skipped += 1;
            continue;
        }
        let action = sample_action(spec, rng);
        let step = env.step(&parent.state, &action)?;
        tree.stats.env_steps += 1;
        let discount = config.gamma.powi(parent.depth as i32);
        let node = TreeNode {
            id: tree.len(),
            state: step.next_state,
            parent: Some(near),
            action_in: Some(action),
            reward_in: step.reward,
            depth: parent.depth + 1,
            disc_return: parent.disc_return + discount * step.reward,
            undisc_return: parent.undisc_return + step.reward,
            in_goal: step.in_goal,
            terminal: step.terminal,
        };
        let success = criterion.accepts(node.in_goal, node.disc_return);
        tree.add(node);
        if success && tree.stats.first_success.is_none() {
            tree.stats.first_success = Some(iteration);
            if config.stop_on_first_goal {
                break;
            }
        }
    }
    Ok(tree)
}
