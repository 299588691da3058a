use serde::{Deserialize, Serialize};

use super::config::SuccessCriterion;
use super::index::NearestIndex;
use super::trajectory::Trajectory;
use crate::env::{ActionVec, Metric, StateVec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeNode {
    pub id: usize,
    pub state: StateVec,
    pub parent: Option<usize>,
    /// Action executed at the parent to reach this node.
    pub action_in: Option<ActionVec>,
    pub reward_in: f64,
    /// Timesteps from the root.
    pub depth: usize,
    /// `sum_t gamma^t r_t` along the path from the root.
    pub disc_return: f64,
    pub undisc_return: f64,
    pub in_goal: bool,
    /// Goal reached in an environment where that ends the episode.
    pub terminal: bool,
}

/// Counters from one growth run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GrowthStats {
    pub iterations: usize,
    /// Iterations whose nearest node could not be expanded.
    pub skipped: usize,
    pub env_steps: u64,
    /// Iteration that added the first successful node; 0 if the root succeeds.
    pub first_success: Option<usize>,
}

/// Search tree. Nodes are append-only, so every parent id is smaller than
/// its child's id.
#[derive(Debug, Clone)]
pub struct Tree {
    pub env_name: String,
    pub seed: u64,
    pub gamma: f64,
    pub nodes: Vec<TreeNode>,
    pub stats: GrowthStats,
    index: NearestIndex,
}

impl Tree {
    pub(crate) fn with_root(env_name: &str, seed: u64, gamma: f64, metric: Metric, root: TreeNode) -> Self {
        let mut index = NearestIndex::new(metric);
        index.push(&index.metric().embed(&root.state, root.disc_return));
        Self {
            env_name: env_name.to_string(),
            seed,
            gamma,
            nodes: vec![root],
            stats: GrowthStats::default(),
            index,
        }
    }

    pub(crate) fn add(&mut self, node: TreeNode) -> usize {
        debug_assert_eq!(node.id, self.nodes.len());
        let p = self.index.metric().embed(&node.state, node.disc_return);
        self.index.push(&p);
        self.nodes.push(node);
        self.nodes.len() - 1
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root(&self) -> &TreeNode {
        &self.nodes[0]
    }

    pub fn metric(&self) -> &Metric {
        self.index.metric()
    }

    /// Nearest node to a raw state (with return coordinate when the metric
    /// is augmented). Ties go to the lowest id.
    pub fn nearest(&self, state: &[f64], ret: f64) -> usize {
        let q = self.metric().embed(state, ret);
        self.nearest_embedded(&q)
    }

    pub(crate) fn nearest_embedded(&self, q: &[f64]) -> usize {
        self.index.nearest(q).expect("tree always has a root").0
    }

    /// Best-return node accepted by `criterion`, ties to the lowest id.
    pub fn best_node(&self, criterion: SuccessCriterion) -> Option<usize> {
        let mut best: Option<usize> = None;
        for n in &self.nodes {
            if criterion.accepts(n.in_goal, n.disc_return)
                && best.is_none_or(|b| n.disc_return > self.nodes[b].disc_return)
            {
                best = Some(n.id);
            }
        }
        best
    }

    /// Path root -> `id` as a trajectory.
    pub fn path_to(&self, id: usize, criterion: SuccessCriterion) -> Trajectory {
        let mut chain = vec![id];
        let mut cur = id;
        while let Some(p) = self.nodes[cur].parent {
            chain.push(p);
            cur = p;
        }
        chain.reverse();
        let nodes: Vec<&TreeNode> = chain.iter().map(|&i| &self.nodes[i]).collect();
        let end = nodes[nodes.len() - 1];
        Trajectory {
            env_name: self.env_name.clone(),
            seed: self.seed,
            states: nodes.iter().map(|n| n.state.clone()).collect(),
            actions: nodes[1..]
                .iter()
                .map(|n| n.action_in.clone().expect("non-root node has an action"))
                .collect(),
            rewards: nodes[1..].iter().map(|n| n.reward_in).collect(),
            disc_return: end.disc_return,
            undisc_return: end.undisc_return,
            success: criterion.accepts(end.in_goal, end.disc_return),
        }
    }

    /// The trajectory with the highest discounted return among successful
    /// nodes, or `None` when no node is successful.
    pub fn extract_best(&self, criterion: SuccessCriterion) -> Option<Trajectory> {
        self.best_node(criterion).map(|id| self.path_to(id, criterion))
    }

    /// JSON-lines serialization: one header line, then one node per line.
    pub fn to_bytes(&self) -> crate::Result<Vec<u8>> {
        #[derive(Serialize)]
        struct Header<'a> {
            format: &'a str,
            version: u32,
            env: &'a str,
            seed: u64,
            gamma: f64,
            nodes: usize,
            stats: &'a GrowthStats,
        }
        let mut out = serde_json::to_vec(&Header {
            format: "p2d2-tree",
            version: 1,
            env: &self.env_name,
            seed: self.seed,
            gamma: self.gamma,
            nodes: self.nodes.len(),
            stats: &self.stats,
        })?;
        out.push(b'\n');
        for n in &self.nodes {
            serde_json::to_writer(&mut out, n)?;
            out.push(b'\n');
        }
        Ok(out)
    }
}
