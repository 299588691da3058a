use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::env::{sample_initial, ActionVec, Environment, Normalizer, StateVec};
use crate::error::{Error, Result};
use crate::imitation::rollout;
use crate::policy::Policy;
use crate::rng::{child_rng, Stream};

/// `a = clamp(theta0 * y0 + theta1 * y1)` on the normalized state `y`.
#[derive(Debug, Clone)]
pub struct LinearPolicy {
    pub theta: [f64; 2],
    normalizer: Normalizer,
    lower: f64,
    upper: f64,
}

impl LinearPolicy {
    pub fn new(env: &dyn Environment, theta: [f64; 2]) -> Result<Self> {
        let spec = env.spec();
        if spec.state_dim != 2 || spec.action_dim != 1 {
            return Err(Error::Input(format!("linear surface needs a 2-d state and 1-d action, `{}` has {}/{}", spec.name, spec.state_dim, spec.action_dim)));
        }
        Ok(Self {
            theta,
            normalizer: Normalizer::new(spec),
            lower: spec.action_bounds.lower()[0],
            upper: spec.action_bounds.upper()[0],
        })
    }
}

impl Policy for LinearPolicy {
    fn act(&self, s: &StateVec) -> ActionVec {
        let y = self.normalizer.normalize(s);
        ActionVec(vec![(self.theta[0] * y[0] + self.theta[1] * y[1]).clamp(self.lower, self.upper)])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceCell {
    pub i: usize,
    pub j: usize,
    pub theta0: f64,
    pub theta1: f64,
    pub mean_return: f64,
    pub success_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReturnSurface {
    pub theta0: Vec<f64>,
    pub theta1: Vec<f64>,
    pub episodes_per_cell: usize,
    /// Row-major over `theta0` then `theta1`.
    pub cells: Vec<SurfaceCell>,
}

impl ReturnSurface {
    pub fn cell(&self, i: usize, j: usize) -> &SurfaceCell {
        &self.cells[i * self.theta1.len() + j]
    }
}

/// `n` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// Mean undiscounted return of the linear policy at every grid cell. All
/// cells share the same initial states, so differences between cells come
/// from the parameters alone.
pub fn return_surface(
    env: &dyn Environment,
    theta0: &[f64],
    theta1: &[f64],
    episodes_per_cell: usize,
    seed: u64,
) -> Result<ReturnSurface> {
    if episodes_per_cell == 0 {
        return Err(Error::Input("need at least one episode per cell".into()));
    }
    if theta0.iter().chain(theta1).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("surface grid"));
    }
    LinearPolicy::new(env, [0.0, 0.0])?;
    let starts: Vec<StateVec> = (0..episodes_per_cell)
        .map(|e| sample_initial(env.spec(), &mut child_rng(seed, Stream::Surface, e as u64)))
        .collect();
    let cells = (0..theta0.len() * theta1.len())
        .into_par_iter()
        .map(|c| {
            let (i, j) = (c / theta1.len(), c % theta1.len());
            let policy = LinearPolicy::new(env, [theta0[i], theta1[j]])?;
            let mut total = 0.0;
            let mut hits = 0;
            for (e, s0) in starts.iter().enumerate() {
                let (t, visited) = rollout(&policy, env, s0.clone(), e as u64, 1.0, false)?;
                total += t.undisc_return;
                hits += visited as usize;
            }
            Ok(SurfaceCell {
                i,
                j,
                theta0: theta0[i],
                theta1: theta1[j],
                mean_return: total / episodes_per_cell as f64,
                success_rate: hits as f64 / episodes_per_cell as f64,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ReturnSurface { theta0: theta0.to_vec(), theta1: theta1.to_vec(), episodes_per_cell, cells })
}
