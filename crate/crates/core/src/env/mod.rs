//! The environment protocol: deterministic MDPs whose state can be set
//! freely, plus bounds handling and seeded sampling.

mod metric;
mod types;

pub use metric::{denormalize, goal_distance_metric, normalize, Metric, Normalizer};
pub use types::{
    wrap_angle, ActionVec, BoundsBox, EnvSpec, StartDistribution, StateVec, StepResult,
};

use rand::Rng;
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::rng::SimRng;

/// A deterministic environment expressed as a pure transition function.
///
/// There is no hidden simulator state: "set state, then step" is a single
/// call to [`Environment::step`], and calling it twice with the same input
/// returns the same result.
pub trait Environment: Send + Sync + std::fmt::Debug {
    fn spec(&self) -> &EnvSpec;

    /// Physical constants in a fixed order. Feeds the constants hash and the
    /// human-readable report.
    fn constants(&self) -> Vec<(&'static str, f64)>;

    fn is_goal(&self, s: &[f64]) -> bool;

    /// Whether entering the goal set ends the episode.
    fn goal_terminates(&self) -> bool;

    /// Uniform-ish draw from the goal set, used by goal biasing.
    fn sample_goal(&self, rng: &mut SimRng) -> StateVec;

    /// Raw dynamics for one control interval. `s` is wrapped and `a` is
    /// already clamped to the action box.
    fn propagate(&self, s: &[f64], a: &[f64]) -> Vec<f64>;

    /// Reward for a transition ending in `next`.
    fn reward(&self, _next: &[f64]) -> f64 {
        -1.0
    }

    fn step(&self, state: &StateVec, action: &ActionVec) -> Result<StepResult> {
        let spec = self.spec();
        spec.check_state(state)?;
        spec.check_action(action)?;
        let mut s = state.0.clone();
        for &i in &spec.angular_dims {
            s[i] = wrap_angle(s[i]);
        }
        let mut a = action.0.clone();
        spec.action_bounds.clamp(&mut a);
        let mut next = self.propagate(&s, &a);
        for &i in &spec.angular_dims {
            next[i] = wrap_angle(next[i]);
        }
        let lo = spec.state_bounds.lower();
        let hi = spec.state_bounds.upper();
        for (i, v) in next.iter_mut().enumerate() {
            if !spec.is_angular(i) {
                *v = v.clamp(lo[i], hi[i]);
            }
        }
        let in_goal = self.is_goal(&next);
        let reward = self.reward(&next);
        Ok(StepResult {
            next_state: StateVec(next),
            reward,
            in_goal,
            terminal: in_goal && self.goal_terminates(),
        })
    }

    /// SHA-256 over the name, horizon and constant bit patterns.
    fn constants_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.spec().name.as_bytes());
        h.update(self.spec().horizon.to_le_bytes());
        for (k, v) in self.constants() {
            h.update(k.as_bytes());
            h.update(v.to_bits().to_le_bytes());
        }
        hex::encode(h.finalize())
    }

    fn constants_report(&self) -> String {
        let spec = self.spec();
        let mut out = format!(
            "environment: {}\nstate_dim: {}\naction_dim: {}\nhorizon: {}\n",
            spec.name, spec.state_dim, spec.action_dim, spec.horizon
        );
        out.push_str(&format!(
            "state_lower: {:?}\nstate_upper: {:?}\n",
            spec.state_bounds.lower(),
            spec.state_bounds.upper()
        ));
        out.push_str(&format!(
            "action_lower: {:?}\naction_upper: {:?}\nangular_dims: {:?}\n",
            spec.action_bounds.lower(),
            spec.action_bounds.upper(),
            spec.angular_dims
        ));
        out.push_str(&format!("goal_terminates: {}\n", self.goal_terminates()));
        for (k, v) in self.constants() {
            out.push_str(&format!("{k}: {v:?}\n"));
        }
        out.push_str(&format!("constants_hash: {}\n", self.constants_hash()));
        out
    }
}

/// Uniform draw on a box.
pub fn sample_box(bounds: &BoundsBox, rng: &mut SimRng) -> Vec<f64> {
    bounds
        .lower()
        .iter()
        .zip(bounds.upper())
        .map(|(lo, hi)| {
            let u: f64 = rng.random();
            (lo + (hi - lo) * u).clamp(*lo, *hi)
        })
        .collect()
}

/// Uniform draw from the state box.
pub fn sample_state(spec: &EnvSpec, rng: &mut SimRng) -> StateVec {
    StateVec(sample_box(&spec.state_bounds, rng))
}

/// Draw from the initial-state set. Angular coordinates come back wrapped.
pub fn sample_initial(spec: &EnvSpec, rng: &mut SimRng) -> StateVec {
    let mut s = match &spec.initial {
        StartDistribution::Uniform { lower, upper } => lower
            .iter()
            .zip(upper)
            .map(|(lo, hi)| {
                let u: f64 = rng.random();
                (lo + (hi - lo) * u).clamp(*lo, *hi)
            })
            .collect(),
        StartDistribution::Fixed(s) => s.0.clone(),
    };
    for &i in &spec.angular_dims {
        s[i] = wrap_angle(s[i]);
    }
    StateVec(s)
}

/// Uniform draw from the action box.
pub fn sample_action(spec: &EnvSpec, rng: &mut SimRng) -> ActionVec {
    ActionVec(sample_box(&spec.action_bounds, rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envs::{MountainCar, Pendulum};
    use crate::rng::rng_from_seed;

    #[test]
    fn sample_state_moments() {
        let env = MountainCar::new();
        let spec = env.spec();
        let mut rng = rng_from_seed(0);
        let n = 100_000;
        let mut sums = [0.0f64; 2];
        for _ in 0..n {
            let s = sample_state(spec, &mut rng);
            assert!(spec.state_bounds.contains(&s));
            sums[0] += s[0];
            sums[1] += s[1];
        }
        for i in 0..2 {
            let (lo, hi) = (spec.state_bounds.lower()[i], spec.state_bounds.upper()[i]);
            let mean = sums[i] / n as f64;
            let se = (hi - lo) / 12f64.sqrt() / (n as f64).sqrt();
            assert!((mean - 0.5 * (lo + hi)).abs() < 3.0 * se, "dim {i}: {mean}");
        }
    }

    #[test]
    fn sample_is_deterministic_and_contained() {
        let env = Pendulum::new();
        let a = sample_state(env.spec(), &mut rng_from_seed(42));
        let b = sample_state(env.spec(), &mut rng_from_seed(42));
        assert!(a.bit_eq(&b));
        let tight = BoundsBox::new(vec![1.0], vec![1.0 + 1e-12]).unwrap();
        let mut rng = rng_from_seed(1);
        for _ in 0..1000 {
            let v = sample_box(&tight, &mut rng);
            assert!(tight.contains(&v));
        }
    }

    #[test]
    fn fixed_start_always_same() {
        let env = Pendulum::new().with_start(StartDistribution::Fixed(StateVec(vec![0.0, 0.0])));
        let mut rng = rng_from_seed(3);
        for _ in 0..5 {
            assert_eq!(sample_initial(env.spec(), &mut rng).0, vec![0.0, 0.0]);
        }
    }

    #[test]
    fn step_validates_inputs() {
        let env = MountainCar::new();
        let s = StateVec(vec![-0.5, 0.0]);
        assert!(env.step(&s, &ActionVec(vec![f64::NAN])).is_err());
        assert!(env.step(&s, &ActionVec(vec![1.0, 0.0])).is_err());
        assert!(env.step(&StateVec(vec![0.0]), &ActionVec(vec![1.0])).is_err());
        assert!(env.step(&StateVec(vec![f64::INFINITY, 0.0]), &ActionVec(vec![1.0])).is_err());
    }

    #[test]
    fn step_is_stateless() {
        let env = Pendulum::new();
        let s = StateVec(vec![2.0, -1.0]);
        let a = ActionVec(vec![0.7]);
        let r1 = env.step(&s, &a).unwrap();
        let r2 = env.step(&s, &a).unwrap();
        assert!(r1.next_state.bit_eq(&r2.next_state));
        assert_eq!(r1.reward.to_bits(), r2.reward.to_bits());
    }

    #[test]
    fn out_of_box_action_is_clamped() {
        let env = MountainCar::new();
        let s = StateVec(vec![-0.5, 0.0]);
        let big = env.step(&s, &ActionVec(vec![50.0])).unwrap();
        let one = env.step(&s, &ActionVec(vec![1.0])).unwrap();
        assert!(big.next_state.bit_eq(&one.next_state));
    }
}
