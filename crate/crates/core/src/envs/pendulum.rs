use std::f64::consts::PI;

use rand::Rng;

use crate::env::{BoundsBox, EnvSpec, Environment, StartDistribution, StateVec};
use crate::rng::SimRng;

pub const GRAVITY: f64 = 10.0;
pub const MASS: f64 = 1.0;
pub const LENGTH: f64 = 1.0;
pub const DT: f64 = 0.05;
pub const MAX_SPEED: f64 = 8.0;
pub const MAX_TORQUE: f64 = 2.0;
pub const GOAL_COS: f64 = 0.99;
pub const HORIZON: usize = 100;

/// Torque-limited pendulum with the Gym update (uniform rod, semi-implicit
/// Euler). State `[theta, theta_dot]`, `theta = 0` upright. Goal
/// `cos(theta) > 0.99`, non-terminal, rewarded with `cos(theta)`.
#[derive(Debug, Clone)]
pub struct Pendulum {
    spec: EnvSpec,
}

super::impl_with_start!(Pendulum);

impl Pendulum {
    pub fn new() -> Self {
        let spec = EnvSpec {
            name: "pendulum".into(),
            state_dim: 2,
            action_dim: 1,
            state_bounds: BoundsBox::new(vec![-PI, -MAX_SPEED], vec![PI, MAX_SPEED]).expect("static bounds"),
            action_bounds: BoundsBox::new(vec![-MAX_TORQUE], vec![MAX_TORQUE]).expect("static bounds"),
            horizon: HORIZON,
            angular_dims: vec![0],
            initial: StartDistribution::Uniform {
                lower: vec![-PI, -1.0],
                upper: vec![PI, 1.0],
            },
        };
        Self { spec }
    }

    /// Kinetic plus potential energy of the rod, potential measured from the
    /// pivot so that upright rest has the largest energy at rest.
    pub fn energy(&self, s: &[f64]) -> f64 {
        let inertia = MASS * LENGTH * LENGTH / 3.0;
        0.5 * inertia * s[1] * s[1] + MASS * GRAVITY * 0.5 * LENGTH * s[0].cos()
    }
}

impl Default for Pendulum {
    fn default() -> Self {
        Self::new()
    }
}

pub fn pendulum_goal(s: &[f64]) -> bool {
    s[0].cos() > GOAL_COS
}

/// `cos(theta)` inside the goal set, `-1` elsewhere.
pub fn pendulum_reward(s: &[f64]) -> f64 {
    if pendulum_goal(s) {
        s[0].cos()
    } else {
        -1.0
    }
}

impl Environment for Pendulum {
    fn spec(&self) -> &EnvSpec {
        &self.spec
    }

    fn constants(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("gravity", GRAVITY),
            ("mass", MASS),
            ("length", LENGTH),
            ("dt", DT),
            ("max_speed", MAX_SPEED),
            ("max_torque", MAX_TORQUE),
            ("goal_cos", GOAL_COS),
        ]
    }

    fn is_goal(&self, s: &[f64]) -> bool {
        pendulum_goal(s)
    }

    fn goal_terminates(&self) -> bool {
        false
    }

    fn sample_goal(&self, rng: &mut SimRng) -> StateVec {
        let half = GOAL_COS.acos();
        loop {
            let th = rng.random_range(-half..half);
            let w = rng.random_range(-MAX_SPEED..=MAX_SPEED);
            if pendulum_goal(&[th]) {
                return StateVec(vec![th, w]);
            }
        }
    }

    fn propagate(&self, s: &[f64], a: &[f64]) -> Vec<f64> {
        let (th, thdot) = (s[0], s[1]);
        let acc = 3.0 * GRAVITY / (2.0 * LENGTH) * th.sin() + 3.0 / (MASS * LENGTH * LENGTH) * a[0];
        let new_thdot = (thdot + acc * DT).clamp(-MAX_SPEED, MAX_SPEED);
        vec![th + new_thdot * DT, new_thdot]
    }

    fn reward(&self, next: &[f64]) -> f64 {
        pendulum_reward(next)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::ActionVec;

    #[test]
    fn upright_is_fixed_point_and_goal() {
        let env = Pendulum::new();
        let r = env.step(&StateVec(vec![0.0, 0.0]), &ActionVec(vec![0.0])).unwrap();
        assert_eq!(r.next_state.0, vec![0.0, 0.0]);
        assert!(r.in_goal && !r.terminal);
        assert_eq!(r.reward, 1.0);
    }

    #[test]
    fn goal_and_reward_values() {
        assert!(pendulum_goal(&[0.0, 0.0]));
        assert!(!pendulum_goal(&[PI, 0.0]));
        assert_eq!(pendulum_reward(&[PI, 0.0]), -1.0);
        assert!(pendulum_goal(&[0.1, 0.0]));
        assert!((pendulum_reward(&[0.1, 0.0]) - 0.9950041652780258).abs() < 1e-15);
    }

    /// Reference: the unforced rod conserves energy. A fine RK4 integration
    /// of the same ODE is the oracle; the semi-implicit Euler update must not
    /// pump energy in over an episode (its error oscillates, it has no drift).
    #[test]
    fn unforced_energy_has_no_secular_growth() {
        fn rk4_reference(s: [f64; 2], t: f64) -> [f64; 2] {
            let f = |x: [f64; 2]| [x[1], 1.5 * GRAVITY / LENGTH * x[0].sin()];
            let n = 20_000;
            let h = t / n as f64;
            let mut x = s;
            for _ in 0..n {
                let k1 = f(x);
                let k2 = f([x[0] + 0.5 * h * k1[0], x[1] + 0.5 * h * k1[1]]);
                let k3 = f([x[0] + 0.5 * h * k2[0], x[1] + 0.5 * h * k2[1]]);
                let k4 = f([x[0] + h * k3[0], x[1] + h * k3[1]]);
                x[0] += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
                x[1] += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
            }
            x
        }
        let env = Pendulum::new();
        for &th0 in &[2.0, 2.8, -1.5] {
            let s0 = [th0, 0.0];
            let e0 = env.energy(&s0);
            let reference = rk4_reference(s0, HORIZON as f64 * DT);
            assert!((env.energy(&reference) - e0).abs() < 1e-9);
            let mut s = StateVec(s0.to_vec());
            let mut energies = vec![e0];
            for _ in 0..HORIZON {
                s = env.step(&s, &ActionVec(vec![0.0])).unwrap().next_state;
                energies.push(env.energy(&s));
            }
            let band = 0.05 * (2.0 * MASS * GRAVITY * 0.5 * LENGTH);
            assert!(energies.iter().all(|e| *e <= e0 + band), "th0 {th0}");
            let envelope = |xs: &[f64]| xs.iter().cloned().fold(f64::MIN, f64::max);
            let first = envelope(&energies[..50]);
            let last = envelope(&energies[50..]);
            assert!(last <= first + 0.01, "drift {first} -> {last}");
        }
    }
}
