use std::f64::consts::PI;

use rand::Rng;

use crate::env::{BoundsBox, EnvSpec, Environment, StartDistribution, StateVec};
use crate::rng::SimRng;

pub const GRAVITY: f64 = 9.8;
pub const MASS_CART: f64 = 1.0;
pub const MASS_POLE: f64 = 0.1;
/// Half the pole length.
pub const POLE_HALF_LENGTH: f64 = 0.5;
pub const FORCE_MAG: f64 = 10.0;
pub const TAU: f64 = 0.02;
pub const RAIL: f64 = 2.4;
pub const MAX_CART_SPEED: f64 = 10.0;
pub const MAX_POLE_SPEED: f64 = 15.0;
pub const GOAL_COS: f64 = 0.9;
pub const HORIZON: usize = 500;

/// Cart-pole swing-up. State `[x, theta, x_dot, theta_dot]` with `theta = 0`
/// upright; action in `[-1, 1]` scaled by the force magnitude. The rail ends
/// arrest the cart instead of failing the episode. Goal `cos(theta) > 0.9`,
/// non-terminal, rewarded with `cos(theta)`.
#[derive(Debug, Clone)]
pub struct CartpoleSwingup {
    spec: EnvSpec,
}

super::impl_with_start!(CartpoleSwingup);

impl CartpoleSwingup {
    pub fn new() -> Self {
        let spec = EnvSpec {
            name: "cartpole_swingup".into(),
            state_dim: 4,
            action_dim: 1,
            state_bounds: BoundsBox::new(
                vec![-RAIL, -PI, -MAX_CART_SPEED, -MAX_POLE_SPEED],
                vec![RAIL, PI, MAX_CART_SPEED, MAX_POLE_SPEED],
            )
            .expect("static bounds"),
            action_bounds: BoundsBox::new(vec![-1.0], vec![1.0]).expect("static bounds"),
            horizon: HORIZON,
            angular_dims: vec![1],
            initial: StartDistribution::Uniform {
                lower: vec![-0.05, PI - 0.05, -0.05, -0.05],
                upper: vec![0.05, PI + 0.05, 0.05, 0.05],
            },
        };
        Self { spec }
    }
}

impl Default for CartpoleSwingup {
    fn default() -> Self {
        Self::new()
    }
}

pub fn cartpole_swingup_goal(s: &[f64]) -> bool {
    s[1].cos() > GOAL_COS
}

impl Environment for CartpoleSwingup {
    fn spec(&self) -> &EnvSpec {
        &self.spec
    }

    fn constants(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("gravity", GRAVITY),
            ("mass_cart", MASS_CART),
            ("mass_pole", MASS_POLE),
            ("pole_half_length", POLE_HALF_LENGTH),
            ("force_mag", FORCE_MAG),
            ("tau", TAU),
            ("rail", RAIL),
            ("max_cart_speed", MAX_CART_SPEED),
            ("max_pole_speed", MAX_POLE_SPEED),
            ("goal_cos", GOAL_COS),
        ]
    }

    fn is_goal(&self, s: &[f64]) -> bool {
        cartpole_swingup_goal(s)
    }

    fn goal_terminates(&self) -> bool {
        false
    }

    fn sample_goal(&self, rng: &mut SimRng) -> StateVec {
        let half = GOAL_COS.acos();
        loop {
            let s = [
                rng.random_range(-RAIL..=RAIL),
                rng.random_range(-half..half),
                rng.random_range(-MAX_CART_SPEED..=MAX_CART_SPEED),
                rng.random_range(-MAX_POLE_SPEED..=MAX_POLE_SPEED),
            ];
            if cartpole_swingup_goal(&s) {
                return StateVec(s.to_vec());
            }
        }
    }

    /// Explicit Euler with the classic cart-pole accelerations.
    fn propagate(&self, s: &[f64], a: &[f64]) -> Vec<f64> {
        let [x, th, xd, thd] = [s[0], s[1], s[2], s[3]];
        let force = FORCE_MAG * a[0];
        let total_mass = MASS_CART + MASS_POLE;
        let pole_ml = MASS_POLE * POLE_HALF_LENGTH;
        let (sin, cos) = th.sin_cos();
        let temp = (force + pole_ml * thd * thd * sin) / total_mass;
        let th_acc = (GRAVITY * sin - cos * temp)
            / (POLE_HALF_LENGTH * (4.0 / 3.0 - MASS_POLE * cos * cos / total_mass));
        let x_acc = temp - pole_ml * th_acc * cos / total_mass;

        let mut nx = x + TAU * xd;
        let mut nxd = xd + TAU * x_acc;
        if nx >= RAIL {
            nx = RAIL;
            nxd = nxd.min(0.0);
        } else if nx <= -RAIL {
            nx = -RAIL;
            nxd = nxd.max(0.0);
        }
        vec![nx, th + TAU * thd, nxd, thd + TAU * th_acc]
    }

    fn reward(&self, next: &[f64]) -> f64 {
        if cartpole_swingup_goal(next) {
            next[1].cos()
        } else {
            -1.0
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::ActionVec;

    #[test]
    fn upright_goal_reward() {
        let env = CartpoleSwingup::new();
        assert!(cartpole_swingup_goal(&[1.0, 0.0, 0.0, 0.0]));
        assert_eq!(env.reward(&[1.0, 0.0, 0.0, 0.0]), 1.0);
        assert!(!cartpole_swingup_goal(&[0.0, 0.5, 0.0, 0.0]));
        assert_eq!(env.reward(&[0.0, 0.5, 0.0, 0.0]), -1.0);
    }

    #[test]
    fn rail_arrests_outward_motion() {
        let env = CartpoleSwingup::new();
        let r = env.step(&StateVec(vec![RAIL, PI, 2.0, 0.0]), &ActionVec(vec![1.0])).unwrap();
        assert_eq!(r.next_state[0], RAIL);
        assert_eq!(r.next_state[2], 0.0);
        let r = env.step(&StateVec(vec![-RAIL, PI, -2.0, 0.0]), &ActionVec(vec![-1.0])).unwrap();
        assert_eq!(r.next_state[0], -RAIL);
        assert_eq!(r.next_state[2], 0.0);
    }

    #[test]
    fn cart_leaves_rail_end_when_pushed_inward() {
        let env = CartpoleSwingup::new();
        let mut s = StateVec(vec![RAIL, PI, 0.0, 0.0]);
        for _ in 0..5 {
            s = env.step(&s, &ActionVec(vec![-1.0])).unwrap().next_state;
        }
        assert!(s[0] < RAIL);
    }

    #[test]
    fn non_terminal_goal() {
        let env = CartpoleSwingup::new();
        let r = env.step(&StateVec(vec![0.0, 0.0, 0.0, 0.0]), &ActionVec(vec![0.0])).unwrap();
        assert!(r.in_goal && !r.terminal);
    }
}
