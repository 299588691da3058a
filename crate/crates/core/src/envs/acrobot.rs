use std::f64::consts::PI;

use rand::Rng;

use crate::env::{wrap_angle, BoundsBox, EnvSpec, Environment, StartDistribution, StateVec};
use crate::rng::SimRng;

pub const LINK_LENGTH_1: f64 = 1.0;
pub const LINK_MASS_1: f64 = 1.0;
pub const LINK_MASS_2: f64 = 1.0;
pub const LINK_COM_1: f64 = 0.5;
pub const LINK_COM_2: f64 = 0.5;
pub const LINK_MOI: f64 = 1.0;
pub const GRAVITY: f64 = 9.8;
pub const DT: f64 = 0.2;
pub const MAX_VEL_1: f64 = 4.0 * PI;
pub const MAX_VEL_2: f64 = 9.0 * PI;
pub const MAX_TORQUE: f64 = 1.0;
pub const GOAL_HEIGHT: f64 = 1.9;
pub const HORIZON: usize = 500;

/// Two-link underactuated arm with continuous torque on the second joint.
/// State `[theta0, theta1, theta0_dot, theta1_dot]`, `(0, 0)` hanging.
/// Goal: tip height `-cos(theta0) - cos(theta0 + theta1) > 1.9`, terminal.
#[derive(Debug, Clone)]
pub struct Acrobot {
    spec: EnvSpec,
}

super::impl_with_start!(Acrobot);

impl Acrobot {
    pub fn new() -> Self {
        let spec = EnvSpec {
            name: "acrobot".into(),
            state_dim: 4,
            action_dim: 1,
            state_bounds: BoundsBox::new(vec![-PI, -PI, -MAX_VEL_1, -MAX_VEL_2], vec![PI, PI, MAX_VEL_1, MAX_VEL_2])
                .expect("static bounds"),
            action_bounds: BoundsBox::new(vec![-MAX_TORQUE], vec![MAX_TORQUE]).expect("static bounds"),
            horizon: HORIZON,
            angular_dims: vec![0, 1],
            initial: StartDistribution::Uniform {
                lower: vec![-0.1; 4],
                upper: vec![0.1; 4],
            },
        };
        Self { spec }
    }

    fn derivatives(s: [f64; 4], torque: f64) -> [f64; 4] {
        let (m1, m2, l1, lc1, lc2, i1, i2, g) =
            (LINK_MASS_1, LINK_MASS_2, LINK_LENGTH_1, LINK_COM_1, LINK_COM_2, LINK_MOI, LINK_MOI, GRAVITY);
        let [th1, th2, dth1, dth2] = s;
        let d1 = m1 * lc1 * lc1 + m2 * (l1 * l1 + lc2 * lc2 + 2.0 * l1 * lc2 * th2.cos()) + i1 + i2;
        let d2 = m2 * (lc2 * lc2 + l1 * lc2 * th2.cos()) + i2;
        let phi2 = m2 * lc2 * g * (th1 + th2 - PI / 2.0).cos();
        let phi1 = -m2 * l1 * lc2 * dth2 * dth2 * th2.sin() - 2.0 * m2 * l1 * lc2 * dth2 * dth1 * th2.sin()
            + (m1 * lc1 + m2 * l1) * g * (th1 - PI / 2.0).cos()
            + phi2;
        let ddth2 = (torque + d2 / d1 * phi1 - m2 * l1 * lc2 * dth1 * dth1 * th2.sin() - phi2)
            / (m2 * lc2 * lc2 + i2 - d2 * d2 / d1);
        let ddth1 = -(d2 * ddth2 + phi1) / d1;
        [dth1, dth2, ddth1, ddth2]
    }
}

impl Default for Acrobot {
    fn default() -> Self {
        Self::new()
    }
}

pub fn tip_height(s: &[f64]) -> f64 {
    -s[0].cos() - (s[0] + s[1]).cos()
}

pub fn acrobot_goal(s: &[f64]) -> bool {
    tip_height(s) > GOAL_HEIGHT
}

impl Environment for Acrobot {
    fn spec(&self) -> &EnvSpec {
        &self.spec
    }

    fn constants(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("link_length_1", LINK_LENGTH_1),
            ("link_mass_1", LINK_MASS_1),
            ("link_mass_2", LINK_MASS_2),
            ("link_com_1", LINK_COM_1),
            ("link_com_2", LINK_COM_2),
            ("link_moi", LINK_MOI),
            ("gravity", GRAVITY),
            ("dt", DT),
            ("max_vel_1", MAX_VEL_1),
            ("max_vel_2", MAX_VEL_2),
            ("max_torque", MAX_TORQUE),
            ("goal_height", GOAL_HEIGHT),
        ]
    }

    fn is_goal(&self, s: &[f64]) -> bool {
        acrobot_goal(s)
    }

    fn goal_terminates(&self) -> bool {
        true
    }

    fn sample_goal(&self, rng: &mut SimRng) -> StateVec {
        // each cosine term must exceed 0.9 for the sum to exceed 1.9
        let r0 = (-0.9f64).acos();
        let h0 = PI - r0;
        loop {
            let th0 = wrap_angle(PI + rng.random_range(-h0..h0));
            let th1 = rng.random_range(-2.0 * h0..2.0 * h0);
            let w0 = rng.random_range(-MAX_VEL_1..=MAX_VEL_1);
            let w1 = rng.random_range(-MAX_VEL_2..=MAX_VEL_2);
            let s = [th0, th1, w0, w1];
            if acrobot_goal(&s) {
                return StateVec(s.to_vec());
            }
        }
    }

    /// One RK4 step of length `DT`.
    fn propagate(&self, s: &[f64], a: &[f64]) -> Vec<f64> {
        let x = [s[0], s[1], s[2], s[3]];
        let u = a[0];
        let add = |x: [f64; 4], k: [f64; 4], h: f64| std::array::from_fn::<f64, 4, _>(|i| x[i] + h * k[i]);
        let k1 = Self::derivatives(x, u);
        let k2 = Self::derivatives(add(x, k1, DT / 2.0), u);
        let k3 = Self::derivatives(add(x, k2, DT / 2.0), u);
        let k4 = Self::derivatives(add(x, k3, DT), u);
        let mut next: Vec<f64> = (0..4)
            .map(|i| x[i] + DT / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
            .collect();
        next[2] = next[2].clamp(-MAX_VEL_1, MAX_VEL_1);
        next[3] = next[3].clamp(-MAX_VEL_2, MAX_VEL_2);
        next
    }
}
