use crate::env::{BoundsBox, EnvSpec, Environment, StartDistribution, StateVec};
use crate::rng::SimRng;
use rand::Rng;

pub const MIN_POSITION: f64 = -1.2;
pub const MAX_POSITION: f64 = 0.6;
pub const MAX_SPEED: f64 = 0.07;
pub const GOAL_POSITION: f64 = 0.45;
pub const POWER: f64 = 0.0015;
pub const HILL_GRAVITY: f64 = 0.0025;
pub const HORIZON: usize = 200;

/// Continuous-action hill car. State `[x, x_dot]`, action is engine force in
/// `[-1, 1]`. Goal `x >= 0.45`, terminal.
#[derive(Debug, Clone)]
pub struct MountainCar {
    spec: EnvSpec,
}

super::impl_with_start!(MountainCar);

impl MountainCar {
    pub fn new() -> Self {
        let spec = EnvSpec {
            name: "mountaincar".into(),
            state_dim: 2,
            action_dim: 1,
            state_bounds: BoundsBox::new(vec![MIN_POSITION, -MAX_SPEED], vec![MAX_POSITION, MAX_SPEED])
                .expect("static bounds"),
            action_bounds: BoundsBox::new(vec![-1.0], vec![1.0]).expect("static bounds"),
            horizon: HORIZON,
            angular_dims: vec![],
            initial: StartDistribution::Uniform {
                lower: vec![-0.6, 0.0],
                upper: vec![-0.4, 0.0],
            },
        };
        Self { spec }
    }
}

impl Default for MountainCar {
    fn default() -> Self {
        Self::new()
    }
}

pub fn mountaincar_goal(s: &[f64]) -> bool {
    s[0] >= GOAL_POSITION
}

impl Environment for MountainCar {
    fn spec(&self) -> &EnvSpec {
        &self.spec
    }

    fn constants(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("min_position", MIN_POSITION),
            ("max_position", MAX_POSITION),
            ("max_speed", MAX_SPEED),
            ("goal_position", GOAL_POSITION),
            ("power", POWER),
            ("hill_gravity", HILL_GRAVITY),
        ]
    }

    fn is_goal(&self, s: &[f64]) -> bool {
        mountaincar_goal(s)
    }

    fn goal_terminates(&self) -> bool {
        true
    }

    fn sample_goal(&self, rng: &mut SimRng) -> StateVec {
        let x = rng.random_range(GOAL_POSITION..=MAX_POSITION);
        let v = rng.random_range(-MAX_SPEED..=MAX_SPEED);
        StateVec(vec![x, v])
    }

    fn propagate(&self, s: &[f64], a: &[f64]) -> Vec<f64> {
        let (mut x, mut v) = (s[0], s[1]);
        v += a[0] * POWER - HILL_GRAVITY * (3.0 * x).cos();
        v = v.clamp(-MAX_SPEED, MAX_SPEED);
        x += v;
        x = x.clamp(MIN_POSITION, MAX_POSITION);
        if x == MIN_POSITION && v < 0.0 {
            v = 0.0;
        }
        vec![x, v]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{sample_initial, ActionVec};
    use crate::rng::rng_from_seed;

    #[test]
    fn goal_boundary() {
        assert!(mountaincar_goal(&[0.45, 0.0]));
        assert!(!mountaincar_goal(&[0.449, 0.0]));
        assert!(mountaincar_goal(&[0.6, 0.0]));
    }

    #[test]
    fn valley_step_matches_hand_evaluation() {
        // v = 0.0015 - 0.0025 cos(-1.5), x = -0.5 + v
        let env = MountainCar::new();
        let r = env.step(&StateVec(vec![-0.5, 0.0]), &ActionVec(vec![1.0])).unwrap();
        assert!((r.next_state[1] - 0.0013231569958307428).abs() < 1e-15);
        assert!((r.next_state[0] - -0.49867684300416926).abs() < 1e-15);
        assert_eq!(r.reward, -1.0);
        assert!(!r.in_goal && !r.terminal);
    }

    #[test]
    fn left_wall_stops_car() {
        let env = MountainCar::new();
        let r = env.step(&StateVec(vec![-1.19, -0.07]), &ActionVec(vec![-1.0])).unwrap();
        assert_eq!(r.next_state.0, vec![MIN_POSITION, 0.0]);
    }

    #[test]
    fn goal_transition_is_terminal() {
        let env = MountainCar::new();
        let r = env.step(&StateVec(vec![0.44, 0.05]), &ActionVec(vec![1.0])).unwrap();
        assert!(r.in_goal && r.terminal);
        assert_eq!(r.reward, -1.0);
    }

    #[test]
    fn reset_band() {
        let env = MountainCar::new();
        let mut rng = rng_from_seed(2);
        for _ in 0..1000 {
            let s = sample_initial(env.spec(), &mut rng);
            assert!((-0.6..=-0.4).contains(&s[0]));
            assert_eq!(s[1], 0.0);
        }
    }
}
