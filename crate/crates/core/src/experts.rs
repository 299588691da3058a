//! Hand-derived controllers used as demonstration baselines.

use crate::env::{ActionVec, StateVec};
use crate::envs::{pendulum, Pendulum};
use crate::error::{Error, Result};
use crate::policy::Policy;

/// `sgn(0) = +1` everywhere in this module.
fn sgn(v: f64) -> f64 {
    if v < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Full throttle in the direction of motion: `a = sgn(x_dot)`.
#[derive(Debug, Clone, Default)]
pub struct MountainCarExpert;

impl MountainCarExpert {
    pub const MAX_ACTION: f64 = 1.0;
}

impl Policy for MountainCarExpert {
    fn act(&self, s: &StateVec) -> ActionVec {
        ActionVec(vec![sgn(s[1]) * Self::MAX_ACTION])
    }
}

pub fn mountaincar_expert(s: &StateVec) -> ActionVec {
    MountainCarExpert.act(s)
}

/// Energy shaping `a = sgn(theta_dot) e_goal - e_total`, clamped to the torque
/// limit. Energies use the rod model of [`Pendulum::energy`], whose potential
/// is zero at the pivot height, so `e_goal` (upright rest) is `m g l / 2` and
/// hanging rest sits at `-e_goal`.
#[derive(Debug, Clone, Default)]
pub struct PendulumExpert {
    env: Pendulum,
}

impl PendulumExpert {
    pub fn new() -> Self {
        Self { env: Pendulum::new() }
    }

    pub fn e_goal(&self) -> f64 {
        self.env.energy(&[0.0, 0.0])
    }

    pub fn e_total(&self, s: &StateVec) -> f64 {
        self.env.energy(s)
    }
}

impl Policy for PendulumExpert {
    fn act(&self, s: &StateVec) -> ActionVec {
        let a = sgn(s[1]) * self.e_goal() - self.e_total(s);
        ActionVec(vec![a.clamp(-pendulum::MAX_TORQUE, pendulum::MAX_TORQUE)])
    }
}

pub fn pendulum_expert(s: &StateVec) -> ActionVec {
    PendulumExpert::new().act(s)
}

pub fn acrobot_expert(_s: &StateVec) -> Result<ActionVec> {
    Err(acrobot_unavailable())
}

fn acrobot_unavailable() -> Error {
    Error::NotImplemented(
        "no acrobot expert: the swing-up controller of Spong (1994), \"Swing up control of the acrobot\", \
         is not provided"
            .into(),
    )
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpertInfo {
    pub env: &'static str,
    pub available: bool,
    pub description: &'static str,
}

pub fn registry() -> Vec<ExpertInfo> {
    vec![
        ExpertInfo { env: "mountaincar", available: true, description: "a = sgn(x_dot)" },
        ExpertInfo { env: "pendulum", available: true, description: "a = sgn(theta_dot) e_goal - e_total" },
        ExpertInfo { env: "acrobot", available: false, description: "swing-up controller not provided" },
        ExpertInfo { env: "cartpole_swingup", available: false, description: "no expert defined" },
    ]
}

/// The expert registered for `env`.
pub fn expert_for(env: &str) -> Result<Box<dyn Policy + Send>> {
    match env {
        "mountaincar" => Ok(Box::new(MountainCarExpert)),
        "pendulum" => Ok(Box::new(PendulumExpert::new())),
        "acrobot" => Err(acrobot_unavailable()),
        "cartpole_swingup" => Err(Error::NotImplemented("no expert is defined for cartpole_swingup".into())),
        other => Err(Error::UnknownEnv(other.into())),
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::envs::MountainCar;
    use crate::imitation::evaluate_policy;
    use std::f64::consts::PI;

    #[test]
    fn mountaincar_signs() {
        assert_eq!(mountaincar_expert(&StateVec(vec![-0.5, 0.01]))[0], 1.0);
        assert_eq!(mountaincar_expert(&StateVec(vec![-0.5, -0.01]))[0], -1.0);
        assert_eq!(mountaincar_expert(&StateVec(vec![-0.5, 0.0]))[0], 1.0);
    }

    #[test]
    fn pendulum_fixed_points() {
        let e = PendulumExpert::new();
        assert_eq!(e.e_goal(), 5.0);
        assert_eq!(pendulum_expert(&StateVec(vec![0.0, 0.0]))[0], 0.0);
        // hanging rest: e_total = -5, raw action 10, clamped to the limit
        let hang = StateVec(vec![PI, 0.0]);
        assert!((e.e_total(&hang) + 5.0).abs() < 1e-12);
        assert_eq!(pendulum_expert(&hang)[0], 2.0);
    }

    #[test]
    fn outputs_within_bounds() {
        let e = PendulumExpert::new();
        for i in 0..100 {
            let s = StateVec(vec![-PI + i as f64 * 0.0628, -8.0 + i as f64 * 0.16]);
            assert!(e.act(&s)[0].abs() <= 2.0);
        }
    }

    #[test]
    fn mountaincar_expert_always_solves() {
        let r = evaluate_policy(&MountainCarExpert, &MountainCar::new(), 100, 0).unwrap();
        assert_eq!(r.success_rate, 1.0);
    }

    #[test]
    fn pendulum_expert_reaches_upright() {
        let r = evaluate_policy(&PendulumExpert::new(), &Pendulum::new(), 20, 0).unwrap();
        assert!(r.success_rate >= 0.9, "{}", r.success_rate);
    }

    #[test]
    fn registry_and_stub() {
        assert!(matches!(acrobot_expert(&StateVec(vec![0.0; 4])), Err(Error::NotImplemented(_))));
        assert!(matches!(expert_for("acrobot"), Err(Error::NotImplemented(_))));
        assert!(!registry().iter().find(|e| e.env == "acrobot").unwrap().available);
        assert!(expert_for("mountaincar").is_ok());
    }
}
