use std::f64::consts::PI;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of an environment's state space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StateVec(pub Vec<f64>);

/// A control input. Environments clamp it to their action box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ActionVec(pub Vec<f64>);

macro_rules! real_vec {
    ($t:ident) => {
        impl $t {
            pub fn new(values: Vec<f64>) -> Self {
                $t(values)
            }

            pub fn as_slice(&self) -> &[f64] {
                &self.0
            }

            pub fn into_inner(self) -> Vec<f64> {
                self.0
            }

            pub fn is_finite(&self) -> bool {
                self.0.iter().all(|v| v.is_finite())
            }

            /// Bitwise equality; `-0.0` and `0.0` differ.
            pub fn bit_eq(&self, other: &Self) -> bool {
                self.0.len() == other.0.len()
                    && self
                        .0
                        .iter()
                        .zip(&other.0)
                        .all(|(a, b)| a.to_bits() == b.to_bits())
            }
        }

        impl Deref for $t {
            type Target = [f64];
            fn deref(&self) -> &[f64] {
                &self.0
            }
        }

        impl From<Vec<f64>> for $t {
            fn from(v: Vec<f64>) -> Self {
                $t(v)
            }
        }
    };
}

real_vec!(StateVec);
real_vec!(ActionVec);

/// Axis-aligned box `lower[i] <= x[i] <= upper[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsBox {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl BoundsBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::Dimension {
                what: "bounds",
                expected: lower.len(),
                got: upper.len(),
            });
        }
        if lower.is_empty() {
            return Err(Error::Input("bounds must have at least one dimension".into()));
        }
        for (i, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo.is_finite() && hi.is_finite()) {
                return Err(Error::NonFinite("bounds"));
            }
            if lo >= hi {
                return Err(Error::Input(format!(
                    "bounds dimension {i}: lower {lo} must be below upper {hi}"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| *v >= *lo && *v <= *hi)
    }

    pub fn clamp(&self, x: &mut [f64]) {
        for (v, (lo, hi)) in x.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *v = v.clamp(*lo, *hi);
        }
    }

    pub fn midpoint(&self) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| 0.5 * (lo + hi))
            .collect()
    }
}

/// Result of one control interval.
#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub next_state: StateVec,
    pub reward: f64,
    pub in_goal: bool,
    pub terminal: bool,
}

/// How initial states are drawn.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum StartDistribution {
    /// Uniform on `[lower, upper]`; a dimension with `lower == upper` is fixed.
    Uniform { lower: Vec<f64>, upper: Vec<f64> },
    /// Always the same state.
    Fixed(StateVec),
}

/// Static description of an environment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvSpec {
    pub name: String,
    pub state_dim: usize,
    pub action_dim: usize,
    pub state_bounds: BoundsBox,
    pub action_bounds: BoundsBox,
    pub horizon: usize,
    /// State indices stored wrapped to (-pi, pi].
    pub angular_dims: Vec<usize>,
    pub initial: StartDistribution,
}

impl EnvSpec {
    pub fn validate(&self) -> Result<()> {
        if self.state_dim == 0 || self.action_dim == 0 || self.horizon == 0 {
            return Err(Error::Input(format!(
                "{}: dimensions and horizon must be positive",
                self.name
            )));
        }
        if self.state_bounds.dim() != self.state_dim {
            return Err(Error::Dimension {
                what: "state bounds",
                expected: self.state_dim,
                got: self.state_bounds.dim(),
            });
        }
        if self.action_bounds.dim() != self.action_dim {
            return Err(Error::Dimension {
                what: "action bounds",
                expected: self.action_dim,
                got: self.action_bounds.dim(),
            });
        }
        if let Some(&bad) = self.angular_dims.iter().find(|&&i| i >= self.state_dim) {
            return Err(Error::Input(format!("angular dim {bad} out of range")));
        }
        for &i in &self.angular_dims {
            if self.state_bounds.lower()[i] != -PI || self.state_bounds.upper()[i] != PI {
                return Err(Error::Input(format!(
                    "angular dim {i} must have bounds [-pi, pi]"
                )));
            }
        }
        Ok(())
    }

    pub fn is_angular(&self, dim: usize) -> bool {
        self.angular_dims.contains(&dim)
    }

    pub(crate) fn check_state(&self, s: &[f64]) -> Result<()> {
        if s.len() != self.state_dim {
            return Err(Error::Dimension {
                what: "state",
                expected: self.state_dim,
                got: s.len(),
            });
        }
        if !s.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("state"));
        }
        Ok(())
    }

    pub(crate) fn check_action(&self, a: &[f64]) -> Result<()> {
        if a.len() != self.action_dim {
            return Err(Error::Dimension {
                what: "action",
                expected: self.action_dim,
                got: a.len(),
            });
        }
        if !a.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("action"));
        }
        Ok(())
    }
}

/// Wrap an angle into (-pi, pi]. Values already inside are returned
/// untouched, so wrapping is idempotent bit for bit.
pub fn wrap_angle(x: f64) -> f64 {
    if x > -PI && x <= PI {
        return x;
    }
    let y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y <= -PI {
        PI
    } else {
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds_reject_inverted() {
        assert!(BoundsBox::new(vec![1.0], vec![0.0]).is_err());
        assert!(BoundsBox::new(vec![0.0], vec![0.0]).is_err());
        assert!(BoundsBox::new(vec![0.0, 1.0], vec![1.0]).is_err());
        assert!(BoundsBox::new(vec![0.0], vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn wrap_angle_range_and_idempotence() {
        for &x in &[0.0, 0.1, PI, -PI, 3.5, -3.5, 10.0 * PI, -7.0, 1e6] {
            let w = wrap_angle(x);
            assert!(w > -PI && w <= PI, "{x} -> {w}");
            assert_eq!(wrap_angle(w).to_bits(), w.to_bits());
            assert!(((x - w) / (2.0 * PI)).round() * 2.0 * PI - (x - w) < 1e-6);
        }
        assert_eq!(wrap_angle(-PI), PI);
        assert_eq!(wrap_angle(0.1).to_bits(), 0.1f64.to_bits());
    }
}
