//! Bounds normalization and the distance used for nearest-node selection.

use serde::{Deserialize, Serialize};

use super::types::{wrap_angle, EnvSpec, StateVec};
use crate::error::{Error, Result};

/// Affine map from the state box to `[-1, 1]^d`, with angles wrapped first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalizer {
    lower: Vec<f64>,
    upper: Vec<f64>,
    angular: Vec<bool>,
}

impl Normalizer {
    pub fn new(spec: &EnvSpec) -> Self {
        Self {
            lower: spec.state_bounds.lower().to_vec(),
            upper: spec.state_bounds.upper().to_vec(),
            angular: (0..spec.state_dim).map(|i| spec.is_angular(i)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn angular(&self) -> &[bool] {
        &self.angular
    }

    pub fn normalize_into(&self, s: &[f64], out: &mut Vec<f64>) {
        for (i, &v) in s.iter().enumerate() {
            let v = if self.angular[i] { wrap_angle(v) } else { v };
            let (lo, hi) = (self.lower[i], self.upper[i]);
            out.push(2.0 * (v - lo) / (hi - lo) - 1.0);
        }
    }

    pub fn normalize(&self, s: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(s.len());
        self.normalize_into(s, &mut out);
        out
    }

    pub fn denormalize(&self, y: &[f64]) -> Vec<f64> {
        y.iter()
            .enumerate()
            .map(|(i, &v)| {
                let (lo, hi) = (self.lower[i], self.upper[i]);
                lo + (v + 1.0) * 0.5 * (hi - lo)
            })
            .collect()
    }
}

pub fn normalize(spec: &EnvSpec, s: &StateVec) -> StateVec {
    StateVec(Normalizer::new(spec).normalize(s))
}

pub fn denormalize(spec: &EnvSpec, y: &StateVec) -> StateVec {
    StateVec(Normalizer::new(spec).denormalize(y))
}

/// Circular distance between two normalized angle coordinates (period 2).
#[inline]
pub(crate) fn periodic_abs_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    if d > 1.0 {
        2.0 - d
    } else {
        d
    }
}

/// Weighted Euclidean metric over normalized coordinates, optionally extended
/// by one return coordinate (`R / horizon`, scaled by `return_weight`).
///
/// Points handed to [`Metric::dist`] are *embedded* points produced by
/// [`Metric::embed`]; angular coordinates use the wrapped difference.
#[derive(Debug, Clone, PartialEq)]
pub struct Metric {
    normalizer: Normalizer,
    periodic: Vec<bool>,
    weights: Vec<f64>,
    return_scale: Option<f64>,
}

impl Metric {
    /// `weights` multiplies each normalized state difference; `return_weight`
    /// of zero disables the return coordinate.
    pub fn new(spec: &EnvSpec, weights: Option<&[f64]>, return_weight: f64) -> Result<Self> {
        let normalizer = Normalizer::new(spec);
        let mut w = match weights {
            Some(w) if w.len() != spec.state_dim => {
                return Err(Error::Dimension {
                    what: "metric weights",
                    expected: spec.state_dim,
                    got: w.len(),
                })
            }
            Some(w) => w.to_vec(),
            None => vec![1.0; spec.state_dim],
        };
        if w.iter().chain([&return_weight]).any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Input("metric weights must be finite and nonnegative".into()));
        }
        let mut periodic = normalizer.angular().to_vec();
        let return_scale = if return_weight > 0.0 {
            w.push(return_weight);
            periodic.push(false);
            Some(1.0 / spec.horizon as f64)
        } else {
            None
        };
        Ok(Self {
            normalizer,
            periodic,
            weights: w,
            return_scale,
        })
    }

    pub fn augmented(&self) -> bool {
        self.return_scale.is_some()
    }

    /// Dimension of embedded points.
    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn periodic(&self) -> &[bool] {
        &self.periodic
    }

    pub fn embed_into(&self, s: &[f64], ret: f64, out: &mut Vec<f64>) {
        self.normalizer.normalize_into(s, out);
        if let Some(scale) = self.return_scale {
            out.push(ret * scale);
        }
    }

    pub fn embed(&self, s: &[f64], ret: f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dim());
        self.embed_into(s, ret, &mut out);
        out
    }

    pub fn dist_sq(&self, a: &[f64], b: &[f64]) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.weights.len() {
            let d = if self.periodic[i] {
                periodic_abs_diff(a[i], b[i])
            } else {
                a[i] - b[i]
            };
            let wd = self.weights[i] * d;
            acc += wd * wd;
        }
        acc
    }

    pub fn dist(&self, a: &[f64], b: &[f64]) -> f64 {
        self.dist_sq(a, b).sqrt()
    }

    /// Lower bound of `dist` from `q` to any point inside the box `[lo, hi]`.
    pub fn box_lower_bound(&self, q: &[f64], lo: &[f64], hi: &[f64]) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.weights.len() {
            let gap = if q[i] >= lo[i] && q[i] <= hi[i] {
                0.0
            } else if self.periodic[i] {
                periodic_abs_diff(q[i], lo[i]).min(periodic_abs_diff(q[i], hi[i]))
            } else if q[i] < lo[i] {
                lo[i] - q[i]
            } else {
                q[i] - hi[i]
            };
            let wd = self.weights[i] * gap;
            acc += wd * wd;
        }
        acc.sqrt()
    }
}

/// Distance between two raw states: weighted Euclidean on normalized
/// coordinates with wrapped angular differences.
pub fn goal_distance_metric(spec: &EnvSpec, s1: &[f64], s2: &[f64], weights: &[f64]) -> Result<f64> {
    spec.check_state(s1)?;
    spec.check_state(s2)?;
    let metric = Metric::new(spec, Some(weights), 0.0)?;
    Ok(metric.dist(&metric.embed(s1, 0.0), &metric.embed(s2, 0.0)))
}
