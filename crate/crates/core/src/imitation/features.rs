use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SimRng;

/// Random Fourier features for the squared-exponential kernel
/// `exp(-|x - y|^2 / (2 l^2))`:
/// `phi(x) = sqrt(2/D) cos(W x + b)` with `W ~ N(0, l^-2 I)`, `b ~ U[0, 2pi)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RffFeatureMap {
    input_dim: usize,
    lengthscale: f64,
    /// Row-major `D x input_dim`.
    frequencies: Vec<f64>,
    phases: Vec<f64>,
}

impl RffFeatureMap {
    pub fn sample(input_dim: usize, num_features: usize, lengthscale: f64, rng: &mut SimRng) -> Result<Self> {
        if num_features == 0 || input_dim == 0 {
            return Err(Error::Input("feature map needs positive input and feature dimensions".into()));
        }
        if !(lengthscale.is_finite() && lengthscale > 0.0) {
            return Err(Error::Input(format!("lengthscale must be positive, got {lengthscale}")));
        }
        let normal = Normal::new(0.0, 1.0 / lengthscale).map_err(|e| Error::Input(e.to_string()))?;
        let frequencies = (0..num_features * input_dim).map(|_| normal.sample(rng)).collect();
        let phases = (0..num_features)
            .map(|_| rng.random_range(0.0..std::f64::consts::TAU))
            .collect();
        Ok(Self { input_dim, lengthscale, frequencies, phases })
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn num_features(&self) -> usize {
        self.phases.len()
    }

    pub fn lengthscale(&self) -> f64 {
        self.lengthscale
    }

    pub fn features_into(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.input_dim);
        let scale = (2.0 / self.num_features() as f64).sqrt();
        for (j, o) in out.iter_mut().enumerate() {
            let row = &self.frequencies[j * self.input_dim..(j + 1) * self.input_dim];
            let z: f64 = row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.phases[j];
            *o = scale * z.cos();
        }
    }

    pub fn features(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.num_features()];
        self.features_into(x, &mut out);
        out
    }

    /// The kernel the features approximate.
    pub fn kernel(&self, x: &[f64], y: &[f64]) -> f64 {
        let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
        (-d2 / (2.0 * self.lengthscale * self.lengthscale)).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    #[test]
    fn bounded_and_deterministic() {
        let a = RffFeatureMap::sample(3, 300, 0.3, &mut rng_from_seed(4)).unwrap();
        let b = RffFeatureMap::sample(3, 300, 0.3, &mut rng_from_seed(4)).unwrap();
        assert_eq!(a, b);
        let bound = (2.0f64 / 300.0).sqrt();
        let mut rng = rng_from_seed(9);
        for _ in 0..200 {
            let x: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
            let phi = a.features(&x);
            assert_eq!(phi.len(), 300);
            assert!(phi.iter().all(|v| v.abs() <= bound));
        }
    }

    #[test]
    fn rejects_bad_hyperparameters() {
        let mut rng = rng_from_seed(0);
        assert!(RffFeatureMap::sample(2, 0, 0.3, &mut rng).is_err());
        assert!(RffFeatureMap::sample(2, 10, 0.0, &mut rng).is_err());
        assert!(RffFeatureMap::sample(2, 10, f64::NAN, &mut rng).is_err());
    }

    fn kernel_error(d: usize) -> f64 {
        let map = RffFeatureMap::sample(2, d, 0.3, &mut rng_from_seed(11)).unwrap();
        let mut rng = rng_from_seed(12);
        let mut total = 0.0;
        for _ in 0..100 {
            let x = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
            let y = [x[0] + rng.random_range(-0.5..0.5), x[1] + rng.random_range(-0.5..0.5)];
            let approx: f64 = map.features(&x).iter().zip(map.features(&y)).map(|(a, b)| a * b).sum();
            total += (approx - map.kernel(&x, &y)).abs();
        }
        total / 100.0
    }

    #[test]
    fn kernel_error_shrinks_with_more_features() {
        let e: Vec<f64> = [100, 300, 1000].iter().map(|&d| kernel_error(d)).collect();
        assert!(e[0] > e[1] && e[1] > e[2], "{e:?}");
    }
}
