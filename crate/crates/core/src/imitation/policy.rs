use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::blr::{BlrFit, BlrPosterior};
use super::features::RffFeatureMap;
use crate::env::{ActionVec, BoundsBox, Environment, Normalizer, StateVec};
use crate::envs::make_env;
use crate::error::{Error, Result};
use crate::policy::Policy;
use crate::rng::SimRng;
use crate::store::{check_container, DemoSet};

pub const POLICY_FORMAT: &str = "p2d2-policy";
pub const POLICY_VERSION: u32 = 1;

/// Learner hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RffConfig {
    pub num_features: usize,
    pub lengthscale: f64,
    /// Prior precision.
    pub alpha: f64,
    /// Noise precision.
    pub beta: f64,
}

impl Default for RffConfig {
    fn default() -> Self {
        Self { num_features: 300, lengthscale: 0.3, alpha: 0.1, beta: 1.0 }
    }
}

/// Posterior-mean policy over random Fourier features of the normalized state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RffPolicy {
    pub env_name: String,
    pub env_constants_hash: String,
    pub config: RffConfig,
    pub trained_pairs: usize,
    normalizer: Normalizer,
    action_bounds: BoundsBox,
    feature_map: RffFeatureMap,
    posteriors: Vec<BlrPosterior>,
}

/// Fit on every state-action pair of `demos`.
pub fn fit(demos: &DemoSet, config: &RffConfig, rng: &mut SimRng) -> Result<RffPolicy> {
    let env = make_env(&demos.env_name)?;
    if env.constants_hash() != demos.env_constants_hash {
        return Err(Error::Input("demonstrations were recorded with different environment constants".into()));
    }
    fit_pairs(env.as_ref(), demos.trajectories.iter().flat_map(|t| t.pairs()), config, rng)
}

/// Fit on arbitrary pairs. Pairs are sorted by bit pattern before the design
/// matrix is built, so the result does not depend on their order.
pub fn fit_pairs<'a>(
    env: &dyn Environment,
    pairs: impl IntoIterator<Item = (&'a StateVec, &'a ActionVec)>,
    config: &RffConfig,
    rng: &mut SimRng,
) -> Result<RffPolicy> {
    let spec = env.spec();
    let mut pairs: Vec<(&StateVec, &ActionVec)> = pairs.into_iter().collect();
    if pairs.is_empty() {
        return Err(Error::Fit("no state-action pairs to fit".into()));
    }
    for (s, a) in &pairs {
        if s.len() != spec.state_dim {
            return Err(Error::Dimension { what: "state", expected: spec.state_dim, got: s.len() });
        }
        if a.len() != spec.action_dim {
            return Err(Error::Dimension { what: "action", expected: spec.action_dim, got: a.len() });
        }
    }
    let key = |s: &StateVec, a: &ActionVec| -> Vec<u64> { s.iter().chain(a.iter()).map(|v| v.to_bits()).collect() };
    pairs.sort_by_cached_key(|(s, a)| key(s, a));

    let normalizer = Normalizer::new(spec);
    let feature_map = RffFeatureMap::sample(spec.state_dim, config.num_features, config.lengthscale, rng)?;
    let n = pairs.len();
    let d = feature_map.num_features();
    let mut design = DMatrix::zeros(n, d);
    let mut row = vec![0.0; d];
    let mut x = Vec::with_capacity(spec.state_dim);
    for (i, (s, _)) in pairs.iter().enumerate() {
        x.clear();
        normalizer.normalize_into(s, &mut x);
        feature_map.features_into(&x, &mut row);
        for (j, v) in row.iter().enumerate() {
            design[(i, j)] = *v;
        }
    }
    let targets = DMatrix::from_fn(n, spec.action_dim, |i, j| pairs[i].1[j]);
    let blr = BlrFit::solve(&design, &targets, config.alpha, config.beta)?;
    Ok(RffPolicy {
        env_name: spec.name.clone(),
        env_constants_hash: env.constants_hash(),
        config: config.clone(),
        trained_pairs: n,
        normalizer,
        action_bounds: spec.action_bounds.clone(),
        feature_map,
        posteriors: blr.posteriors,
    })
}

impl RffPolicy {
    /// Posterior-mean action before clamping.
    pub fn predict_raw(&self, s: &StateVec) -> Vec<f64> {
        let x = self.normalizer.normalize(s);
        let phi = self.feature_map.features(&x);
        self.posteriors
            .iter()
            .map(|p| p.mean.iter().zip(&phi).map(|(w, f)| w * f).sum())
            .collect()
    }

    pub fn predict(&self, s: &StateVec) -> ActionVec {
        let mut a = self.predict_raw(s);
        self.action_bounds.clamp(&mut a);
        ActionVec(a)
    }

    pub fn feature_map(&self) -> &RffFeatureMap {
        &self.feature_map
    }

    pub fn posteriors(&self) -> &[BlrPosterior] {
        &self.posteriors
    }
}

impl Policy for RffPolicy {
    fn act(&self, s: &StateVec) -> ActionVec {
        self.predict(s)
    }
}

#[derive(Serialize)]
struct PolicyHeader<'a> {
    format: &'a str,
    version: u32,
    env: &'a str,
    env_constants_hash: &'a str,
    trained_pairs: usize,
}

/// Two JSON lines: container header, then the policy.
pub fn write_policy<W: Write>(policy: &RffPolicy, mut w: W) -> Result<()> {
    let header = PolicyHeader {
        format: POLICY_FORMAT,
        version: POLICY_VERSION,
        env: &policy.env_name,
        env_constants_hash: &policy.env_constants_hash,
        trained_pairs: policy.trained_pairs,
    };
    serde_json::to_writer(&mut w, &header)?;
    w.write_all(b"\n")?;
    serde_json::to_writer(&mut w, policy)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub fn read_policy<R: BufRead>(r: R) -> Result<RffPolicy> {
    let mut lines = r.lines();
    let first = lines.next().ok_or_else(|| Error::load("header", "empty file"))??;
    check_container(&first, POLICY_FORMAT, POLICY_VERSION, None)?;
    let body = lines.next().ok_or_else(|| Error::load("policy", "missing body line"))??;
    let policy: RffPolicy = serde_json::from_str(&body).map_err(|e| Error::load("policy", e.to_string()))?;
    let env = make_env(&policy.env_name).map_err(|e| Error::load("policy.env_name", e.to_string()))?;
    if policy.env_constants_hash != env.constants_hash() {
        return Err(Error::load("policy.env_constants_hash", "does not match current constants"));
    }
    if policy.feature_map.input_dim() != env.spec().state_dim
        || policy.posteriors.len() != env.spec().action_dim
        || policy.posteriors.iter().any(|p| p.mean.len() != policy.feature_map.num_features())
    {
        return Err(Error::load("policy", "dimensions inconsistent with the environment"));
    }
    Ok(policy)
}

pub fn save_policy(policy: &RffPolicy, path: impl AsRef<Path>) -> Result<()> {
    write_policy(policy, BufWriter::new(File::create(path)?))
}

pub fn load_policy(path: impl AsRef<Path>) -> Result<RffPolicy> {
    read_policy(BufReader::new(File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::sample_state;
    use crate::envs::{MountainCar, Pendulum};
    use crate::rng::rng_from_seed;
    use rand::Rng;

    fn synthetic(env: &dyn Environment, n: usize, seed: u64) -> Vec<(StateVec, ActionVec)> {
        let mut rng = rng_from_seed(seed);
        (0..n)
            .map(|_| {
                let s = sample_state(env.spec(), &mut rng);
                let a = ActionVec(vec![rng.random_range(-0.9..0.9)]);
                (s, a)
            })
            .collect()
    }

    fn fit_on(env: &dyn Environment, data: &[(StateVec, ActionVec)], cfg: &RffConfig) -> RffPolicy {
        fit_pairs(env, data.iter().map(|(s, a)| (s, a)), cfg, &mut rng_from_seed(5)).unwrap()
    }

    fn mean_abs_err(p: &RffPolicy, data: &[(StateVec, ActionVec)]) -> f64 {
        data.iter().map(|(s, a)| (p.predict_raw(s)[0] - a[0]).abs()).sum::<f64>() / data.len() as f64
    }

    #[test]
    fn zero_pairs_is_an_error() {
        let env = MountainCar::new();
        let r = fit_pairs(&env, std::iter::empty(), &RffConfig::default(), &mut rng_from_seed(0));
        assert!(matches!(r, Err(Error::Fit(_))));
    }

    #[test]
    fn order_invariant_bit_for_bit() {
        let env = Pendulum::new();
        let data = synthetic(&env, 40, 1);
        let mut rev = data.clone();
        rev.reverse();
        let cfg = RffConfig::default();
        assert_eq!(fit_on(&env, &data, &cfg), fit_on(&env, &rev, &cfg));
    }

    #[test]
    fn interpolates_when_overfit() {
        let env = Pendulum::new();
        let data = synthetic(&env, 20, 2);
        let cfg = RffConfig { alpha: 1e-6, beta: 1e4, ..Default::default() };
        let p = fit_on(&env, &data, &cfg);
        for (s, a) in &data {
            assert!((p.predict(s)[0] - a[0]).abs() < 1e-3);
        }
    }

    #[test]
    fn huge_prior_precision_predicts_zero() {
        let env = Pendulum::new();
        let data = synthetic(&env, 20, 3);
        let p = fit_on(&env, &data, &RffConfig { alpha: 1e12, ..Default::default() });
        assert!(data.iter().all(|(s, _)| p.predict(s)[0].abs() < 1e-9));
    }

    #[test]
    fn more_data_means_less_shrinkage() {
        let env = MountainCar::new();
        let data = synthetic(&env, 30, 4);
        let doubled: Vec<_> = data.iter().chain(&data).cloned().collect();
        let cfg = RffConfig::default();
        assert!(mean_abs_err(&fit_on(&env, &doubled, &cfg), &data) < mean_abs_err(&fit_on(&env, &data, &cfg), &data));
    }

    #[test]
    fn clamps_to_action_box() {
        let env = Pendulum::new();
        let data: Vec<_> = synthetic(&env, 10, 6)
            .into_iter()
            .map(|(s, _)| (s, ActionVec(vec![50.0])))
            .collect();
        let p = fit_on(&env, &data, &RffConfig { alpha: 1e-6, beta: 1e4, ..Default::default() });
        assert!(p.predict_raw(&data[0].0)[0] > 2.0);
        assert_eq!(p.predict(&data[0].0)[0], 2.0);
    }

    #[test]
    fn file_round_trip() {
        let env = MountainCar::new();
        let p = fit_on(&env, &synthetic(&env, 15, 7), &RffConfig::default());
        let mut buf = Vec::new();
        write_policy(&p, &mut buf).unwrap();
        let back = read_policy(&buf[..]).unwrap();
        assert_eq!(back, p);
        let text = String::from_utf8(buf).unwrap().replacen("\"version\":1", "\"version\":9", 1);
        assert!(matches!(read_policy(text.as_bytes()), Err(Error::Load { field, .. }) if field == "version"));
    }
}
