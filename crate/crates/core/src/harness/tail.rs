use std::path::Path;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::env::{sample_initial, Environment};
use crate::error::{Error, Result};
use crate::planner::{grow_tree, PlannerConfig};
use crate::rng::{child_rng, derive_seed, Stream};

/// Two-sided normal quantile used for every interval in the harness.
pub const Z95: f64 = 1.959963984540054;

pub const MIN_SEEDS_PER_POINT: usize = 30;

/// Wilson score interval for `hits` out of `n`.
pub fn wilson_interval(hits: usize, n: usize, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = hits as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if hits == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if p == 1.0 { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

/// Failure statistics at one budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailurePoint {
    pub k: usize,
    pub runs: usize,
    pub failures: usize,
    pub fail_prob: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl FailurePoint {
    pub fn new(k: usize, runs: usize, failures: usize) -> Self {
        let (ci_low, ci_high) = wilson_interval(failures, runs, Z95);
        Self { k, runs, failures, fail_prob: failures as f64 / runs as f64, ci_low, ci_high }
    }

    fn interior(&self) -> bool {
        self.failures > 0 && self.failures < self.runs
    }
}

/// Exponential tail `p_fail(k) <= min(1, a exp(-b k))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    pub a_hat: f64,
    pub b_hat: f64,
    /// Intercept of the least-squares fit before envelope inflation.
    pub a_ls: f64,
    /// R^2 of the log-linear fit over the interior points.
    pub r_squared: f64,
    pub interior_points: usize,
    pub points: Vec<FailurePoint>,
}

impl TailFit {
    pub fn predicted(&self, k: f64) -> f64 {
        (self.a_hat * (-self.b_hat * k).exp()).min(1.0)
    }

    /// The fitted curve lies on or above every Wilson upper limit.
    pub fn is_envelope(&self) -> bool {
        self.points.iter().all(|p| self.predicted(p.k as f64) >= p.ci_high * (1.0 - 1e-12))
    }
}

pub const TAIL_FIT_FORMAT: &str = "p2d2-tailfit";

#[derive(Serialize, Deserialize)]
struct TailFitFile {
    format: String,
    env: String,
    fit: TailFit,
}

/// JSON document recording the fit and the environment it was measured on.
pub fn save_tail_fit(fit: &TailFit, env: &str, path: impl AsRef<Path>) -> Result<()> {
    let doc = TailFitFile { format: TAIL_FIT_FORMAT.into(), env: env.into(), fit: fit.clone() };
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

/// Returns the environment name and the fit.
pub fn load_tail_fit(path: impl AsRef<Path>) -> Result<(String, TailFit)> {
    let text = std::fs::read_to_string(path)?;
    let doc: TailFitFile = serde_json::from_str(&text).map_err(|e| Error::load("tail_fit", e.to_string()))?;
    if doc.format != TAIL_FIT_FORMAT {
        return Err(Error::load("format", format!("expected `{TAIL_FIT_FORMAT}`, found `{}`", doc.format)));
    }
    if !(doc.fit.a_hat > 0.0 && doc.fit.b_hat > 0.0) {
        return Err(Error::load("fit", "tail constants must be positive"));
    }
    Ok((doc.env, doc.fit))
}

/// Each step down in `k` either lowers the failure estimate or keeps it
/// within the intervals of its neighbour.
pub fn non_increasing_up_to_ci(points: &[FailurePoint]) -> bool {
    points
        .windows(2)
        .all(|w| w[1].fail_prob <= w[0].fail_prob || w[1].ci_low <= w[0].ci_high)
}

/// Least squares of `log p = log a - b k` over points with `0 < p < 1`, then
/// `a` is raised until `min(1, a exp(-b k))` covers every upper limit.
pub fn fit_tail(points: &[FailurePoint]) -> Result<TailFit> {
    if points.is_empty() {
        return Err(Error::Fit("empty budget grid".into()));
    }
    if points.iter().all(|p| p.failures == 0) {
        return Err(Error::Fit("every run succeeded at every budget; shift the grid to smaller budgets".into()));
    }
    if points.iter().all(|p| p.failures == p.runs) {
        return Err(Error::Fit("every run failed at every budget; shift the grid to larger budgets".into()));
    }
    let interior: Vec<&FailurePoint> = points.iter().filter(|p| p.interior()).collect();
    if interior.len() < 2 {
        return Err(Error::Fit(format!(
            "{} budget(s) with 0 < p_fail < 1; need at least two, refine the grid around the transition",
            interior.len()
        )));
    }
    let n = interior.len() as f64;
    let xs: Vec<f64> = interior.iter().map(|p| p.k as f64).collect();
    let ys: Vec<f64> = interior.iter().map(|p| p.fail_prob.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let b_hat = -slope;
    if !(b_hat > 0.0 && b_hat.is_finite()) {
        return Err(Error::Fit(format!("fitted decay rate {b_hat} is not positive; failures do not fall with k")));
    }
    let ss_tot: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let ss_res: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    let a_ls = intercept.exp();
    let a_hat = points
        .iter()
        .map(|p| p.ci_high * (b_hat * p.k as f64).exp())
        .fold(a_ls, f64::max);
    Ok(TailFit { a_hat, b_hat, a_ls, r_squared, interior_points: interior.len(), points: points.to_vec() })
}

/// Failure counts at each budget. Every run grows its own tree from its own
/// initial state with `stop_on_first_goal`; runs at different budgets share
/// no randomness. Returns fewer points than the grid if `deadline` passes.
pub fn measure_failures(
    env: &dyn Environment,
    template: &PlannerConfig,
    k_grid: &[usize],
    seeds_per_point: usize,
    deadline: Option<Instant>,
) -> Result<Vec<FailurePoint>> {
    if k_grid.is_empty() || k_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Input("budget grid must be non-empty and strictly increasing".into()));
    }
    if seeds_per_point < MIN_SEEDS_PER_POINT {
        return Err(Error::Input(format!("need at least {MIN_SEEDS_PER_POINT} seeds per budget")));
    }
    let mut points = Vec::with_capacity(k_grid.len());
    for (gi, &k) in k_grid.iter().enumerate() {
        if deadline.is_some_and(|d| Instant::now() >= d) {
            break;
        }
        let failures = (0..seeds_per_point)
            .into_par_iter()
            .map(|s| {
                let index = (gi * seeds_per_point + s) as u64;
                let mut rng = child_rng(template.seed, Stream::FailureCurve, index);
                let mut cfg = template.clone();
                cfg.budget_k = k;
                cfg.stop_on_first_goal = true;
                cfg.seed = derive_seed(template.seed, Stream::FailureCurve, index);
                let root = sample_initial(env.spec(), &mut rng);
                let tree = grow_tree(env, &cfg, root, &mut rng)?;
                Ok(tree.stats.first_success.is_none())
            })
            .collect::<Result<Vec<bool>>>()?
            .into_iter()
            .filter(|f| *f)
            .count();
        points.push(FailurePoint::new(k, seeds_per_point, failures));
    }
    Ok(points)
}

/// Measure and fit in one call.
pub fn failure_curve(
    env: &dyn Environment,
    template: &PlannerConfig,
    k_grid: &[usize],
    seeds_per_point: usize,
) -> Result<TailFit> {
    fit_tail(&measure_failures(env, template, k_grid, seeds_per_point, None)?)
}

/// Failure counts drawn from a known law `p(k) = min(1, a exp(-b k))`, the
/// reference process for checking the fit.
pub fn simulate_known_tail(a: f64, b: f64, k_grid: &[usize], runs: usize, seed: u64) -> Vec<FailurePoint> {
    k_grid
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            let p = (a * (-b * k as f64).exp()).min(1.0);
            let mut rng = child_rng(seed, Stream::Synthetic, i as u64);
            let failures = (0..runs).filter(|_| rng.random::<f64>() < p).count();
            FailurePoint::new(k, runs, failures)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_reference_values() {
        // (5 of 50): centre (0.1 + 1.92/50)/(1 + 3.84/50), computed by hand
        let (lo, hi) = wilson_interval(5, 50, Z95);
        assert!((lo - 0.04347).abs() < 1e-4 && (hi - 0.21360).abs() < 1e-4, "{lo} {hi}");
        assert_eq!(wilson_interval(0, 50, Z95).0, 0.0);
        assert_eq!(wilson_interval(50, 50, Z95).1, 1.0);
    }

    #[test]
    fn recovers_known_decay() {
        let grid: Vec<usize> = (1..=8).map(|i| i * 400).collect();
        let pts = simulate_known_tail(1.0, 0.001, &grid, 2000, 3);
        let fit = fit_tail(&pts).unwrap();
        assert!((fit.b_hat - 0.001).abs() < 1e-4, "{}", fit.b_hat);
        assert!(fit.is_envelope());
        assert!(fit.r_squared > 0.95);
        assert!(non_increasing_up_to_ci(&pts));
    }

    #[test]
    fn degenerate_grids_fail() {
        let ok = |k| FailurePoint::new(k, 40, 0);
        let bad = |k| FailurePoint::new(k, 40, 40);
        assert!(matches!(fit_tail(&[ok(1), ok(2)]), Err(Error::Fit(m)) if m.contains("smaller")));
        assert!(matches!(fit_tail(&[bad(1), bad(2)]), Err(Error::Fit(m)) if m.contains("larger")));
        assert!(fit_tail(&[bad(1), FailurePoint::new(2, 40, 10), ok(3)]).is_err());
        let rising = [FailurePoint::new(1, 40, 5), FailurePoint::new(2, 40, 20)];
        assert!(matches!(fit_tail(&rising), Err(Error::Fit(m)) if m.contains("not positive")));
    }

    #[test]
    fn envelope_covers_boundary_points() {
        let pts = [
            FailurePoint::new(100, 50, 50),
            FailurePoint::new(200, 50, 30),
            FailurePoint::new(400, 50, 10),
            FailurePoint::new(800, 50, 0),
        ];
        let fit = fit_tail(&pts).unwrap();
        assert!(fit.a_hat >= fit.a_ls);
        assert!(fit.is_envelope());
    }

    #[test]
    fn fit_file_round_trip() {
        let fit = fit_tail(&simulate_known_tail(1.0, 0.002, &[200, 400, 800, 1200], 200, 1)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("fit.json");
        save_tail_fit(&fit, "mountaincar", &path).unwrap();
        assert_eq!(load_tail_fit(&path).unwrap(), ("mountaincar".to_string(), fit));
    }

    #[test]
    fn grid_preconditions() {
        let env = crate::envs::MountainCar::new();
        let cfg = PlannerConfig::default();
        assert!(measure_failures(&env, &cfg, &[10, 10], 30, None).is_err());
        assert!(measure_failures(&env, &cfg, &[10, 20], 29, None).is_err());
    }
}
