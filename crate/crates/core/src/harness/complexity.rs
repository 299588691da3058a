use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tail::{TailFit, Z95};
use crate::env::{sample_initial, Environment};
use crate::error::{Error, Result};
use crate::planner::{grow_tree, PlannerConfig};
use crate::rng::{child_rng, derive_seed, Stream};

/// `a / (4 sinh^2(b / 2))`, the value of `sum_{k>=1} k a exp(-b k)`.
pub fn closed_form_bound(a: f64, b: f64) -> f64 {
    let s = (0.5 * b).sinh();
    a / (4.0 * s * s)
}

/// `sum_{k=1}^{terms} k a exp(-b k)`.
pub fn truncated_series(a: f64, b: f64, terms: usize) -> f64 {
    (1..=terms).map(|k| k as f64 * a * (-b * k as f64).exp()).sum()
}

/// First-success iteration of one run, `None` if the cap was reached first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HittingTime {
    pub run: usize,
    pub k: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexityReport {
    pub runs: usize,
    pub cap: usize,
    /// Runs that hit the cap; they enter the mean at the cap value, which
    /// makes the reported mean a lower bound whenever this is non-zero.
    pub censored: usize,
    pub mean_hitting_k: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub a_hat: f64,
    pub b_hat: f64,
    pub theorem3_bound: f64,
    pub bound_satisfied: bool,
    pub series_terms: usize,
    pub series_value: f64,
    pub series_gap: f64,
    pub times: Vec<HittingTime>,
    pub timed_out: bool,
}

/// Terms needed before the series tail drops below `tol * a`.
pub fn series_terms_for(b: f64, tol: f64) -> usize {
    let mut k = 200usize;
    while (k as f64 + 1.0 / b) * (-b * k as f64).exp() / (1.0 - (-b).exp()) > tol && k < 10_000_000 {
        k *= 2;
    }
    k
}

/// Hitting times with `stop_on_first_goal`, each run from its own initial
/// state and generator.
pub fn hitting_times(
    env: &dyn Environment,
    config: &PlannerConfig,
    runs: usize,
    cap: usize,
    deadline: Option<Instant>,
) -> Result<(Vec<HittingTime>, bool)> {
    let batch = 4 * rayon::current_num_threads().max(1);
    let mut out = Vec::with_capacity(runs);
    let mut timed_out = false;
    let mut next = 0;
    while next < runs {
        if deadline.is_some_and(|d| Instant::now() >= d) {
            timed_out = true;
            break;
        }
        let end = (next + batch).min(runs);
        let chunk = (next..end)
            .into_par_iter()
            .map(|i| {
                let mut rng = child_rng(config.seed, Stream::Hitting, i as u64);
                let mut cfg = config.clone();
                cfg.budget_k = cap;
                cfg.stop_on_first_goal = true;
                cfg.seed = derive_seed(config.seed, Stream::Hitting, i as u64);
                let root = sample_initial(env.spec(), &mut rng);
                let tree = grow_tree(env, &cfg, root, &mut rng)?;
                Ok(HittingTime { run: i, k: tree.stats.first_success })
            })
            .collect::<Result<Vec<_>>>()?;
        out.extend(chunk);
        next = end;
    }
    Ok((out, timed_out))
}

/// Compare the measured mean hitting time with the closed-form bound built
/// from the fitted tail constants. The constants are fitted, not derived, so
/// this is a consistency check of the fit and the bound, not a proof.
pub fn complexity_check(
    env: &dyn Environment,
    config: &PlannerConfig,
    fit: &TailFit,
    runs: usize,
    cap: usize,
    deadline: Option<Instant>,
) -> Result<ComplexityReport> {
    if runs == 0 || cap == 0 {
        return Err(Error::Input("need at least one run and a positive cap".into()));
    }
    if !(fit.a_hat > 0.0 && fit.b_hat > 0.0) {
        return Err(Error::Input("tail constants must be positive".into()));
    }
    let (times, timed_out) = hitting_times(env, config, runs, cap, deadline)?;
    if times.is_empty() {
        return Err(Error::Input("deadline passed before any run finished".into()));
    }
    let n = times.len() as f64;
    let values: Vec<f64> = times.iter().map(|t| t.k.unwrap_or(cap) as f64).collect();
    let mean = values.iter().sum::<f64>() / n;
    let var = if times.len() > 1 {
        values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    let half = Z95 * (var / n).sqrt();
    let bound = closed_form_bound(fit.a_hat, fit.b_hat);
    let terms = series_terms_for(fit.b_hat, 1e-9);
    let series = truncated_series(fit.a_hat, fit.b_hat, terms);
    Ok(ComplexityReport {
        runs: times.len(),
        cap,
        censored: times.iter().filter(|t| t.k.is_none()).count(),
        mean_hitting_k: mean,
        ci_low: mean - half,
        ci_high: mean + half,
        a_hat: fit.a_hat,
        b_hat: fit.b_hat,
        theorem3_bound: bound,
        bound_satisfied: mean <= bound,
        series_terms: terms,
        series_value: series,
        series_gap: (series - bound).abs(),
        times,
        timed_out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn unit_constants() {
        let closed = closed_form_bound(1.0, 1.0);
        // e / (e - 1)^2
        let e = std::f64::consts::E;
        assert!((closed - e / ((e - 1.0) * (e - 1.0))).abs() < 1e-14);
        assert!((truncated_series(1.0, 1.0, 200) - closed).abs() < 1e-6);
    }

    #[test]
    fn bound_decreases_in_b() {
        let mut prev = f64::INFINITY;
        for i in 1..200 {
            let v = closed_form_bound(1.0, i as f64 * 0.1);
            assert!(v > 0.0 && v < prev);
            prev = v;
        }
    }

    #[test]
    fn adaptive_terms_close_the_gap_for_slow_decay() {
        for b in [0.05, 0.1, 0.5, 2.0] {
            let k = series_terms_for(b, 1e-9);
            assert!((truncated_series(1.0, b, k) - closed_form_bound(1.0, b)).abs() < 1e-6);
        }
    }

    proptest! {
        #[test]
        fn two_hundred_terms_suffice_above_015(a in 0.01f64..100.0, b in 0.15f64..2.0) {
            prop_assert!((truncated_series(a, b, 200) - closed_form_bound(a, b)).abs() < 1e-6 * a);
        }

        #[test]
        fn long_series_matches_over_full_range(a in 0.01f64..100.0, b in 0.05f64..2.0) {
            prop_assert!((truncated_series(a, b, 2000) - closed_form_bound(a, b)).abs() < 1e-6 * a);
        }
    }
}
