//! CSV writers. Every file has a fixed header; floats use the shortest
//! representation that parses back to the same value.

use std::io::Write;

use super::complexity::{ComplexityReport, HittingTime};
use super::pipeline::PipelineReport;
use super::surface::ReturnSurface;
use super::tail::{FailurePoint, TailFit};
use crate::error::Result;
use crate::imitation::EvalReport;

pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

/// `key,value` rows.
pub fn write_summary_csv<W: Write>(rows: &[(&str, String)], w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["key", "value"])?;
    for (k, v) in rows {
        wtr.write_record([*k, v.as_str()])?;
    }
    wtr.flush()?;
    Ok(())
}

/// `episode,success,undisc_return,steps`
pub fn write_eval_csv<W: Write>(report: &EvalReport, w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["episode", "success", "undisc_return", "steps"])?;
    for r in &report.rows {
        wtr.write_record([
            r.episode.to_string(),
            (r.success as u8).to_string(),
            fmt_f64(r.undisc_return),
            r.steps.to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn eval_summary(report: &EvalReport) -> Vec<(&'static str, String)> {
    vec![
        ("episodes", report.episodes.to_string()),
        ("success_rate", fmt_f64(report.success_rate)),
        ("mean_undisc_return", fmt_f64(report.mean_undisc_return)),
        ("mean_steps", fmt_f64(report.mean_steps)),
    ]
}

/// `k,runs,failures,fail_prob,ci_low,ci_high,predicted`; `predicted` is empty
/// without a fit.
pub fn write_failure_csv<W: Write>(points: &[FailurePoint], fit: Option<&TailFit>, w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["k", "runs", "failures", "fail_prob", "ci_low", "ci_high", "predicted"])?;
    for p in points {
        wtr.write_record([
            p.k.to_string(),
            p.runs.to_string(),
            p.failures.to_string(),
            fmt_f64(p.fail_prob),
            fmt_f64(p.ci_low),
            fmt_f64(p.ci_high),
            fit.map(|f| fmt_f64(f.predicted(p.k as f64))).unwrap_or_default(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn tail_summary(fit: &TailFit) -> Vec<(&'static str, String)> {
    vec![
        ("a_hat", fmt_f64(fit.a_hat)),
        ("b_hat", fmt_f64(fit.b_hat)),
        ("a_ls", fmt_f64(fit.a_ls)),
        ("r_squared", fmt_f64(fit.r_squared)),
        ("interior_points", fit.interior_points.to_string()),
        ("envelope", fit.is_envelope().to_string()),
    ]
}

/// `run,hitting_k,censored`; a censored run reports the cap.
pub fn write_hitting_csv<W: Write>(times: &[HittingTime], cap: usize, w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["run", "hitting_k", "censored"])?;
    for t in times {
        wtr.write_record([
            t.run.to_string(),
            t.k.unwrap_or(cap).to_string(),
            (t.k.is_none() as u8).to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn complexity_summary(r: &ComplexityReport) -> Vec<(&'static str, String)> {
    vec![
        ("runs", r.runs.to_string()),
        ("cap", r.cap.to_string()),
        ("censored", r.censored.to_string()),
        ("mean_hitting_k", fmt_f64(r.mean_hitting_k)),
        ("ci_low", fmt_f64(r.ci_low)),
        ("ci_high", fmt_f64(r.ci_high)),
        ("a_hat", fmt_f64(r.a_hat)),
        ("b_hat", fmt_f64(r.b_hat)),
        ("bound", fmt_f64(r.theorem3_bound)),
        ("bound_satisfied", r.bound_satisfied.to_string()),
        ("series_terms", r.series_terms.to_string()),
        ("series_value", fmt_f64(r.series_value)),
        ("series_gap", fmt_f64(r.series_gap)),
        ("timed_out", r.timed_out.to_string()),
        ("note", "constants are envelope fits, so this is a consistency check".into()),
    ]
}

/// `i,j,theta0,theta1,mean_return,success_rate`
pub fn write_surface_csv<W: Write>(s: &ReturnSurface, w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["i", "j", "theta0", "theta1", "mean_return", "success_rate"])?;
    for c in &s.cells {
        wtr.write_record([
            c.i.to_string(),
            c.j.to_string(),
            fmt_f64(c.theta0),
            fmt_f64(c.theta1),
            fmt_f64(c.mean_return),
            fmt_f64(c.success_rate),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn pipeline_summary(r: &PipelineReport) -> Vec<(&'static str, String)> {
    vec![
        ("env", r.env.clone()),
        ("seed", r.seed.to_string()),
        ("demos_requested", r.demos_requested.to_string()),
        ("demos_collected", r.demos_collected.to_string()),
        ("attempts", r.attempts.to_string()),
        ("shortfall", r.shortfall.to_string()),
        ("timed_out", r.timed_out.to_string()),
        ("total_env_steps", r.total_env_steps.to_string()),
        ("demo_steps", r.demo_steps.to_string()),
        ("demo_mean_undisc_return", fmt_f64(r.demo_mean_undisc_return)),
        ("trained_pairs", r.trained_pairs.to_string()),
        ("eval_episodes", r.eval_episodes.to_string()),
        ("imitation_success_rate", fmt_f64(r.imitation_success_rate)),
        ("imitation_mean_undisc_return", fmt_f64(r.imitation_mean_undisc_return)),
        ("imitation_mean_steps", fmt_f64(r.imitation_mean_steps)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_through_text() {
        for v in [0.1, -1e-7, 1.0 / 3.0, 123456789.125, -200.0] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap().to_bits(), (v as f64).to_bits());
        }
    }

    #[test]
    fn failure_csv_layout() {
        let pts = [FailurePoint::new(10, 40, 20)];
        let mut buf = Vec::new();
        write_failure_csv(&pts, None, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("k,runs,failures,fail_prob,ci_low,ci_high,predicted"));
        assert!(lines.next().unwrap().starts_with("10,40,20,0.5,"));
    }
}
