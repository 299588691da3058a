use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use anyhow::{anyhow, bail, Context, Result};
use p2d2_core::env::{sample_initial, Environment};
use p2d2_core::experts::expert_for;
use p2d2_core::harness::report::{self, fmt_f64};
use p2d2_core::harness::svg::{self, Series};
use p2d2_core::harness::{self as h, linspace};
use p2d2_core::imitation::{self, evaluate_policy, rollout, EvalReport};
use p2d2_core::rng::{child_rng, derive_seed, Stream};
use p2d2_core::store::{self, DemoSet};
use p2d2_core::{make_env, Policy};

use crate::args::*;
use crate::config::FileConfig;

/// How a successful command finished.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Complete,
    /// Shortfall, time cap or censoring; outputs are written but flagged.
    Partial,
}

pub struct Ctx {
    pub file: FileConfig,
    pub out_dir: PathBuf,
    pub deadline: Option<Instant>,
}

impl Ctx {
    pub fn new(cli: &Cli) -> Result<Self> {
        let file = FileConfig::load(cli.config.as_deref())?;
        let deadline = match cli.time_cap {
            Some(s) if s.is_finite() && s >= 0.0 => Some(Instant::now() + Duration::from_secs_f64(s)),
            Some(s) => bail!("--time-cap must be a nonnegative number of seconds, got {s}"),
            None => None,
        };
        std::fs::create_dir_all(&cli.out_dir).with_context(|| format!("creating {}", cli.out_dir.display()))?;
        Ok(Self { file, out_dir: cli.out_dir.clone(), deadline })
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }
}

fn env_named(name: &str) -> Result<std::sync::Arc<dyn Environment>> {
    Ok(make_env(name)?)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

fn write_summary(path: &Path, rows: &[(&str, String)]) -> Result<()> {
    report::write_summary_csv(rows, create(path)?)?;
    for (k, v) in rows {
        println!("{k}: {v}");
    }
    println!("wrote {}", path.display());
    Ok(())
}

fn partial_if(flag: bool, why: &str) -> Outcome {
    if flag {
        eprintln!("warning: partial result ({why})");
        Outcome::Partial
    } else {
        Outcome::Complete
    }
}

pub fn run(ctx: &Ctx, command: &Command) -> Result<Outcome> {
    match command {
        Command::Plan(a) => plan(ctx, a),
        Command::Imitate(a) => imitate(ctx, a),
        Command::Eval(a) => eval(ctx, a),
        Command::Expert(a) => expert(ctx, a),
        Command::FailureCurve(a) => failure_curve(ctx, a),
        Command::ComplexityCheck(a) => complexity(ctx, a),
        Command::Surface(a) => surface(ctx, a),
        Command::Pipeline(a) => pipeline(ctx, a),
        Command::EnvInfo(a) => {
            let env = env_named(&a.env)?;
            print!("{}", env.constants_report());
            Ok(Outcome::Complete)
        }
    }
}

fn plan(ctx: &Ctx, a: &PlanArgs) -> Result<Outcome> {
    let env = env_named(&a.env)?;
    let cfg = a.planner.apply(ctx.file.planner.clone());
    let set = p2d2_core::p2d2_collect(env.as_ref(), &cfg, a.demos, ctx.deadline)?;
    let out = a.out.clone().unwrap_or_else(|| ctx.path(&format!("{}.demos", a.env)));
    store::save_demos(&set, &out)?;
    store::write_demos_csv(&set, create(&ctx.path(&format!("{}_demos.csv", a.env)))?)?;
    write_summary(&ctx.path("plan_summary.csv"), &demo_summary(&set))?;
    println!("wrote {}", out.display());
    Ok(partial_if(
        set.shortfall || set.timed_out,
        &format!("{} of {} demonstrations", set.trajectories.len(), set.requested),
    ))
}

fn demo_summary(set: &DemoSet) -> Vec<(&'static str, String)> {
    vec![
        ("env", set.env_name.clone()),
        ("seed", set.seed.to_string()),
        ("requested", set.requested.to_string()),
        ("collected", set.trajectories.len().to_string()),
        ("attempts", set.attempts.to_string()),
        ("total_env_steps", set.total_env_steps.to_string()),
        ("demo_steps", set.pair_count().to_string()),
        ("mean_undisc_return", set.mean_undisc_return().map(fmt_f64).unwrap_or_default()),
        ("shortfall", set.shortfall.to_string()),
        ("timed_out", set.timed_out.to_string()),
    ]
}

fn imitate(ctx: &Ctx, a: &ImitateArgs) -> Result<Outcome> {
    let set = store::load_demos(&a.demos)?;
    let cfg = a.rff.apply(ctx.file.rff.clone());
    let policy = imitation::fit(&set, &cfg, &mut child_rng(a.seed, Stream::Features, 0))?;
    let out = a.out.clone().unwrap_or_else(|| ctx.path(&format!("{}.policy", set.env_name)));
    imitation::save_policy(&policy, &out)?;
    write_summary(
        &ctx.path("imitate_summary.csv"),
        &[
            ("env", policy.env_name.clone()),
            ("demos", set.trajectories.len().to_string()),
            ("trained_pairs", policy.trained_pairs.to_string()),
            ("num_features", cfg.num_features.to_string()),
            ("lengthscale", fmt_f64(cfg.lengthscale)),
            ("alpha", fmt_f64(cfg.alpha)),
            ("beta", fmt_f64(cfg.beta)),
            ("seed", a.seed.to_string()),
        ],
    )?;
    println!("wrote {}", out.display());
    Ok(Outcome::Complete)
}

fn write_eval(ctx: &Ctx, prefix: &str, r: &EvalReport) -> Result<()> {
    report::write_eval_csv(r, create(&ctx.path(&format!("{prefix}_episodes.csv")))?)?;
    write_summary(&ctx.path(&format!("{prefix}_summary.csv")), &report::eval_summary(r))
}

fn eval(ctx: &Ctx, a: &EvalArgs) -> Result<Outcome> {
    let policy = imitation::load_policy(&a.policy)?;
    let env = env_named(&policy.env_name)?;
    let r = evaluate_policy(&policy, env.as_ref(), a.episodes, a.seed)?;
    write_eval(ctx, "eval", &r)?;
    Ok(Outcome::Complete)
}

fn expert(ctx: &Ctx, a: &ExpertArgs) -> Result<Outcome> {
    let env = env_named(&a.env)?;
    let policy = expert_for(&a.env)?;
    let r = evaluate_policy(policy.as_ref(), env.as_ref(), a.episodes, a.seed)?;
    write_eval(ctx, &format!("expert_{}", a.env), &r)?;
    let Some(n) = a.record else {
        return Ok(Outcome::Complete);
    };
    let cfg = ctx.file.planner.clone();
    let mut set = DemoSet::new(env.as_ref(), cfg.clone(), n);
    set.seed = a.seed;
    for i in 0..n {
        let mut rng = child_rng(a.seed, Stream::Episode, i as u64);
        let s0 = sample_initial(env.spec(), &mut rng);
        let seed = derive_seed(a.seed, Stream::Episode, i as u64);
        let (t, _) = rollout(policy.as_ref() as &dyn Policy, env.as_ref(), s0, seed, cfg.gamma, true)?;
        set.attempts += 1;
        set.total_env_steps += t.len() as u64;
        if t.success {
            set.trajectories.push(t);
        }
    }
    set.shortfall = set.trajectories.len() < n;
    let out = ctx.path(&format!("expert_{}.demos", a.env));
    store::save_demos(&set, &out)?;
    println!("wrote {} ({} trajectories)", out.display(), set.trajectories.len());
    Ok(partial_if(set.shortfall, "some expert rollouts missed the goal"))
}

fn failure_curve(ctx: &Ctx, a: &FailureCurveArgs) -> Result<Outcome> {
    let env = env_named(&a.env)?;
    let cfg = a.planner.apply(ctx.file.planner.clone());
    let points = h::measure_failures(env.as_ref(), &cfg, &a.k_grid, a.seeds, ctx.deadline)?;
    let partial = points.len() < a.k_grid.len();
    let fit = h::fit_tail(&points);
    report::write_failure_csv(&points, fit.as_ref().ok(), create(&ctx.path("failure_curve.csv"))?)?;
    println!("wrote {}", ctx.path("failure_curve.csv").display());
    let fit = match fit {
        Ok(f) => f,
        Err(e) => {
            for p in &points {
                println!("k={} failures={}/{}", p.k, p.failures, p.runs);
            }
            return Err(anyhow!(e).context("tail fit"));
        }
    };
    let mut rows = vec![("env", a.env.clone()), ("seeds_per_point", a.seeds.to_string())];
    rows.extend(report::tail_summary(&fit));
    rows.push(("non_increasing_up_to_ci", h::non_increasing_up_to_ci(&points).to_string()));
    rows.push(("partial", partial.to_string()));
    write_summary(&ctx.path("tail_fit.csv"), &rows)?;
    h::save_tail_fit(&fit, &a.env, ctx.path("tail_fit.json"))?;
    let empirical = Series {
        name: "empirical",
        points: points.iter().map(|p| (p.k as f64, p.fail_prob)).collect(),
        color: "black",
        markers: true,
    };
    let upper = Series {
        name: "Wilson upper",
        points: points.iter().map(|p| (p.k as f64, p.ci_high)).collect(),
        color: "gray",
        markers: true,
    };
    let fitted = Series {
        name: "envelope fit",
        points: points.iter().map(|p| (p.k as f64, fit.predicted(p.k as f64))).collect(),
        color: "crimson",
        markers: false,
    };
    let provenance = format!("p2d2 failure-curve env={} seed={} seeds={}", a.env, cfg.seed, a.seeds);
    std::fs::write(
        ctx.path("failure_curve.svg"),
        svg::line_plot("Planner failure probability", "iterations k", "p_fail", &[empirical, upper, fitted], true, &provenance),
    )?;
    Ok(partial_if(partial, "time cap reached before the whole grid ran"))
}

fn complexity(ctx: &Ctx, a: &ComplexityArgs) -> Result<Outcome> {
    let Some(fit_path) = &a.fit else {
        bail!("complexity-check needs --fit <tail_fit.json> from `failure-curve`");
    };
    let (fit_env, fit) = h::load_tail_fit(fit_path)?;
    if fit_env != a.env {
        bail!("the tail fit was measured on `{fit_env}`, not `{}`", a.env);
    }
    let env = env_named(&a.env)?;
    let cfg = a.planner.apply(ctx.file.planner.clone());
    let r = h::complexity_check(env.as_ref(), &cfg, &fit, a.runs, a.cap, ctx.deadline)?;
    report::write_hitting_csv(&r.times, r.cap, create(&ctx.path("hitting_times.csv"))?)?;
    let mut rows = vec![("env", a.env.clone())];
    rows.extend(report::complexity_summary(&r));
    write_summary(&ctx.path("complexity.csv"), &rows)?;
    Ok(partial_if(r.timed_out || r.censored > 0, "time cap or censored runs"))
}

fn grid(spec: &[f64], name: &str) -> Result<Vec<f64>> {
    match spec {
        [lo, hi, n] if n.fract() == 0.0 && *n >= 1.0 => Ok(linspace(*lo, *hi, *n as usize)),
        _ => bail!("--{name} expects `lo,hi,n` with integer n >= 1"),
    }
}

fn surface(ctx: &Ctx, a: &SurfaceArgs) -> Result<Outcome> {
    let env = env_named(&a.env)?;
    let t0 = grid(&a.theta0, "theta0")?;
    let t1 = grid(&a.theta1, "theta1")?;
    let s = h::return_surface(env.as_ref(), &t0, &t1, a.episodes, a.seed)?;
    report::write_surface_csv(&s, create(&ctx.path("surface.csv"))?)?;
    let values: Vec<f64> = s.cells.iter().map(|c| c.mean_return).collect();
    let flat = values.iter().filter(|v| **v == -(env.spec().horizon as f64)).count();
    let provenance = format!("p2d2 surface env={} seed={} episodes={}", a.env, a.seed, a.episodes);
    std::fs::write(
        ctx.path("surface.svg"),
        svg::heatmap("Mean return of the linear policy", "theta0", "theta1", &t0, &t1, &values, &provenance),
    )?;
    println!("cells: {}", values.len());
    println!("cells at -horizon (zero gradient): {flat}");
    println!("best: {}", fmt_f64(values.iter().copied().fold(f64::NEG_INFINITY, f64::max)));
    println!("wrote {}", ctx.path("surface.csv").display());
    Ok(Outcome::Complete)
}

fn pipeline(ctx: &Ctx, a: &PipelineArgs) -> Result<Outcome> {
    let env = env_named(&a.env)?;
    let mut cfg = ctx.file.pipeline();
    cfg.planner = a.planner.apply(cfg.planner);
    cfg.rff = a.rff.apply(cfg.rff);
    if let Some(v) = a.demos {
        cfg.demos = v;
    }
    if let Some(v) = a.eval_episodes {
        cfg.eval_episodes = v;
    }
    if let Some(v) = a.planner.seed {
        cfg.seed = v;
    }
    let out = h::end_to_end(env.as_ref(), &cfg, ctx.deadline)?;
    store::save_demos(&out.demos, ctx.path("pipeline.demos"))?;
    imitation::save_policy(&out.policy, ctx.path("pipeline.policy"))?;
    report::write_eval_csv(&out.eval, create(&ctx.path("pipeline_eval.csv"))?)?;
    let demo_returns = Series {
        name: "demonstration return",
        points: out.demos.trajectories.iter().enumerate().map(|(i, t)| (i as f64, t.undisc_return)).collect(),
        color: "crimson",
        markers: true,
    };
    let eval_returns = Series {
        name: "imitation episode return",
        points: out.eval.rows.iter().map(|r| (r.episode as f64, r.undisc_return)).collect(),
        color: "steelblue",
        markers: true,
    };
    let provenance = format!("p2d2 pipeline env={} seed={}", a.env, cfg.seed);
    std::fs::write(
        ctx.path("pipeline.svg"),
        svg::line_plot("Undiscounted returns", "index", "return", &[demo_returns, eval_returns], false, &provenance),
    )?;
    write_summary(&ctx.path("pipeline.csv"), &report::pipeline_summary(&out.report))?;
    Ok(partial_if(out.report.shortfall || out.report.timed_out, "fewer demonstrations than requested"))
}
