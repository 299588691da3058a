use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use p2d2_core::imitation::RffConfig;
use p2d2_core::PlannerConfig;

#[derive(Debug, Parser)]
#[command(name = "p2d2", version, about = "Demonstration discovery with kinodynamic RRT planning")]
pub struct Cli {
    /// TOML file with `[planner]`, `[rff]` and `[pipeline]` tables; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Directory for output files.
    #[arg(long, global = true, env = "P2D2_OUT_DIR", default_value = ".")]
    pub out_dir: PathBuf,

    /// Wall-clock cap in seconds; long-running commands stop early and
    /// flag their output as partial.
    #[arg(long, global = true)]
    pub time_cap: Option<f64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Collect demonstrations with the planner.
    Plan(PlanArgs),
    /// Fit an imitation policy on a demonstration file.
    Imitate(ImitateArgs),
    /// Evaluate a fitted policy.
    Eval(EvalArgs),
    /// Evaluate a hand-derived expert and optionally record its rollouts.
    Expert(ExpertArgs),
    /// Failure probability against budget, with an exponential tail fit.
    FailureCurve(FailureCurveArgs),
    /// Mean hitting time against the bound implied by a tail fit.
    ComplexityCheck(ComplexityArgs),
    /// Mean return of a two-parameter linear policy over a grid.
    Surface(SurfaceArgs),
    /// Collect, imitate and evaluate in one run.
    Pipeline(PipelineArgs),
    /// Print an environment's constants and their hash.
    EnvInfo(EnvArg),
}

#[derive(Debug, Args)]
pub struct EnvArg {
    /// mountaincar, pendulum, acrobot or cartpole_swingup
    #[arg(long)]
    pub env: String,
}

/// Planner settings; unset flags keep the config-file or default value.
#[derive(Debug, Args, Default)]
pub struct PlannerArgs {
    #[arg(long)]
    pub budget_k: Option<usize>,
    #[arg(long)]
    pub goal_bias: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub return_weight: Option<f64>,
    /// Require goal states with at least this discounted return.
    #[arg(long, allow_hyphen_values = true)]
    pub min_return: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub max_depth: Option<usize>,
    #[arg(long)]
    pub stop_on_first_goal: bool,
    #[arg(long)]
    pub attempt_cap: Option<usize>,
}

impl PlannerArgs {
    pub fn apply(&self, mut c: PlannerConfig) -> PlannerConfig {
        if let Some(v) = self.budget_k {
            c.budget_k = v;
        }
        if let Some(v) = self.goal_bias {
            c.goal_bias = v;
        }
        if let Some(v) = self.gamma {
            c.gamma = v;
        }
        if let Some(v) = self.return_weight {
            c.return_weight = v;
        }
        if self.min_return.is_some() {
            c.min_return = self.min_return;
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if self.max_depth.is_some() {
            c.max_depth = self.max_depth;
        }
        if self.stop_on_first_goal {
            c.stop_on_first_goal = true;
        }
        if self.attempt_cap.is_some() {
            c.attempt_cap = self.attempt_cap;
        }
        c
    }
}

#[derive(Debug, Args, Default)]
pub struct RffArgs {
    #[arg(long)]
    pub features: Option<usize>,
    #[arg(long)]
    pub lengthscale: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
}

impl RffArgs {
    pub fn apply(&self, mut c: RffConfig) -> RffConfig {
        if let Some(v) = self.features {
            c.num_features = v;
        }
        if let Some(v) = self.lengthscale {
            c.lengthscale = v;
        }
        if let Some(v) = self.alpha {
            c.alpha = v;
        }
        if let Some(v) = self.beta {
            c.beta = v;
        }
        c
    }
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    #[arg(long)]
    pub env: String,
    /// Number of demonstrations to collect.
    #[arg(long, default_value_t = 10)]
    pub demos: usize,
    #[command(flatten)]
    pub planner: PlannerArgs,
    /// Output file (default `<out-dir>/<env>.demos`).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ImitateArgs {
    #[arg(long)]
    pub demos: PathBuf,
    #[command(flatten)]
    pub rff: RffArgs,
    /// Seed of the random feature draw.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file (default `<out-dir>/<env>.policy`).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub policy: PathBuf,
    #[arg(long, default_value_t = 100)]
    pub episodes: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ExpertArgs {
    #[arg(long)]
    pub env: String,
    #[arg(long, default_value_t = 100)]
    pub episodes: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write this many goal-truncated expert rollouts as a `.demos` file.
    #[arg(long)]
    pub record: Option<usize>,
}

#[derive(Debug, Args)]
pub struct FailureCurveArgs {
    #[arg(long)]
    pub env: String,
    /// Comma-separated, strictly increasing budgets.
    #[arg(long, value_delimiter = ',', default_value = "500,1000,2000,4000,8000")]
    pub k_grid: Vec<usize>,
    #[arg(long, default_value_t = 50)]
    pub seeds: usize,
    #[command(flatten)]
    pub planner: PlannerArgs,
}

#[derive(Debug, Args)]
pub struct ComplexityArgs {
    #[arg(long)]
    pub env: String,
    /// Tail fit written by `failure-curve`.
    #[arg(long)]
    pub fit: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    pub runs: usize,
    /// Iteration cap per run; runs reaching it are reported as censored.
    #[arg(long, default_value_t = 200_000)]
    pub cap: usize,
    #[command(flatten)]
    pub planner: PlannerArgs,
}

#[derive(Debug, Args)]
pub struct SurfaceArgs {
    #[arg(long, default_value = "mountaincar")]
    pub env: String,
    /// `lo,hi,n` for the first parameter.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "-5,50,20")]
    pub theta0: Vec<f64>,
    /// `lo,hi,n` for the second parameter.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "-5,50,20")]
    pub theta1: Vec<f64>,
    #[arg(long, default_value_t = 10)]
    pub episodes: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    #[arg(long)]
    pub env: String,
    #[arg(long)]
    pub demos: Option<usize>,
    #[arg(long)]
    pub eval_episodes: Option<usize>,
    /// `--seed` is the master seed; every stage derives its own from it.
    #[command(flatten)]
    pub planner: PlannerArgs,
    #[command(flatten)]
    pub rff: RffArgs,
}
