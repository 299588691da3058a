//! Persistence for demonstrations.
//!
//! A `.demos` file is JSON lines: one header record, then one trajectory per
//! line. Floats are written in shortest round-trip form and parsed with exact
//! rounding, so a load reproduces every value bit for bit.
//!
//! ```text
//! {"format":"p2d2-demos","version":1,"env":"mountaincar","env_constants_hash":"9f2c…","planner_config":{…},"total_env_steps":40000,"seed":7,"requested":2,"attempts":2,"shortfall":false,"timed_out":false,"count":2}
//! {"seed":1234,"states":[[-0.52,0.0],…],"actions":[[0.31],…],"rewards":[-1.0,…],"disc_return":-84.2,"undisc_return":-118.0,"success":true}
//! ```

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::env::{ActionVec, Environment, StateVec};
use crate::envs::make_env;
use crate::error::{Error, Result};
use crate::planner::{PlannerConfig, Trajectory};

pub const DEMOS_FORMAT: &str = "p2d2-demos";
pub const DEMOS_VERSION: u32 = 1;

/// A collection of successful trajectories plus provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct DemoSet {
    pub env_name: String,
    pub env_constants_hash: String,
    pub trajectories: Vec<Trajectory>,
    pub planner_config: PlannerConfig,
    /// Environment transitions consumed by every consumed tree.
    pub total_env_steps: u64,
    pub seed: u64,
    pub requested: usize,
    pub attempts: usize,
    pub shortfall: bool,
    pub timed_out: bool,
}

impl DemoSet {
    pub fn new(env: &dyn Environment, planner_config: PlannerConfig, requested: usize) -> Self {
        Self {
            env_name: env.spec().name.clone(),
            env_constants_hash: env.constants_hash(),
            trajectories: Vec::new(),
            seed: planner_config.seed,
            planner_config,
            total_env_steps: 0,
            requested,
            attempts: 0,
            shortfall: false,
            timed_out: false,
        }
    }

    pub fn pair_count(&self) -> usize {
        self.trajectories.iter().map(|t| t.len()).sum()
    }

    pub fn mean_undisc_return(&self) -> Option<f64> {
        if self.trajectories.is_empty() {
            return None;
        }
        Some(self.trajectories.iter().map(|t| t.undisc_return).sum::<f64>() / self.trajectories.len() as f64)
    }

    /// Replay every trajectory against `env`.
    pub fn validate(&self, env: &dyn Environment) -> Result<()> {
        for t in &self.trajectories {
            if t.env_name != self.env_name {
                return Err(Error::Input(format!("trajectory from `{}` in a `{}` set", t.env_name, self.env_name)));
            }
            if !self.shortfall && !t.success {
                return Err(Error::Input("unsuccessful trajectory in a complete set".into()));
            }
            t.validate(env, self.planner_config.gamma)?;
        }
        if (self.total_env_steps as usize) < self.pair_count() {
            return Err(Error::Input("env step count below total trajectory length".into()));
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    format: String,
    version: u32,
    env: String,
    env_constants_hash: String,
    planner_config: PlannerConfig,
    total_env_steps: u64,
    seed: u64,
    requested: usize,
    attempts: usize,
    shortfall: bool,
    timed_out: bool,
    count: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Record {
    seed: u64,
    states: Vec<StateVec>,
    actions: Vec<ActionVec>,
    rewards: Vec<f64>,
    disc_return: f64,
    undisc_return: f64,
    success: bool,
}

pub fn write_demos<W: Write>(set: &DemoSet, mut w: W) -> Result<()> {
    let header = Header {
        format: DEMOS_FORMAT.into(),
        version: DEMOS_VERSION,
        env: set.env_name.clone(),
        env_constants_hash: set.env_constants_hash.clone(),
        planner_config: set.planner_config.clone(),
        total_env_steps: set.total_env_steps,
        seed: set.seed,
        requested: set.requested,
        attempts: set.attempts,
        shortfall: set.shortfall,
        timed_out: set.timed_out,
        count: set.trajectories.len(),
    };
    serde_json::to_writer(&mut w, &header)?;
    w.write_all(b"\n")?;
    for t in &set.trajectories {
        let rec = Record {
            seed: t.seed,
            states: t.states.clone(),
            actions: t.actions.clone(),
            rewards: t.rewards.clone(),
            disc_return: t.disc_return,
            undisc_return: t.undisc_return,
            success: t.success,
        };
        serde_json::to_writer(&mut w, &rec)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_demos(set: &DemoSet, path: impl AsRef<Path>) -> Result<()> {
    write_demos(set, BufWriter::new(File::create(path)?))
}

/// Read and check the container header shared by `.demos` and `.policy`
/// files: format tag, version, environment and constants hash.
pub(crate) fn check_container(
    line: &str,
    format: &str,
    version: u32,
    env_override: Option<&dyn Environment>,
) -> Result<serde_json::Map<String, serde_json::Value>> {
    let value: serde_json::Value = serde_json::from_str(line).map_err(|e| Error::load("header", e.to_string()))?;
    let obj = value
        .as_object()
        .ok_or_else(|| Error::load("header", "not a JSON object"))?
        .clone();
    match obj.get("format").and_then(|v| v.as_str()) {
        Some(f) if f == format => {}
        Some(f) => return Err(Error::load("format", format!("expected `{format}`, found `{f}`"))),
        None => return Err(Error::load("format", "missing")),
    }
    match obj.get("version").and_then(|v| v.as_u64()) {
        Some(v) if v == version as u64 => {}
        Some(v) => return Err(Error::load("version", format!("unsupported version {v} (expected {version})"))),
        None => return Err(Error::load("version", "missing")),
    }
    let env_name = obj
        .get("env")
        .and_then(|v| v.as_str())
        .ok_or_else(|| Error::load("env", "missing"))?;
    let hash = obj
        .get("env_constants_hash")
        .and_then(|v| v.as_str())
        .ok_or_else(|| Error::load("env_constants_hash", "missing"))?;
    let current = match env_override {
        Some(env) => {
            if env.spec().name != env_name {
                return Err(Error::load("env", format!("file is for `{env_name}`, not `{}`", env.spec().name)));
            }
            env.constants_hash()
        }
        None => make_env(env_name).map_err(|e| Error::load("env", e.to_string()))?.constants_hash(),
    };
    if hash != current {
        return Err(Error::load(
            "env_constants_hash",
            format!("file hash {hash} does not match current constants {current}"),
        ));
    }
    Ok(obj)
}

pub fn read_demos<R: BufRead>(r: R, env: Option<&dyn Environment>) -> Result<DemoSet> {
    let mut lines = r.lines();
    let first = lines.next().ok_or_else(|| Error::load("header", "empty file"))??;
    let obj = check_container(&first, DEMOS_FORMAT, DEMOS_VERSION, env)?;
    let header: Header =
        serde_json::from_value(serde_json::Value::Object(obj)).map_err(|e| Error::load("header", e.to_string()))?;
    let (state_dim, action_dim) = match env {
        Some(e) => (e.spec().state_dim, e.spec().action_dim),
        None => {
            let e = make_env(&header.env)?;
            (e.spec().state_dim, e.spec().action_dim)
        }
    };
    let mut trajectories = Vec::with_capacity(header.count);
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let field = |name: &str| format!("trajectories[{i}].{name}");
        let rec: Record =
            serde_json::from_str(&line).map_err(|e| Error::load(format!("trajectories[{i}]"), e.to_string()))?;
        if rec.states.len() != rec.actions.len() + 1 {
            return Err(Error::load(field("states"), "must hold one more entry than actions"));
        }
        if rec.rewards.len() != rec.actions.len() {
            return Err(Error::load(field("rewards"), "must match the number of actions"));
        }
        if let Some(s) = rec.states.iter().find(|s| s.len() != state_dim) {
            return Err(Error::load(field("states"), format!("state of length {} (expected {state_dim})", s.len())));
        }
        if let Some(a) = rec.actions.iter().find(|a| a.len() != action_dim) {
            return Err(Error::load(field("actions"), format!("action of length {} (expected {action_dim})", a.len())));
        }
        trajectories.push(Trajectory {
            env_name: header.env.clone(),
            seed: rec.seed,
            states: rec.states,
            actions: rec.actions,
            rewards: rec.rewards,
            disc_return: rec.disc_return,
            undisc_return: rec.undisc_return,
            success: rec.success,
        });
    }
    if trajectories.len() != header.count {
        return Err(Error::load(
            "count",
            format!("header declares {} trajectories, found {}", header.count, trajectories.len()),
        ));
    }
    Ok(DemoSet {
        env_name: header.env,
        env_constants_hash: header.env_constants_hash,
        trajectories,
        planner_config: header.planner_config,
        total_env_steps: header.total_env_steps,
        seed: header.seed,
        requested: header.requested,
        attempts: header.attempts,
        shortfall: header.shortfall,
        timed_out: header.timed_out,
    })
}

/// Load a `.demos` file, checking it against the registered environment.
pub fn load_demos(path: impl AsRef<Path>) -> Result<DemoSet> {
    read_demos(BufReader::new(File::open(path)?), None)
}

/// Load against a specific environment instance (e.g. a fixed-start variant).
pub fn load_demos_for(path: impl AsRef<Path>, env: &dyn Environment) -> Result<DemoSet> {
    read_demos(BufReader::new(File::open(path)?), Some(env))
}

/// Flattened CSV: one row per state, action and reward columns empty on the
/// final state of each trajectory.
pub fn write_demos_csv<W: Write>(set: &DemoSet, w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    let sd = set.trajectories.first().map_or(0, |t| t.states[0].len());
    let ad = set.trajectories.iter().find(|t| !t.is_empty()).map_or(0, |t| t.actions[0].len());
    let mut header = vec!["trajectory".to_string(), "t".to_string()];
    header.extend((0..sd).map(|i| format!("s{i}")));
    header.extend((0..ad).map(|i| format!("a{i}")));
    header.push("reward".into());
    wtr.write_record(&header)?;
    for (k, traj) in set.trajectories.iter().enumerate() {
        for (t, s) in traj.states.iter().enumerate() {
            let mut row = vec![k.to_string(), t.to_string()];
            row.extend(s.iter().map(|v| format!("{v:?}")));
            match traj.actions.get(t) {
                Some(a) => {
                    row.extend(a.iter().map(|v| format!("{v:?}")));
                    row.push(format!("{:?}", traj.rewards[t]));
                }
                None => row.extend(std::iter::repeat_n(String::new(), ad + 1)),
            }
            wtr.write_record(&row)?;
        }
    }
    wtr.flush()?;
    Ok(())
}
