use std::path::Path;

use anyhow::Context;
use p2d2_core::harness::PipelineConfig;
use p2d2_core::imitation::RffConfig;
use p2d2_core::PlannerConfig;
use serde::Deserialize;

/// Contents of `--config`:
///
/// ```toml
/// [planner]
/// budget_k = 20000
/// goal_bias = 0.05
///
/// [rff]
/// num_features = 300
///
/// [pipeline]
/// demos = 10
/// eval_episodes = 100
/// seed = 7
/// ```
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub planner: PlannerConfig,
    pub rff: RffConfig,
    pub pipeline: PipelineSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineSection {
    pub demos: Option<usize>,
    pub eval_episodes: Option<usize>,
    pub seed: Option<u64>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> anyhow::Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn pipeline(&self) -> PipelineConfig {
        let d = PipelineConfig::default();
        PipelineConfig {
            demos: self.pipeline.demos.unwrap_or(d.demos),
            eval_episodes: self.pipeline.eval_episodes.unwrap_or(d.eval_episodes),
            seed: self.pipeline.seed.unwrap_or(d.seed),
            planner: self.planner.clone(),
            rff: self.rff.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_and_rejects_typos() {
        let c: FileConfig = toml::from_str("[planner]\nbudget_k = 123\n[pipeline]\nseed = 4\n").unwrap();
        assert_eq!(c.planner.budget_k, 123);
        assert_eq!(c.planner.goal_bias, 0.05);
        assert_eq!(c.pipeline().seed, 4);
        assert!(toml::from_str::<FileConfig>("[planner]\nbudgetk = 1\n").is_err());
    }
}
