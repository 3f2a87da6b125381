use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dynamics::CooperationWeighting;
use crate::error::{Error, Result};
use crate::game::GameParams;
use crate::payoff::MonteCarloSettings;
use crate::strategy::StrategySpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    CoopRates,
    FixedPoints,
    PairwiseReplicator,
    AonFamily,
    ClassicsVsAdco,
    Mem1GridVsAdco,
    Validate,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 7] = [
        ExperimentKind::CoopRates,
        ExperimentKind::FixedPoints,
        ExperimentKind::PairwiseReplicator,
        ExperimentKind::AonFamily,
        ExperimentKind::ClassicsVsAdco,
        ExperimentKind::Mem1GridVsAdco,
        ExperimentKind::Validate,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::CoopRates => "coop-rates",
            ExperimentKind::FixedPoints => "fixed-points",
            ExperimentKind::PairwiseReplicator => "pairwise-replicator",
            ExperimentKind::AonFamily => "aon-family",
            ExperimentKind::ClassicsVsAdco => "classics-vs-adco",
            ExperimentKind::Mem1GridVsAdco => "mem1-grid-vs-adco",
            ExperimentKind::Validate => "validate",
        }
    }

    pub fn default_epsilon(&self) -> f64 {
        match self {
            ExperimentKind::FixedPoints | ExperimentKind::PairwiseReplicator => 0.001,
            _ => 0.01,
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Game parameters with every field optional; missing payoffs default to
/// the Axelrod values and a missing epsilon to the preset's value.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameConfig {
    #[serde(rename = "T", default, skip_serializing_if = "Option::is_none")]
    pub temptation: Option<f64>,
    #[serde(rename = "R", default, skip_serializing_if = "Option::is_none")]
    pub reward: Option<f64>,
    #[serde(rename = "P", default, skip_serializing_if = "Option::is_none")]
    pub punishment: Option<f64>,
    #[serde(rename = "S", default, skip_serializing_if = "Option::is_none")]
    pub sucker: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
}

impl GameConfig {
    pub fn resolve(&self, default_epsilon: f64) -> Result<GameParams> {
        let base = GameParams::axelrod(default_epsilon);
        GameParams::new(
            self.temptation.unwrap_or(base.temptation),
            self.reward.unwrap_or(base.reward),
            self.punishment.unwrap_or(base.punishment),
            self.sucker.unwrap_or(base.sucker),
            self.epsilon.unwrap_or(default_epsilon),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsConfig {
    #[serde(rename = "M", default = "default_population")]
    pub population: usize,
    #[serde(default = "default_beta")]
    pub beta: f64,
    /// Mutation probability of the agent-based run.
    #[serde(default = "default_mu")]
    pub mu: f64,
    /// Agent-based steps per replicate; 0 skips the agent-based run.
    #[serde(default)]
    pub steps: u64,
    #[serde(default = "default_replicates")]
    pub replicates: u64,
    /// Snapshot interval for agent-based count series; 0 disables it.
    #[serde(default)]
    pub record_every: u64,
    #[serde(default)]
    pub weighting: CooperationWeighting,
}

fn default_population() -> usize {
    100
}
fn default_beta() -> f64 {
    1.0
}
fn default_mu() -> f64 {
    1e-3
}
fn default_replicates() -> u64 {
    10
}

impl Default for DynamicsConfig {
    fn default() -> Self {
        DynamicsConfig {
            population: default_population(),
            beta: default_beta(),
            mu: default_mu(),
            steps: 0,
            replicates: default_replicates(),
            record_every: 0,
            weighting: CooperationWeighting::default(),
        }
    }
}

/// Integer sweep axis: an explicit list or an inclusive range.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IntSweep {
    List(Vec<u32>),
    Range {
        from: u32,
        to: u32,
        #[serde(default = "one")]
        step: u32,
    },
}

fn one() -> u32 {
    1
}

impl IntSweep {
    pub fn range(from: u32, to: u32) -> Self {
        IntSweep::Range { from, to, step: 1 }
    }

    pub fn values(&self) -> Vec<u32> {
        match self {
            IntSweep::List(v) => v.clone(),
            IntSweep::Range { from, to, step } => (*from..=*to).step_by((*step).max(1) as usize).collect(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub k: Option<IntSweep>,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub n: Option<IntSweep>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<IntSweep>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<Vec<f64>>,
}

/// One experiment, as read from a JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default)]
    pub game: GameConfig,
    #[serde(default)]
    pub dynamics: DynamicsConfig,
    /// Replaces the preset's default roster or opponent list.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategies: Option<Vec<String>>,
    /// ADCO entry added by the roster presets and used as the focal
    /// strategy of the replicator presets.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adco: Option<String>,
    /// Opponent of the fixed-point sweep.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub opponent: Option<String>,
    #[serde(default)]
    pub sweep: SweepConfig,
    /// Initial share of the focal strategy in replicator runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// Number of grid strategies kept by the memory-1 grid preset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subsample: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mc: Option<MonteCarloSettings>,
    /// Payoff-matrix cache file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cache: Option<PathBuf>,
    /// Also write a JSON mirror of every table.
    #[serde(default)]
    pub json: bool,
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentKind) -> Self {
        ExperimentConfig {
            experiment,
            game: GameConfig::default(),
            dynamics: DynamicsConfig::default(),
            strategies: None,
            adco: None,
            opponent: None,
            sweep: SweepConfig::default(),
            x0: None,
            seed: None,
            output: None,
            subsample: None,
            mc: None,
            cache: None,
            json: false,
        }
    }

    /// Parses a JSON document; errors name the offending field and line.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let config: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            Error::Config {
                path: if path == "." { "<root>".into() } else { path },
                message: format!("{inner} (line {}, column {})", inner.line(), inner.column()),
            }
        })?;
        config.check()?;
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn game_params(&self) -> Result<GameParams> {
        self.game.resolve(self.experiment.default_epsilon())
    }

    pub fn monte_carlo(&self) -> MonteCarloSettings {
        self.mc.unwrap_or_default()
    }

    /// Structural checks that do not need any computation.
    pub fn check(&self) -> Result<()> {
        let field = |path: &str, message: String| Error::Config {
            path: path.to_string(),
            message,
        };
        self.game_params()?;
        for (i, s) in self.strategies.iter().flatten().enumerate() {
            s.parse::<StrategySpec>().map_err(|e| field(&format!("strategies[{i}]"), e.to_string()))?;
        }
        if matches!(&self.strategies, Some(v) if v.is_empty()) {
            return Err(field("strategies", "list is empty".into()));
        }
        for (name, spec) in [("adco", &self.adco), ("opponent", &self.opponent)] {
            if let Some(s) = spec {
                s.parse::<StrategySpec>().map_err(|e| field(name, e.to_string()))?;
            }
        }
        let axes = [("sweep.K", &self.sweep.k), ("sweep.N", &self.sweep.n), ("sweep.t", &self.sweep.t)];
        for (name, axis) in axes {
            if let Some(a) = axis {
                let v = a.values();
                if v.is_empty() {
                    return Err(field(name, "sweep range is empty".into()));
                }
                if v.contains(&0) {
                    return Err(field(name, "values must be positive".into()));
                }
            }
        }
        if matches!(&self.sweep.n, Some(a) if a.values().contains(&1)) {
            return Err(field("sweep.N", "group size must be at least 2".into()));
        }
        if let Some(eps) = &self.sweep.epsilon {
            if eps.is_empty() {
                return Err(field("sweep.epsilon", "sweep range is empty".into()));
            }
            if let Some(e) = eps.iter().find(|e| !(0.0..=0.5).contains(*e)) {
                return Err(field("sweep.epsilon", format!("{e} is outside [0, 0.5]")));
            }
        }
        if let Some(x) = self.x0 {
            if !(0.0..=1.0).contains(&x) {
                return Err(field("x0", format!("{x} is outside [0, 1]")));
            }
        }
        if self.subsample == Some(0) {
            return Err(field("subsample", "must be positive".into()));
        }
        let d = &self.dynamics;
        if d.population < 2 {
            return Err(field("dynamics.M", "population size must be at least 2".into()));
        }
        if !(d.beta >= 0.0) || !d.beta.is_finite() {
            return Err(field("dynamics.beta", "must be finite and >= 0".into()));
        }
        if !(0.0..=1.0).contains(&d.mu) {
            return Err(field("dynamics.mu", "must lie in [0, 1]".into()));
        }
        if d.steps > 0 && d.replicates == 0 {
            return Err(field("dynamics.replicates", "must be positive".into()));
        }
        if let Some(mc) = &self.mc {
            mc.validate().map_err(|e| field("mc", e.to_string()))?;
        }
        Ok(())
    }
}
