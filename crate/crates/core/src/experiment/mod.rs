//! Declarative experiments: a JSON config selects a preset, the preset
//! produces [`ResultTable`]s, and [`write_output`] stores them as CSV (plus
//! an optional JSON mirror).

mod config;
mod presets;
mod roster;
mod table;

use std::path::{Path, PathBuf};
use std::time::Instant;

pub use config::{
    DynamicsConfig, ExperimentConfig, ExperimentKind, GameConfig, IntSweep, SweepConfig,
};
pub use presets::{
    ExperimentOutput, DEFAULT_REPLICATOR_ADCO, DEFAULT_ROSTER_ADCO, DEFAULT_VALIDATE_SEED, REPLICATOR_OPPONENTS,
};
pub use roster::{build_mem1_grid, classics_roster, subsample_indices, CLASSICS, GRID_LEVELS};
pub use table::{table_path, Cell, ResultTable};

use crate::error::Result;

/// Metadata key holding the run time; the only line that differs between
/// two runs of the same config.
pub const WALL_TIME_KEY: &str = "wall_time_seconds";

/// Runs the preset and stamps every table with the config echo, the tool
/// version and the wall time.
pub fn run(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    config.check()?;
    let start = Instant::now();
    let mut out = match config.experiment {
        ExperimentKind::CoopRates => presets::coop_rates(config)?,
        ExperimentKind::FixedPoints => presets::fixed_points(config)?,
        ExperimentKind::PairwiseReplicator => presets::pairwise_replicator(config)?,
        ExperimentKind::AonFamily => presets::aon_family(config)?,
        ExperimentKind::ClassicsVsAdco => presets::classics_vs_adco(config)?,
        ExperimentKind::Mem1GridVsAdco => presets::mem1_grid_vs_adco(config)?,
        ExperimentKind::Validate => presets::validate(config)?,
    };
    let elapsed = start.elapsed().as_secs_f64();
    let echo = config.to_json();
    for t in &mut out.tables {
        let mut meta = vec![
            ("experiment".to_string(), config.experiment.to_string()),
            ("config".to_string(), echo.clone()),
            ("version".to_string(), env!("CARGO_PKG_VERSION").to_string()),
        ];
        meta.append(&mut t.metadata);
        meta.push((WALL_TIME_KEY.to_string(), format!("{elapsed:.3}")));
        t.metadata = meta;
    }
    Ok(out)
}

/// Default output path of a preset.
pub fn default_output(kind: ExperimentKind) -> PathBuf {
    PathBuf::from(format!("{}.csv", kind.name()))
}

/// Writes the primary table to `base` and the others next to it; returns
/// every path written.
pub fn write_output(out: &ExperimentOutput, base: &Path, json: bool) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for (i, t) in out.tables.iter().enumerate() {
        let name = (i > 0).then_some(t.name.as_str());
        let csv = table_path(base, name, "csv");
        t.write_csv(&csv)?;
        written.push(csv);
        if json {
            let path = table_path(base, name, "json");
            t.write_json(&path)?;
            written.push(path);
        }
    }
    Ok(written)
}
