use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use reciprocity::experiment::{self, default_output, ExperimentConfig, ExperimentKind, ExperimentOutput};
use reciprocity::strategy::CATALOG_EXAMPLES;
use reciprocity::Error;

const EXIT_VALIDATION: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_RESOURCE: u8 = 3;

#[derive(Parser)]
#[command(name = "reciprocity", version, about = "All-or-None and adaptive coordination strategies in the noisy repeated prisoner's dilemma")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config.
    Run {
        config: PathBuf,
        /// Master seed; required when the run uses Monte Carlo payoffs or
        /// agent-based simulation.
        #[arg(long)]
        seed: Option<u64>,
        /// Primary output CSV; other tables are written next to it.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Keep this many memory-1 grid strategies (evenly spaced).
        #[arg(long)]
        subsample: Option<usize>,
        /// Payoff-matrix cache file.
        #[arg(long)]
        cache: Option<PathBuf>,
        /// Also write a JSON mirror of every table.
        #[arg(long)]
        json: bool,
    },
    /// Triangulate closed forms, chains and simulation; nonzero exit on any
    /// failure.
    Validate {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// List strategy spec strings and experiment presets.
    ListStrategies,
}

fn exit_code(e: &Error) -> u8 {
    if e.is_resource() || matches!(e, Error::Io { .. }) {
        EXIT_RESOURCE
    } else {
        EXIT_CONFIG
    }
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    if e.is_resource() {
        eprintln!("hint: reduce the problem size (fewer or smaller strategies, --subsample) or raise the limit");
    }
    ExitCode::from(exit_code(e))
}

/// Runs the preset, writes its tables and reports; `write_default` writes to
/// the preset's default path when no output is configured.
fn execute(config: &ExperimentConfig, write_default: bool) -> ExitCode {
    let out: ExperimentOutput = match experiment::run(config) {
        Ok(o) => o,
        Err(e) => return fail(&e),
    };
    let base = match (&config.output, write_default) {
        (Some(p), _) => Some(p.clone()),
        (None, true) => Some(default_output(config.experiment)),
        (None, false) => None,
    };
    if let Some(base) = base {
        match experiment::write_output(&out, &base, config.json) {
            Ok(paths) => {
                for p in paths {
                    println!("wrote {}", p.display());
                }
            }
            Err(e) => return fail(&e),
        }
    }
    if config.experiment == ExperimentKind::Validate {
        let t = &out.tables[0];
        for row in &t.rows {
            let passed = row[1].as_str() == Some("true");
            println!(
                "{} {}: {}",
                if passed { "PASS" } else { "FAIL" },
                row[0].as_str().unwrap_or(""),
                row[2].as_str().unwrap_or("")
            );
        }
    }
    if out.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_VALIDATION)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            config,
            seed,
            output,
            subsample,
            cache,
            json,
        } => {
            let mut cfg = match ExperimentConfig::from_file(&config) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(EXIT_CONFIG);
                }
            };
            cfg.seed = seed.or(cfg.seed);
            cfg.output = output.or(cfg.output);
            cfg.subsample = subsample.or(cfg.subsample);
            cfg.cache = cache.or(cfg.cache);
            cfg.json |= json;
            execute(&cfg, true)
        }
        Command::Validate { seed, output, json } => {
            let mut cfg = ExperimentConfig::new(ExperimentKind::Validate);
            cfg.seed = seed;
            cfg.output = output;
            cfg.json = json;
            execute(&cfg, false)
        }
        Command::ListStrategies => {
            println!("strategies:");
            for (spec, description) in CATALOG_EXAMPLES {
                println!("  {spec:<16} {description}");
            }
            println!("experiments:");
            for kind in ExperimentKind::ALL {
                println!("  {kind}");
            }
            ExitCode::SUCCESS
        }
    }
}
