use rayon::prelude::*;

use crate::dynamics::{
    agent_replicates, cooperation_level_weighted, embedded_chain, interior_fixed_point, mean_abundances,
    run_replicator, Convergence, FixedPointReport, PairStructure, ReplicatorOptions, SimConfig, Stability,
};
use crate::error::{Error, Result};
use crate::game::GameParams;
use crate::payoff::{adco_group_coop_rate, aon_group_coop_rate, payoff_matrix, payoff_matrix_cached, PayoffMatrix};
use crate::strategy::{Strategy, StrategySpec};
use crate::validation;

use super::config::{ExperimentConfig, IntSweep};
use super::roster::{build_mem1_grid, subsample_indices, CLASSICS};
use super::table::{Cell, ResultTable};

pub const REPLICATOR_OPPONENTS: [&str; 9] = [
    "ALLC",
    "ALLD",
    "TFT",
    "GTFT:q=0.2",
    "GTFT:q=0.5",
    "WSLS",
    "ZD:chi=3",
    "HardMajority",
    "CURE:delta=2",
];
pub const DEFAULT_ROSTER_ADCO: &str = "ADCO:K=3,t=2";
pub const DEFAULT_REPLICATOR_ADCO: &str = "ADCO:K=3,t=1";
pub const DEFAULT_VALIDATE_SEED: u64 = 2024;

/// Tables of one run; the first is the primary table.
#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub tables: Vec<ResultTable>,
    /// False only when a validation check failed.
    pub passed: bool,
}

fn parse_all(specs: &[String]) -> Result<Vec<StrategySpec>> {
    specs.iter().map(|s| s.parse()).collect()
}

fn build_all(specs: &[StrategySpec], params: &GameParams) -> Result<Vec<Strategy>> {
    specs.iter().map(|s| s.build(params)).collect()
}

fn needs_simulation(specs: &[StrategySpec]) -> bool {
    specs.iter().any(|s| matches!(s, StrategySpec::HardMajority | StrategySpec::Cure { .. }))
}

/// The seed, or a config error when the run is stochastic and none was
/// given.
fn seed_for(config: &ExperimentConfig, stochastic: bool, why: &str) -> Result<u64> {
    match (config.seed, stochastic) {
        (Some(s), _) => Ok(s),
        (None, false) => Ok(0),
        (None, true) => Err(Error::Config {
            path: "seed".into(),
            message: format!("a seed is required because this run uses {why}; pass --seed"),
        }),
    }
}

fn sweep_or(axis: &Option<IntSweep>, default: IntSweep) -> Vec<u32> {
    axis.as_ref().unwrap_or(&default).values()
}

fn stability_name(r: &FixedPointReport) -> &'static str {
    match r.stability {
        Some(Stability::Stable) => "stable",
        Some(Stability::Unstable) => "unstable",
        None => match r.structure {
            PairStructure::FirstDominates => "first-dominates",
            PairStructure::SecondDominates => "second-dominates",
            _ => "neutral",
        },
    }
}

fn convergence_name(c: Convergence) -> String {
    match c {
        Convergence::Zero => "0".into(),
        Convergence::One => "1".into(),
        Convergence::Interior(x) => format!("interior({x})"),
        Convergence::None => "none".into(),
    }
}

pub fn coop_rates(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let params = config.game_params()?;
    let ks = sweep_or(&config.sweep.k, IntSweep::range(1, 100));
    let ns = sweep_or(&config.sweep.n, IntSweep::List(vec![5]));
    let ts = sweep_or(&config.sweep.t, IntSweep::List(vec![1]));
    let eps = config.sweep.epsilon.clone().unwrap_or(vec![params.epsilon]);
    let mut table = ResultTable::new("coop-rates", &["epsilon", "N", "t", "K", "aon_coop_rate", "adco_coop_rate"]);
    for &e in &eps {
        for &n in &ns {
            for &t in &ts {
                for &k in &ks {
                    table.push(vec![
                        e.into(),
                        n.into(),
                        t.into(),
                        k.into(),
                        aon_group_coop_rate(k, n, e)?.into(),
                        adco_group_coop_rate(k, t, n, e)?.into(),
                    ]);
                }
            }
        }
    }
    Ok(ExperimentOutput {
        tables: vec![table],
        passed: true,
    })
}

pub fn fixed_points(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let params = config.game_params()?;
    let ks = sweep_or(&config.sweep.k, IntSweep::range(1, 20));
    let ts = sweep_or(&config.sweep.t, IntSweep::List(vec![2]));
    let eps = config.sweep.epsilon.clone().unwrap_or(vec![params.epsilon]);
    let opponent: StrategySpec = config.opponent.as_deref().unwrap_or("ALLD").parse()?;
    let seed = seed_for(config, needs_simulation(std::slice::from_ref(&opponent)), "a Monte Carlo opponent")?;
    let mc = config.monte_carlo();
    let mut points = Vec::new();
    for &e in &eps {
        for &t in &ts {
            points.extend(ks.iter().map(|&k| (e, t, k)));
        }
    }
    let rows: Vec<Vec<Cell>> = points
        .par_iter()
        .map(|&(e, t, k)| -> Result<Vec<Cell>> {
            let g = params.with_epsilon(e);
            let specs = [StrategySpec::Adco { k, t }, StrategySpec::Aon { k }, opponent.clone()];
            let m = payoff_matrix(&build_all(&specs, &g)?, &g, &mc, seed)?;
            let adco = interior_fixed_point(&m.pair_block(0, 2));
            let aon = interior_fixed_point(&m.pair_block(1, 2));
            let larger = match (adco.x_star, aon.x_star) {
                (Some(a), Some(b)) => Cell::from(a <= b),
                _ => Cell::Empty,
            };
            Ok(vec![
                e.into(),
                t.into(),
                k.into(),
                adco.x_star.into(),
                stability_name(&adco).into(),
                aon.x_star.into(),
                stability_name(&aon).into(),
                larger,
                m.payoff(0, 0).into(),
                m.payoff(0, 2).into(),
                m.payoff(2, 0).into(),
                m.payoff(1, 1).into(),
                m.payoff(1, 2).into(),
                m.payoff(2, 1).into(),
                m.payoff(2, 2).into(),
            ])
        })
        .collect::<Result<_>>()?;
    let mut table = ResultTable::new(
        "fixed-points",
        &[
            "epsilon",
            "t",
            "K",
            "adco_x_star",
            "adco_stability",
            "aon_x_star",
            "aon_stability",
            "adco_basin_larger",
            "pi_adco_adco",
            "pi_adco_opponent",
            "pi_opponent_adco",
            "pi_aon_aon",
            "pi_aon_opponent",
            "pi_opponent_aon",
            "pi_opponent_opponent",
        ],
    );
    table.meta("opponent", opponent);
    rows.into_iter().for_each(|r| table.push(r));
    Ok(ExperimentOutput {
        tables: vec![table],
        passed: true,
    })
}

pub fn pairwise_replicator(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let params = config.game_params()?;
    let focal: Vec<StrategySpec> = match &config.adco {
        Some(s) => vec![s.parse()?],
        None if config.sweep.k.is_some() || config.sweep.t.is_some() => {
            let ks = sweep_or(&config.sweep.k, IntSweep::List(vec![3]));
            let ts = sweep_or(&config.sweep.t, IntSweep::List(vec![1]));
            ks.iter()
                .flat_map(|&k| ts.iter().map(move |&t| StrategySpec::Adco { k, t }))
                .collect()
        }
        None => vec![DEFAULT_REPLICATOR_ADCO.parse()?],
    };
    let opponents = match &config.strategies {
        Some(v) => parse_all(v)?,
        None => parse_all(&REPLICATOR_OPPONENTS.map(String::from))?,
    };
    let all: Vec<StrategySpec> = focal.iter().chain(&opponents).cloned().collect();
    let seed = seed_for(config, needs_simulation(&all), "Monte Carlo payoffs")?;
    let strategies = build_all(&all, &params)?;
    let m = payoff_matrix_cached(&strategies, &params, &config.monte_carlo(), seed, config.cache.as_deref())?;
    let x0 = config.x0.unwrap_or(0.5);
    let opts = ReplicatorOptions {
        record_every: config.dynamics.record_every.max(1) as usize,
        ..ReplicatorOptions::default()
    };
    let mut summary = ResultTable::new(
        "pairwise-replicator",
        &[
            "focal",
            "opponent",
            "pi_focal_focal",
            "pi_focal_opponent",
            "pi_opponent_focal",
            "pi_opponent_opponent",
            "x_star",
            "structure",
            "converged_to",
            "final_focal_share",
            "generations",
        ],
    );
    let mut traj = ResultTable::new("trajectories", &["focal", "opponent", "generation", "focal_share", "opponent_share"]);
    summary.meta("x0", x0);
    traj.meta("x0", x0);
    for f in 0..focal.len() {
        for o in focal.len()..all.len() {
            let block = m.pair_block(f, o);
            let fp = interior_fixed_point(&block);
            let run = run_replicator(x0, &block, opts)?;
            summary.push(vec![
                m.labels[f].clone().into(),
                m.labels[o].clone().into(),
                block[0][0].into(),
                block[0][1].into(),
                block[1][0].into(),
                block[1][1].into(),
                fp.x_star.into(),
                format!("{:?}", fp.structure).to_lowercase().into(),
                convergence_name(run.converged_to).into(),
                run.final_share().into(),
                run.generations.into(),
            ]);
            for &(g, x) in &run.x {
                traj.push(vec![
                    m.labels[f].clone().into(),
                    m.labels[o].clone().into(),
                    g.into(),
                    x.into(),
                    (1.0 - x).into(),
                ]);
            }
        }
    }
    Ok(ExperimentOutput {
        tables: vec![summary, traj],
        passed: true,
    })
}

/// One embedded-chain (and optionally agent-based) evaluation.
struct Scenario {
    name: &'static str,
    indices: Vec<usize>,
}

fn abundance_tables(
    config: &ExperimentConfig,
    matrix: &PayoffMatrix,
    scenarios: &[Scenario],
    seed: u64,
) -> Result<Vec<ResultTable>> {
    let d = &config.dynamics;
    let agent = d.steps > 0;
    let mut columns = vec!["scenario", "strategy", "abundance", "self_coop_rate"];
    let mut summary_columns = vec!["scenario", "strategies", "most_abundant", "max_abundance", "cooperation_level"];
    if agent {
        columns.push("agent_abundance");
        summary_columns.extend(["agent_most_abundant", "agent_max_abundance", "agent_cooperation_level"]);
    }
    let mut main = ResultTable::new("abundance", &columns);
    let mut summary = ResultTable::new("summary", &summary_columns);
    for t in [&mut main, &mut summary] {
        t.meta("M", d.population);
        t.meta("beta", d.beta);
        t.meta("weighting", format!("{:?}", d.weighting));
    }
    for sc in scenarios {
        let m = matrix.subset(&sc.indices);
        let chain = embedded_chain(&m, d.population, d.beta)?;
        let dist = chain.distribution(&m, d.weighting);
        let best = dist.argmax();
        let agent_abundances = if agent {
            let cfg = SimConfig {
                population: d.population,
                beta: d.beta,
                mu: d.mu,
                steps: d.steps,
                seed,
                initial_counts: None,
                record_every: 0,
            };
            Some(mean_abundances(&agent_replicates(&cfg, &m, d.replicates)?))
        } else {
            None
        };
        let coop = m.self_coop();
        for i in 0..m.len() {
            let mut row: Vec<Cell> = vec![
                sc.name.into(),
                m.labels[i].clone().into(),
                dist.abundances[i].into(),
                coop[i].into(),
            ];
            if let Some(a) = &agent_abundances {
                row.push(a[i].into());
            }
            main.push(row);
        }
        let mut row: Vec<Cell> = vec![
            sc.name.into(),
            m.len().into(),
            m.labels[best].clone().into(),
            dist.abundances[best].into(),
            dist.cooperation_level.into(),
        ];
        if let Some(a) = &agent_abundances {
            let ab = a
                .iter()
                .enumerate()
                .fold(0, |b, (i, &v)| if v > a[b] { i } else { b });
            row.push(m.labels[ab].clone().into());
            row.push(a[ab].into());
            row.push(cooperation_level_weighted(a, &m, d.weighting).into());
        }
        summary.push(row);
    }
    Ok(vec![main, summary])
}

pub fn aon_family(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let params = config.game_params()?;
    let ks = sweep_or(&config.sweep.k, IntSweep::range(1, 50));
    let mut specs: Vec<StrategySpec> = ks.iter().map(|&k| StrategySpec::Aon { k }).collect();
    if let Some(extra) = &config.strategies {
        specs.extend(parse_all(extra)?);
    }
    let seed = seed_for(
        config,
        needs_simulation(&specs) || config.dynamics.steps > 0,
        "Monte Carlo payoffs or agent-based simulation",
    )?;
    let m = payoff_matrix_cached(&build_all(&specs, &params)?, &params, &config.monte_carlo(), seed, config.cache.as_deref())?;
    let scenarios = [Scenario {
        name: "aon-family",
        indices: (0..m.len()).collect(),
    }];
    Ok(ExperimentOutput {
        tables: abundance_tables(config, &m, &scenarios, seed)?,
        passed: true,
    })
}

fn with_and_without_adco(config: &ExperimentConfig, roster: Vec<StrategySpec>) -> Result<ExperimentOutput> {
    let params = config.game_params()?;
    let adco: StrategySpec = config.adco.as_deref().unwrap_or(DEFAULT_ROSTER_ADCO).parse()?;
    let n = roster.len();
    let mut specs = roster;
    specs.push(adco);
    let seed = seed_for(
        config,
        needs_simulation(&specs) || config.dynamics.steps > 0,
        "Monte Carlo payoffs or agent-based simulation",
    )?;
    let m = payoff_matrix_cached(&build_all(&specs, &params)?, &params, &config.monte_carlo(), seed, config.cache.as_deref())?;
    let scenarios = [
        Scenario {
            name: "without-adco",
            indices: (0..n).collect(),
        },
        Scenario {
            name: "with-adco",
            indices: (0..=n).collect(),
        },
    ];
    Ok(ExperimentOutput {
        tables: abundance_tables(config, &m, &scenarios, seed)?,
        passed: true,
    })
}

pub fn classics_vs_adco(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let roster = match &config.strategies {
        Some(v) => parse_all(v)?,
        None => parse_all(&CLASSICS.map(String::from))?,
    };
    with_and_without_adco(config, roster)
}

pub fn mem1_grid_vs_adco(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let grid = build_mem1_grid();
    let roster = subsample_indices(grid.len(), config.subsample)
        .into_iter()
        .map(|i| StrategySpec::Memory1(grid[i]))
        .collect();
    with_and_without_adco(config, roster)
}

pub fn validate(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let seed = config.seed.unwrap_or(DEFAULT_VALIDATE_SEED);
    let report = validation::run_suite(seed);
    let mut table = ResultTable::new("validate", &["check", "passed", "detail"]);
    table.meta("seed", seed);
    for c in &report.checks {
        table.push(vec![c.name.clone().into(), c.passed.into(), c.detail.clone().into()]);
    }
    Ok(ExperimentOutput {
        tables: vec![table],
        passed: report.passed(),
    })
}
