//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use reciprocity::dynamics::{
    agent_replicates, embedded_chain, fixation_probability_block, interior_fixed_point, mean_abundances, SimConfig,
    Stability,
};
use reciprocity::experiment::{self, classics_roster, Cell, ExperimentConfig, ExperimentKind, ResultTable};
use reciprocity::game::{Action, GameParams, OutcomePair};
use reciprocity::payoff::{
    adco_group_coop_rate, aon_group_coop_rate, aon_self_payoff, automaton_pair_payoff, group_shared_state_chain,
    monte_carlo_group_coop_rate, payoff_matrix, MonteCarloSettings,
};
use reciprocity::strategy::{catalog, AdcoStrategy, AonStrategy, Memory1, Strategy, StrategyAutomaton};
use reciprocity::Result;

const SEED: u64 = 20_240_601;

type Verdict = Result<(bool, String)>;

struct Criterion {
    id: u32,
    name: &'static str,
    budget_seconds: f64,
    run: fn() -> Verdict,
}

fn automaton(spec: &str, g: &GameParams) -> StrategyAutomaton {
    catalog(spec, g).unwrap().as_automaton().cloned().unwrap()
}

fn summary_row<'a>(t: &'a ResultTable, scenario: &str) -> &'a [Cell] {
    let c = t.column("scenario").unwrap();
    t.rows.iter().find(|r| r[c].as_str() == Some(scenario)).unwrap()
}

fn cell<'a>(t: &ResultTable, row: &'a [Cell], column: &str) -> &'a Cell {
    &row[t.column(column).unwrap()]
}

fn abundance(t: &ResultTable, scenario: &str, strategy: &str) -> f64 {
    let (s, k, a) = (t.column("scenario").unwrap(), t.column("strategy").unwrap(), t.column("abundance").unwrap());
    t.rows
        .iter()
        .find(|r| r[s].as_str() == Some(scenario) && r[k].as_str() == Some(strategy))
        .and_then(|r| r[a].as_f64())
        .unwrap()
}

fn closed_form_triangulation() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let tuples: Vec<(u32, u32, u32, f64)> = (0..50)
        .map(|_| {
            let k = rng.gen_range(1..=50);
            let t = rng.gen_range(1..=10);
            let n = rng.gen_range(2..=20);
            let eps = 10f64.powf(rng.gen_range((1e-4f64).log10()..=(0.3f64).log10()));
            (k, t, n, eps)
        })
        .collect();
    let settings = MonteCarloSettings::default();
    let rows: Vec<(f64, f64)> = tuples
        .par_iter()
        .enumerate()
        .map(|(i, &(k, t, n, eps))| -> Result<(f64, f64)> {
            let aon = AonStrategy::new(k)?;
            let adco = AdcoStrategy::new(k, t)?;
            let eq2 = aon_group_coop_rate(k, n, eps)?;
            let eq3 = adco_group_coop_rate(k, t, n, eps)?;
            let chain_gap = (eq2 - group_shared_state_chain(&aon, n, eps)?.coop_rate)
                .abs()
                .max((eq3 - group_shared_state_chain(&adco, n, eps)?.coop_rate).abs());
            let seed = SEED.wrapping_add(2 * i as u64);
            let mc2 = monte_carlo_group_coop_rate(&aon, n, eps, &settings, seed)?;
            let mc3 = monte_carlo_group_coop_rate(&adco, n, eps, &settings, seed + 1)?;
            let z = ((mc2.mean - eq2).abs() / mc2.std_error.max(1e-15))
                .max((mc3.mean - eq3).abs() / mc3.std_error.max(1e-15));
            Ok((chain_gap, z))
        })
        .collect::<Result<_>>()?;
    let chain_gap = rows.iter().map(|r| r.0).fold(0.0, f64::max);
    let worst_z = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    let outside = rows.iter().filter(|r| r.1 > 3.0).count();
    Ok((
        chain_gap < 1e-10 && outside == 0,
        format!(
            "50 tuples; max |closed - chain| = {chain_gap:.2e}; Monte Carlo worst {worst_z:.2} SE, {outside} of 100 beyond 3 SE"
        ),
    ))
}

fn self_payoff_equivalence() -> Verdict {
    let mut worst: f64 = 0.0;
    for eps in [1e-3, 1e-2] {
        let g = GameParams::axelrod(eps);
        for k in 1..=30 {
            let a = AonStrategy::new(k)?.to_automaton();
            let chain = automaton_pair_payoff(&a, &a, &g)?;
            worst = worst.max((chain.payoff_a - aon_self_payoff(k, &g)?).abs());
        }
    }
    Ok((worst < 1e-10, format!("K = 1..30, eps in {{1e-3, 1e-2}}, max deviation {worst:.2e}")))
}

fn trivial_limits() -> Verdict {
    let mut worst: f64 = 0.0;
    for (eps, rate, payoff) in [(0.0, 1.0, 3.0), (0.5, 0.5, 2.25)] {
        let g = GameParams::axelrod(eps);
        for k in [1, 2, 5, 20] {
            for n in [2, 3, 10] {
                worst = worst
                    .max((aon_group_coop_rate(k, n, eps)? - rate).abs())
                    .max((adco_group_coop_rate(k, 2, n, eps)? - rate).abs());
            }
            let a = AonStrategy::new(k)?.to_automaton();
            let d = AdcoStrategy::new(k, 2)?.to_automaton();
            worst = worst
                .max((aon_self_payoff(k, &g)? - payoff).abs())
                .max((automaton_pair_payoff(&a, &a, &g)?.payoff_a - payoff).abs())
                .max((automaton_pair_payoff(&d, &d, &g)?.payoff_a - payoff).abs());
        }
    }
    let g = GameParams::axelrod(0.01);
    let m = payoff_matrix(&build(&reciprocity::experiment::CLASSICS, &g)?, &g, &MonteCarloSettings::default(), 0)?;
    let mut rho_gap: f64 = 0.0;
    for pop in [2usize, 10, 100] {
        for i in 0..m.len() {
            for j in 0..m.len() {
                let rho = fixation_probability_block(&m.pair_block(i, j), pop, 0.0)?;
                rho_gap = rho_gap.max((rho - 1.0 / pop as f64).abs());
            }
        }
    }
    Ok((
        worst < 1e-12 && rho_gap < 1e-12,
        format!("rates and self-payoffs at eps in {{0, 0.5}} off by {worst:.1e}; beta = 0 fixation off 1/M by {rho_gap:.1e}"),
    ))
}

fn build(specs: &[&str], g: &GameParams) -> Result<Vec<Strategy>> {
    specs.iter().map(|s| catalog(s, g)).collect()
}

fn wsls_bisimulation() -> Verdict {
    let g = GameParams::axelrod(0.01);
    let wsls = automaton("WSLS", &g);
    let aon1 = automaton("AoN:K=1", &g);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let action = |rng: &mut ChaCha8Rng| if rng.gen() { Action::Cooperate } else { Action::Defect };
    let mut mismatched = 0;
    for _ in 0..10_000 {
        let history: Vec<OutcomePair> = (0..100)
            .map(|_| OutcomePair::new(action(&mut rng), action(&mut rng)))
            .collect();
        if wsls.intents_along(&history) != aon1.intents_along(&history) {
            mismatched += 1;
        }
    }
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let opp = Memory1::new([rng.gen(), rng.gen(), rng.gen(), rng.gen()])?.to_automaton();
        let a = automaton_pair_payoff(&wsls, &opp, &g)?;
        let b = automaton_pair_payoff(&aon1, &opp, &g)?;
        worst = worst
            .max((a.payoff_a - b.payoff_a).abs())
            .max((a.payoff_b - b.payoff_b).abs());
    }
    Ok((
        mismatched == 0 && worst < 1e-12,
        format!("{mismatched} of 10^4 histories differ; 20 memory-1 opponents, max payoff gap {worst:.1e}"),
    ))
}

fn aon_family_peak() -> Verdict {
    let out = experiment::run(&ExperimentConfig::new(ExperimentKind::AonFamily))?;
    let t = &out.tables[0];
    let a = |k: u32| abundance(t, "aon-family", &format!("AoN:K={k}"));
    let (best_k, best) = (1..=50).map(|k| (k, a(k))).fold((0, -1.0), |b, x| if x.1 > b.1 { x } else { b });
    Ok((
        (8..=30).contains(&best_k) && best > a(1) && best > a(50),
        format!("argmax AoN_{best_k} at {best:.4} (reference peak AoN_16); AoN_1 {:.2e}, AoN_50 {:.4}", a(1), a(50)),
    ))
}

fn classics_with_adco() -> Verdict {
    let out = experiment::run(&ExperimentConfig::new(ExperimentKind::ClassicsVsAdco))?;
    let (main, summary) = (&out.tables[0], &out.tables[1]);
    let without = summary_row(summary, "without-adco");
    let top = cell(summary, without, "most_abundant").as_str().unwrap_or("").to_string();
    let top_share = cell(summary, without, "max_abundance").as_f64().unwrap();
    let coop_without = cell(summary, without, "cooperation_level").as_f64().unwrap();
    let with = summary_row(summary, "with-adco");
    let adco = abundance(main, "with-adco", experiment::DEFAULT_ROSTER_ADCO);
    let coop = cell(summary, with, "cooperation_level").as_f64().unwrap();
    Ok((
        top == "GTFT:q=0.2" && (0.35..=0.60).contains(&top_share) && adco > 0.95 && coop > 0.95,
        format!(
            "without ADCO: {top} at {top_share:.4} (reference 46.8%), cooperation {coop_without:.3}; with ADCO: abundance {adco:.4}, cooperation {coop:.4}"
        ),
    ))
}

fn grid_with_adco() -> Verdict {
    let dir = tempfile::tempdir().expect("temporary directory");
    let mut cfg = ExperimentConfig::new(ExperimentKind::Mem1GridVsAdco);
    cfg.cache = Some(dir.path().join("grid-payoffs.csv"));
    let start = Instant::now();
    let out = experiment::run(&cfg)?;
    let cold = start.elapsed().as_secs_f64();
    let start = Instant::now();
    let again = experiment::run(&cfg)?;
    let warm = start.elapsed().as_secs_f64();
    let (main, summary) = (&out.tables[0], &out.tables[1]);
    let without = summary_row(summary, "without-adco");
    let top = cell(summary, without, "most_abundant").as_str().unwrap_or("").to_string();
    let share = cell(summary, without, "max_abundance").as_f64().unwrap();
    let p: Vec<f64> = top
        .trim_start_matches("M1:")
        .split(',')
        .filter_map(|v| v.parse().ok())
        .collect();
    let wsls_like = p.len() == 4 && p[0] == 1.0 && p[1] == 0.0 && p[2] == 0.0 && p[3] >= 0.6;
    let adco = abundance(main, "with-adco", experiment::DEFAULT_ROSTER_ADCO);
    let cached_same = again.tables[0].rows == out.tables[0].rows;
    Ok((
        wsls_like && (0.05..=0.20).contains(&share) && adco > 0.99 && cached_same,
        format!(
            "without ADCO: {top} at {share:.4} (reference [1,0,0,0.6] at 11.5%); with ADCO: {adco:.4}; cold {cold:.1}s, cached {warm:.1}s, identical {cached_same}"
        ),
    ))
}

fn fixed_points_against_alld() -> Verdict {
    let g = GameParams::axelrod(0.001);
    let mut ok = true;
    let mut parts = Vec::new();
    for k in [2u32, 5, 10] {
        let specs = [format!("ADCO:K={k},t=2"), format!("AoN:K={k}"), "ALLD".to_string()];
        let strategies = specs.iter().map(|s| catalog(s, &g)).collect::<Result<Vec<_>>>()?;
        let m = payoff_matrix(&strategies, &g, &MonteCarloSettings::default(), 0)?;
        let adco = interior_fixed_point(&m.pair_block(0, 2));
        let aon = interior_fixed_point(&m.pair_block(1, 2));
        let unstable = adco.stability == Some(Stability::Unstable) && aon.stability == Some(Stability::Unstable);
        match (adco.x_star, aon.x_star) {
            (Some(a), Some(b)) => {
                ok &= unstable && a <= b;
                parts.push(format!("K={k}: {a:.4} vs {b:.4}"));
            }
            _ => {
                ok = false;
                parts.push(format!("K={k}: missing fixed point"));
            }
        }
    }
    Ok((ok, format!("x*(ADCO) vs x*(AoN) against ALLD, all unstable: {}", parts.join(", "))))
}

fn replicator_fixation() -> Verdict {
    let mut cfg = ExperimentConfig::new(ExperimentKind::PairwiseReplicator);
    cfg.seed = Some(SEED);
    let out = experiment::run(&cfg)?;
    let t = &out.tables[0];
    let (o, c) = (t.column("opponent").unwrap(), t.column("converged_to").unwrap());
    let mut ok = true;
    let mut cure = String::new();
    let mut failed = Vec::new();
    for row in &t.rows {
        let opponent = row[o].as_str().unwrap_or("");
        let to = row[c].as_str().unwrap_or("");
        if opponent.starts_with("CURE") {
            cure = format!("{opponent} -> {to} (not gated)");
        } else if to != "1" {
            ok = false;
            failed.push(format!("{opponent} -> {to}"));
        }
    }
    let gated = t.rows.len() - 1;
    Ok((
        ok && gated == 8,
        if failed.is_empty() {
            format!("ADCO(3,1) fixes against all {gated} gated opponents; {cure}")
        } else {
            format!("no fixation against {}; {cure}", failed.join(", "))
        },
    ))
}

fn agent_vs_chain() -> Verdict {
    let g = GameParams::axelrod(0.01);
    let strategies = classics_roster().iter().map(|s| s.build(&g)).collect::<Result<Vec<_>>>()?;
    let m = payoff_matrix(&strategies, &g, &MonteCarloSettings::default(), 0)?;
    let chain = embedded_chain(&m, 100, 1.0)?;
    let cfg = SimConfig::new(100, 1.0, 1e-3, 100_000_000, SEED);
    let agent = mean_abundances(&agent_replicates(&cfg, &m, 10)?);
    let (worst_i, worst) = agent
        .iter()
        .zip(&chain.abundances)
        .map(|(a, b)| (a - b).abs())
        .enumerate()
        .fold((0, 0.0), |b, x| if x.1 > b.1 { x } else { b });
    Ok((
        worst <= 0.05,
        format!("10 seeds x 10^8 steps; max |agent - chain| = {worst:.4} at {}", m.labels[worst_i]),
    ))
}

fn property_suite() -> Verdict {
    let report = reciprocity::validation::run_suite(experiment::DEFAULT_VALIDATE_SEED);
    let failed: Vec<String> = report.failures().iter().map(|c| format!("{}: {}", c.name, c.detail)).collect();
    Ok((
        report.passed(),
        if failed.is_empty() {
            format!("{} checks passed", report.checks.len())
        } else {
            failed.join("; ")
        },
    ))
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: 1, name: "closed-form triangulation", budget_seconds: 300.0, run: closed_form_triangulation },
        Criterion { id: 2, name: "AoN self-payoff equivalence", budget_seconds: 60.0, run: self_payoff_equivalence },
        Criterion { id: 3, name: "trivial limits", budget_seconds: 60.0, run: trivial_limits },
        Criterion { id: 4, name: "WSLS = AoN_1", budget_seconds: 60.0, run: wsls_bisimulation },
        Criterion { id: 5, name: "AoN family abundance peak", budget_seconds: 600.0, run: aon_family_peak },
        Criterion { id: 6, name: "classics with and without ADCO", budget_seconds: 600.0, run: classics_with_adco },
        Criterion { id: 7, name: "memory-1 grid with and without ADCO", budget_seconds: 7200.0, run: grid_with_adco },
        Criterion { id: 8, name: "fixed points against ALLD", budget_seconds: 60.0, run: fixed_points_against_alld },
        Criterion { id: 9, name: "pairwise replicator fixation", budget_seconds: 300.0, run: replicator_fixation },
        Criterion { id: 10, name: "agent-based vs embedded chain", budget_seconds: 1800.0, run: agent_vs_chain },
        Criterion { id: 11, name: "property suite", budget_seconds: 600.0, run: property_suite },
    ];
    let mut failures = 0;
    for c in &criteria {
        let start = Instant::now();
        let verdict = catch_unwind(AssertUnwindSafe(c.run));
        let seconds = start.elapsed().as_secs_f64();
        let (passed, detail) = match verdict {
            Ok(Ok(v)) => v,
            Ok(Err(e)) => (false, format!("error: {e}")),
            Err(_) => (false, "panicked".to_string()),
        };
        let in_time = seconds <= c.budget_seconds;
        let passed = passed && in_time;
        if !passed {
            failures += 1;
        }
        println!(
            "{} criterion {} ({}): {detail} [{seconds:.1}s, budget {:.0}s]",
            if passed { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            c.budget_seconds
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
