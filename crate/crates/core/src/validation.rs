//! Self-test suite: closed forms against chains against simulation, plus
//! the structural properties every computed table must satisfy.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{
    agent_simulation, embedded_chain, fixation_probability_block, replicator_step, shifted_payoffs, SimConfig,
};
use crate::error::Result;
use crate::game::{Action, GameParams, OutcomePair};
use crate::payoff::{
    adco_group_coop_rate, aon_group_coop_rate, aon_self_payoff, automaton_pair_payoff, build_product_chain,
    group_shared_state_chain, monte_carlo_group_coop_rate, monte_carlo_payoff, payoff_matrix, MonteCarloSettings,
};
use crate::strategy::{catalog, AdcoStrategy, AonStrategy, Memory1, Strategy, StrategyAutomaton};

/// Standard errors allowed between simulation and exact values.
pub const MC_SIGMAS: f64 = 4.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

type Outcome = Result<(bool, String)>;

fn timed(name: &str, f: impl FnOnce() -> Outcome) -> Check {
    let start = Instant::now();
    let (passed, detail) = match f() {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    Check {
        name: name.to_string(),
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn random_memory1(rng: &mut ChaCha8Rng) -> Memory1 {
    Memory1::new([rng.gen(), rng.gen(), rng.gen(), rng.gen()]).expect("unit interval")
}

fn automaton(spec: &str, g: &GameParams) -> StrategyAutomaton {
    catalog(spec, g)
        .ok()
        .and_then(|s| s.as_automaton().cloned())
        .expect("catalog automaton")
}

/// Automata used by the structural checks: catalog entries, coordination
/// strategies and random memory-1 vectors.
fn sample_automata(rng: &mut ChaCha8Rng, g: &GameParams) -> Vec<StrategyAutomaton> {
    let mut v: Vec<StrategyAutomaton> = [
        "ALLC", "ALLD", "RANDOM", "TFT", "GTFT:q=0.2", "WSLS", "GRIM", "ZD:chi=2", "ZD:chi=4", "AoN:K=1", "AoN:K=7",
        "ADCO:K=3,t=2", "ADCO:K=10,t=4",
    ]
    .iter()
    .map(|s| automaton(s, g))
    .collect();
    v.extend((0..7).map(|_| random_memory1(rng).to_automaton()));
    v
}

fn closed_form_vs_chain(rng: &mut ChaCha8Rng) -> Outcome {
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let k = rng.gen_range(1..=50);
        let t = rng.gen_range(1..=10);
        let n = rng.gen_range(2..=20);
        let eps = 10f64.powf(rng.gen_range(-4.0..(0.3f64).log10()));
        let aon = group_shared_state_chain(&AonStrategy::new(k)?, n, eps)?.coop_rate;
        let adco = group_shared_state_chain(&AdcoStrategy::new(k, t)?, n, eps)?.coop_rate;
        worst = worst
            .max((aon - aon_group_coop_rate(k, n, eps)?).abs())
            .max((adco - adco_group_coop_rate(k, t, n, eps)?).abs());
    }
    Ok((worst < 1e-10, format!("200 (K,t,N,eps) tuples, max |closed - chain| = {worst:.2e}")))
}

fn self_payoff_vs_product_chain() -> Outcome {
    let mut worst: f64 = 0.0;
    for eps in [1e-3, 1e-2, 0.1] {
        let g = GameParams::axelrod(eps);
        for k in 1..=30 {
            let a = AonStrategy::new(k)?.to_automaton();
            let chain = automaton_pair_payoff(&a, &a, &g)?;
            worst = worst.max((chain.payoff_a - aon_self_payoff(k, &g)?).abs());
        }
    }
    Ok((worst < 1e-10, format!("K = 1..30, 3 error rates, max |closed - chain| = {worst:.2e}")))
}

fn simulation_vs_exact(seed: u64) -> Outcome {
    let settings = MonteCarloSettings::with_rounds(1_000_000);
    let mut worst: f64 = 0.0;
    let cases = [(5u32, 1u32, 5u32, 0.01), (3, 2, 2, 0.05), (10, 3, 10, 0.001)];
    for (i, &(k, t, n, eps)) in cases.iter().enumerate() {
        let adco = AdcoStrategy::new(k, t)?;
        let est = monte_carlo_group_coop_rate(&adco, n, eps, &settings, seed.wrapping_add(i as u64))?;
        let exact = adco_group_coop_rate(k, t, n, eps)?;
        worst = worst.max((est.mean - exact).abs() / est.std_error.max(1e-12));
    }
    let g = GameParams::axelrod(0.01);
    let pairs = [("ADCO:K=3,t=2", "WSLS"), ("AoN:K=3", "AoN:K=5"), ("GTFT:q=0.2", "ZD:chi=2")];
    for (i, (a, b)) in pairs.iter().enumerate() {
        let (sa, sb) = (catalog(a, &g)?, catalog(b, &g)?);
        let exact = automaton_pair_payoff(sa.as_automaton().unwrap(), sb.as_automaton().unwrap(), &g)?;
        let mc = monte_carlo_payoff(&sa, &sb, &g, &settings, seed.wrapping_add(100 + i as u64))?;
        worst = worst
            .max((mc.payoff_a.mean - exact.payoff_a).abs() / mc.payoff_a.std_error.max(1e-12))
            .max((mc.payoff_b.mean - exact.payoff_b).abs() / mc.payoff_b.std_error.max(1e-12));
    }
    Ok((
        worst < MC_SIGMAS,
        format!("6 simulations of 10^6 rounds, worst deviation {worst:.2} standard errors"),
    ))
}

fn chains_are_stochastic(rng: &mut ChaCha8Rng) -> Outcome {
    let mut worst_row: f64 = 0.0;
    let mut worst_residual: f64 = 0.0;
    let mut chains = 0;
    for eps in [1e-3, 0.05] {
        let g = GameParams::axelrod(eps);
        let autos = sample_automata(rng, &g);
        for a in &autos {
            for b in &autos {
                let chain = build_product_chain(a, b, &g)?;
                let pi = chain.stationary()?;
                worst_row = worst_row.max(chain.chain().max_row_sum_deviation());
                worst_residual = worst_residual.max(pi.residual);
                chains += 1;
            }
        }
        for (k, t, n) in [(5, 1, 5), (20, 4, 12), (50, 10, 20)] {
            let gc = group_shared_state_chain(&AdcoStrategy::new(k, t)?, n, eps)?;
            worst_row = worst_row.max(gc.chain.max_row_sum_deviation());
            worst_residual = worst_residual.max(gc.stationary.residual);
            chains += 1;
        }
    }
    let g = GameParams::axelrod(0.01);
    let strategies: Vec<Strategy> = sample_automata(rng, &g).into_iter().map(Strategy::Automaton).collect();
    let m = payoff_matrix(&strategies, &g, &MonteCarloSettings::default(), 0)?;
    let e = embedded_chain(&m, 100, 1.0)?;
    worst_row = worst_row.max(e.max_row_sum_deviation());
    worst_residual = worst_residual.max(e.residual);
    chains += 1;
    Ok((
        worst_row < 1e-12 && worst_residual < 1e-10,
        format!("{chains} chains, max row-sum deviation {worst_row:.2e}, max residual {worst_residual:.2e}"),
    ))
}

fn payoffs_in_range(rng: &mut ChaCha8Rng, seed: u64) -> Outcome {
    let g = GameParams::axelrod(0.02);
    let mut strategies: Vec<Strategy> = sample_automata(rng, &g).into_iter().map(Strategy::Automaton).collect();
    strategies.push(catalog("HardMajority", &g)?);
    strategies.push(catalog("CURE:delta=2", &g)?);
    let m = payoff_matrix(&strategies, &g, &MonteCarloSettings::with_rounds(20_000), seed)?;
    let (s, t) = g.payoff_range();
    let mut bad = 0;
    for i in 0..m.len() {
        for j in 0..m.len() {
            let p = m.payoff(i, j);
            let c = m.coop[i][j];
            if !(p >= s && p <= t) || !(0.0..=1.0).contains(&c) {
                bad += 1;
            }
        }
    }
    Ok((bad == 0, format!("{} entries, {bad} outside [S, T] or [0, 1]", m.len() * m.len())))
}

fn exchange_symmetry(rng: &mut ChaCha8Rng) -> Outcome {
    let g = GameParams::axelrod(0.01);
    let autos = sample_automata(rng, &g);
    let mut worst: f64 = 0.0;
    for a in &autos {
        for b in &autos {
            let ab = automaton_pair_payoff(a, b, &g)?;
            let ba = automaton_pair_payoff(b, a, &g)?.swapped();
            worst = worst
                .max((ab.payoff_a - ba.payoff_a).abs())
                .max((ab.payoff_b - ba.payoff_b).abs());
        }
    }
    Ok((worst < 1e-10, format!("max |pi(a,b) - swap(pi(b,a))| = {worst:.2e}")))
}

fn replicator_simplex(rng: &mut ChaCha8Rng) -> Outcome {
    let mut violations = 0;
    for _ in 0..10_000 {
        let raw = [[rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)], [rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)]];
        let p = shifted_payoffs(&raw);
        let x: f64 = rng.gen();
        let y = replicator_step(x, &p)?;
        if !(0.0..=1.0).contains(&y) || replicator_step(0.0, &p)? != 0.0 || replicator_step(1.0, &p)? != 1.0 {
            violations += 1;
        }
    }
    Ok((violations == 0, format!("10^4 random steps, {violations} violations")))
}

fn wsls_is_aon1(rng: &mut ChaCha8Rng) -> Outcome {
    let g = GameParams::axelrod(0.01);
    let wsls = automaton("WSLS", &g);
    let aon = AonStrategy::new(1)?.to_automaton();
    let mut intent_mismatch = 0;
    for _ in 0..10_000 {
        let history: Vec<OutcomePair> = (0..100)
            .map(|_| {
                let act = |b: bool| if b { Action::Cooperate } else { Action::Defect };
                OutcomePair::new(act(rng.gen()), act(rng.gen()))
            })
            .collect();
        if wsls.intents_along(&history) != aon.intents_along(&history) {
            intent_mismatch += 1;
        }
    }
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let opp = random_memory1(rng).to_automaton();
        let a = automaton_pair_payoff(&wsls, &opp, &g)?;
        let b = automaton_pair_payoff(&aon, &opp, &g)?;
        worst = worst
            .max((a.payoff_a - b.payoff_a).abs())
            .max((a.payoff_b - b.payoff_b).abs());
    }
    Ok((
        intent_mismatch == 0 && worst < 1e-12 && wsls.bisimilar(&aon),
        format!("{intent_mismatch} intent mismatches over 10^4 histories, max payoff gap {worst:.2e}"),
    ))
}

fn trivial_limits() -> Outcome {
    let mut worst: f64 = 0.0;
    for k in [1, 4, 30] {
        for n in [2, 5, 50] {
            worst = worst
                .max((aon_group_coop_rate(k, n, 0.0)? - 1.0).abs())
                .max((adco_group_coop_rate(k, 2, n, 0.0)? - 1.0).abs())
                .max((aon_group_coop_rate(k, n, 0.5)? - 0.5).abs())
                .max((adco_group_coop_rate(k, 2, n, 0.5)? - 0.5).abs());
        }
        let g0 = GameParams::axelrod(0.0);
        let gh = GameParams::axelrod(0.5);
        worst = worst
            .max((aon_self_payoff(k, &g0)? - g0.reward).abs())
            .max((aon_self_payoff(k, &gh)? - 2.25).abs());
    }
    for m in [2, 10, 100] {
        let rho = fixation_probability_block(&[[3.0, 0.0], [5.0, 1.0]], m, 0.0)?;
        worst = worst.max((rho - 1.0 / m as f64).abs());
    }
    Ok((worst < 1e-12, format!("max deviation from the exact limits {worst:.2e}")))
}

fn determinism(seed: u64) -> Outcome {
    let g = GameParams::axelrod(0.01);
    let specs = ["HardMajority", "CURE:delta=2", "WSLS", "GTFT:q=0.2"];
    let strategies: Vec<Strategy> = specs.iter().map(|s| catalog(s, &g)).collect::<Result<_>>()?;
    let mc = MonteCarloSettings::with_rounds(50_000);
    let a = payoff_matrix(&strategies, &g, &mc, seed)?;
    let b = payoff_matrix(&strategies, &g, &mc, seed)?;
    let reversed: Vec<Strategy> = strategies.iter().rev().cloned().collect();
    let c = payoff_matrix(&reversed, &g, &mc, seed)?;
    let n = strategies.len();
    let order_free = (0..n).all(|i| {
        (0..n).all(|j| {
            let analytic = strategies[i].as_automaton().is_some() && strategies[j].as_automaton().is_some();
            !analytic || (a.payoff(i, j) - c.payoff(n - 1 - i, n - 1 - j)).abs() < 1e-12
        })
    });
    let cfg = SimConfig::new(50, 1.0, 0.01, 100_000, seed);
    let r1 = agent_simulation(&cfg, &a)?;
    let r2 = agent_simulation(&cfg, &a)?;
    Ok((
        a == b && r1 == r2 && order_free,
        format!(
            "payoff tables identical: {}, analytic entries independent of strategy order: {order_free}, agent runs identical: {}",
            a == b,
            r1 == r2
        ),
    ))
}

/// Runs every check with randomness derived from `seed`.
pub fn run_suite(seed: u64) -> ValidationReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let checks = vec![
        timed("closed forms vs shared-state chains", || closed_form_vs_chain(&mut rng)),
        timed("AoN self-payoff closed form vs product chain", self_payoff_vs_product_chain),
        timed("simulation vs exact values", || simulation_vs_exact(seed)),
        timed("chains row-stochastic, stationary residuals", || chains_are_stochastic(&mut rng)),
        timed("payoffs within [S, T]", || payoffs_in_range(&mut rng, seed)),
        timed("exchange symmetry", || exchange_symmetry(&mut rng)),
        timed("replicator simplex preservation", || replicator_simplex(&mut rng)),
        timed("WSLS equals AoN_1", || wsls_is_aon1(&mut rng)),
        timed("trivial limits", trivial_limits),
        timed("determinism under fixed seed", || determinism(seed)),
    ];
    ValidationReport { checks }
}
