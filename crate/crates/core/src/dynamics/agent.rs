//! Agent-based mutation and imitation in a well-mixed finite population.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::payoff::PayoffMatrix;

use super::fixation::imitation_probability;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    #[serde(rename = "M")]
    pub population: usize,
    pub beta: f64,
    pub mu: f64,
    pub steps: u64,
    pub seed: u64,
    /// Strategy counts at step 0; random uniform assignment when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_counts: Option<Vec<usize>>,
    /// Snapshot interval for the count series; 0 records nothing.
    #[serde(default)]
    pub record_every: u64,
}

impl SimConfig {
    pub fn new(population: usize, beta: f64, mu: f64, steps: u64, seed: u64) -> Self {
        SimConfig {
            population,
            beta,
            mu,
            steps,
            seed,
            initial_counts: None,
            record_every: 0,
        }
    }

    pub fn validate(&self, strategies: usize) -> Result<()> {
        if self.population < 2 {
            return Err(Error::InvalidParams(format!("M must be at least 2, got {}", self.population)));
        }
        if !(self.beta >= 0.0) || !self.beta.is_finite() {
            return Err(Error::InvalidParams(format!("beta must be finite and >= 0, got {}", self.beta)));
        }
        if !(0.0..=1.0).contains(&self.mu) {
            return Err(Error::InvalidParams(format!("mu must lie in [0, 1], got {}", self.mu)));
        }
        if strategies == 0 {
            return Err(Error::InvalidArgument("no strategies to simulate".into()));
        }
        if let Some(c) = &self.initial_counts {
            if c.len() != strategies || c.iter().sum::<usize>() != self.population {
                return Err(Error::InvalidParams(format!(
                    "initial counts must list {strategies} strategies summing to M = {}",
                    self.population
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgentRun {
    /// Time-averaged share of each strategy over all steps.
    pub abundances: Vec<f64>,
    pub final_counts: Vec<usize>,
    /// `(step, counts)` snapshots, including step 0.
    pub series: Vec<(u64, Vec<usize>)>,
}

struct Population<'a> {
    payoffs: &'a PayoffMatrix,
    agents: Vec<usize>,
    counts: Vec<usize>,
    /// `totals[s] = sum_k counts[k] * pi(s, k)`.
    totals: Vec<f64>,
    weighted_time: Vec<f64>,
    last_change: Vec<u64>,
}

impl<'a> Population<'a> {
    fn new(payoffs: &'a PayoffMatrix, agents: Vec<usize>) -> Self {
        let n = payoffs.len();
        let mut counts = vec![0; n];
        for &a in &agents {
            counts[a] += 1;
        }
        let totals = (0..n)
            .map(|s| (0..n).map(|k| counts[k] as f64 * payoffs.payoff(s, k)).sum())
            .collect();
        Population {
            payoffs,
            agents,
            counts,
            totals,
            weighted_time: vec![0.0; n],
            last_change: vec![0; n],
        }
    }

    fn payoff(&self, s: usize) -> f64 {
        let m = self.agents.len() as f64;
        (self.totals[s] - self.payoffs.payoff(s, s)) / (m - 1.0)
    }

    fn switch(&mut self, agent: usize, to: usize, step: u64) {
        let from = self.agents[agent];
        if from == to {
            return;
        }
        for s in [from, to] {
            self.weighted_time[s] += self.counts[s] as f64 * (step - self.last_change[s]) as f64;
            self.last_change[s] = step;
        }
        self.agents[agent] = to;
        self.counts[from] -= 1;
        self.counts[to] += 1;
        for (s, t) in self.totals.iter_mut().enumerate() {
            *t += self.payoffs.payoff(s, to) - self.payoffs.payoff(s, from);
        }
    }
}

/// Runs one replicate for `config.steps` learner updates.
pub fn agent_simulation(config: &SimConfig, payoffs: &PayoffMatrix) -> Result<AgentRun> {
    let n = payoffs.len();
    config.validate(n)?;
    let m = config.population;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let agents: Vec<usize> = match &config.initial_counts {
        Some(c) => c.iter().enumerate().flat_map(|(s, &k)| std::iter::repeat_n(s, k)).collect(),
        None => (0..m).map(|_| rng.gen_range(0..n)).collect(),
    };
    let mut pop = Population::new(payoffs, agents);
    let mut series = vec![(0, pop.counts.clone())];
    for step in 1..=config.steps {
        let learner = rng.gen_range(0..m);
        let own = pop.agents[learner];
        if rng.gen::<f64>() < config.mu {
            let to = rng.gen_range(0..n);
            pop.switch(learner, to, step - 1);
        } else {
            let mut model = rng.gen_range(0..m - 1);
            if model >= learner {
                model += 1;
            }
            let other = pop.agents[model];
            if other != own {
                let p = imitation_probability(pop.payoff(own), pop.payoff(other), config.beta);
                if rng.gen::<f64>() < p {
                    pop.switch(learner, other, step - 1);
                }
            }
        }
        if config.record_every > 0 && step % config.record_every == 0 {
            series.push((step, pop.counts.clone()));
        }
    }
    let end = config.steps;
    let total = (m as f64) * end.max(1) as f64;
    let abundances = (0..n)
        .map(|s| {
            let w = pop.weighted_time[s] + pop.counts[s] as f64 * (end - pop.last_change[s]) as f64;
            if end == 0 {
                pop.counts[s] as f64 / m as f64
            } else {
                w / total
            }
        })
        .collect();
    Ok(AgentRun {
        abundances,
        final_counts: pop.counts,
        series,
    })
}

/// Independent replicates with seeds `seed, seed + 1, ...`, run in parallel;
/// results are ordered by replicate.
pub fn agent_replicates(config: &SimConfig, payoffs: &PayoffMatrix, replicates: u64) -> Result<Vec<AgentRun>> {
    (0..replicates)
        .into_par_iter()
        .map(|r| {
            let cfg = SimConfig {
                seed: config.seed.wrapping_add(r),
                ..config.clone()
            };
            agent_simulation(&cfg, payoffs)
        })
        .collect()
}

/// Per-strategy mean of replicate abundances.
pub fn mean_abundances(runs: &[AgentRun]) -> Vec<f64> {
    let n = runs.first().map(|r| r.abundances.len()).unwrap_or(0);
    (0..n)
        .map(|s| runs.iter().map(|r| r.abundances[s]).sum::<f64>() / runs.len() as f64)
        .collect()
}
