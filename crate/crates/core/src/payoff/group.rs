//! Homogeneous N-player groups of AoN_K or ADCO players.
//!
//! Every member starts in the same state and every member sees the same
//! coordination signal, so the whole group moves through a single shared
//! state. The round is coordinated with probability `q = eps^N + (1-eps)^N`
//! whatever the common intent is.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::game::{effective_coop_prob, Action};
use crate::markov::{stationary, MarkovChain, StationaryDistribution, DEFAULT_TOLERANCE};
use crate::strategy::{AdcoStrategy, AonStrategy};

use super::closed_form::GroupCoordination;
use super::monte_carlo::{implemented, Estimate, MonteCarloSettings};

/// Strategies whose next state depends only on whether the round was
/// coordinated.
pub trait CoordinationStrategy {
    fn state_count(&self) -> usize;
    fn initial_state(&self) -> usize;
    fn intent(&self, state: usize) -> f64;
    fn transition(&self, state: usize, coordinated: bool) -> usize;
}

impl CoordinationStrategy for AonStrategy {
    fn state_count(&self) -> usize {
        AonStrategy::state_count(self)
    }
    fn initial_state(&self) -> usize {
        AonStrategy::initial_state(self)
    }
    fn intent(&self, state: usize) -> f64 {
        AonStrategy::intent(self, state)
    }
    fn transition(&self, state: usize, coordinated: bool) -> usize {
        AonStrategy::transition(self, state, coordinated)
    }
}

impl CoordinationStrategy for AdcoStrategy {
    fn state_count(&self) -> usize {
        AdcoStrategy::state_count(self)
    }
    fn initial_state(&self) -> usize {
        AdcoStrategy::initial_state(self)
    }
    fn intent(&self, state: usize) -> f64 {
        AdcoStrategy::intent(self, state)
    }
    fn transition(&self, state: usize, coordinated: bool) -> usize {
        AdcoStrategy::transition(self, state, coordinated)
    }
}

#[derive(Debug, Clone)]
pub struct GroupChain {
    pub chain: MarkovChain,
    pub stationary: StationaryDistribution,
    pub coop_rate: f64,
}

/// Shared-state chain of a homogeneous group and its cooperation rate.
pub fn group_shared_state_chain<S: CoordinationStrategy + ?Sized>(
    strategy: &S,
    n: u32,
    epsilon: f64,
) -> Result<GroupChain> {
    let g = GroupCoordination::new(n, epsilon)?;
    let rows = (0..strategy.state_count())
        .map(|s| {
            let hit = strategy.transition(s, true);
            let miss = strategy.transition(s, false);
            if hit == miss {
                vec![(hit, 1.0)]
            } else {
                vec![(hit, g.q), (miss, g.miss)]
            }
        })
        .collect();
    let chain = MarkovChain::from_rows(rows)?;
    let stationary = stationary(&chain, DEFAULT_TOLERANCE)?;
    let coop_rate = (0..strategy.state_count())
        .map(|s| stationary.get(s) * effective_coop_prob(strategy.intent(s), epsilon))
        .sum();
    Ok(GroupChain {
        chain,
        stationary,
        coop_rate,
    })
}

/// Simulates `n` players, each with its own state, and returns the
/// time-averaged fraction of implemented cooperation.
pub fn monte_carlo_group_coop_rate<S: CoordinationStrategy + ?Sized>(
    strategy: &S,
    n: u32,
    epsilon: f64,
    settings: &MonteCarloSettings,
    seed: u64,
) -> Result<Estimate> {
    GroupCoordination::new(n, epsilon)?;
    settings.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut states = vec![strategy.initial_state(); n as usize];
    let round = |rng: &mut ChaCha8Rng, states: &mut [usize]| -> u64 {
        let mut coops = 0u64;
        for &s in states.iter() {
            if implemented(rng, strategy.intent(s), epsilon) == Action::Cooperate {
                coops += 1;
            }
        }
        let coordinated = coops == 0 || coops == n as u64;
        for s in states.iter_mut() {
            *s = strategy.transition(*s, coordinated);
        }
        coops
    };
    for _ in 0..settings.burn_in {
        round(&mut rng, &mut states);
    }
    let len = (settings.rounds - settings.burn_in) / settings.batches as u64;
    let mut batches = Vec::with_capacity(settings.batches);
    for _ in 0..settings.batches {
        let mut total = 0u64;
        for _ in 0..len {
            total += round(&mut rng, &mut states);
        }
        batches.push(total as f64 / (len as f64 * n as f64));
    }
    Ok(Estimate::from_batches(&batches))
}
