//! Seeded simulation of noisy repeated play, with batch-means standard errors.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{effective_coop_prob, Action, GameParams, OutcomePair};
use crate::strategy::Strategy;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloSettings {
    pub rounds: u64,
    pub burn_in: u64,
    pub batches: usize,
}

impl Default for MonteCarloSettings {
    fn default() -> Self {
        MonteCarloSettings {
            rounds: 10_000_000,
            burn_in: 10_000,
            batches: 100,
        }
    }
}

impl MonteCarloSettings {
    pub fn with_rounds(rounds: u64) -> Self {
        MonteCarloSettings {
            rounds,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.rounds < 10_000 {
            return Err(Error::InvalidArgument(format!(
                "Monte Carlo needs at least 10^4 rounds, got {}",
                self.rounds
            )));
        }
        if self.burn_in >= self.rounds {
            return Err(Error::InvalidArgument("burn-in must be shorter than the run".into()));
        }
        if self.batches < 2 || (self.rounds - self.burn_in) < self.batches as u64 {
            return Err(Error::InvalidArgument("need at least 2 non-empty batches".into()));
        }
        Ok(())
    }

    fn batch_len(&self) -> u64 {
        (self.rounds - self.burn_in) / self.batches as u64
    }
}

/// Mean and standard error of the mean from per-batch averages.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
}

impl Estimate {
    pub fn from_batches(batches: &[f64]) -> Self {
        let n = batches.len() as f64;
        let mean = batches.iter().sum::<f64>() / n;
        let var = batches.iter().map(|b| (b - mean).powi(2)).sum::<f64>() / (n - 1.0);
        Estimate {
            mean,
            std_error: (var / n).sqrt(),
        }
    }

    /// True iff `value` lies within `k` standard errors (floored at `floor`).
    pub fn agrees_with(&self, value: f64, k: f64, floor: f64) -> bool {
        (self.mean - value).abs() <= k * self.std_error.max(floor)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloPayoff {
    pub payoff_a: Estimate,
    pub payoff_b: Estimate,
    pub coop_rate_a: Estimate,
    pub coop_rate_b: Estimate,
}

pub(crate) fn implemented(rng: &mut ChaCha8Rng, intent: f64, epsilon: f64) -> Action {
    let p = effective_coop_prob(intent, epsilon);
    if rng.gen::<f64>() < p {
        Action::Cooperate
    } else {
        Action::Defect
    }
}

/// Time-averaged payoffs of `a` against `b` after `burn_in` rounds.
pub fn monte_carlo_payoff(
    a: &Strategy,
    b: &Strategy,
    params: &GameParams,
    settings: &MonteCarloSettings,
    seed: u64,
) -> Result<MonteCarloPayoff> {
    params.validate()?;
    settings.validate()?;
    let eps = params.epsilon;
    let own_payoff = params.payoff_vector();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pa = a.player();
    let mut pb = b.player();

    let mut play = |rng: &mut ChaCha8Rng| {
        let xa = implemented(rng, pa.intent(), eps);
        let xb = implemented(rng, pb.intent(), eps);
        let outcome = OutcomePair::new(xa, xb);
        pa.observe(outcome);
        pb.observe(outcome.mirrored());
        outcome
    };
    for _ in 0..settings.burn_in {
        play(&mut rng);
    }
    let len = settings.batch_len();
    let mut sums = [
        Vec::with_capacity(settings.batches),
        Vec::with_capacity(settings.batches),
        Vec::with_capacity(settings.batches),
        Vec::with_capacity(settings.batches),
    ];
    for _ in 0..settings.batches {
        let mut counts = [0u64; 4];
        for _ in 0..len {
            counts[play(&mut rng).index()] += 1;
        }
        let f = counts.map(|c| c as f64 / len as f64);
        sums[0].push((0..4).map(|o| f[o] * own_payoff[o]).sum());
        sums[1].push((0..4).map(|o| f[o] * own_payoff[crate::game::mirror_index(o)]).sum());
        sums[2].push(f[0] + f[1]);
        sums[3].push(f[0] + f[2]);
    }
    Ok(MonteCarloPayoff {
        payoff_a: Estimate::from_batches(&sums[0]),
        payoff_b: Estimate::from_batches(&sums[1]),
        coop_rate_a: Estimate::from_batches(&sums[2]),
        coop_rate_b: Estimate::from_batches(&sums[3]),
    })
}
