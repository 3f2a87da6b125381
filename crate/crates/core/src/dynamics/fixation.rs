//! Fixation of a single mutant under pairwise-comparison imitation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::payoff::PayoffMatrix;

use super::replicator::PayoffBlock;

fn check(m: usize, beta: f64) -> Result<()> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!("population size must be at least 2, got {m}")));
    }
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(Error::InvalidArgument(format!("selection intensity must be finite and >= 0, got {beta}")));
    }
    Ok(())
}

/// Finite-population payoffs of a mutant and a resident when `l` mutants
/// are present, excluding self-interaction.
pub fn finite_population_payoffs(block: &PayoffBlock, m: usize, l: usize) -> (f64, f64) {
    let [[mm, mr], [rm, rr]] = *block;
    let (l, m) = (l as f64, m as f64);
    (
        ((l - 1.0) * mm + (m - l) * mr) / (m - 1.0),
        (l * rm + (m - l - 1.0) * rr) / (m - 1.0),
    )
}

/// Fixation probability of one mutant; `block` is
/// `[[pi(m,m), pi(m,r)], [pi(r,m), pi(r,r)]]`.
///
/// The partial products are summed in the log domain, so large populations
/// and strong selection neither overflow nor lose the leading term.
pub fn fixation_probability_block(block: &PayoffBlock, m: usize, beta: f64) -> Result<f64> {
    check(m, beta)?;
    if beta == 0.0 {
        return Ok(1.0 / m as f64);
    }
    let mut logs = Vec::with_capacity(m);
    logs.push(0.0);
    let mut acc = 0.0;
    for l in 1..m {
        let (pm, pr) = finite_population_payoffs(block, m, l);
        acc -= beta * (pm - pr);
        logs.push(acc);
    }
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = logs.iter().map(|&v| (v - max).exp()).sum();
    Ok((-max).exp() / sum)
}

/// Fixation probability of `mutant` invading a population of `resident`.
pub fn fixation_probability(
    mutant: usize,
    resident: usize,
    payoffs: &PayoffMatrix,
    m: usize,
    beta: f64,
) -> Result<f64> {
    fixation_probability_block(&payoffs.pair_block(mutant, resident), m, beta)
}

/// Outcome of repeated single-mutant invasions simulated step by step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixationFrequency {
    pub trials: u64,
    pub fixations: u64,
}

impl FixationFrequency {
    pub fn frequency(&self) -> f64 {
        self.fixations as f64 / self.trials as f64
    }
}

/// Simulates the imitation process from one mutant until absorption,
/// `trials` times.
pub fn simulate_fixation(block: &PayoffBlock, m: usize, beta: f64, trials: u64, seed: u64) -> Result<FixationFrequency> {
    check(m, beta)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mf = m as f64;
    let mut fixations = 0;
    for _ in 0..trials {
        let mut l = 1usize;
        while l > 0 && l < m {
            let (pm, pr) = finite_population_payoffs(block, m, l);
            // learner and a distinct role model, both uniformly random
            let learner_is_mutant = rng.gen::<f64>() * mf < l as f64;
            let others_mutant = if learner_is_mutant { l - 1 } else { l };
            let model_is_mutant = rng.gen::<f64>() * (mf - 1.0) < others_mutant as f64;
            if learner_is_mutant == model_is_mutant {
                continue;
            }
            let (own, model) = if learner_is_mutant { (pm, pr) } else { (pr, pm) };
            if rng.gen::<f64>() < imitation_probability(own, model, beta) {
                if learner_is_mutant {
                    l -= 1;
                } else {
                    l += 1;
                }
            }
        }
        if l == m {
            fixations += 1;
        }
    }
    Ok(FixationFrequency { trials, fixations })
}

/// Fermi rule: chance that a learner earning `own` copies a model earning
/// `model`.
pub fn imitation_probability(own: f64, model: f64, beta: f64) -> f64 {
    1.0 / (1.0 + (-beta * (model - own)).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn neutral_drift_is_one_over_m() {
        for m in [2, 3, 10, 100, 1000] {
            let rho = fixation_probability_block(&[[3.0, 0.0], [5.0, 1.0]], m, 0.0).unwrap();
            assert_eq!(rho, 1.0 / m as f64);
        }
    }

    #[test]
    fn two_player_population() {
        let block = [[3.0, 0.5], [1.5, 1.0]];
        let beta = 0.7;
        let (pm, pr) = finite_population_payoffs(&block, 2, 1);
        let expected = 1.0 / (1.0 + (-beta * (pm - pr)).exp());
        let rho = fixation_probability_block(&block, 2, beta).unwrap();
        assert!((rho - expected).abs() < 1e-15);
    }

    #[test]
    fn matches_direct_product_formula() {
        let block = [[2.9, 0.2], [4.1, 1.1]];
        let (m, beta) = (20, 0.3);
        let mut sum = 1.0;
        let mut prod = 1.0;
        for k in 1..m {
            let (pm, pr) = finite_population_payoffs(&block, m, k);
            prod *= (-beta * (pm - pr)).exp();
            sum += prod;
        }
        let rho = fixation_probability_block(&block, m, beta).unwrap();
        assert!((rho * sum - 1.0).abs() < 1e-13);
    }

    #[test]
    fn strong_selection_does_not_overflow() {
        let block = [[0.0, 0.0], [5.0, 5.0]];
        let rho = fixation_probability_block(&block, 100, 1.0).unwrap();
        assert!(rho > 0.0 && rho < 1e-200, "{rho}");
        let back = fixation_probability_block(&[[5.0, 5.0], [0.0, 0.0]], 100, 1.0).unwrap();
        assert!(back > 0.99 && back < 1.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        let block = [[1.0, 1.0], [1.0, 1.0]];
        assert!(fixation_probability_block(&block, 1, 1.0).is_err());
        assert!(fixation_probability_block(&block, 10, -1.0).is_err());
        assert!(fixation_probability_block(&block, 10, f64::NAN).is_err());
    }

    #[test]
    fn simulation_agrees_with_formula() {
        let block = [[3.0, 1.0], [2.0, 2.0]];
        let (m, beta, trials) = (10, 0.5, 40_000);
        let rho = fixation_probability_block(&block, m, beta).unwrap();
        let sim = simulate_fixation(&block, m, beta, trials, 17).unwrap();
        let sigma = (rho * (1.0 - rho) / trials as f64).sqrt();
        assert!((sim.frequency() - rho).abs() < 4.0 * sigma, "{} vs {rho}", sim.frequency());
    }

    proptest! {
        #[test]
        fn probability_is_strictly_inside_unit_interval(
            p in proptest::array::uniform4(0.0f64..5.0),
            m in 2usize..=100,
            beta in 0.0f64..1.0,
        ) {
            let rho = fixation_probability_block(&[[p[0], p[1]], [p[2], p[3]]], m, beta).unwrap();
            prop_assert!(rho > 0.0 && rho < 1.0);
        }
    }
}
