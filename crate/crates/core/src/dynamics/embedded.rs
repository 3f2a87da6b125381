//! Rare-mutation limit: a chain over homogeneous populations whose
//! transitions are single-mutant fixations.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::markov::{stationary, MarkovChain, DEFAULT_TOLERANCE};
use crate::payoff::PayoffMatrix;

use super::fixation::fixation_probability_block;

/// How the population cooperation level weights matches.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CooperationWeighting {
    /// Each homogeneous state contributes its self-play cooperation rate.
    #[default]
    SelfPlay,
    /// Strategies meet in proportion to their abundances.
    PairwiseMixture,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AbundanceDistribution {
    pub labels: Vec<String>,
    pub abundances: Vec<f64>,
    pub cooperation_level: f64,
}

impl AbundanceDistribution {
    pub fn argmax(&self) -> usize {
        self.abundances
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, &a)| if a > best.1 { (i, a) } else { best })
            .0
    }

    pub fn abundance_of(&self, label: &str) -> Option<f64> {
        self.labels.iter().position(|l| l == label).map(|i| self.abundances[i])
    }
}

#[derive(Debug, Clone)]
pub struct EmbeddedChain {
    pub labels: Vec<String>,
    /// Dense row-stochastic matrix; `transition[i][j]` moves from all-i to
    /// all-j.
    pub transition: Vec<Vec<f64>>,
    pub abundances: Vec<f64>,
    pub residual: f64,
}

impl EmbeddedChain {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn max_row_sum_deviation(&self) -> f64 {
        self.transition
            .iter()
            .map(|r| (r.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn distribution(&self, payoffs: &PayoffMatrix, weighting: CooperationWeighting) -> AbundanceDistribution {
        AbundanceDistribution {
            labels: self.labels.clone(),
            abundances: self.abundances.clone(),
            cooperation_level: cooperation_level_weighted(&self.abundances, payoffs, weighting),
        }
    }
}

/// Builds the chain with a uniform mutant draw over the other `n - 1`
/// strategies and solves for its stationary distribution.
pub fn embedded_chain(payoffs: &PayoffMatrix, m: usize, beta: f64) -> Result<EmbeddedChain> {
    let n = payoffs.len();
    if n < 2 {
        return Err(Error::InvalidArgument("embedded chain needs at least two strategies".into()));
    }
    let scale = 1.0 / (n - 1) as f64;
    let transition: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut row = vec![0.0; n];
            for j in (0..n).filter(|&j| j != i) {
                row[j] = fixation_probability_block(&payoffs.pair_block(j, i), m, beta)? * scale;
            }
            let off: f64 = row.iter().sum();
            row[i] = 1.0 - off;
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let chain = MarkovChain::from_dense(&transition)?;
    let pi = stationary(&chain, DEFAULT_TOLERANCE)?;
    Ok(EmbeddedChain {
        labels: payoffs.labels.clone(),
        transition,
        abundances: pi.probabilities,
        residual: pi.residual,
    })
}

/// `sum_i abundance_i * rho_i` with `rho_i` the self-play cooperation rate.
pub fn cooperation_level(abundances: &[f64], self_coop: &[f64]) -> Result<f64> {
    if abundances.len() != self_coop.len() {
        return Err(Error::InvalidArgument(format!(
            "{} abundances but {} cooperation rates",
            abundances.len(),
            self_coop.len()
        )));
    }
    Ok(abundances.iter().zip(self_coop).map(|(a, c)| a * c).sum())
}

pub fn cooperation_level_weighted(abundances: &[f64], payoffs: &PayoffMatrix, weighting: CooperationWeighting) -> f64 {
    match weighting {
        CooperationWeighting::SelfPlay => abundances
            .iter()
            .zip(payoffs.self_coop())
            .map(|(a, c)| a * c)
            .sum(),
        CooperationWeighting::PairwiseMixture => abundances
            .iter()
            .enumerate()
            .map(|(i, ai)| ai * abundances.iter().zip(&payoffs.coop[i]).map(|(aj, c)| aj * c).sum::<f64>())
            .sum(),
    }
}
