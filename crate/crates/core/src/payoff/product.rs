//! Joint Markov chain of two automata playing each other under noise.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::game::{effective_coop_prob, mirror_index, GameParams};
use crate::markov::{stationary, MarkovChain, StationaryDistribution, DEFAULT_TOLERANCE};
use crate::strategy::StrategyAutomaton;

pub const DEFAULT_STATE_CAP: usize = 1_000_000;

/// Reachable joint states `(state_a, state_b)` with their transition matrix
/// and per-state outcome distribution (player a's perspective).
#[derive(Debug, Clone)]
pub struct ProductChain {
    states: Vec<(usize, usize)>,
    chain: MarkovChain,
    outcome_dist: Vec<[f64; 4]>,
    coop_prob: Vec<(f64, f64)>,
}

/// Long-run per-round payoffs and implemented cooperation rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairPayoff {
    pub payoff_a: f64,
    pub payoff_b: f64,
    pub coop_rate_a: f64,
    pub coop_rate_b: f64,
}

impl PairPayoff {
    pub fn swapped(self) -> Self {
        PairPayoff {
            payoff_a: self.payoff_b,
            payoff_b: self.payoff_a,
            coop_rate_a: self.coop_rate_b,
            coop_rate_b: self.coop_rate_a,
        }
    }
}

pub fn build_product_chain(
    a: &StrategyAutomaton,
    b: &StrategyAutomaton,
    params: &GameParams,
) -> Result<ProductChain> {
    build_product_chain_capped(a, b, params, DEFAULT_STATE_CAP)
}

/// Explores joint states breadth-first from the joint initial state,
/// following only outcomes of positive probability.
pub fn build_product_chain_capped(
    a: &StrategyAutomaton,
    b: &StrategyAutomaton,
    params: &GameParams,
    cap: usize,
) -> Result<ProductChain> {
    params.validate()?;
    let eps = params.epsilon;
    let start = (a.initial_state(), b.initial_state());
    let mut index: HashMap<(usize, usize), usize> = HashMap::new();
    index.insert(start, 0);
    let mut states = vec![start];
    let mut rows = Vec::new();
    let mut outcome_dist = Vec::new();
    let mut coop_prob = Vec::new();
    let mut head = 0;
    while head < states.len() {
        let (sa, sb) = states[head];
        head += 1;
        let pa = effective_coop_prob(a.coop_intent(sa), eps);
        let pb = effective_coop_prob(b.coop_intent(sb), eps);
        let dist = [pa * pb, pa * (1.0 - pb), (1.0 - pa) * pb, (1.0 - pa) * (1.0 - pb)];
        let mut row: Vec<(usize, f64)> = Vec::with_capacity(4);
        for (o, &p) in dist.iter().enumerate() {
            if p <= 0.0 {
                continue;
            }
            let next = (a.next_by_index(sa, o), b.next_by_index(sb, mirror_index(o)));
            let j = match index.get(&next) {
                Some(&j) => j,
                None => {
                    let j = states.len();
                    if j >= cap {
                        return Err(Error::StateSpaceTooLarge {
                            states: j + 1,
                            cap,
                        });
                    }
                    index.insert(next, j);
                    states.push(next);
                    j
                }
            };
            match row.iter_mut().find(|(t, _)| *t == j) {
                Some(entry) => entry.1 += p,
                None => row.push((j, p)),
            }
        }
        rows.push(row);
        outcome_dist.push(dist);
        coop_prob.push((pa, pb));
    }
    Ok(ProductChain {
        states,
        chain: MarkovChain::from_rows(rows)?,
        outcome_dist,
        coop_prob,
    })
}

impl ProductChain {
    pub fn states(&self) -> &[(usize, usize)] {
        &self.states
    }

    pub fn chain(&self) -> &MarkovChain {
        &self.chain
    }

    pub fn outcome_distribution(&self, state: usize) -> [f64; 4] {
        self.outcome_dist[state]
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn stationary(&self) -> Result<StationaryDistribution> {
        stationary(&self.chain, DEFAULT_TOLERANCE)
    }

    /// Long-run outcome frequencies `(CC, CD, DC, DD)` from a's side.
    pub fn outcome_frequencies(&self, pi: &StationaryDistribution) -> [f64; 4] {
        let mut freq = [0.0; 4];
        for (s, dist) in self.outcome_dist.iter().enumerate() {
            let w = pi.get(s);
            for o in 0..4 {
                freq[o] += w * dist[o];
            }
        }
        freq
    }

    pub fn payoffs(&self, params: &GameParams) -> Result<PairPayoff> {
        let pi = self.stationary()?;
        let freq = self.outcome_frequencies(&pi);
        let own = params.payoff_vector();
        let payoff_a = (0..4).map(|o| freq[o] * own[o]).sum();
        let payoff_b = (0..4).map(|o| freq[o] * own[mirror_index(o)]).sum();
        let (mut coop_a, mut coop_b) = (0.0, 0.0);
        for (s, &(pa, pb)) in self.coop_prob.iter().enumerate() {
            coop_a += pi.get(s) * pa;
            coop_b += pi.get(s) * pb;
        }
        Ok(PairPayoff {
            payoff_a,
            payoff_b,
            coop_rate_a: coop_a,
            coop_rate_b: coop_b,
        })
    }
}

/// Analytical long-run payoffs of two automata.
pub fn automaton_pair_payoff(
    a: &StrategyAutomaton,
    b: &StrategyAutomaton,
    params: &GameParams,
) -> Result<PairPayoff> {
    build_product_chain(a, b, params)?.payoffs(params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::payoff::closed_form::aon_self_payoff;
    use crate::strategy::{catalog, Memory1};

    fn auto(spec: &str, g: &GameParams) -> StrategyAutomaton {
        catalog(spec, g).unwrap().as_automaton().unwrap().clone()
    }

    #[test]
    fn alld_vs_alld_is_a_single_state() {
        let g = GameParams::axelrod(0.0);
        let d = auto("ALLD", &g);
        let chain = build_product_chain(&d, &d, &g).unwrap();
        assert_eq!(chain.len(), 1);
        let p = chain.payoffs(&g).unwrap();
        assert_eq!(p.payoff_a, 1.0);
        assert_eq!(p.payoff_b, 1.0);
    }

    #[test]
    fn alld_vs_allc_closed_form() {
        let g0 = GameParams::axelrod(0.0);
        let p = automaton_pair_payoff(&auto("ALLD", &g0), &auto("ALLC", &g0), &g0).unwrap();
        assert_eq!((p.payoff_a, p.payoff_b), (5.0, 0.0));

        let eps = 0.001;
        let g = GameParams::axelrod(eps);
        let p = automaton_pair_payoff(&auto("ALLD", &g), &auto("ALLC", &g), &g).unwrap();
        let expect_a = (1.0 - eps) * (1.0 - eps) * 5.0 + eps * (1.0 - eps) * (3.0 + 1.0);
        let expect_b = eps * eps * 5.0 + eps * (1.0 - eps) * (3.0 + 1.0);
        assert!((p.payoff_a - expect_a).abs() < 1e-14);
        assert!((p.payoff_b - expect_b).abs() < 1e-14);
        assert!((p.coop_rate_a - eps).abs() < 1e-15);
        assert!((p.coop_rate_b - (1.0 - eps)).abs() < 1e-15);
    }

    #[test]
    fn allc_vs_alld_outcome_chain() {
        let g = GameParams::axelrod(0.1);
        let allc = Memory1::new([1.0; 4]).unwrap().to_outcome_automaton();
        let alld = Memory1::new([0.0; 4]).unwrap().to_outcome_automaton();
        let chain = build_product_chain(&allc, &alld, &g).unwrap();
        assert_eq!(chain.len(), 4);
        let pi = chain.stationary().unwrap();
        let freq = chain.outcome_frequencies(&pi);
        for (f, e) in freq.iter().zip([0.09, 0.81, 0.01, 0.09]) {
            assert!((f - e).abs() < 1e-14, "{freq:?}");
        }
        // state i of the outcome automaton is "last outcome was i"
        for (s, &(sa, _)) in chain.states().iter().enumerate() {
            assert!((pi.get(s) - [0.09, 0.81, 0.01, 0.09][sa]).abs() < 1e-14);
        }
    }

    #[test]
    fn wsls_self_play_matches_closed_form() {
        let g = GameParams::axelrod(0.001);
        let w = auto("WSLS", &g);
        let p = automaton_pair_payoff(&w, &w, &g).unwrap();
        let expect = aon_self_payoff(1, &g).unwrap();
        assert!((p.payoff_a - expect).abs() < 1e-12);
        assert!((p.payoff_b - expect).abs() < 1e-12);
    }

    #[test]
    fn aon_pairs_stay_small() {
        let g = GameParams::axelrod(0.01);
        let chain = build_product_chain(&auto("AoN:K=30", &g), &auto("AoN:K=50", &g), &g).unwrap();
        assert!(chain.len() <= 52, "{}", chain.len());
    }

    #[test]
    fn state_cap_is_enforced() {
        let g = GameParams::axelrod(0.01);
        let err =
            build_product_chain_capped(&auto("AoN:K=30", &g), &auto("TFT", &g), &g, 5).unwrap_err();
        assert!(matches!(err, Error::StateSpaceTooLarge { cap: 5, .. }));
        assert!(err.is_resource());
    }

    #[test]
    fn rows_are_stochastic() {
        let g = GameParams::axelrod(0.01);
        let chain =
            build_product_chain(&auto("ADCO:K=3,t=2", &g), &auto("GTFT:q=0.4", &g), &g).unwrap();
        assert!(chain.chain().max_row_sum_deviation() < 1e-12);
    }
}
