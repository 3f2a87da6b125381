//! Long-run payoffs and cooperation rates: closed forms for homogeneous
//! groups, product Markov chains for automaton pairs, and seeded Monte Carlo
//! for strategies with unbounded memory.

pub mod closed_form;
pub mod group;
pub mod matrix;
pub mod monte_carlo;
pub mod product;

pub use closed_form::{adco_group_coop_rate, aon_group_coop_rate, aon_self_payoff, GroupCoordination};
pub use group::{group_shared_state_chain, monte_carlo_group_coop_rate, CoordinationStrategy, GroupChain};
pub use matrix::{
    cache_key, coop_rates_path, format_float, pair_payoff, pair_seed, payoff_matrix,
    payoff_matrix_cached, PairEvaluation, PayoffMatrix,
};
pub use monte_carlo::{monte_carlo_payoff, Estimate, MonteCarloPayoff, MonteCarloSettings};
pub use product::{
    automaton_pair_payoff, build_product_chain, build_product_chain_capped, PairPayoff,
    ProductChain, DEFAULT_STATE_CAP,
};
