#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Noisy repeated prisoner's dilemma with All-or-None (AoN_K) and adaptive
//! coordination (ADCO) strategies.
//!
//! Strategies are finite automata over implemented outcomes
//! ([`strategy`]); payoffs come from stationary distributions of joint Markov
//! chains ([`payoff`], [`markov`]); [`dynamics`] runs replicator dynamics,
//! the rare-mutation embedded chain and an agent-based imitation process on
//! top of a payoff table. [`experiment`] wires these into reproducible
//! presets.

pub mod dynamics;
pub mod error;
pub mod experiment;
pub mod game;
pub mod markov;
pub mod payoff;
pub mod strategy;
pub mod validation;

pub use error::{Error, Result};
pub use game::{Action, GameParams, OutcomePair};
