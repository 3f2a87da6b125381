//! Strategies as finite automata over implemented outcomes, plus the two
//! infinite-memory strategies that are simulated directly.

mod automaton;
mod catalog;
mod coordination;
mod infinite;
mod memory_one;

pub use automaton::StrategyAutomaton;
pub use catalog::{catalog, grim, Player, Strategy, StrategySpec, CATALOG_EXAMPLES};
pub use coordination::{aon_transition, AdcoState, AdcoStrategy, AonStrategy};
pub use infinite::{InfiniteMemoryKind, InfiniteMemoryPlayer};
pub use memory_one::Memory1;
