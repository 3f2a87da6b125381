//! Evolutionary dynamics on top of a payoff table: the two-strategy
//! replicator map, the rare-mutation embedded chain and agent-based
//! mutation with imitation.

pub mod agent;
pub mod embedded;
pub mod fixation;
pub mod replicator;

pub use agent::{agent_replicates, agent_simulation, mean_abundances, AgentRun, SimConfig};
pub use embedded::{
    cooperation_level, cooperation_level_weighted, embedded_chain, AbundanceDistribution,
    CooperationWeighting, EmbeddedChain,
};
pub use fixation::{
    finite_population_payoffs, fixation_probability, fixation_probability_block,
    imitation_probability, simulate_fixation, FixationFrequency,
};
pub use replicator::{
    fitness_gap, interior_fixed_point, replicator_step, run_replicator, shifted_payoffs,
    Convergence, FixedPointReport, PairStructure, PayoffBlock, ReplicatorOptions,
    ReplicatorTrajectory, Stability,
};
