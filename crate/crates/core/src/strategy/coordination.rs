//! All-or-None (AoN_K) and adaptive coordination (ADCO) state machines.
//!
//! Both count consecutive coordinated rounds, where a round is coordinated
//! when every player implemented the same action. AoN_K cooperates only in
//! `A_K`, reached after K coordinated rounds in a row; any uncoordinated
//! round resets it to `A_0`. ADCO adds an observation phase
//! `A_{K,1} .. A_{K,t}` after `A_K`: once `A_{K,t}` is reached a single
//! uncoordinated round only sends it back to `A_K`.

use crate::error::{Error, Result};
use crate::game::OutcomePair;

use super::automaton::StrategyAutomaton;

/// Successor of `A_state` for AoN_K.
pub fn aon_transition(k: u32, state: u32, coordinated: bool) -> u32 {
    debug_assert!(state <= k);
    if coordinated {
        (state + 1).min(k)
    } else {
        0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AonStrategy {
    k: u32,
}

impl AonStrategy {
    pub fn new(k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::strategy("AoN:K=0", "cooperation threshold K must be positive"));
        }
        Ok(AonStrategy { k })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn state_count(&self) -> usize {
        self.k as usize + 1
    }

    pub fn transition(&self, state: usize, coordinated: bool) -> usize {
        aon_transition(self.k, state as u32, coordinated) as usize
    }

    pub fn intent(&self, state: usize) -> f64 {
        if state == self.k as usize {
            1.0
        } else {
            0.0
        }
    }

    /// Play starts in `A_K`.
    pub fn initial_state(&self) -> usize {
        self.k as usize
    }

    pub fn spec(&self) -> String {
        format!("AoN:K={}", self.k)
    }

    pub fn to_automaton(&self) -> StrategyAutomaton {
        lower_coordination(
            self.spec(),
            self.state_count(),
            self.initial_state(),
            |s| self.intent(s),
            |s, c| self.transition(s, c),
        )
    }
}

/// ADCO state: `Building(i)` is `A_i` for `i <= K`, `Sustained(j)` is
/// `A_{K,j}` for `1 <= j <= t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AdcoState {
    Building(u32),
    Sustained(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AdcoStrategy {
    k: u32,
    t: u32,
}

impl AdcoStrategy {
    pub fn new(k: u32, t: u32) -> Result<Self> {
        if k == 0 || t == 0 {
            return Err(Error::strategy(
                &format!("ADCO:K={k},t={t}"),
                "threshold K and tolerance t must be positive",
            ));
        }
        Ok(AdcoStrategy { k, t })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn state_count(&self) -> usize {
        (self.k + 1 + self.t) as usize
    }

    pub fn transition_state(&self, state: AdcoState, coordinated: bool) -> AdcoState {
        use AdcoState::*;
        match (state, coordinated) {
            (Building(i), true) if i < self.k => Building(i + 1),
            (Building(_), true) => Sustained(1),
            (Sustained(j), true) => Sustained((j + 1).min(self.t)),
            (Sustained(j), false) if j == self.t => Building(self.k),
            (_, false) => Building(0),
        }
    }

    pub fn index_of(&self, state: AdcoState) -> usize {
        match state {
            AdcoState::Building(i) => i as usize,
            AdcoState::Sustained(j) => (self.k + j) as usize,
        }
    }

    pub fn state_at(&self, index: usize) -> AdcoState {
        let k = self.k as usize;
        if index <= k {
            AdcoState::Building(index as u32)
        } else {
            AdcoState::Sustained((index - k) as u32)
        }
    }

    pub fn transition(&self, state: usize, coordinated: bool) -> usize {
        self.index_of(self.transition_state(self.state_at(state), coordinated))
    }

    pub fn intent(&self, state: usize) -> f64 {
        if state >= self.k as usize {
            1.0
        } else {
            0.0
        }
    }

    /// Play starts in `A_K`, like AoN_K.
    pub fn initial_state(&self) -> usize {
        self.k as usize
    }

    pub fn spec(&self) -> String {
        format!("ADCO:K={},t={}", self.k, self.t)
    }

    pub fn to_automaton(&self) -> StrategyAutomaton {
        lower_coordination(
            self.spec(),
            self.state_count(),
            self.initial_state(),
            |s| self.intent(s),
            |s, c| self.transition(s, c),
        )
    }
}

fn lower_coordination(
    label: String,
    states: usize,
    initial: usize,
    intent: impl Fn(usize) -> f64,
    transition: impl Fn(usize, bool) -> usize,
) -> StrategyAutomaton {
    let coop_intent = (0..states).map(&intent).collect();
    let next_state = (0..states)
        .map(|s| OutcomePair::ALL.map(|o| transition(s, o.is_coordinated())))
        .collect();
    StrategyAutomaton::new(label, coop_intent, next_state, initial)
        .expect("coordination automata are well-formed")
}
