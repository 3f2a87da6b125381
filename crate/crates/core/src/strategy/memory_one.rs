use crate::error::{Error, Result};
use crate::game::{GameParams, OutcomePair};

use super::automaton::StrategyAutomaton;

/// Memory-1 strategy `[p_CC, p_CD, p_DC, p_DD]` with an optional first-round
/// probability `p0`. `p0` never affects long-run payoffs under noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Memory1 {
    pub p: [f64; 4],
    pub p0: Option<f64>,
}

impl Memory1 {
    pub fn new(p: [f64; 4]) -> Result<Self> {
        Self::with_first(p, None)
    }

    pub fn with_first(p: [f64; 4], p0: Option<f64>) -> Result<Self> {
        let ok = |v: f64| (0.0..=1.0).contains(&v);
        if !p.iter().copied().all(ok) || !p0.is_none_or(ok) {
            return Err(Error::strategy(
                &format!("M1:{p:?}"),
                "memory-1 probabilities must lie in [0, 1]",
            ));
        }
        Ok(Memory1 { p, p0 })
    }

    pub fn spec(&self) -> String {
        let mut s = String::from("M1:");
        if let Some(p0) = self.p0 {
            s.push_str(&format!("{p0},"));
        }
        let parts: Vec<String> = self.p.iter().map(|v| v.to_string()).collect();
        s.push_str(&parts.join(","));
        s
    }

    /// Unreduced automaton whose state is the last outcome, plus a start
    /// state when `p0` is given. Without `p0` play starts as if the previous
    /// round was CC.
    pub fn to_outcome_automaton(&self) -> StrategyAutomaton {
        let mut intents = self.p.to_vec();
        let mut next: Vec<[usize; 4]> = vec![[0, 1, 2, 3]; 4];
        let initial = match self.p0 {
            Some(p0) => {
                intents.push(p0);
                next.push([0, 1, 2, 3]);
                4
            }
            None => OutcomePair::ALL[0].index(),
        };
        StrategyAutomaton::new(self.spec(), intents, next, initial)
            .expect("memory-1 automaton is well-formed")
    }

    pub fn to_automaton(&self) -> StrategyAutomaton {
        self.to_outcome_automaton().minimized()
    }

    /// Extortionate zero-determinant strategy enforcing
    /// `pi_X - P = chi (pi_Y - P)`, with the largest feasible normalization.
    pub fn extortionate(chi: f64, params: &GameParams) -> Result<Self> {
        let spec = format!("ZD:chi={chi}");
        if !(chi.is_finite() && chi >= 1.0) {
            return Err(Error::strategy(&spec, "extortion factor chi must be at least 1"));
        }
        let own = params.payoff_vector();
        let opp = OutcomePair::ALL.map(|o| params.payoff_of(o.mirrored()));
        let base = [1.0, 1.0, 0.0, 0.0];
        let dir: [f64; 4] = std::array::from_fn(|i| {
            (own[i] - params.punishment) - chi * (opp[i] - params.punishment)
        });
        // largest phi with base + phi * dir inside [0, 1]^4
        let mut phi = f64::INFINITY;
        for i in 0..4 {
            if dir[i] > 0.0 {
                phi = phi.min((1.0 - base[i]) / dir[i]);
            } else if dir[i] < 0.0 {
                phi = phi.min(-base[i] / dir[i]);
            }
        }
        if !(phi.is_finite() && phi > 0.0) {
            return Err(Error::strategy(&spec, "no feasible normalization for these payoffs"));
        }
        let p = std::array::from_fn(|i| (base[i] + phi * dir[i]).clamp(0.0, 1.0));
        Memory1::new(p)
    }
}
