//! Prisoner's dilemma primitives: actions, payoff parameters, implementation
//! noise and the coordination predicate.
//!
//! Every four-entry vector or matrix in this crate is indexed by
//! [`OutcomePair::index`]: `CC = 0`, `CD = 1`, `DC = 2`, `DD = 3`, always from
//! the focal player's perspective.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Action {
    Cooperate,
    Defect,
}

impl Action {
    pub fn is_cooperate(self) -> bool {
        self == Action::Cooperate
    }
}

/// Focal player's implemented action together with the opponent's.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OutcomePair {
    pub own: Action,
    pub opponent: Action,
}

impl OutcomePair {
    pub const ALL: [OutcomePair; 4] = [
        OutcomePair::new(Action::Cooperate, Action::Cooperate),
        OutcomePair::new(Action::Cooperate, Action::Defect),
        OutcomePair::new(Action::Defect, Action::Cooperate),
        OutcomePair::new(Action::Defect, Action::Defect),
    ];

    pub const fn new(own: Action, opponent: Action) -> Self {
        OutcomePair { own, opponent }
    }

    pub fn index(self) -> usize {
        (self.own as usize) * 2 + self.opponent as usize
    }

    pub fn from_index(index: usize) -> Self {
        Self::ALL[index]
    }

    /// The same round seen from the opponent's side.
    pub fn mirrored(self) -> Self {
        OutcomePair::new(self.opponent, self.own)
    }

    pub fn is_coordinated(self) -> bool {
        self.own == self.opponent
    }
}

/// Index of the mirrored outcome: swaps CD and DC.
pub fn mirror_index(index: usize) -> usize {
    [0, 2, 1, 3][index]
}

/// Actions implemented by an N-player group in one round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupOutcome {
    actions: Vec<Action>,
}

impl GroupOutcome {
    pub fn new(actions: Vec<Action>) -> Result<Self> {
        if actions.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "a group needs at least 2 members, got {}",
                actions.len()
            )));
        }
        Ok(GroupOutcome { actions })
    }

    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    pub fn size(&self) -> usize {
        self.actions.len()
    }
}

/// True iff every group member implemented the same action.
pub fn is_coordinated(outcome: &GroupOutcome) -> bool {
    let first = outcome.actions[0];
    outcome.actions.iter().all(|&a| a == first)
}

/// Payoffs `T > R > P > S` with `T + S < 2R`, plus the implementation error
/// rate `epsilon`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GameParams {
    #[serde(rename = "T")]
    pub temptation: f64,
    #[serde(rename = "R")]
    pub reward: f64,
    #[serde(rename = "P")]
    pub punishment: f64,
    #[serde(rename = "S")]
    pub sucker: f64,
    pub epsilon: f64,
}

impl Default for GameParams {
    fn default() -> Self {
        GameParams::axelrod(0.001)
    }
}

impl GameParams {
    /// `T = 5, R = 3, P = 1, S = 0`.
    pub fn axelrod(epsilon: f64) -> Self {
        GameParams {
            temptation: 5.0,
            reward: 3.0,
            punishment: 1.0,
            sucker: 0.0,
            epsilon,
        }
    }

    pub fn new(t: f64, r: f64, p: f64, s: f64, epsilon: f64) -> Result<Self> {
        let params = GameParams {
            temptation: t,
            reward: r,
            punishment: p,
            sucker: s,
            epsilon,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let GameParams {
            temptation: t,
            reward: r,
            punishment: p,
            sucker: s,
            epsilon,
        } = *self;
        if ![t, r, p, s, epsilon].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParams("payoffs and epsilon must be finite".into()));
        }
        if !(t > r) {
            return Err(Error::InvalidParams(format!("T > R violated (T={t}, R={r})")));
        }
        if !(r > p) {
            return Err(Error::InvalidParams(format!("R > P violated (R={r}, P={p})")));
        }
        if !(t + s < 2.0 * r) {
            return Err(Error::InvalidParams(format!(
                "T+S<2R violated (T+S={}, 2R={})",
                t + s,
                2.0 * r
            )));
        }
        if !(p > s) {
            return Err(Error::InvalidParams(format!("P > S violated (P={p}, S={s})")));
        }
        if !(0.0..=0.5).contains(&epsilon) {
            return Err(Error::InvalidParams(format!(
                "epsilon must lie in [0, 0.5], got {epsilon}"
            )));
        }
        Ok(())
    }

    /// Focal payoff for one round.
    pub fn payoff_of(&self, pair: OutcomePair) -> f64 {
        self.payoff_by_index(pair.index())
    }

    pub fn payoff_by_index(&self, index: usize) -> f64 {
        self.payoff_vector()[index]
    }

    /// `(R, S, T, P)` in outcome order.
    pub fn payoff_vector(&self) -> [f64; 4] {
        [self.reward, self.sucker, self.temptation, self.punishment]
    }

    /// Lowest and highest attainable per-round payoff, `(S, T)`.
    pub fn payoff_range(&self) -> (f64, f64) {
        (self.sucker, self.temptation)
    }
}

/// Probability that an intended cooperation probability `intent` is actually
/// implemented as C when each action flips with probability `epsilon`.
pub fn effective_coop_prob(intent: f64, epsilon: f64) -> f64 {
    (1.0 - epsilon) * intent + epsilon * (1.0 - intent)
}

#[cfg(test)]
mod tests {
    use super::*;
    use Action::{Cooperate as C, Defect as D};

    #[test]
    fn axelrod_params_are_valid() {
        assert!(GameParams::axelrod(0.001).validate().is_ok());
        assert!(GameParams::axelrod(0.0).validate().is_ok());
        assert!(GameParams::axelrod(0.5).validate().is_ok());
    }

    #[test]
    fn validation_names_the_broken_inequality() {
        let err = GameParams::new(5.0, 3.0, 1.0, 3.0, 0.0).unwrap_err();
        assert!(err.to_string().contains("T+S<2R"), "{err}");
        // P > S holds here, only the alternation condition breaks
        let err = GameParams::new(5.5, 3.0, 1.0, 0.5, 0.0).unwrap_err();
        assert!(err.to_string().contains("T+S<2R"), "{err}");
        let err = GameParams::new(3.0, 3.0, 1.0, 0.0, 0.0).unwrap_err();
        assert!(err.to_string().contains("T > R"), "{err}");
        let err = GameParams::new(5.0, 3.0, 1.0, 0.0, 0.6).unwrap_err();
        assert!(err.to_string().contains("epsilon"), "{err}");
        let err = GameParams::new(5.0, 3.0, 1.0, 0.0, -0.1).unwrap_err();
        assert!(err.to_string().contains("epsilon"), "{err}");
    }

    #[test]
    fn payoffs_follow_outcome_order() {
        let g = GameParams::axelrod(0.001);
        assert_eq!(g.payoff_of(OutcomePair::new(C, C)), 3.0);
        assert_eq!(g.payoff_of(OutcomePair::new(C, D)), 0.0);
        assert_eq!(g.payoff_of(OutcomePair::new(D, C)), 5.0);
        assert_eq!(g.payoff_of(OutcomePair::new(D, D)), 1.0);
        let total: f64 = OutcomePair::ALL.iter().map(|&o| g.payoff_of(o)).sum();
        assert_eq!(total, 9.0);
    }

    #[test]
    fn outcome_index_is_a_bijection() {
        for (i, o) in OutcomePair::ALL.iter().enumerate() {
            assert_eq!(o.index(), i);
            assert_eq!(OutcomePair::from_index(i), *o);
            assert_eq!(o.mirrored().index(), mirror_index(i));
        }
    }

    #[test]
    fn effective_probability_examples() {
        assert!((effective_coop_prob(1.0, 0.001) - 0.999).abs() < 1e-15);
        assert_eq!(effective_coop_prob(0.5, 0.3), 0.5);
        assert!((effective_coop_prob(0.0, 0.1) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn coordination_examples() {
        assert!(is_coordinated(&GroupOutcome::new(vec![C, C, C]).unwrap()));
        assert!(!is_coordinated(&GroupOutcome::new(vec![C, D, C]).unwrap()));
        assert!(is_coordinated(&GroupOutcome::new(vec![D, D]).unwrap()));
        assert!(GroupOutcome::new(vec![C]).is_err());
    }

    #[test]
    fn params_json_keys() {
        let g = GameParams::axelrod(0.01);
        let json = serde_json::to_string(&g).unwrap();
        assert_eq!(json, r#"{"T":5.0,"R":3.0,"P":1.0,"S":0.0,"epsilon":0.01}"#);
        let back: GameParams = serde_json::from_str(&json).unwrap();
        assert_eq!(back, g);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn effective_probability_symmetry(p in 0.0..=1.0f64, eps in 0.0..=0.5f64) {
                prop_assert!((effective_coop_prob(p, 0.0) - p).abs() < 1e-15);
                let s = effective_coop_prob(p, eps) + effective_coop_prob(1.0 - p, eps);
                prop_assert!((s - 1.0).abs() < 1e-14);
            }

            #[test]
            fn coordination_is_permutation_invariant(
                bits in proptest::collection::vec(any::<bool>(), 2..12),
                rot in 0usize..12,
            ) {
                let acts: Vec<Action> = bits.iter().map(|&b| if b { C } else { D }).collect();
                let mut rotated = acts.clone();
                let k = rot % rotated.len();
                rotated.rotate_left(k);
                rotated.reverse();
                let a = is_coordinated(&GroupOutcome::new(acts).unwrap());
                let b = is_coordinated(&GroupOutcome::new(rotated).unwrap());
                prop_assert_eq!(a, b);
            }
        }
    }
}
