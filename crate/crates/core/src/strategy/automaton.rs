use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::game::OutcomePair;

/// Finite-state strategy driven by implemented outcomes.
///
/// Each state carries the probability of *intending* to cooperate; noise is
/// applied by whoever plays the automaton. `next_state[s][o]` is the successor
/// of `s` after outcome `o` (focal perspective, outcome index order).
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyAutomaton {
    label: String,
    coop_intent: Vec<f64>,
    next_state: Vec<[usize; 4]>,
    initial_state: usize,
}

impl StrategyAutomaton {
    pub fn new(
        label: impl Into<String>,
        coop_intent: Vec<f64>,
        next_state: Vec<[usize; 4]>,
        initial_state: usize,
    ) -> Result<Self> {
        let label = label.into();
        let n = coop_intent.len();
        if n == 0 {
            return Err(Error::strategy(&label, "automaton needs at least one state"));
        }
        if next_state.len() != n {
            return Err(Error::strategy(
                &label,
                format!("{} intents but {} transition rows", n, next_state.len()),
            ));
        }
        if let Some(p) = coop_intent.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::strategy(&label, format!("cooperation intent {p} outside [0, 1]")));
        }
        if next_state.iter().flatten().any(|&s| s >= n) {
            return Err(Error::strategy(&label, "transition target out of range"));
        }
        if initial_state >= n {
            return Err(Error::strategy(&label, "initial state out of range"));
        }
        Ok(StrategyAutomaton {
            label,
            coop_intent,
            next_state,
            initial_state,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn state_count(&self) -> usize {
        self.coop_intent.len()
    }

    pub fn initial_state(&self) -> usize {
        self.initial_state
    }

    pub fn coop_intent(&self, state: usize) -> f64 {
        self.coop_intent[state]
    }

    pub fn intents(&self) -> &[f64] {
        &self.coop_intent
    }

    pub fn next(&self, state: usize, outcome: OutcomePair) -> usize {
        self.next_state[state][outcome.index()]
    }

    pub fn next_by_index(&self, state: usize, outcome_index: usize) -> usize {
        self.next_state[state][outcome_index]
    }

    /// Intent before each round of `history`, plus the intent after the last
    /// round.
    pub fn intents_along(&self, history: &[OutcomePair]) -> Vec<f64> {
        let mut state = self.initial_state;
        let mut out = Vec::with_capacity(history.len() + 1);
        out.push(self.coop_intent[state]);
        for &o in history {
            state = self.next(state, o);
            out.push(self.coop_intent[state]);
        }
        out
    }

    fn reachable(&self) -> Vec<usize> {
        let mut seen = vec![false; self.state_count()];
        let mut order = vec![self.initial_state];
        seen[self.initial_state] = true;
        let mut head = 0;
        while head < order.len() {
            let s = order[head];
            head += 1;
            for &t in &self.next_state[s] {
                if !seen[t] {
                    seen[t] = true;
                    order.push(t);
                }
            }
        }
        order
    }

    /// Smallest automaton with the same behavior, with states numbered in
    /// breadth-first order from the initial state.
    ///
    /// Two automata behave identically on every history iff their minimized
    /// forms are structurally equal (labels aside).
    pub fn minimized(&self) -> StrategyAutomaton {
        let reachable = self.reachable();

        // Moore refinement, starting from the partition by intent value.
        let mut class: HashMap<usize, usize> = HashMap::new();
        let mut ids: HashMap<u64, usize> = HashMap::new();
        for &s in &reachable {
            let n = ids.len();
            let id = *ids.entry(self.coop_intent[s].to_bits()).or_insert(n);
            class.insert(s, id);
        }
        let mut class_count = ids.len();
        loop {
            let mut sigs: HashMap<(usize, [usize; 4]), usize> = HashMap::new();
            let mut refined = HashMap::with_capacity(class.len());
            for &s in &reachable {
                let succ = self.next_state[s].map(|t| class[&t]);
                let n = sigs.len();
                let id = *sigs.entry((class[&s], succ)).or_insert(n);
                refined.insert(s, id);
            }
            let stable = sigs.len() == class_count;
            class = refined;
            class_count = sigs.len();
            if stable {
                break;
            }
        }

        // Canonical renumbering by BFS over classes.
        let mut representative = vec![usize::MAX; class_count];
        for &s in &reachable {
            let c = class[&s];
            if representative[c] == usize::MAX {
                representative[c] = s;
            }
        }
        let mut canon = vec![usize::MAX; class_count];
        let mut order = vec![class[&self.initial_state]];
        canon[order[0]] = 0;
        let mut head = 0;
        while head < order.len() {
            let c = order[head];
            head += 1;
            for &t in &self.next_state[representative[c]] {
                let tc = class[&t];
                if canon[tc] == usize::MAX {
                    canon[tc] = order.len();
                    order.push(tc);
                }
            }
        }
        let coop_intent = order
            .iter()
            .map(|&c| self.coop_intent[representative[c]])
            .collect();
        let next_state = order
            .iter()
            .map(|&c| self.next_state[representative[c]].map(|t| canon[class[&t]]))
            .collect();
        StrategyAutomaton {
            label: self.label.clone(),
            coop_intent,
            next_state,
            initial_state: 0,
        }
    }

    /// Behavioral equivalence: identical intents on every implemented history.
    pub fn bisimilar(&self, other: &StrategyAutomaton) -> bool {
        let a = self.minimized();
        let b = other.minimized();
        a.coop_intent == b.coop_intent && a.next_state == b.next_state
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_malformed_automata() {
        assert!(StrategyAutomaton::new("x", vec![], vec![], 0).is_err());
        assert!(StrategyAutomaton::new("x", vec![1.2], vec![[0; 4]], 0).is_err());
        assert!(StrategyAutomaton::new("x", vec![1.0], vec![[1, 0, 0, 0]], 0).is_err());
        assert!(StrategyAutomaton::new("x", vec![1.0], vec![[0; 4]], 1).is_err());
        assert!(StrategyAutomaton::new("x", vec![1.0, 0.0], vec![[0; 4]], 0).is_err());
    }

    #[test]
    fn minimization_merges_equivalent_states_and_drops_unreachable() {
        // states 0 and 1 both cooperate and always move to 0; state 2 is unreachable
        let a = StrategyAutomaton::new(
            "x",
            vec![1.0, 1.0, 0.0],
            vec![[1, 0, 1, 0], [0, 1, 0, 1], [2, 2, 2, 2]],
            0,
        )
        .unwrap();
        let m = a.minimized();
        assert_eq!(m.state_count(), 1);
        assert_eq!(m.intents(), &[1.0]);
        assert!(a.bisimilar(&m));
    }

    #[test]
    fn minimization_keeps_distinguishable_states() {
        // same intents, but state 1 leads to a defecting sink
        let a = StrategyAutomaton::new(
            "x",
            vec![1.0, 1.0, 0.0],
            vec![[0, 1, 0, 0], [2, 2, 2, 2], [2, 2, 2, 2]],
            0,
        )
        .unwrap();
        assert_eq!(a.minimized().state_count(), 3);
    }
}
