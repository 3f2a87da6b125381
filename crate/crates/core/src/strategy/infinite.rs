use crate::game::{Action, OutcomePair};

/// Strategies whose memory is unbounded; their payoffs come from Monte Carlo.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InfiniteMemoryKind {
    /// Defects first, then cooperates iff the opponent's implemented
    /// cooperations are at least its implemented defections.
    HardMajority,
    /// Tracks `d = max(0, d + [opponent D] - [own D])` and intends C iff
    /// `d <= delta`.
    CumulativeReciprocity { delta: u32 },
}

impl InfiniteMemoryKind {
    pub fn spec(&self) -> String {
        match self {
            InfiniteMemoryKind::HardMajority => "HardMajority".to_string(),
            InfiniteMemoryKind::CumulativeReciprocity { delta } => format!("CURE:delta={delta}"),
        }
    }

    pub fn player(&self) -> InfiniteMemoryPlayer {
        InfiniteMemoryPlayer {
            kind: *self,
            opponent_cooperations: 0,
            opponent_defections: 0,
            imbalance: 0,
        }
    }
}

/// Mutable simulator for one match; one instance per player per match.
#[derive(Debug, Clone)]
pub struct InfiniteMemoryPlayer {
    kind: InfiniteMemoryKind,
    opponent_cooperations: u64,
    opponent_defections: u64,
    imbalance: u64,
}

impl InfiniteMemoryPlayer {
    pub fn intent(&self) -> f64 {
        let cooperate = match self.kind {
            InfiniteMemoryKind::HardMajority => {
                let seen = self.opponent_cooperations + self.opponent_defections;
                seen > 0 && self.opponent_cooperations >= self.opponent_defections
            }
            InfiniteMemoryKind::CumulativeReciprocity { delta } => self.imbalance <= delta as u64,
        };
        if cooperate {
            1.0
        } else {
            0.0
        }
    }

    pub fn observe(&mut self, outcome: OutcomePair) {
        match outcome.opponent {
            Action::Cooperate => self.opponent_cooperations += 1,
            Action::Defect => self.opponent_defections += 1,
        }
        let up = (outcome.opponent == Action::Defect) as u64;
        let down = (outcome.own == Action::Defect) as u64;
        self.imbalance = (self.imbalance + up).saturating_sub(down);
    }

    pub fn imbalance(&self) -> u64 {
        self.imbalance
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::Action::{Cooperate as C, Defect as D};

    #[test]
    fn hard_majority_counts_opponent_moves() {
        let mut p = InfiniteMemoryKind::HardMajority.player();
        assert_eq!(p.intent(), 0.0);
        p.observe(OutcomePair::new(D, C));
        assert_eq!(p.intent(), 1.0);
        p.observe(OutcomePair::new(C, D));
        assert_eq!(p.intent(), 1.0);
        p.observe(OutcomePair::new(C, D));
        assert_eq!(p.intent(), 0.0);
    }

    #[test]
    fn cure_tolerates_up_to_delta() {
        let mut p = InfiniteMemoryKind::CumulativeReciprocity { delta: 2 }.player();
        for expected in [1.0, 1.0, 1.0, 0.0] {
            assert_eq!(p.intent(), expected);
            p.observe(OutcomePair::new(C, D));
        }
        // own defection against a defector keeps the imbalance
        p.observe(OutcomePair::new(D, D));
        assert_eq!(p.imbalance(), 4);
        // own defections pay the imbalance back down, never below zero
        for _ in 0..5 {
            p.observe(OutcomePair::new(D, C));
        }
        assert_eq!(p.imbalance(), 0);
        assert_eq!(p.intent(), 1.0);
    }
}
