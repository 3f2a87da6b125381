use crate::strategy::{Memory1, StrategySpec};

/// The ten classic strategies of the multi-strategy competition.
pub const CLASSICS: [&str; 10] = [
    "GTFT:q=0.4",
    "GTFT:q=0.2",
    "WSLS",
    "ALLD",
    "GRIM",
    "ALLC",
    "RANDOM",
    "TFT",
    "ZD:chi=2",
    "ZD:chi=4",
];

pub const GRID_LEVELS: [f64; 6] = [0.0, 0.2, 0.4, 0.6, 0.8, 1.0];

pub fn classics_roster() -> Vec<StrategySpec> {
    CLASSICS
        .iter()
        .map(|s| s.parse().expect("classic specs parse"))
        .collect()
}

/// All 6^4 memory-1 vectors over [`GRID_LEVELS`], in lexicographic order of
/// `(p_CC, p_CD, p_DC, p_DD)`.
pub fn build_mem1_grid() -> Vec<Memory1> {
    let mut grid = Vec::with_capacity(1296);
    for a in GRID_LEVELS {
        for b in GRID_LEVELS {
            for c in GRID_LEVELS {
                for d in GRID_LEVELS {
                    grid.push(Memory1::new([a, b, c, d]).expect("grid levels are probabilities"));
                }
            }
        }
    }
    grid
}

/// `count` evenly spaced members of `0..len`, or all of them.
pub fn subsample_indices(len: usize, count: Option<usize>) -> Vec<usize> {
    match count {
        Some(c) if c < len => (0..c).map(|i| i * len / c).collect(),
        _ => (0..len).collect(),
    }
}
