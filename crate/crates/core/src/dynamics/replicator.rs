//! Discrete replicator map for two competing strategies.
//!
//! Payoff blocks are written `[[pi(i,i), pi(i,j)], [pi(j,i), pi(j,j)]]` and
//! `x` is the share of strategy i.

use crate::error::{Error, Result};

pub type PayoffBlock = [[f64; 2]; 2];

pub const CONVERGENCE_TOLERANCE: f64 = 1e-12;
pub const MAX_GENERATIONS: usize = 1_000_000;
/// Distance from a boundary at which a converged run counts as fixation.
pub const BOUNDARY_TOLERANCE: f64 = 1e-6;

fn fitness(x: f64, p: &PayoffBlock) -> (f64, f64) {
    (
        x * p[0][0] + (1.0 - x) * p[0][1],
        x * p[1][0] + (1.0 - x) * p[1][1],
    )
}

/// One generation of `x' = x f_i / f_bar`.
pub fn replicator_step(x: f64, payoffs: &PayoffBlock) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidArgument(format!("share {x} is outside [0, 1]")));
    }
    let (fi, fj) = fitness(x, payoffs);
    let a = x * fi;
    let b = (1.0 - x) * fj;
    let mean = a + b;
    if !(mean > 0.0) {
        return Err(Error::NonPositiveFitness(mean));
    }
    Ok(a / mean)
}

/// Adds `1 + |min|` to every entry when any payoff is nonpositive.
pub fn shifted_payoffs(payoffs: &PayoffBlock) -> PayoffBlock {
    let min = payoffs.iter().flatten().copied().fold(f64::INFINITY, f64::min);
    if min > 0.0 {
        return *payoffs;
    }
    let shift = 1.0 + min.abs();
    payoffs.map(|row| row.map(|v| v + shift))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Convergence {
    Zero,
    One,
    Interior(f64),
    /// Generation cap reached first.
    None,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicatorTrajectory {
    /// `x` at generations `0, record_every, 2 * record_every, ...`, plus the
    /// final generation.
    pub x: Vec<(usize, f64)>,
    pub generations: usize,
    pub converged_to: Convergence,
}

impl ReplicatorTrajectory {
    pub fn final_share(&self) -> f64 {
        self.x.last().map(|&(_, x)| x).unwrap_or(f64::NAN)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplicatorOptions {
    pub tolerance: f64,
    pub max_generations: usize,
    pub record_every: usize,
}

impl Default for ReplicatorOptions {
    fn default() -> Self {
        ReplicatorOptions {
            tolerance: CONVERGENCE_TOLERANCE,
            max_generations: MAX_GENERATIONS,
            record_every: 1,
        }
    }
}

/// Iterates the map from `x0` on the shifted payoffs until the step falls
/// below the tolerance.
pub fn run_replicator(x0: f64, payoffs: &PayoffBlock, opts: ReplicatorOptions) -> Result<ReplicatorTrajectory> {
    let p = shifted_payoffs(payoffs);
    let every = opts.record_every.max(1);
    let mut x = x0;
    let mut xs = vec![(0, x0)];
    let mut converged = false;
    let mut generation = 0;
    while generation < opts.max_generations {
        let next = replicator_step(x, &p)?;
        generation += 1;
        let delta = (next - x).abs();
        x = next;
        if generation % every == 0 {
            xs.push((generation, x));
        }
        if delta < opts.tolerance {
            converged = true;
            break;
        }
    }
    if xs.last().map(|&(g, _)| g) != Some(generation) {
        xs.push((generation, x));
    }
    let converged_to = if !converged {
        Convergence::None
    } else if x < BOUNDARY_TOLERANCE {
        Convergence::Zero
    } else if x > 1.0 - BOUNDARY_TOLERANCE {
        Convergence::One
    } else {
        Convergence::Interior(x)
    };
    Ok(ReplicatorTrajectory {
        x: xs,
        generations: generation,
        converged_to,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    Stable,
    Unstable,
}

/// What happens between the two pure states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairStructure {
    /// Unstable interior point; each pure state has its own basin.
    Bistable,
    /// Stable interior point.
    Coexistence,
    FirstDominates,
    SecondDominates,
    Neutral,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointReport {
    pub x_star: Option<f64>,
    pub stability: Option<Stability>,
    /// Equals `x_star` when the point is unstable.
    pub basin_boundary: Option<f64>,
    pub structure: PairStructure,
}

/// Interior root of `f_i = f_j`, if any.
pub fn interior_fixed_point(payoffs: &PayoffBlock) -> FixedPointReport {
    let [[a, b], [c, d]] = *payoffs;
    let denom = a - b - c + d;
    let scale = [a, b, c, d].iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    if denom.abs() > 1e-14 * scale {
        let x = (d - b) / denom;
        if x > 0.0 && x < 1.0 {
            let stability = if denom > 0.0 {
                Stability::Unstable
            } else {
                Stability::Stable
            };
            return FixedPointReport {
                x_star: Some(x),
                stability: Some(stability),
                basin_boundary: (stability == Stability::Unstable).then_some(x),
                structure: match stability {
                    Stability::Unstable => PairStructure::Bistable,
                    Stability::Stable => PairStructure::Coexistence,
                },
            };
        }
    }
    // no sign change inside (0, 1): the midpoint decides
    let (fi, fj) = fitness(0.5, payoffs);
    let structure = if fi > fj {
        PairStructure::FirstDominates
    } else if fi < fj {
        PairStructure::SecondDominates
    } else {
        PairStructure::Neutral
    };
    FixedPointReport {
        x_star: None,
        stability: None,
        basin_boundary: None,
        structure,
    }
}

/// `f_i(x) - f_j(x)`.
pub fn fitness_gap(x: f64, payoffs: &PayoffBlock) -> f64 {
    let (fi, fj) = fitness(x, payoffs);
    fi - fj
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const PD: PayoffBlock = [[3.0, 0.0], [5.0, 1.0]];

    #[test]
    fn boundaries_are_absorbing() {
        let p = shifted_payoffs(&PD);
        assert_eq!(replicator_step(0.0, &p).unwrap(), 0.0);
        assert_eq!(replicator_step(1.0, &p).unwrap(), 1.0);
    }

    #[test]
    fn equal_payoffs_are_neutral() {
        let p = [[2.0, 2.0], [2.0, 2.0]];
        for x in [0.1, 0.37, 0.9] {
            assert_eq!(replicator_step(x, &p).unwrap(), x);
        }
    }

    #[test]
    fn one_shot_dilemma_favours_defection() {
        let p = shifted_payoffs(&PD);
        assert!(replicator_step(0.5, &p).unwrap() < 0.5);
        let run = run_replicator(0.5, &PD, ReplicatorOptions::default()).unwrap();
        assert_eq!(run.converged_to, Convergence::Zero);
    }

    #[test]
    fn nonpositive_mean_fitness_is_rejected() {
        assert!(replicator_step(0.5, &[[-1.0, -2.0], [0.0, -1.0]]).is_err());
        assert!(replicator_step(0.5, &[[0.0, 0.0], [0.0, 0.0]]).is_err());
    }

    #[test]
    fn shift_only_when_needed() {
        let p = [[3.0, 0.5], [1.5, 1.0]];
        assert_eq!(shifted_payoffs(&p), p);
        assert_eq!(shifted_payoffs(&PD), [[4.0, 1.0], [6.0, 2.0]]);
    }

    #[test]
    fn bistable_example() {
        let r = interior_fixed_point(&[[3.0, 0.5], [1.5, 1.0]]);
        assert!((r.x_star.unwrap() - 0.25).abs() < 1e-15);
        assert_eq!(r.stability, Some(Stability::Unstable));
        assert_eq!(r.basin_boundary, r.x_star);
        assert_eq!(r.structure, PairStructure::Bistable);
    }

    #[test]
    fn dominance_example() {
        let r = interior_fixed_point(&PD);
        assert_eq!(r.x_star, None);
        assert_eq!(r.structure, PairStructure::SecondDominates);
    }

    #[test]
    fn coexistence_is_stable_and_attracting() {
        // hawk-dove shape: each strategy does better against the other
        let p = [[1.0, 3.0], [2.0, 1.5]];
        let r = interior_fixed_point(&p);
        assert_eq!(r.stability, Some(Stability::Stable));
        let run = run_replicator(0.9, &p, ReplicatorOptions::default()).unwrap();
        match run.converged_to {
            Convergence::Interior(x) => assert!((x - r.x_star.unwrap()).abs() < 1e-9),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bistable_runs_split_at_the_boundary() {
        let p = [[3.0, 0.5], [1.5, 1.0]];
        let up = run_replicator(0.3, &p, ReplicatorOptions::default()).unwrap();
        let down = run_replicator(0.2, &p, ReplicatorOptions::default()).unwrap();
        assert_eq!(up.converged_to, Convergence::One);
        assert_eq!(down.converged_to, Convergence::Zero);
    }

    #[test]
    fn recording_keeps_the_final_generation() {
        let opts = ReplicatorOptions {
            record_every: 1000,
            ..Default::default()
        };
        let run = run_replicator(0.5, &PD, opts).unwrap();
        assert_eq!(run.x.last().unwrap().0, run.generations);
        assert_eq!(run.x[0], (0, 0.5));
    }

    proptest! {
        #[test]
        fn step_stays_in_simplex(x in 0.0f64..=1.0, p in proptest::array::uniform4(0.01f64..10.0)) {
            let block = [[p[0], p[1]], [p[2], p[3]]];
            let y = replicator_step(x, &block).unwrap();
            prop_assert!((0.0..=1.0).contains(&y));
        }

        #[test]
        fn fixed_point_equalizes_fitness(p in proptest::array::uniform4(-5.0f64..10.0)) {
            let block = [[p[0], p[1]], [p[2], p[3]]];
            if let Some(x) = interior_fixed_point(&block).x_star {
                prop_assert!(fitness_gap(x, &block).abs() < 1e-9);
            }
        }
    }
}
