//! Closed-form cooperation rates and self-payoffs for homogeneous AoN_K and
//! ADCO groups.

use crate::error::{Error, Result};
use crate::game::GameParams;

/// Per-round probability that all `n` members of a homogeneous group
/// implement the same action, `q = eps^n + (1 - eps)^n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupCoordination {
    pub n: u32,
    pub q: f64,
    /// `1 - q`, computed without cancellation.
    pub miss: f64,
}

impl GroupCoordination {
    pub fn new(n: u32, epsilon: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("group size must be at least 2, got {n}")));
        }
        if !(0.0..=0.5).contains(&epsilon) {
            return Err(Error::InvalidArgument(format!("epsilon {epsilon} outside [0, 0.5]")));
        }
        let eps_n = epsilon.powi(n as i32);
        let keep_n = (n as f64 * (-epsilon).ln_1p()).exp();
        let miss = -(n as f64 * (-epsilon).ln_1p()).exp_m1() - eps_n;
        Ok(GroupCoordination {
            n,
            q: keep_n + eps_n,
            miss: miss.max(0.0),
        })
    }

    /// `(q^m, 1 - q^m)` with the complement computed stably.
    fn power(&self, m: u32) -> (f64, f64) {
        let log_q = (-self.miss).ln_1p();
        let qm = (m as f64 * log_q).exp();
        let miss_m = -(m as f64 * log_q).exp_m1();
        (qm, miss_m)
    }
}

/// Group cooperation rate of N AoN_K players: `eps + (1 - 2 eps) q^K`.
pub fn aon_group_coop_rate(k: u32, n: u32, epsilon: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidArgument("K must be positive".into()));
    }
    let g = GroupCoordination::new(n, epsilon)?;
    let (qk, _) = g.power(k);
    Ok(epsilon + (1.0 - 2.0 * epsilon) * qk)
}

/// Group cooperation rate of N ADCO(K, t) players.
///
/// Evaluated as `[(1-q^K)(1-q^t) eps + q^K (1-eps)] / [(1-q^K)(1-q^t) + q^K]`,
/// which is the textbook expression with the common `1 - q` factor cancelled;
/// it is finite at `eps = 0`, where it equals 1.
pub fn adco_group_coop_rate(k: u32, t: u32, n: u32, epsilon: f64) -> Result<f64> {
    if k == 0 || t == 0 {
        return Err(Error::InvalidArgument("K and t must be positive".into()));
    }
    let g = GroupCoordination::new(n, epsilon)?;
    let (qk, miss_k) = g.power(k);
    let (_, miss_t) = g.power(t);
    let building = miss_k * miss_t;
    Ok((building * epsilon + qk * (1.0 - epsilon)) / (building + qk))
}

/// Long-run per-round payoff of AoN_K against itself.
pub fn aon_self_payoff(k: u32, params: &GameParams) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidArgument("K must be positive".into()));
    }
    params.validate()?;
    let eps = params.epsilon;
    let g = GroupCoordination::new(2, eps)?;
    let (qk, _) = g.power(k);
    let reward = eps * eps + (1.0 - 2.0 * eps) * qk;
    let punish = (1.0 - eps) * (1.0 - eps) - (1.0 - 2.0 * eps) * qk;
    let mixed = eps * (1.0 - eps);
    Ok(reward * params.reward
        + punish * params.punishment
        + mixed * (params.temptation + params.sucker))
}
