//! Row-stochastic Markov chains and their stationary distributions.
//!
//! Small chains (at most [`DIRECT_SOLVE_LIMIT`] states in the recurrent
//! class) are solved directly by Grassmann-Taksar-Heyman state reduction,
//! which only ever adds nonnegative numbers and therefore keeps full relative
//! precision even when transition probabilities differ by dozens of orders
//! of magnitude. Larger chains fall back to power iteration on the lazy
//! chain `(I + P) / 2`, which has the same stationary distribution and is
//! aperiodic.

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::error::{Error, Result};

pub const DIRECT_SOLVE_LIMIT: usize = 2000;
pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_MAX_ITERATIONS: usize = 1_000_000;

/// Sparse row-stochastic matrix: `rows[i]` lists `(j, P[i][j])` with
/// `P[i][j] > 0`. Self-loops are stored like any other entry.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovChain {
    rows: Vec<Vec<(usize, f64)>>,
}

impl MarkovChain {
    pub fn from_rows(rows: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        let n = rows.len();
        for (i, row) in rows.iter().enumerate() {
            if row.iter().any(|&(j, p)| j >= n || !(p >= 0.0) || !p.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "row {i} has an out-of-range column or invalid probability"
                )));
            }
        }
        let mut chain = MarkovChain { rows };
        for row in &mut chain.rows {
            row.retain(|&(_, p)| p > 0.0);
        }
        let dev = chain.max_row_sum_deviation();
        if dev > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "matrix is not row-stochastic (row sum off by {dev:e})"
            )));
        }
        Ok(chain)
    }

    pub fn from_dense(matrix: &[Vec<f64>]) -> Result<Self> {
        let n = matrix.len();
        if matrix.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument("matrix is not square".into()));
        }
        Self::from_rows(
            matrix
                .iter()
                .map(|r| r.iter().copied().enumerate().filter(|&(_, p)| p != 0.0).collect())
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    pub fn max_row_sum_deviation(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| (r.iter().map(|&(_, p)| p).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.len();
        let mut m = vec![vec![0.0; n]; n];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, p) in row {
                m[i][j] += p;
            }
        }
        m
    }

    /// `max_j |(pi P)_j - pi_j|`.
    pub fn residual(&self, pi: &[f64]) -> f64 {
        let next = self.left_multiply(pi);
        next.iter()
            .zip(pi)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    fn left_multiply(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        for (i, row) in self.rows.iter().enumerate() {
            let xi = x[i];
            if xi == 0.0 {
                continue;
            }
            for &(j, p) in row {
                out[j] += xi * p;
            }
        }
        out
    }

    /// States of each closed communicating class.
    pub fn closed_classes(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut graph = DiGraph::<(), ()>::with_capacity(n, 0);
        let nodes: Vec<_> = (0..n).map(|_| graph.add_node(())).collect();
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, _) in row {
                if i != j {
                    graph.add_edge(nodes[i], nodes[j], ());
                }
            }
        }
        let sccs = tarjan_scc(&graph);
        let mut component = vec![0usize; n];
        for (c, scc) in sccs.iter().enumerate() {
            for node in scc {
                component[node.index()] = c;
            }
        }
        sccs.into_iter()
            .enumerate()
            .filter(|(c, scc)| {
                scc.iter().all(|node| {
                    self.rows[node.index()]
                        .iter()
                        .all(|&(j, _)| component[j] == *c)
                })
            })
            .map(|(_, scc)| {
                let mut states: Vec<usize> = scc.iter().map(|n| n.index()).collect();
                states.sort_unstable();
                states
            })
            .collect()
    }
}

/// Probability vector with `pi P = pi`.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryDistribution {
    pub probabilities: Vec<f64>,
    pub residual: f64,
}

impl StationaryDistribution {
    pub fn get(&self, i: usize) -> f64 {
        self.probabilities[i]
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub tolerance: f64,
    pub max_iterations: usize,
    pub direct_limit: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tolerance: DEFAULT_TOLERANCE,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            direct_limit: DIRECT_SOLVE_LIMIT,
        }
    }
}

/// Stationary distribution with the default options and tolerance `tol`.
pub fn stationary(chain: &MarkovChain, tol: f64) -> Result<StationaryDistribution> {
    stationary_with(
        chain,
        SolverOptions {
            tolerance: tol,
            ..SolverOptions::default()
        },
    )
}

/// Unique stationary distribution of `chain`.
///
/// Transient states get probability zero. Chains with more than one closed
/// class are rejected as [`Error::Reducible`].
pub fn stationary_with(chain: &MarkovChain, opts: SolverOptions) -> Result<StationaryDistribution> {
    if chain.is_empty() {
        return Err(Error::InvalidArgument("empty chain".into()));
    }
    let closed = chain.closed_classes();
    if closed.len() != 1 {
        return Err(Error::Reducible {
            closed_classes: closed.len(),
        });
    }
    let class = &closed[0];
    let mut local = vec![usize::MAX; chain.len()];
    for (k, &s) in class.iter().enumerate() {
        local[s] = k;
    }
    let sub_rows: Vec<Vec<(usize, f64)>> = class
        .iter()
        .map(|&s| chain.rows[s].iter().map(|&(j, p)| (local[j], p)).collect())
        .collect();

    let sub = if class.len() <= opts.direct_limit {
        gth(&sub_rows)
    } else {
        lazy_power_iteration(&MarkovChain { rows: sub_rows }, opts)?
    };
    let mut probabilities = vec![0.0; chain.len()];
    for (k, &s) in class.iter().enumerate() {
        probabilities[s] = sub[k];
    }
    let residual = chain.residual(&probabilities);
    if !(residual < opts.tolerance) {
        return Err(Error::NotConverged {
            iterations: 0,
            residual,
        });
    }
    Ok(StationaryDistribution {
        probabilities,
        residual,
    })
}

/// GTH state reduction on an irreducible chain, using off-diagonal entries
/// only.
fn gth(rows: &[Vec<(usize, f64)>]) -> Vec<f64> {
    let n = rows.len();
    if n == 1 {
        return vec![1.0];
    }
    let mut a = vec![0.0; n * n];
    for (i, row) in rows.iter().enumerate() {
        for &(j, p) in row {
            if i != j {
                a[i * n + j] += p;
            }
        }
    }
    for k in (1..n).rev() {
        let s: f64 = a[k * n..k * n + k].iter().sum();
        debug_assert!(s > 0.0, "irreducible chain has outflow from every state");
        for i in 0..k {
            let f = a[i * n + k] / s;
            if f == 0.0 {
                continue;
            }
            let (upper, lower) = a.split_at_mut(k * n);
            let row_i = &mut upper[i * n..i * n + k];
            let row_k = &lower[..k];
            for (x, &y) in row_i.iter_mut().zip(row_k) {
                *x += f * y;
            }
        }
    }
    let mut pi = vec![0.0; n];
    pi[0] = 1.0;
    for j in 1..n {
        let s: f64 = a[j * n..j * n + j].iter().sum();
        let inflow: f64 = (0..j).map(|i| pi[i] * a[i * n + j]).sum();
        pi[j] = inflow / s;
    }
    let total: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|p| *p /= total);
    pi
}

fn lazy_power_iteration(chain: &MarkovChain, opts: SolverOptions) -> Result<Vec<f64>> {
    let n = chain.len();
    let mut x = vec![1.0 / n as f64; n];
    let mut residual = f64::INFINITY;
    for iteration in 1..=opts.max_iterations {
        let px = chain.left_multiply(&x);
        residual = px
            .iter()
            .zip(&x)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if residual < opts.tolerance * 0.1 {
            return Ok(px);
        }
        for (xi, pi) in x.iter_mut().zip(&px) {
            *xi = 0.5 * (*xi + pi);
        }
        if iteration % 64 == 0 {
            let total: f64 = x.iter().sum();
            x.iter_mut().for_each(|v| *v /= total);
        }
    }
    Err(Error::NotConverged {
        iterations: opts.max_iterations,
        residual,
    })
}
