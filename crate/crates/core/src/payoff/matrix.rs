//! Pairwise payoff tables, their CSV form and an on-disk cache.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::game::GameParams;
use crate::strategy::Strategy;

use super::monte_carlo::{monte_carlo_payoff, MonteCarloSettings};
use super::product::{automaton_pair_payoff, PairPayoff};

/// Long-run payoffs of one pair, with standard errors when simulated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairEvaluation {
    pub payoff: PairPayoff,
    pub std_error: Option<(f64, f64)>,
}

/// Analytical when both strategies are automata, Monte Carlo otherwise.
pub fn pair_payoff(
    a: &Strategy,
    b: &Strategy,
    params: &GameParams,
    mc: &MonteCarloSettings,
    seed: u64,
) -> Result<PairEvaluation> {
    match (a.as_automaton(), b.as_automaton()) {
        (Some(x), Some(y)) => Ok(PairEvaluation {
            payoff: automaton_pair_payoff(x, y, params)?,
            std_error: None,
        }),
        _ => {
            let r = monte_carlo_payoff(a, b, params, mc, seed)?;
            Ok(PairEvaluation {
                payoff: PairPayoff {
                    payoff_a: r.payoff_a.mean,
                    payoff_b: r.payoff_b.mean,
                    coop_rate_a: r.coop_rate_a.mean,
                    coop_rate_b: r.coop_rate_b.mean,
                },
                std_error: Some((r.payoff_a.std_error, r.payoff_b.std_error)),
            })
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for the unordered pair `(i, j)`, independent of evaluation order.
pub fn pair_seed(master: u64, i: usize, j: usize) -> u64 {
    let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
    splitmix64(master ^ splitmix64(((lo as u64) << 32) | hi as u64))
}

/// `payoffs[i][j]` is the long-run payoff of strategy i against j;
/// `coop[i][j]` is i's implemented cooperation rate in that match.
#[derive(Debug, Clone, PartialEq)]
pub struct PayoffMatrix {
    pub labels: Vec<String>,
    pub payoffs: Vec<Vec<f64>>,
    pub coop: Vec<Vec<f64>>,
}

impl PayoffMatrix {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn payoff(&self, i: usize, j: usize) -> f64 {
        self.payoffs[i][j]
    }

    /// Self-play cooperation rates.
    pub fn self_coop(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.coop[i][i]).collect()
    }

    /// 2x2 block `[[pi(i,i), pi(i,j)], [pi(j,i), pi(j,j)]]`.
    pub fn pair_block(&self, i: usize, j: usize) -> [[f64; 2]; 2] {
        [
            [self.payoffs[i][i], self.payoffs[i][j]],
            [self.payoffs[j][i], self.payoffs[j][j]],
        ]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Keeps only the listed strategies, in the given order.
    pub fn subset(&self, indices: &[usize]) -> PayoffMatrix {
        PayoffMatrix {
            labels: indices.iter().map(|&i| self.labels[i].clone()).collect(),
            payoffs: indices
                .iter()
                .map(|&i| indices.iter().map(|&j| self.payoffs[i][j]).collect())
                .collect(),
            coop: indices
                .iter()
                .map(|&i| indices.iter().map(|&j| self.coop[i][j]).collect())
                .collect(),
        }
    }
}

/// Evaluates every unordered pair once (in parallel) and fills both entries
/// from the same computation.
pub fn payoff_matrix(
    strategies: &[Strategy],
    params: &GameParams,
    mc: &MonteCarloSettings,
    seed: u64,
) -> Result<PayoffMatrix> {
    if strategies.is_empty() {
        return Err(Error::InvalidArgument("payoff matrix needs at least one strategy".into()));
    }
    params.validate()?;
    let n = strategies.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let results: Vec<PairEvaluation> = pairs
        .par_iter()
        .map(|&(i, j)| {
            pair_payoff(&strategies[i], &strategies[j], params, mc, pair_seed(seed, i, j)).map_err(
                |e| Error::Pair {
                    row: strategies[i].label(),
                    col: strategies[j].label(),
                    source: Box::new(e),
                },
            )
        })
        .collect::<Result<_>>()?;
    let mut payoffs = vec![vec![0.0; n]; n];
    let mut coop = vec![vec![0.0; n]; n];
    for (&(i, j), r) in pairs.iter().zip(&results) {
        payoffs[i][j] = r.payoff.payoff_a;
        payoffs[j][i] = r.payoff.payoff_b;
        coop[i][j] = r.payoff.coop_rate_a;
        coop[j][i] = r.payoff.coop_rate_b;
    }
    Ok(PayoffMatrix {
        labels: strategies.iter().map(Strategy::label).collect(),
        payoffs,
        coop,
    })
}

/// 17 significant digits; parses back to the identical `f64`.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn companion(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("payoffs");
    path.with_file_name(format!("{stem}.{suffix}.csv"))
}

/// Path of the self-play cooperation file written next to `path`.
pub fn coop_rates_path(path: &Path) -> PathBuf {
    companion(path, "coop")
}

fn write_square(path: &Path, meta: &[(String, String)], labels: &[String], rows: &[Vec<f64>]) -> Result<()> {
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    for (k, v) in meta {
        writeln!(file, "# {k}: {v}").map_err(|e| Error::io(path, e))?;
    }
    let mut w = csv::Writer::from_writer(file);
    let mut header = vec!["strategy".to_string()];
    header.extend(labels.iter().cloned());
    w.write_record(&header)?;
    for (label, row) in labels.iter().zip(rows) {
        let mut rec = vec![label.clone()];
        rec.extend(row.iter().map(|&v| format_float(v)));
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

fn read_metadata(text: &str) -> Vec<(String, String)> {
    text.lines()
        .take_while(|l| l.starts_with('#'))
        .filter_map(|l| l[1..].trim().split_once(':'))
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .collect()
}

fn parse_float(path: &Path, raw: &str) -> Result<f64> {
    raw.trim().parse().map_err(|_| Error::Config {
        path: path.display().to_string(),
        message: format!("cannot parse number `{raw}`"),
    })
}

/// Metadata, labels and values of a square table.
type SquareTable = (Vec<(String, String)>, Vec<String>, Vec<Vec<f64>>);

fn read_square(path: &Path) -> Result<SquareTable> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let meta = read_metadata(&text);
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let labels: Vec<String> = r.headers()?.iter().skip(1).map(str::to_string).collect();
    let mut rows = Vec::with_capacity(labels.len());
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        if rec.get(0) != labels.get(i).map(String::as_str) || rec.len() != labels.len() + 1 {
            return Err(Error::Config {
                path: path.display().to_string(),
                message: format!("row {} does not match the header", i + 1),
            });
        }
        rows.push(rec.iter().skip(1).map(|v| parse_float(path, v)).collect::<Result<Vec<_>>>()?);
    }
    if rows.len() != labels.len() {
        return Err(Error::Config {
            path: path.display().to_string(),
            message: "matrix is not square".into(),
        });
    }
    Ok((meta, labels, rows))
}

impl PayoffMatrix {
    /// Writes the payoff table to `path`, self-play cooperation rates to
    /// `<stem>.coop.csv` and the full cooperation table to
    /// `<stem>.coop_matrix.csv`.
    pub fn write_csv(&self, path: &Path, meta: &[(String, String)]) -> Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        write_square(path, meta, &self.labels, &self.payoffs)?;
        write_square(&companion(path, "coop_matrix"), meta, &self.labels, &self.coop)?;
        let coop_path = coop_rates_path(path);
        let mut file = fs::File::create(&coop_path).map_err(|e| Error::io(&coop_path, e))?;
        for (k, v) in meta {
            writeln!(file, "# {k}: {v}").map_err(|e| Error::io(&coop_path, e))?;
        }
        let mut w = csv::Writer::from_writer(file);
        w.write_record(["strategy", "self_coop_rate"])?;
        for (label, rate) in self.labels.iter().zip(self.self_coop()) {
            w.write_record([label.clone(), format_float(rate)])?;
        }
        w.flush().map_err(|e| Error::io(&coop_path, e))?;
        Ok(())
    }

    /// Reads a table written by [`PayoffMatrix::write_csv`], returning its
    /// metadata lines as well.
    pub fn read_csv(path: &Path) -> Result<(PayoffMatrix, Vec<(String, String)>)> {
        let (meta, labels, payoffs) = read_square(path)?;
        let (_, coop_labels, coop) = read_square(&companion(path, "coop_matrix"))?;
        if coop_labels != labels {
            return Err(Error::Config {
                path: path.display().to_string(),
                message: "cooperation table labels differ from payoff table".into(),
            });
        }
        Ok((
            PayoffMatrix {
                labels,
                payoffs,
                coop,
            },
            meta,
        ))
    }
}

#[derive(Serialize)]
struct CacheKey<'a> {
    specs: &'a [String],
    params: &'a GameParams,
    monte_carlo: &'a MonteCarloSettings,
    seed: u64,
}

/// Hex digest identifying a payoff computation.
pub fn cache_key(specs: &[String], params: &GameParams, mc: &MonteCarloSettings, seed: u64) -> String {
    let json = serde_json::to_vec(&CacheKey {
        specs,
        params,
        monte_carlo: mc,
        seed,
    })
    .expect("cache key serializes");
    Sha256::digest(&json)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Loads the matrix from `cache` when its key matches, otherwise computes it
/// and (if a path is given) stores it.
pub fn payoff_matrix_cached(
    strategies: &[Strategy],
    params: &GameParams,
    mc: &MonteCarloSettings,
    seed: u64,
    cache: Option<&Path>,
) -> Result<PayoffMatrix> {
    let specs: Vec<String> = strategies.iter().map(Strategy::label).collect();
    let key = cache_key(&specs, params, mc, seed);
    if let Some(path) = cache {
        if path.exists() {
            if let Ok((m, meta)) = PayoffMatrix::read_csv(path) {
                let hit = meta.iter().any(|(k, v)| k == "key" && *v == key);
                if hit && m.labels == specs {
                    return Ok(m);
                }
            }
        }
    }
    let m = payoff_matrix(strategies, params, mc, seed)?;
    if let Some(path) = cache {
        let meta = vec![
            ("key".to_string(), key),
            ("params".to_string(), serde_json::to_string(params)?),
        ];
        m.write_csv(path, &meta)?;
    }
    Ok(m)
}
