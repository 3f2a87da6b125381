use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::game::{GameParams, OutcomePair};

use super::automaton::StrategyAutomaton;
use super::coordination::{AdcoStrategy, AonStrategy};
use super::infinite::{InfiniteMemoryKind, InfiniteMemoryPlayer};
use super::memory_one::Memory1;

/// Parsed strategy spec string, e.g. `AoN:K=16`, `ADCO:K=3,t=2`,
/// `GTFT:q=0.2`, `ZD:chi=3`, `CURE:delta=2`, `M1:1,0,0,0.6`.
#[derive(Debug, Clone, PartialEq)]
pub enum StrategySpec {
    AllC,
    AllD,
    Random,
    Tft,
    Gtft { q: f64 },
    Wsls,
    Grim,
    Zd { chi: f64 },
    HardMajority,
    Cure { delta: u32 },
    Aon { k: u32 },
    Adco { k: u32, t: u32 },
    Memory1(Memory1),
}

/// Every catalog entry, with one example spec string each.
pub const CATALOG_EXAMPLES: &[(&str, &str)] = &[
    ("ALLC", "unconditional cooperation [1,1,1,1]"),
    ("ALLD", "unconditional defection [0,0,0,0]"),
    ("RANDOM", "coin flip [0.5,0.5,0.5,0.5]"),
    ("TFT", "tit-for-tat [1,0,1,0]"),
    ("GTFT:q=0.2", "generous tit-for-tat [1,q,1,q]"),
    ("WSLS", "win-stay lose-shift [1,0,0,1]"),
    ("GRIM", "cooperate until any implemented defection, then defect forever"),
    ("ZD:chi=2", "extortionate zero-determinant strategy with factor chi"),
    ("HardMajority", "defect first, then cooperate iff opponent cooperated at least as often as it defected"),
    ("CURE:delta=2", "cumulative reciprocity with tolerance delta"),
    ("AoN:K=16", "All-or-None with cooperation threshold K"),
    ("ADCO:K=3,t=2", "adaptive coordination with threshold K and tolerance t"),
    ("M1:1,0,0,0.6", "memory-1 vector [pCC,pCD,pDC,pDD] (prefix p0 for a 5-entry form)"),
];

fn parse_key<T: FromStr>(spec: &str, args: &[(&str, &str)], key: &str) -> Result<T> {
    let raw = args
        .iter()
        .find(|(k, _)| k.eq_ignore_ascii_case(key))
        .map(|(_, v)| *v)
        .ok_or_else(|| Error::strategy(spec, format!("missing parameter `{key}`")))?;
    raw.trim()
        .parse()
        .map_err(|_| Error::strategy(spec, format!("cannot parse `{key}={raw}`")))
}

impl FromStr for StrategySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, rest) = match s.split_once(':') {
            Some((n, r)) => (n.trim(), Some(r.trim())),
            None => (s, None),
        };
        let args: Vec<(&str, &str)> = rest
            .map(|r| {
                r.split(',')
                    .filter_map(|kv| kv.split_once('='))
                    .map(|(k, v)| (k.trim(), v.trim()))
                    .collect()
            })
            .unwrap_or_default();
        let no_args = |spec: StrategySpec| match rest {
            None => Ok(spec),
            Some(_) => Err(Error::strategy(s, "takes no parameters")),
        };
        let spec = match name.to_ascii_uppercase().as_str() {
            "ALLC" => no_args(StrategySpec::AllC)?,
            "ALLD" => no_args(StrategySpec::AllD)?,
            "RANDOM" => no_args(StrategySpec::Random)?,
            "TFT" => no_args(StrategySpec::Tft)?,
            "WSLS" => no_args(StrategySpec::Wsls)?,
            "GRIM" => no_args(StrategySpec::Grim)?,
            "HARDMAJORITY" => no_args(StrategySpec::HardMajority)?,
            "GTFT" => StrategySpec::Gtft {
                q: parse_key(s, &args, "q")?,
            },
            "ZD" => StrategySpec::Zd {
                chi: parse_key(s, &args, "chi")?,
            },
            "CURE" => StrategySpec::Cure {
                delta: parse_key(s, &args, "delta")?,
            },
            "AON" => StrategySpec::Aon {
                k: parse_key(s, &args, "K")?,
            },
            "ADCO" => StrategySpec::Adco {
                k: parse_key(s, &args, "K")?,
                t: parse_key(s, &args, "t")?,
            },
            "M1" => {
                let values = rest
                    .ok_or_else(|| Error::strategy(s, "expected 4 or 5 probabilities"))?
                    .split(',')
                    .map(|v| v.trim().parse::<f64>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|e| Error::strategy(s, e.to_string()))?;
                let m = match values.as_slice() {
                    [a, b, c, d] => Memory1::new([*a, *b, *c, *d]),
                    [p0, a, b, c, d] => Memory1::with_first([*a, *b, *c, *d], Some(*p0)),
                    _ => return Err(Error::strategy(s, "expected 4 or 5 probabilities")),
                }
                .map_err(|_| Error::strategy(s, "probabilities must lie in [0, 1]"))?;
                StrategySpec::Memory1(m)
            }
            _ => return Err(Error::UnknownStrategy(s.to_string())),
        };
        spec.check(s)?;
        Ok(spec)
    }
}

impl StrategySpec {
    fn check(&self, raw: &str) -> Result<()> {
        match *self {
            StrategySpec::Gtft { q } if !(0.0..=1.0).contains(&q) => {
                Err(Error::strategy(raw, "q must lie in [0, 1]"))
            }
            StrategySpec::Zd { chi } if !(chi.is_finite() && chi >= 1.0) => {
                Err(Error::strategy(raw, "chi must be at least 1"))
            }
            StrategySpec::Aon { k: 0 } => Err(Error::strategy(raw, "K must be positive")),
            StrategySpec::Adco { k, t } if k == 0 || t == 0 => {
                Err(Error::strategy(raw, "K and t must be positive"))
            }
            _ => Ok(()),
        }
    }

    /// Memory-1 vector for specs that have one (ZD depends on the payoffs).
    pub fn memory_one(&self, params: &GameParams) -> Result<Option<Memory1>> {
        let m = |p| Memory1::new(p).map(Some);
        match *self {
            StrategySpec::AllC => m([1.0; 4]),
            StrategySpec::AllD => m([0.0; 4]),
            StrategySpec::Random => m([0.5; 4]),
            StrategySpec::Tft => m([1.0, 0.0, 1.0, 0.0]),
            StrategySpec::Gtft { q } => m([1.0, q, 1.0, q]),
            StrategySpec::Wsls => m([1.0, 0.0, 0.0, 1.0]),
            StrategySpec::Zd { chi } => Memory1::extortionate(chi, params).map(Some),
            StrategySpec::Memory1(v) => Ok(Some(v)),
            _ => Ok(None),
        }
    }

    pub fn build(&self, params: &GameParams) -> Result<Strategy> {
        self.check(&self.to_string())?;
        let label = self.to_string();
        if let Some(m) = self.memory_one(params)? {
            return Ok(Strategy::Automaton(m.to_automaton().with_label(label)));
        }
        let strategy = match *self {
            StrategySpec::Grim => Strategy::Automaton(grim().with_label(label)),
            StrategySpec::Aon { k } => Strategy::Automaton(AonStrategy::new(k)?.to_automaton()),
            StrategySpec::Adco { k, t } => {
                Strategy::Automaton(AdcoStrategy::new(k, t)?.to_automaton())
            }
            StrategySpec::HardMajority => Strategy::InfiniteMemory(InfiniteMemoryKind::HardMajority),
            StrategySpec::Cure { delta } => {
                Strategy::InfiniteMemory(InfiniteMemoryKind::CumulativeReciprocity { delta })
            }
            _ => unreachable!("memory-one specs handled above"),
        };
        Ok(strategy)
    }
}

impl fmt::Display for StrategySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrategySpec::AllC => write!(f, "ALLC"),
            StrategySpec::AllD => write!(f, "ALLD"),
            StrategySpec::Random => write!(f, "RANDOM"),
            StrategySpec::Tft => write!(f, "TFT"),
            StrategySpec::Gtft { q } => write!(f, "GTFT:q={q}"),
            StrategySpec::Wsls => write!(f, "WSLS"),
            StrategySpec::Grim => write!(f, "GRIM"),
            StrategySpec::Zd { chi } => write!(f, "ZD:chi={chi}"),
            StrategySpec::HardMajority => write!(f, "HardMajority"),
            StrategySpec::Cure { delta } => write!(f, "CURE:delta={delta}"),
            StrategySpec::Aon { k } => write!(f, "AoN:K={k}"),
            StrategySpec::Adco { k, t } => write!(f, "ADCO:K={k},t={t}"),
            StrategySpec::Memory1(m) => write!(f, "{}", m.spec()),
        }
    }
}

/// GRIM: cooperates until any implemented defection by either player.
pub fn grim() -> StrategyAutomaton {
    StrategyAutomaton::new("GRIM", vec![1.0, 0.0], vec![[0, 1, 1, 1], [1, 1, 1, 1]], 0)
        .expect("GRIM automaton is well-formed")
}

/// A strategy ready to play: either a finite automaton or an infinite-memory
/// simulator definition.
#[derive(Debug, Clone, PartialEq)]
pub enum Strategy {
    Automaton(StrategyAutomaton),
    InfiniteMemory(InfiniteMemoryKind),
}

impl Strategy {
    pub fn label(&self) -> String {
        match self {
            Strategy::Automaton(a) => a.label().to_string(),
            Strategy::InfiniteMemory(k) => k.spec(),
        }
    }

    pub fn as_automaton(&self) -> Option<&StrategyAutomaton> {
        match self {
            Strategy::Automaton(a) => Some(a),
            Strategy::InfiniteMemory(_) => None,
        }
    }

    pub fn player(&self) -> Player<'_> {
        match self {
            Strategy::Automaton(a) => Player::Automaton {
                automaton: a,
                state: a.initial_state(),
            },
            Strategy::InfiniteMemory(k) => Player::Infinite(k.player()),
        }
    }
}

/// Look up a catalog strategy by spec string.
pub fn catalog(spec: &str, params: &GameParams) -> Result<Strategy> {
    spec.parse::<StrategySpec>()?.build(params)
}

/// One player's running state during a simulated match.
#[derive(Debug, Clone)]
pub enum Player<'a> {
    Automaton {
        automaton: &'a StrategyAutomaton,
        state: usize,
    },
    Infinite(InfiniteMemoryPlayer),
}

impl Player<'_> {
    pub fn intent(&self) -> f64 {
        match self {
            Player::Automaton { automaton, state } => automaton.coop_intent(*state),
            Player::Infinite(p) => p.intent(),
        }
    }

    pub fn observe(&mut self, outcome: OutcomePair) {
        match self {
            Player::Automaton { automaton, state } => *state = automaton.next(*state, outcome),
            Player::Infinite(p) => p.observe(outcome),
        }
    }
}
