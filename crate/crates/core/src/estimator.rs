//! Recovering `k_A` and `k_B` from believe / don't-believe answers.
//!
//! With `m_A = m_B = 1` announced, a receiver's answer to an encoding
//! `(n_A, n_B)` only depends on the ratio `eta = n_B / n_A`: type A believes
//! iff `eta <= k_A`, type B iff `eta >= k_B`. [`estimate_k`] bisects on that
//! ratio. The first probe is `eta = 1`, i.e. full truth; a type-A receiver
//! that believes it proves `k_A >= 1` and the bracket becomes `[1, M]`,
//! otherwise `[0, 1]`. Each further probe is the bracket midpoint, announced
//! as `n_B = min(1, eta)`, `n_A = min(1, 1/eta)` so that one coordinate is
//! always 1. The search stops once the bracket is narrower than `delta`.
//!
//! A type with a negative `k` believes every probe, so the bracket collapses
//! onto `M` for type A and onto `0` for type B. Those limits are also the
//! values that make [`strategy_from_estimates`] treat the type as
//! unconstrained.

use std::io::{Read, Write};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::equilibrium::reduced_lp_feasible;
use crate::error::{Error, Result};
use crate::model::{Population, SenderStrategy, SourceType};

/// Noiseless believe feedback for an announced `(1, 1, n_A, n_B)`.
pub trait BelieveOracle {
    fn query(&self, side: SourceType, n_a: f64, n_b: f64) -> Result<bool>;
}

impl<O: BelieveOracle + ?Sized> BelieveOracle for &O {
    fn query(&self, side: SourceType, n_a: f64, n_b: f64) -> Result<bool> {
        (**self).query(side, n_a, n_b)
    }
}

/// Answers from the true receiver parameters.
#[derive(Debug, Clone, Copy)]
pub struct GroundTruthOracle {
    population: Population,
}

impl BelieveOracle for GroundTruthOracle {
    fn query(&self, side: SourceType, n_a: f64, n_b: f64) -> Result<bool> {
        let (a, b) = reduced_lp_feasible(n_a, n_b, &self.population);
        Ok(match side {
            SourceType::A => a,
            SourceType::B => b,
        })
    }
}

pub fn ground_truth_oracle(population: &Population) -> GroundTruthOracle {
    GroundTruthOracle { population: *population }
}

/// One row of an oracle log: `side,n_A,n_B,answer`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleRecord {
    pub side: SourceType,
    #[serde(rename = "n_A")]
    pub n_a: f64,
    #[serde(rename = "n_B")]
    pub n_b: f64,
    pub answer: bool,
}

/// Replays answers recorded in CSV. Queries must match a recorded row
/// exactly.
#[derive(Debug, Clone, Default)]
pub struct ReplayOracle {
    records: Vec<OracleRecord>,
}

impl ReplayOracle {
    pub fn new(records: Vec<OracleRecord>) -> Self {
        Self { records }
    }

    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(reader);
        let records = rdr
            .deserialize()
            .collect::<std::result::Result<Vec<OracleRecord>, _>>()
            .map_err(|e| Error::OracleLog(e.to_string()))?;
        Ok(Self { records })
    }

    pub fn records(&self) -> &[OracleRecord] {
        &self.records
    }
}

impl BelieveOracle for ReplayOracle {
    fn query(&self, side: SourceType, n_a: f64, n_b: f64) -> Result<bool> {
        self.records
            .iter()
            .find(|r| r.side == side && r.n_a == n_a && r.n_b == n_b)
            .map(|r| r.answer)
            .ok_or(Error::UnrecordedQuery { side, n_a, n_b })
    }
}

/// Wraps an oracle and keeps every query and answer.
#[derive(Debug)]
pub struct RecordingOracle<O> {
    inner: O,
    log: Mutex<Vec<OracleRecord>>,
}

impl<O: BelieveOracle> RecordingOracle<O> {
    pub fn new(inner: O) -> Self {
        Self { inner, log: Mutex::new(Vec::new()) }
    }

    pub fn records(&self) -> Vec<OracleRecord> {
        self.log.lock().expect("oracle log poisoned").clone()
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(writer);
        for r in self.records() {
            wtr.serialize(r).map_err(|e| Error::OracleLog(e.to_string()))?;
        }
        wtr.flush().map_err(|e| Error::OracleLog(e.to_string()))
    }
}

impl<O: BelieveOracle> BelieveOracle for RecordingOracle<O> {
    fn query(&self, side: SourceType, n_a: f64, n_b: f64) -> Result<bool> {
        let answer = self.inner.query(side, n_a, n_b)?;
        self.log.lock().expect("oracle log poisoned").push(OracleRecord { side, n_a, n_b, answer });
        Ok(answer)
    }
}

/// One probe of the bisection with the bracket after its update.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BisectionStep {
    pub ratio: f64,
    pub believed: bool,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimationResult {
    pub k_hat: f64,
    pub lower: f64,
    pub upper: f64,
    /// Number of oracle queries, including the first probe at ratio 1.
    pub steps: u32,
    /// The bracket never left `M`: the true value may exceed the search range.
    pub at_upper_bound: bool,
    pub trace: Vec<BisectionStep>,
}

impl EstimationResult {
    /// Edge of the bracket on the believed side: the lower bound for `k_A`,
    /// the upper bound for `k_B`. The true value is always on the far side
    /// of it, so ratios built from these edges are believed.
    pub fn conservative_edge(&self, side: SourceType) -> f64 {
        match side {
            SourceType::A => self.lower,
            SourceType::B => self.upper,
        }
    }
}

/// `ceil(log2(M / delta)) + 1`, the query budget of [`estimate_k`].
pub fn step_bound(delta: f64, max: f64) -> u32 {
    (max / delta).log2().ceil() as u32 + 1
}

/// Bisection estimate of `k_A` or `k_B` to resolution `delta` on `[0, max]`.
pub fn estimate_k<O: BelieveOracle + ?Sized>(
    oracle: &O,
    side: SourceType,
    delta: f64,
    max: f64,
) -> Result<EstimationResult> {
    if !(delta > 0.0 && max > 1.0 && delta < max && max.is_finite()) {
        return Err(Error::InvalidResolution { delta, max });
    }
    let (mut lower, mut upper) = (0.0_f64, max);
    let mut ratio = 1.0_f64;
    let mut trace = Vec::new();

    while upper - lower >= delta {
        let n_b = ratio.min(1.0);
        let n_a = (1.0 / ratio).min(1.0);
        let believed = oracle.query(side, n_a, n_b)?;
        // A believes below k_A, B believes above k_B
        let raise_lower = match side {
            SourceType::A => believed,
            SourceType::B => !believed,
        };
        if raise_lower {
            lower = ratio;
        } else {
            upper = ratio;
        }
        trace.push(BisectionStep { ratio, believed, lower, upper });
        ratio = (lower + upper) / 2.0;
    }

    Ok(EstimationResult {
        k_hat: (lower + upper) / 2.0,
        lower,
        upper,
        steps: trace.len() as u32,
        at_upper_bound: upper == max,
        trace,
    })
}

/// Sender strategy from (estimated) band edges, treating them as exact.
///
/// Empty band gives `(1, 1, 0, 0)`. Otherwise the ratio `n_B / n_A` is the
/// point of `[k_B, k_A]` closest to 1 and the larger of `n_A, n_B` is 1.
/// A negative `k_A` (type A believes anything) acts as `+inf`, a negative
/// `k_B` as `0`.
pub fn strategy_from_estimates(k_hat_a: f64, k_hat_b: f64) -> SenderStrategy {
    let upper = if k_hat_a < 0.0 { f64::INFINITY } else { k_hat_a };
    let lower = k_hat_b.max(0.0);
    if upper < lower {
        return SenderStrategy { m_a: 1.0, m_b: 1.0, n_a: 0.0, n_b: 0.0 };
    }
    let gamma = 1.0_f64.clamp(lower, upper);
    let (n_a, n_b) = if gamma <= 1.0 { (1.0, gamma) } else { (1.0 / gamma, 1.0) };
    SenderStrategy { m_a: 1.0, m_b: 1.0, n_a, n_b }
}

/// Runs both estimations and synthesizes a strategy from the conservative
/// bracket edges, so the result is believed whenever both true values lie
/// in `[0, max]` (or are negative).
pub fn synthesize_from_oracle<O: BelieveOracle + ?Sized>(
    oracle: &O,
    delta: f64,
    max: f64,
) -> Result<(EstimationResult, EstimationResult, SenderStrategy)> {
    let est_a = estimate_k(oracle, SourceType::A, delta, max)?;
    let est_b = estimate_k(oracle, SourceType::B, delta, max)?;
    let strategy =
        strategy_from_estimates(est_a.conservative_edge(SourceType::A), est_b.conservative_edge(SourceType::B));
    Ok((est_a, est_b, strategy))
}
