//! Parameter sweeps over the closed-form equilibrium, monotonicity audits
//! and a Monte Carlo check that believed strategies deliver accuracy `Q/4`.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::equilibrium::{closed_form_equilibrium, AugmentedParams, CaseLabel};
use crate::error::{Error, Result};
use crate::format::sig12;
use crate::model::{sample_play, IdentityProfile, Population, SenderStrategy, SourcePrior, SourceType};
use crate::receiver::{believes, best_response};

/// Adjacent-pair tolerance of the monotonicity audit.
pub const MONOTONICITY_TOLERANCE: f64 = 1e-9;

/// One of the eight receiver parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Param {
    #[serde(rename = "lambda_a_A")]
    AccuracyA,
    #[serde(rename = "lambda_s_A")]
    IdentityA,
    #[serde(rename = "lambda_a_B")]
    AccuracyB,
    #[serde(rename = "lambda_s_B")]
    IdentityB,
    #[serde(rename = "delta_I_A")]
    InGroupA,
    #[serde(rename = "delta_I_B")]
    InGroupB,
    #[serde(rename = "delta_O_A")]
    OutGroupA,
    #[serde(rename = "delta_O_B")]
    OutGroupB,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Nonincreasing,
    Nondecreasing,
}

impl Param {
    pub const ALL: [Param; 8] = [
        Param::AccuracyA,
        Param::IdentityA,
        Param::AccuracyB,
        Param::IdentityB,
        Param::InGroupA,
        Param::InGroupB,
        Param::OutGroupA,
        Param::OutGroupB,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Param::AccuracyA => "lambda_a_A",
            Param::IdentityA => "lambda_s_A",
            Param::AccuracyB => "lambda_a_B",
            Param::IdentityB => "lambda_s_B",
            Param::InGroupA => "delta_I_A",
            Param::InGroupB => "delta_I_B",
            Param::OutGroupA => "delta_O_A",
            Param::OutGroupB => "delta_O_B",
        }
    }

    pub fn receiver(&self) -> SourceType {
        match self {
            Param::AccuracyA | Param::IdentityA | Param::InGroupA | Param::OutGroupA => SourceType::A,
            _ => SourceType::B,
        }
    }

    pub fn is_weight(&self) -> bool {
        matches!(self, Param::AccuracyA | Param::IdentityA | Param::AccuracyB | Param::IdentityB)
    }

    /// The other weight of the same receiver type.
    pub fn complement(&self) -> Option<Param> {
        match self {
            Param::AccuracyA => Some(Param::IdentityA),
            Param::IdentityA => Some(Param::AccuracyA),
            Param::AccuracyB => Some(Param::IdentityB),
            Param::IdentityB => Some(Param::AccuracyB),
            _ => None,
        }
    }

    /// Direction in which equilibrium quality is expected to move as this
    /// parameter grows: down with identity weight, up with accuracy weight,
    /// up with the out-group/in-group separation.
    pub fn claimed_direction(&self) -> Direction {
        match self {
            Param::AccuracyA | Param::AccuracyB | Param::OutGroupA | Param::OutGroupB => Direction::Nondecreasing,
            Param::IdentityA | Param::IdentityB | Param::InGroupA | Param::InGroupB => Direction::Nonincreasing,
        }
    }

    pub fn get(&self, population: &Population) -> f64 {
        let p = population.profile(self.receiver());
        match self {
            Param::AccuracyA | Param::AccuracyB => p.accuracy_weight(),
            Param::IdentityA | Param::IdentityB => p.identity_weight(),
            Param::InGroupA | Param::InGroupB => p.in_group_penalty(),
            Param::OutGroupA | Param::OutGroupB => p.out_group_penalty(),
        }
    }

    pub fn set(&self, population: &Population, value: f64) -> Result<Population> {
        let p = population.profile(self.receiver());
        let mut v = [p.accuracy_weight(), p.identity_weight(), p.in_group_penalty(), p.out_group_penalty()];
        let slot = match self {
            Param::AccuracyA | Param::AccuracyB => 0,
            Param::IdentityA | Param::IdentityB => 1,
            Param::InGroupA | Param::InGroupB => 2,
            Param::OutGroupA | Param::OutGroupB => 3,
        };
        v[slot] = value;
        let profile = IdentityProfile::new(v[0], v[1], v[2], v[3])?;
        let mut out = *population;
        match self.receiver() {
            SourceType::A => out.profile_a = profile,
            SourceType::B => out.profile_b = profile,
        }
        Ok(out)
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Param {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Param::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::InvalidSweep(format!("unknown parameter {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepAxis {
    pub param: Param,
    pub lo: f64,
    pub hi: f64,
    pub resolution: usize,
}

impl SweepAxis {
    pub fn new(param: Param, lo: f64, hi: f64, resolution: usize) -> Self {
        Self { param, lo, hi, resolution }
    }

    /// Evenly spaced grid values, endpoints included.
    pub fn values(&self) -> Vec<f64> {
        if self.resolution == 1 {
            return vec![self.lo];
        }
        let step = (self.hi - self.lo) / (self.resolution - 1) as f64;
        (0..self.resolution)
            .map(|i| if i + 1 == self.resolution { self.hi } else { self.lo + step * i as f64 })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: Population,
    pub axes: Vec<SweepAxis>,
    /// Keep each swept type's weights on the simplex: sweeping one weight
    /// sets the other to `1 - value`.
    pub simplex_constrained: bool,
}

impl SweepSpec {
    pub fn one_dimensional(base: Population, axis: SweepAxis) -> Self {
        Self { base, axes: vec![axis], simplex_constrained: false }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSweep(msg));
        if self.axes.is_empty() || self.axes.len() > 2 {
            return bad(format!("expected 1 or 2 axes, got {}", self.axes.len()));
        }
        if self.axes.len() == 2 && self.axes[0].param == self.axes[1].param {
            return bad(format!("axis {} swept twice", self.axes[0].param));
        }
        for axis in &self.axes {
            let name = axis.param;
            if !(axis.lo.is_finite() && axis.hi.is_finite()) || axis.lo > axis.hi {
                return bad(format!("{name}: range [{}, {}] is not a finite interval", axis.lo, axis.hi));
            }
            if axis.lo < 0.0 {
                return bad(format!("{name}: range must be nonnegative"));
            }
            match axis.resolution {
                0 => return bad(format!("{name}: resolution must be positive")),
                1 if axis.lo != axis.hi => return bad(format!("{name}: resolution 1 needs a degenerate range")),
                _ => {}
            }
            if self.simplex_constrained && axis.param.is_weight() {
                if axis.hi > 1.0 {
                    return bad(format!("{name}: simplex-constrained weight must stay in [0, 1]"));
                }
                let complement = axis.param.complement();
                if self.axes.iter().any(|a| Some(a.param) == complement) {
                    return bad(format!("{name}: both weights of one type swept under the simplex constraint"));
                }
            }
        }
        Ok(())
    }

    fn population_at(&self, values: &[f64]) -> Result<Population> {
        let mut pop = self.base;
        for (axis, &v) in self.axes.iter().zip(values) {
            pop = axis.param.set(&pop, v)?;
            if self.simplex_constrained {
                if let Some(c) = axis.param.complement() {
                    pop = c.set(&pop, 1.0 - v)?;
                }
            }
        }
        Ok(pop)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    /// Position in the grid, one index per axis.
    pub index: Vec<usize>,
    pub axis_values: Vec<f64>,
    pub params: AugmentedParams,
    pub case_label: CaseLabel,
    pub n_a: f64,
    pub n_b: f64,
    pub quality: f64,
    /// Both receiver types believe the cell's equilibrium strategy.
    pub believed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedCell {
    pub index: Vec<usize>,
    pub axis_values: Vec<f64>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub axes: Vec<Param>,
    pub records: Vec<SweepRecord>,
    pub skipped: Vec<SkippedCell>,
}

impl SweepResult {
    pub fn quality_range(&self) -> Option<(f64, f64)> {
        self.records.iter().map(|r| r.quality).fold(None, |acc, q| match acc {
            None => Some((q, q)),
            Some((lo, hi)) => Some((lo.min(q), hi.max(q))),
        })
    }

    pub fn unbelieved(&self) -> usize {
        self.records.iter().filter(|r| !r.believed).count()
    }
}

enum Cell {
    Record(SweepRecord),
    Skipped(SkippedCell),
}

/// Closed-form equilibrium at every grid cell, row-major over the axes.
/// Cells that break the out-group >= in-group restriction are skipped.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let grids: Vec<Vec<f64>> = spec.axes.iter().map(SweepAxis::values).collect();
    let mut indices: Vec<Vec<usize>> = vec![vec![]];
    for grid in &grids {
        indices = indices
            .into_iter()
            .flat_map(|prefix| {
                (0..grid.len()).map(move |i| {
                    let mut next = prefix.clone();
                    next.push(i);
                    next
                })
            })
            .collect();
    }

    let cells = indices
        .into_par_iter()
        .map(|index| -> Result<Cell> {
            let axis_values: Vec<f64> = index.iter().zip(&grids).map(|(&i, g)| g[i]).collect();
            let pop = spec.population_at(&axis_values)?;
            if let Err(e) = pop.require_restricted() {
                return Ok(Cell::Skipped(SkippedCell { index, axis_values, reason: e.to_string() }));
            }
            let eq = closed_form_equilibrium(&pop)?;
            Ok(Cell::Record(SweepRecord {
                index,
                axis_values,
                params: eq.params,
                case_label: eq.case_label,
                n_a: eq.strategy.n_a,
                n_b: eq.strategy.n_b,
                quality: eq.quality,
                believed: believes(&eq.strategy, &pop) == (true, true),
            }))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut records = Vec::new();
    let mut skipped = Vec::new();
    for c in cells {
        match c {
            Cell::Record(r) => records.push(r),
            Cell::Skipped(s) => skipped.push(s),
        }
    }
    Ok(SweepResult { axes: spec.axes.iter().map(|a| a.param).collect(), records, skipped })
}

pub const SWEEP_HEADER: [&str; 8] = ["axis1", "axis2", "k_A", "k_B", "case", "n_A", "n_B", "Q"];

fn csv_writer<W: Write>(writer: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(writer)
}

fn csv_error(e: csv::Error) -> std::io::Error {
    std::io::Error::other(e)
}

pub fn write_sweep_csv<W: Write>(result: &SweepResult, writer: W) -> std::io::Result<()> {
    let mut wtr = csv_writer(writer);
    wtr.write_record(SWEEP_HEADER).map_err(csv_error)?;
    for r in &result.records {
        let axis2 = r.axis_values.get(1).map(|v| sig12(*v)).unwrap_or_default();
        wtr.write_record([
            sig12(r.axis_values[0]),
            axis2,
            sig12(r.params.k_a),
            sig12(r.params.k_b),
            r.case_label.to_string(),
            sig12(r.n_a),
            sig12(r.n_b),
            sig12(r.quality),
        ])
        .map_err(csv_error)?;
    }
    wtr.flush()
}

/// An adjacent pair of cells along one axis that moves against the
/// expected direction by more than [`MONOTONICITY_TOLERANCE`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub param: Param,
    pub expected: Direction,
    /// Full coordinates of the two cells.
    pub from: Vec<f64>,
    pub to: Vec<f64>,
    pub quality_from: f64,
    pub quality_to: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub param: Param,
    pub direction: Direction,
    pub pairs_checked: usize,
    pub violations: Vec<Violation>,
}

impl MonotonicityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn moves_against(direction: Direction, from: f64, to: f64) -> bool {
    match direction {
        Direction::Nonincreasing => to > from + MONOTONICITY_TOLERANCE,
        Direction::Nondecreasing => to < from - MONOTONICITY_TOLERANCE,
    }
}

/// Checks every line of `result` parallel to axis `dim` against `direction`.
fn audit_axis(result: &SweepResult, dim: usize, direction: Direction) -> MonotonicityReport {
    let mut lines: BTreeMap<Vec<usize>, Vec<&SweepRecord>> = BTreeMap::new();
    for r in &result.records {
        let mut key = r.index.clone();
        key.remove(dim);
        lines.entry(key).or_default().push(r);
    }
    let param = result.axes[dim];
    let mut pairs_checked = 0;
    let mut violations = Vec::new();
    for line in lines.values_mut() {
        line.sort_by_key(|r| r.index[dim]);
        for w in line.windows(2) {
            pairs_checked += 1;
            if moves_against(direction, w[0].quality, w[1].quality) {
                violations.push(Violation {
                    param,
                    expected: direction,
                    from: w[0].axis_values.clone(),
                    to: w[1].axis_values.clone(),
                    quality_from: w[0].quality,
                    quality_to: w[1].quality,
                });
            }
        }
    }
    MonotonicityReport { param, direction, pairs_checked, violations }
}

/// Audits a one-dimensional sweep along `axis`.
pub fn audit_monotonicity(spec: &SweepSpec, axis: Param, direction: Direction) -> Result<MonotonicityReport> {
    if spec.axes.len() != 1 || spec.axes[0].param != axis {
        return Err(Error::InvalidSweep(format!("monotonicity audit needs a 1-D sweep along {axis}")));
    }
    let result = run_sweep(spec)?;
    Ok(audit_axis(&result, 0, direction))
}

/// Audits every axis of a finished sweep in its [`Param::claimed_direction`].
pub fn audit_sweep(result: &SweepResult) -> Vec<MonotonicityReport> {
    (0..result.axes.len()).map(|dim| audit_axis(result, dim, result.axes[dim].claimed_direction())).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonteCarloEstimate {
    pub n: u64,
    pub seed: u64,
    pub accuracy: f64,
    pub std_error: f64,
    /// `quality / 4`.
    pub expected: f64,
}

impl MonteCarloEstimate {
    /// Empirical accuracy within `sigmas` worst-case binomial standard
    /// deviations (`sqrt(0.25 / N)`) of the expectation.
    pub fn within(&self, sigmas: f64) -> bool {
        (self.accuracy - self.expected).abs() <= sigmas * (0.25 / self.n as f64).sqrt()
    }
}

/// Fraction of `n` sampled plays in which the receiver's estimate equals the
/// state. Each play draws the receiver's type uniformly. Both types must
/// believe `strategy`.
pub fn monte_carlo_accuracy(
    strategy: &SenderStrategy,
    population: &Population,
    n: u64,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    if n == 0 {
        return Err(Error::InvalidSampleSize);
    }
    match believes(strategy, population) {
        (false, _) => return Err(Error::NonBelievingReceiver(SourceType::A)),
        (_, false) => return Err(Error::NonBelievingReceiver(SourceType::B)),
        _ => {}
    }
    let decode_a = best_response(strategy, population, SourceType::A);
    let decode_b = best_response(strategy, population, SourceType::B);
    let prior = SourcePrior::uniform();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0u64;
    for _ in 0..n {
        let theta_bar = if rng.random_bool(0.5) { SourceType::A } else { SourceType::B };
        let play = sample_play(&prior, strategy, &decode_a, &decode_b, theta_bar, &mut rng);
        hits += u64::from(play.x == play.x_hat);
    }
    let accuracy = hits as f64 / n as f64;
    Ok(MonteCarloEstimate {
        n,
        seed,
        accuracy,
        std_error: (accuracy * (1.0 - accuracy) / n as f64).sqrt(),
        expected: strategy.quality() / 4.0,
    })
}

pub const MONTE_CARLO_HEADER: [&str; 5] = ["N", "seed", "accuracy", "std_error", "expected"];

pub fn write_monte_carlo_csv<W: Write>(estimate: &MonteCarloEstimate, writer: W) -> std::io::Result<()> {
    let mut wtr = csv_writer(writer);
    wtr.write_record(MONTE_CARLO_HEADER).map_err(csv_error)?;
    wtr.write_record([
        estimate.n.to_string(),
        estimate.seed.to_string(),
        sig12(estimate.accuracy),
        sig12(estimate.std_error),
        sig12(estimate.expected),
    ])
    .map_err(csv_error)?;
    wtr.flush()
}
