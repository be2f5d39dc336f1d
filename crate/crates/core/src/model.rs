//! Domain types, the source prior, the channel kernel and raw utilities.
//!
//! A source has a boolean state `x` and a type in `{A, B}`. The sender maps
//! each realization to a message in `{a, b}` and a receiver of type
//! `theta_bar` maps the message to an estimate `x_hat`:
//!
//! ```text
//!   x=1, type t ──► a with prob m_t, b otherwise
//!   x=0, type t ──► b with prob n_t, a otherwise
//!   a ──► x_hat=1 with prob p          b ──► x_hat=0 with prob q
//! ```

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SUM_TOLERANCE: f64 = 1e-12;

/// Type of a source, and of a receiver (its identity group).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SourceType {
    A,
    B,
}

impl SourceType {
    pub const ALL: [SourceType; 2] = [SourceType::A, SourceType::B];

    pub fn other(self) -> SourceType {
        match self {
            SourceType::A => SourceType::B,
            SourceType::B => SourceType::A,
        }
    }
}

impl fmt::Display for SourceType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SourceType::A => "A",
            SourceType::B => "B",
        })
    }
}

/// Message emitted by the sender. `A` is the message a truthful sender uses
/// for state 1, `B` the one for state 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Message {
    A,
    B,
}

impl fmt::Display for Message {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Message::A => "a",
            Message::B => "b",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SourceState {
    pub state: bool,
    pub source_type: SourceType,
}

/// Joint distribution over `(state, source_type)`.
///
/// Only the uniform prior can be built from outside the crate; the
/// equilibrium analysis relies on it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourcePrior {
    // indexed [state as usize][type index]
    joint: [[f64; 2]; 2],
}

impl SourcePrior {
    pub fn uniform() -> Self {
        Self::from_joint([[0.25; 2]; 2]).expect("uniform prior is valid")
    }

    pub(crate) fn from_joint(joint: [[f64; 2]; 2]) -> Result<Self> {
        for v in joint.iter().flatten() {
            check_probability("prior entry", *v)?;
        }
        let sum: f64 = joint.iter().flatten().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::PriorNotNormalized { sum });
        }
        Ok(Self { joint })
    }

    pub fn probability(&self, state: bool, source_type: SourceType) -> f64 {
        self.joint[state as usize][type_index(source_type)]
    }

    pub fn is_uniform(&self) -> bool {
        self.joint.iter().flatten().all(|&v| v == 0.25)
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> SourceState {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut last = SourceState { state: true, source_type: SourceType::B };
        for state in [false, true] {
            for source_type in SourceType::ALL {
                let p = self.probability(state, source_type);
                if p > 0.0 {
                    last = SourceState { state, source_type };
                }
                acc += p;
                if u < acc {
                    return SourceState { state, source_type };
                }
            }
        }
        last
    }
}

fn type_index(t: SourceType) -> usize {
    match t {
        SourceType::A => 0,
        SourceType::B => 1,
    }
}

pub(crate) fn check_probability(name: &'static str, value: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Error::InvalidProbability { name, value })
    }
}

fn check_weight(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidWeight { name, value })
    }
}

/// Behavioral parameters of one receiver type.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityProfile {
    accuracy_weight: f64,
    identity_weight: f64,
    in_group_penalty: f64,
    out_group_penalty: f64,
}

impl IdentityProfile {
    pub fn new(
        accuracy_weight: f64,
        identity_weight: f64,
        in_group_penalty: f64,
        out_group_penalty: f64,
    ) -> Result<Self> {
        Ok(Self {
            accuracy_weight: check_weight("accuracy_weight", accuracy_weight)?,
            identity_weight: check_weight("identity_weight", identity_weight)?,
            in_group_penalty: check_weight("in_group_penalty", in_group_penalty)?,
            out_group_penalty: check_weight("out_group_penalty", out_group_penalty)?,
        })
    }

    /// Weight on getting the state right.
    pub fn accuracy_weight(&self) -> f64 {
        self.accuracy_weight
    }

    /// Weight on group status.
    pub fn identity_weight(&self) -> f64 {
        self.identity_weight
    }

    /// Status loss from believing bad news about the own group.
    pub fn in_group_penalty(&self) -> f64 {
        self.in_group_penalty
    }

    /// Status loss from believing good news about the other group.
    pub fn out_group_penalty(&self) -> f64 {
        self.out_group_penalty
    }

    /// Out-group penalty dominates the in-group penalty; required by the
    /// closed-form equilibrium.
    pub fn is_restricted(&self) -> bool {
        self.out_group_penalty >= self.in_group_penalty
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Population {
    pub profile_a: IdentityProfile,
    pub profile_b: IdentityProfile,
}

impl Population {
    pub fn new(profile_a: IdentityProfile, profile_b: IdentityProfile) -> Self {
        Self { profile_a, profile_b }
    }

    pub fn profile(&self, t: SourceType) -> &IdentityProfile {
        match t {
            SourceType::A => &self.profile_a,
            SourceType::B => &self.profile_b,
        }
    }

    pub fn is_restricted(&self) -> bool {
        self.profile_a.is_restricted() && self.profile_b.is_restricted()
    }

    /// Fails with the first type that breaks the restriction.
    pub fn require_restricted(&self) -> Result<()> {
        for t in SourceType::ALL {
            if !self.profile(t).is_restricted() {
                return Err(Error::AssumptionViolated(t));
            }
        }
        Ok(())
    }
}

/// Encoding probabilities of the sender.
///
/// `m_*` is the probability of reporting state 1 truthfully (sending `a`),
/// `n_*` the probability of reporting state 0 truthfully (sending `b`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SenderStrategy {
    pub m_a: f64,
    pub m_b: f64,
    pub n_a: f64,
    pub n_b: f64,
}

impl SenderStrategy {
    pub fn new(m_a: f64, m_b: f64, n_a: f64, n_b: f64) -> Result<Self> {
        Ok(Self {
            m_a: check_probability("m_A", m_a)?,
            m_b: check_probability("m_B", m_b)?,
            n_a: check_probability("n_A", n_a)?,
            n_b: check_probability("n_B", n_b)?,
        })
    }

    pub fn truthful() -> Self {
        Self { m_a: 1.0, m_b: 1.0, n_a: 1.0, n_b: 1.0 }
    }

    /// Strategy with `m_A = m_B = 1`, the shape of every restricted equilibrium.
    pub fn with_truthful_negatives(n_a: f64, n_b: f64) -> Result<Self> {
        Self::new(1.0, 1.0, n_a, n_b)
    }

    pub fn quality(&self) -> f64 {
        quality(self)
    }

    /// Probability of emitting `message` given the source realization.
    pub fn message_probability(&self, source: SourceState, message: Message) -> f64 {
        let (m, n) = match source.source_type {
            SourceType::A => (self.m_a, self.n_a),
            SourceType::B => (self.m_b, self.n_b),
        };
        let p_a = if source.state { m } else { 1.0 - n };
        match message {
            Message::A => p_a,
            Message::B => 1.0 - p_a,
        }
    }

    /// Coordinates in `(m_A, m_B, n_A, n_B)` order.
    pub fn to_array(&self) -> [f64; 4] {
        [self.m_a, self.m_b, self.n_a, self.n_b]
    }
}

/// Decoding probabilities of one receiver type: `p = Pr(x_hat=1 | a)`,
/// `q = Pr(x_hat=0 | b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReceiverStrategy {
    pub p: f64,
    pub q: f64,
}

impl ReceiverStrategy {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        Ok(Self { p: check_probability("p", p)?, q: check_probability("q", q)? })
    }

    /// Takes every message at face value.
    pub fn believing() -> Self {
        Self { p: 1.0, q: 1.0 }
    }

    pub fn is_believing(&self) -> bool {
        self.p > 0.5 && self.q > 0.5
    }
}

/// One sampled trajectory through the channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChannelOutcome {
    pub x: bool,
    pub theta: SourceType,
    pub y: Message,
    pub x_hat: bool,
}

pub fn accuracy_utility(x: bool, x_hat: bool) -> f64 {
    if x == x_hat {
        1.0
    } else {
        0.0
    }
}

/// Status utility of a receiver of type `theta_bar`. Independent of the true
/// state.
pub fn identity_utility(x_hat: bool, theta: SourceType, theta_bar: SourceType, profile: &IdentityProfile) -> f64 {
    match (x_hat, theta == theta_bar) {
        (true, true) => -profile.in_group_penalty,
        (false, false) => -profile.out_group_penalty,
        _ => 0.0,
    }
}

/// Exogenous economic payoff. Not part of any equilibrium computation.
pub fn economic_utility(x: bool) -> f64 {
    if x {
        0.0
    } else {
        1.0
    }
}

pub fn receiver_utility(
    x: bool,
    x_hat: bool,
    theta: SourceType,
    theta_bar: SourceType,
    profile: &IdentityProfile,
) -> f64 {
    profile.accuracy_weight * accuracy_utility(x, x_hat)
        + profile.identity_weight * identity_utility(x_hat, theta, theta_bar, profile)
}

/// Sender payoff: accuracy of the estimate, but only while both receiver
/// types keep believing (strictly above one half on both messages).
pub fn sender_utility(x: bool, x_hat: bool, decode_a: &ReceiverStrategy, decode_b: &ReceiverStrategy) -> f64 {
    if decode_a.is_believing() && decode_b.is_believing() {
        accuracy_utility(x, x_hat)
    } else {
        0.0
    }
}

/// Samples one play of the channel for a receiver of type `theta_bar`.
pub fn sample_play<R: Rng + ?Sized>(
    prior: &SourcePrior,
    strategy: &SenderStrategy,
    decode_a: &ReceiverStrategy,
    decode_b: &ReceiverStrategy,
    theta_bar: SourceType,
    rng: &mut R,
) -> ChannelOutcome {
    let source = prior.sample(rng);
    let y = if rng.random_bool(strategy.message_probability(source, Message::A)) { Message::A } else { Message::B };
    let decoder = match theta_bar {
        SourceType::A => decode_a,
        SourceType::B => decode_b,
    };
    let x_hat = match y {
        Message::A => rng.random_bool(decoder.p),
        Message::B => !rng.random_bool(decoder.q),
    };
    ChannelOutcome { x: source.state, theta: source.source_type, y, x_hat }
}

/// Quality of information: `m_A + m_B + n_A + n_B`, in `[0, 4]`.
pub fn quality(strategy: &SenderStrategy) -> f64 {
    strategy.m_a + strategy.m_b + strategy.n_a + strategy.n_b
}
