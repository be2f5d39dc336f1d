//! Receiver best response.
//!
//! The receiver's expected utility conditioned on a message is linear in its
//! decoding probability, so the best response is pure and is decided by the
//! sign of one slope per message. The residuals below are those slopes
//! multiplied by `4 * Pr(message)`, which keeps the sign and removes the
//! division by the message probability. A message that is never sent has a
//! residual of exactly zero, so the believe constraint holds vacuously.

use serde::Serialize;

use crate::model::{Population, ReceiverStrategy, SenderStrategy, SourceType};

/// Residuals of one receiver type: `on_a` decides `p`, `on_b` decides `q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TypeResiduals {
    pub on_a: f64,
    pub on_b: f64,
}

impl TypeResiduals {
    pub fn believes(&self) -> bool {
        self.on_a >= 0.0 && self.on_b >= 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BeliefResiduals {
    pub a: TypeResiduals,
    pub b: TypeResiduals,
}

impl BeliefResiduals {
    pub fn for_type(&self, t: SourceType) -> &TypeResiduals {
        match t {
            SourceType::A => &self.a,
            SourceType::B => &self.b,
        }
    }

    /// Residuals in `(A/a, A/b, B/a, B/b)` order.
    pub fn to_array(&self) -> [f64; 4] {
        [self.a.on_a, self.a.on_b, self.b.on_a, self.b.on_b]
    }
}

pub fn belief_residuals(strategy: &SenderStrategy, population: &Population) -> BeliefResiduals {
    let SenderStrategy { m_a, m_b, n_a, n_b } = *strategy;
    let accuracy_gap = n_a + n_b + m_a + m_b - 2.0;

    let pa = &population.profile_a;
    let (la, ls) = (pa.accuracy_weight(), pa.identity_weight());
    let (di, d_o) = (pa.in_group_penalty(), pa.out_group_penalty());
    let a = TypeResiduals {
        on_a: ls * (d_o * (m_b + 1.0 - n_b) - di * (m_a + 1.0 - n_a)) + la * accuracy_gap,
        on_b: ls * (di * (n_a + 1.0 - m_a) - d_o * (n_b + 1.0 - m_b)) + la * accuracy_gap,
    };

    let pb = &population.profile_b;
    let (la, ls) = (pb.accuracy_weight(), pb.identity_weight());
    let (di, d_o) = (pb.in_group_penalty(), pb.out_group_penalty());
    let b = TypeResiduals {
        on_a: ls * (d_o * (m_a + 1.0 - n_a) - di * (m_b + 1.0 - n_b)) + la * accuracy_gap,
        on_b: ls * (di * (n_b + 1.0 - m_b) - d_o * (n_a + 1.0 - m_a)) + la * accuracy_gap,
    };

    BeliefResiduals { a, b }
}

/// Pure best response of receiver type `theta_bar`. A zero slope resolves
/// to believing.
pub fn best_response(strategy: &SenderStrategy, population: &Population, theta_bar: SourceType) -> ReceiverStrategy {
    let r = *belief_residuals(strategy, population).for_type(theta_bar);
    ReceiverStrategy { p: if r.on_a >= 0.0 { 1.0 } else { 0.0 }, q: if r.on_b >= 0.0 { 1.0 } else { 0.0 } }
}

/// Whether each type (A, B) takes both messages at face value.
pub fn believes(strategy: &SenderStrategy, population: &Population) -> (bool, bool) {
    let r = belief_residuals(strategy, population);
    (r.a.believes(), r.b.believes())
}
