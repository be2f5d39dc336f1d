//! Sender-optimal encoding.
//!
//! When both receiver types weigh out-group news at least as heavily as
//! in-group news, the optimum reports state 1 truthfully (`m_A = m_B = 1`)
//! and the remaining two coordinates solve a two-variable LP whose
//! constraints reduce to the ratio band `k_B <= n_B / n_A <= k_A`. The
//! closed form here walks the six cases of that band; [`full_lp_oracle`]
//! solves the unreduced four-variable LP by vertex enumeration and serves as
//! an independent check.

mod oracle;

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{IdentityProfile, Population, SenderStrategy, SourceType};
use crate::receiver::believes;

pub use oracle::{full_lp_oracle, Constraint, Coordinate, LpSolution, FEASIBILITY_TOLERANCE};

/// Ratio-band edges `(k_A, k_B)` on the extended real line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AugmentedParams {
    pub k_a: f64,
    pub k_b: f64,
}

/// Which branch of the closed form produced the equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CaseLabel {
    /// `k_A < 0, k_B < 0`: both types believe anything.
    BothUnconstrained,
    /// `k_B > k_A > 0`: the band is empty, only `n = 0` is believed.
    EmptyBand,
    /// `1 > k_A > k_B`: type A binds, `(1, k_A)`.
    UpperEdge,
    /// `k_A > 1 > k_B`: full truth is inside the band.
    FullTruth,
    /// `k_A > k_B > 1`: type B binds, `(1/k_B, 1)`.
    LowerEdge,
    /// `k_B > 0 > k_A`: only type B constrains, `(min(1, 1/k_B), 1)`.
    OnlyBConstrained,
}

impl CaseLabel {
    pub const ALL: [CaseLabel; 6] = [
        CaseLabel::BothUnconstrained,
        CaseLabel::EmptyBand,
        CaseLabel::UpperEdge,
        CaseLabel::FullTruth,
        CaseLabel::LowerEdge,
        CaseLabel::OnlyBConstrained,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CaseLabel::BothUnconstrained => "k_A<0,k_B<0",
            CaseLabel::EmptyBand => "k_B>k_A>0",
            CaseLabel::UpperEdge => "1>k_A>k_B",
            CaseLabel::FullTruth => "k_A>1>k_B",
            CaseLabel::LowerEdge => "k_A>k_B>1",
            CaseLabel::OnlyBConstrained => "k_B>0>k_A",
        }
    }

    /// Strict predicate of this case.
    pub fn holds(&self, k: &AugmentedParams) -> bool {
        let AugmentedParams { k_a, k_b } = *k;
        match self {
            CaseLabel::BothUnconstrained => k_a < 0.0 && k_b < 0.0,
            CaseLabel::EmptyBand => k_b > k_a && k_a > 0.0,
            CaseLabel::UpperEdge => 1.0 > k_a && k_a > k_b,
            CaseLabel::FullTruth => k_a > 1.0 && 1.0 > k_b,
            CaseLabel::LowerEdge => k_a > k_b && k_b > 1.0,
            CaseLabel::OnlyBConstrained => k_b > 0.0 && 0.0 > k_a,
        }
    }

    /// Predicate of this case with every inequality relaxed; true on the
    /// closure of the case's region.
    pub fn holds_closed(&self, k: &AugmentedParams) -> bool {
        let AugmentedParams { k_a, k_b } = *k;
        match self {
            CaseLabel::BothUnconstrained => k_a <= 0.0 && k_b <= 0.0,
            CaseLabel::EmptyBand => k_b >= k_a && k_a >= 0.0,
            CaseLabel::UpperEdge => 1.0 >= k_a && k_a >= k_b,
            CaseLabel::FullTruth => k_a >= 1.0 && 1.0 >= k_b,
            CaseLabel::LowerEdge => k_a >= k_b && k_b >= 1.0,
            CaseLabel::OnlyBConstrained => k_b >= 0.0 && 0.0 >= k_a,
        }
    }

    /// Candidate `(n_A, n_B)` of this case.
    pub fn point(&self, k: &AugmentedParams) -> (f64, f64) {
        match self {
            CaseLabel::BothUnconstrained | CaseLabel::FullTruth => (1.0, 1.0),
            CaseLabel::EmptyBand => (0.0, 0.0),
            CaseLabel::UpperEdge => (1.0, k.k_a),
            CaseLabel::LowerEdge => (1.0 / k.k_b, 1.0),
            CaseLabel::OnlyBConstrained => ((1.0 / k.k_b).min(1.0), 1.0),
        }
    }
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquilibriumResult {
    pub strategy: SenderStrategy,
    pub quality: f64,
    pub case_label: CaseLabel,
    pub params: AugmentedParams,
}

/// Anything carrying an equilibrium quality of information.
pub trait HasQuality {
    fn quality_value(&self) -> f64;
}

impl HasQuality for EquilibriumResult {
    fn quality_value(&self) -> f64 {
        self.quality
    }
}

impl HasQuality for LpSolution {
    fn quality_value(&self) -> f64 {
        self.quality
    }
}

impl HasQuality for SenderStrategy {
    fn quality_value(&self) -> f64 {
        self.quality()
    }
}

fn extended_ratio(num: f64, den: f64) -> Option<f64> {
    if den != 0.0 {
        Some(num / den)
    } else if num > 0.0 {
        Some(f64::INFINITY)
    } else if num < 0.0 {
        Some(f64::NEG_INFINITY)
    } else {
        None
    }
}

/// Coefficients `(own, cross)` of the reduced believe constraint of one type:
/// `own * n_own + cross * n_other >= 0`, where `n_own` is the coordinate of
/// the type's own group. `own >= 0` always.
fn reduced_coefficients(profile: &IdentityProfile) -> (f64, f64) {
    let ls = profile.identity_weight();
    let la = profile.accuracy_weight();
    (ls * profile.in_group_penalty() + la, la - ls * profile.out_group_penalty())
}

pub fn augmented_params(population: &Population) -> Result<AugmentedParams> {
    let (own_a, cross_a) = reduced_coefficients(&population.profile_a);
    let (own_b, cross_b) = reduced_coefficients(&population.profile_b);
    let k_a = extended_ratio(own_a, -cross_a).ok_or(Error::IndeterminateParams(SourceType::A))?;
    let k_b = extended_ratio(-cross_b, own_b).ok_or(Error::IndeterminateParams(SourceType::B))?;
    Ok(AugmentedParams { k_a, k_b })
}

/// Like [`augmented_params`], but a type whose constraint is identically zero
/// (it believes everything by the tie convention) gets the always-believe
/// edge: `k_A = +inf`, `k_B = -inf`.
fn effective_params(population: &Population) -> AugmentedParams {
    let (own_a, cross_a) = reduced_coefficients(&population.profile_a);
    let (own_b, cross_b) = reduced_coefficients(&population.profile_b);
    AugmentedParams {
        k_a: extended_ratio(own_a, -cross_a).unwrap_or(f64::INFINITY),
        k_b: extended_ratio(-cross_b, own_b).unwrap_or(f64::NEG_INFINITY),
    }
}

fn reduced_residuals(n_a: f64, n_b: f64, population: &Population) -> [(f64, f64); 2] {
    let (own_a, cross_a) = reduced_coefficients(&population.profile_a);
    let (own_b, cross_b) = reduced_coefficients(&population.profile_b);
    [(n_a * own_a, n_b * cross_a), (n_b * own_b, n_a * cross_b)]
}

/// Per-type feasibility of the reduced believe constraints at
/// `(m_A, m_B, n_A, n_B) = (1, 1, n_A, n_B)`.
pub fn reduced_lp_feasible(n_a: f64, n_b: f64, population: &Population) -> (bool, bool) {
    debug_assert!((0.0..=1.0).contains(&n_a) && (0.0..=1.0).contains(&n_b));
    let [a, b] = reduced_residuals(n_a, n_b, population);
    (a.0 + a.1 >= 0.0, b.0 + b.1 >= 0.0)
}

fn reduced_feasible_within(n_a: f64, n_b: f64, population: &Population) -> bool {
    const REL: f64 = 1e-12;
    reduced_residuals(n_a, n_b, population).iter().all(|(x, y)| x + y >= -REL * (x.abs() + y.abs()))
}

/// Boundary of the case table: take the best reduced-feasible candidate
/// among the cases whose closed region contains `k`; earlier cases win ties.
fn resolve_boundary(k: &AugmentedParams, population: &Population) -> (CaseLabel, f64, f64) {
    let mut best = (CaseLabel::EmptyBand, 0.0, 0.0);
    for case in CaseLabel::ALL.into_iter().filter(|c| c.holds_closed(k)) {
        let (n_a, n_b) = case.point(k);
        let in_box = |v: f64| (0.0..=1.0).contains(&v);
        if !in_box(n_a) || !in_box(n_b) || !reduced_feasible_within(n_a, n_b, population) {
            continue;
        }
        if n_a + n_b > best.1 + best.2 {
            best = (case, n_a, n_b);
        }
    }
    // -0.0 from 1/-inf
    (best.0, best.1 + 0.0, best.2 + 0.0)
}

/// Moves a band-edge point inward by a few ulps when rounding left it on the
/// wrong side of a believe constraint.
fn snap_to_belief(mut n_a: f64, mut n_b: f64, population: &Population) -> (f64, f64) {
    for _ in 0..10_000 {
        let s = SenderStrategy { m_a: 1.0, m_b: 1.0, n_a, n_b };
        match believes(&s, population) {
            (true, true) => break,
            (a_ok, b_ok) => {
                if !a_ok {
                    n_b = n_b.next_down().max(0.0);
                }
                if !b_ok {
                    n_a = n_a.next_down().max(0.0);
                }
            }
        }
    }
    (n_a, n_b)
}

/// Closed-form Stackelberg equilibrium. Requires out-group penalty at least
/// the in-group penalty for both types.
pub fn closed_form_equilibrium(population: &Population) -> Result<EquilibriumResult> {
    population.require_restricted()?;
    let params = effective_params(population);
    let (case_label, n_a, n_b) = match CaseLabel::ALL.iter().find(|c| c.holds(&params)) {
        Some(case) => {
            let (n_a, n_b) = case.point(&params);
            (*case, n_a, n_b)
        }
        None => resolve_boundary(&params, population),
    };
    let (n_a, n_b) = snap_to_belief(n_a, n_b, population);
    let strategy = SenderStrategy::with_truthful_negatives(n_a, n_b)?;
    Ok(EquilibriumResult { strategy, quality: strategy.quality(), case_label, params })
}

/// Quality of information never drops below 2 at an optimum; the pooling
/// strategy `(1, 1, 0, 0)` is always available under the restriction.
pub fn lower_bound_check<T: HasQuality + ?Sized>(result: &T) -> bool {
    result.quality_value() >= 2.0 - 1e-12
}
