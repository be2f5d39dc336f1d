//! Full four-variable LP solved by brute-force vertex enumeration.
//!
//! The feasible polytope lives in `[0,1]^4` and is cut by the four believe
//! residuals. Every vertex is the solution of 4 active constraints out of
//! the 12 (4 residuals + 8 box faces), so enumerating the 495 square systems
//! and keeping the feasible solutions visits every vertex. The residual
//! hyperplanes are read off [`belief_residuals`] by evaluating it at the
//! origin and the unit vectors; nothing here touches the closed form.

use nalgebra::{Matrix4, Vector4};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Message, Population, SenderStrategy, SourceType};
use crate::receiver::belief_residuals;

pub const FEASIBILITY_TOLERANCE: f64 = 1e-9;
const SINGULAR_DETERMINANT: f64 = 1e-12;
const QUALITY_TIE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Coordinate {
    MA,
    MB,
    NA,
    NB,
}

impl Coordinate {
    const ALL: [Coordinate; 4] = [Coordinate::MA, Coordinate::MB, Coordinate::NA, Coordinate::NB];
}

/// One of the 12 constraints of the full LP.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Constraint {
    Believe { receiver: SourceType, message: Message },
    Lower(Coordinate),
    Upper(Coordinate),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LpSolution {
    pub strategy: SenderStrategy,
    pub quality: f64,
    /// Constraints binding at the returned vertex (within tolerance).
    pub active_set: Vec<Constraint>,
}

/// `coef . x + offset >= 0`
#[derive(Debug, Clone, Copy)]
struct HalfSpace {
    coef: [f64; 4],
    offset: f64,
    tag: Constraint,
}

impl HalfSpace {
    fn value(&self, x: &[f64; 4]) -> f64 {
        self.coef.iter().zip(x).map(|(c, v)| c * v).sum::<f64>() + self.offset
    }
}

fn strategy_from(x: [f64; 4]) -> SenderStrategy {
    SenderStrategy { m_a: x[0], m_b: x[1], n_a: x[2], n_b: x[3] }
}

fn half_spaces(population: &Population) -> Vec<HalfSpace> {
    let at = |x: [f64; 4]| belief_residuals(&strategy_from(x), population).to_array();
    let base = at([0.0; 4]);
    let mut columns = [[0.0; 4]; 4];
    for (i, column) in columns.iter_mut().enumerate() {
        let mut e = [0.0; 4];
        e[i] = 1.0;
        let r = at(e);
        for (j, c) in column.iter_mut().enumerate() {
            *c = r[j] - base[j];
        }
    }
    let tags = [
        (SourceType::A, Message::A),
        (SourceType::A, Message::B),
        (SourceType::B, Message::A),
        (SourceType::B, Message::B),
    ];
    let mut out: Vec<HalfSpace> = tags
        .iter()
        .enumerate()
        .map(|(j, &(receiver, message))| HalfSpace {
            coef: [columns[0][j], columns[1][j], columns[2][j], columns[3][j]],
            offset: base[j],
            tag: Constraint::Believe { receiver, message },
        })
        .collect();
    for (i, c) in Coordinate::ALL.into_iter().enumerate() {
        let mut e = [0.0; 4];
        e[i] = 1.0;
        out.push(HalfSpace { coef: e, offset: 0.0, tag: Constraint::Lower(c) });
        out.push(HalfSpace { coef: e.map(|v| -v), offset: 1.0, tag: Constraint::Upper(c) });
    }
    out
}

fn solve_vertex(planes: [&HalfSpace; 4]) -> Option<[f64; 4]> {
    let a = Matrix4::from_fn(|r, c| planes[r].coef[c]);
    if a.determinant().abs() < SINGULAR_DETERMINANT {
        return None;
    }
    let b = Vector4::from_fn(|r, _| -planes[r].offset);
    let x = a.lu().solve(&b)?;
    Some([x[0], x[1], x[2], x[3]])
}

fn lexicographically_less(a: &[f64; 4], b: &[f64; 4]) -> bool {
    a.partial_cmp(b) == Some(std::cmp::Ordering::Less)
}

/// Maximizes `m_A + m_B + n_A + n_B` over believed strategies. Works for any
/// population, restricted or not. Among vertices of equal quality the
/// lexicographically smallest `(m_A, m_B, n_A, n_B)` is returned.
pub fn full_lp_oracle(population: &Population) -> Result<LpSolution> {
    let planes = half_spaces(population);
    let mut best: Option<([f64; 4], f64)> = None;

    for idx in combinations4(planes.len()) {
        let Some(x) = solve_vertex(idx.map(|i| &planes[i])) else {
            continue;
        };
        if !planes.iter().all(|h| h.value(&x) >= -FEASIBILITY_TOLERANCE) {
            continue;
        }
        let x = x.map(|v| v.clamp(0.0, 1.0));
        let q: f64 = x.iter().sum();
        let better = match &best {
            None => true,
            Some((bx, bq)) => q > bq + QUALITY_TIE || ((q - bq).abs() <= QUALITY_TIE && lexicographically_less(&x, bx)),
        };
        if better {
            best = Some((x, q));
        }
    }

    let (x, quality) = best.ok_or(Error::EmptyFeasibleSet)?;
    let active_set = planes.iter().filter(|h| h.value(&x).abs() <= FEASIBILITY_TOLERANCE).map(|h| h.tag).collect();
    Ok(LpSolution { strategy: strategy_from(x), quality, active_set })
}

/// All increasing index quadruples below `n`, in lexicographic order.
fn combinations4(n: usize) -> impl Iterator<Item = [usize; 4]> {
    (0..n).flat_map(move |a| {
        (a + 1..n).flat_map(move |b| (b + 1..n).flat_map(move |c| (c + 1..n).map(move |d| [a, b, c, d])))
    })
}
