//! Orbit-level chains of the transvection walk on ordered Pauli pairs.
//!
//! One step applies a uniform nonzero transvection to both Paulis of the
//! pair. Edges stay edges and non-edges stay non-edges, and the image orbit
//! depends only on the orbit of the start, so the walk lumps to a chain on
//! orbit invariants. Edge states list the `N - 2` type-1 orbits before the
//! `(N - 2)/2` type-2 orbits; within each kind, invariants run in
//! discrete-log order.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::TransitionMatrix;
use crate::error::{Error, Result};
use crate::gf2m::{FieldContext, FieldElement};
use crate::graph::{orbit_invariant, EdgeKind, OrbitInvariant, PauliPair};
use crate::pauli::Transvection;

/// Largest `m` for transvection enumeration over orbit representatives.
pub const ORBIT_CHAIN_MAX_M: usize = 8;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainKind {
    Edges,
    NonEdges,
}

impl ChainKind {
    pub fn contains(self, kind: EdgeKind) -> bool {
        kind.is_edge() == (self == ChainKind::Edges)
    }
}

fn n_of(ctx: &FieldContext) -> i64 {
    i64::from(ctx.order())
}

/// Common denominator `4(N² - 1)` of the orbit chains.
pub fn orbit_denominator(ctx: &FieldContext) -> i64 {
    let n = n_of(ctx);
    4 * (n * n - 1)
}

/// Nonzero field elements in discrete-log order `1, α, α², …`.
fn log_order(ctx: &FieldContext) -> impl Iterator<Item = FieldElement> + '_ {
    (0..u64::from(ctx.order() - 1)).map(|i| ctx.alpha_pow(i))
}

/// State list of the orbit chain, in the positional block layout.
pub fn orbit_states(ctx: &FieldContext, chain: ChainKind) -> Vec<OrbitInvariant> {
    let inv = |kind, value| OrbitInvariant { kind, value };
    match chain {
        ChainKind::NonEdges => log_order(ctx).filter(|&x| ctx.trace(x) == 1).map(|x| inv(EdgeKind::NonEdge, x)).collect(),
        ChainKind::Edges => {
            let type1 = log_order(ctx).filter(|&x| x != FieldElement::ONE).map(|x| inv(EdgeKind::Type1, x));
            let type2 = log_order(ctx).filter(|&x| ctx.trace(x) == 0).map(|x| inv(EdgeKind::Type2, x));
            type1.chain(type2).collect()
        }
    }
}

/// `Q1 = [(N² - 4) I + 6N J] / (4(N² - 1))` on the `N/2` non-edge orbits.
pub fn q1_closed_form(ctx: &FieldContext) -> TransitionMatrix<OrbitInvariant> {
    let n = n_of(ctx);
    let states = orbit_states(ctx, ChainKind::NonEdges);
    let k = states.len();
    let numer = (0..k * k).map(|idx| 6 * n + if idx / k == idx % k { n * n - 4 } else { 0 }).collect();
    TransitionMatrix::new(states, numer, orbit_denominator(ctx)).expect("closed form is stochastic")
}

/// Number of transvections sending `pair` into each state's orbit. The counts
/// sum to `N² - 1`.
pub fn transvection_counts(ctx: &FieldContext, states: &[OrbitInvariant], pair: &PauliPair) -> Result<Vec<i64>> {
    let index: HashMap<OrbitInvariant, usize> = states.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    let mut counts = vec![0i64; states.len()];
    for h in Transvection::all(ctx) {
        let image = pair.map(|p| h.apply(ctx, p));
        let inv = orbit_invariant(ctx, &image)?;
        let j = *index.get(&inv).ok_or_else(|| Error::Transition(format!("image invariant {inv} is not a state")))?;
        counts[j] += 1;
    }
    Ok(counts)
}

/// Orbit chain built by enumerating every transvection against one
/// representative pair per orbit, over the denominator `4(N² - 1)`.
pub fn q_empirical(ctx: &FieldContext, chain: ChainKind) -> Result<TransitionMatrix<OrbitInvariant>> {
    if ctx.m() > ORBIT_CHAIN_MAX_M {
        return Err(Error::TooLarge { what: "orbit chain enumeration", m: ctx.m(), cap: ORBIT_CHAIN_MAX_M });
    }
    let states = orbit_states(ctx, chain);
    let rows = states
        .par_iter()
        .map(|s| transvection_counts(ctx, &states, &PauliPair::representative(s)?))
        .collect::<Result<Vec<_>>>()?;
    let numer = rows.into_iter().flatten().map(|c| 4 * c).collect();
    TransitionMatrix::new(states, numer, orbit_denominator(ctx))
}

/// Outcome of the block-structure checks on the edge chain `Q0`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Q0Structure {
    pub m1: usize,
    pub m2: usize,
    /// Lower-left block numerators over `4(N² - 1)`, `M₂ × M₁`.
    pub r: Vec<Vec<i64>>,
    pub r_row_sums: Vec<i64>,
    pub r_col_sums: Vec<i64>,
    pub mismatches: Vec<String>,
}

impl Q0Structure {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }

    /// The constant value of `R` when every entry agrees.
    pub fn r_constant(&self) -> Option<i64> {
        let first = *self.r.first()?.first()?;
        self.r.iter().flatten().all(|&x| x == first).then_some(first)
    }

    pub fn into_result(self) -> Result<Self> {
        if self.passed() {
            Ok(self)
        } else {
            Err(Error::Transition(self.mismatches.join("; ")))
        }
    }
}

/// Checks `Q0 = [[(N²-4) I, N Rᵀ], [R, (N²-4) I + 6N J]] / (4(N² - 1))` with
/// `R` row sums `6N` and column sums `3N`.
pub fn q0_structure_check(ctx: &FieldContext, q0: &TransitionMatrix<OrbitInvariant>) -> Q0Structure {
    let n = n_of(ctx);
    let m1 = (n - 2) as usize;
    let m2 = m1 / 2;
    let mut mismatches = Vec::new();
    if q0.len() != m1 + m2 {
        mismatches.push(format!("expected {} states, found {}", m1 + m2, q0.len()));
        return Q0Structure { m1, m2, r: vec![], r_row_sums: vec![], r_col_sums: vec![], mismatches };
    }
    let q = q0.with_denominator(orbit_denominator(ctx)).unwrap_or_else(|_| q0.clone());
    if q.denominator() != orbit_denominator(ctx) {
        mismatches.push(format!("denominator {} does not divide 4(N^2-1)", q0.denominator()));
    }
    let mut expect = |i: usize, j: usize, want: i64, block: &str| {
        let got = q.numerator(i, j);
        if got != want {
            mismatches.push(format!("{block} ({i}, {j}): expected {want}, found {got}"));
        }
    };
    let r: Vec<Vec<i64>> = (0..m2).map(|i| (0..m1).map(|j| q.numerator(m1 + i, j)).collect()).collect();
    for i in 0..m1 {
        for j in 0..m1 {
            expect(i, j, if i == j { n * n - 4 } else { 0 }, "upper-left");
        }
        for j in 0..m2 {
            expect(i, m1 + j, n * r[j][i], "upper-right");
        }
    }
    for i in 0..m2 {
        for j in 0..m2 {
            expect(m1 + i, m1 + j, 6 * n + if i == j { n * n - 4 } else { 0 }, "lower-right");
        }
    }
    let r_row_sums: Vec<i64> = r.iter().map(|row| row.iter().sum()).collect();
    let r_col_sums: Vec<i64> = (0..m1).map(|j| r.iter().map(|row| row[j]).sum()).collect();
    for (i, &s) in r_row_sums.iter().enumerate() {
        if s != 6 * n {
            mismatches.push(format!("R row {i} sums to {s}, expected {}", 6 * n));
        }
    }
    for (j, &s) in r_col_sums.iter().enumerate() {
        if s != 3 * n {
            mismatches.push(format!("R column {j} sums to {s}, expected {}", 3 * n));
        }
    }
    Q0Structure { m1, m2, r, r_row_sums, r_col_sums, mismatches }
}

/// `w₁ = [1/N, …, 1/N, 1, …, 1]` scaled by `N`, stationary for `Q0`.
pub fn w1(ctx: &FieldContext) -> Vec<i64> {
    let n = n_of(ctx);
    let m1 = (n - 2) as usize;
    std::iter::repeat(1).take(m1).chain(std::iter::repeat(n).take(m1 / 2)).collect()
}

/// `w₂ = [1, …, 1, -2, …, -2]`.
pub fn w2(ctx: &FieldContext) -> Vec<i64> {
    let m1 = (n_of(ctx) - 2) as usize;
    std::iter::repeat(1).take(m1).chain(std::iter::repeat(-2).take(m1 / 2)).collect()
}

/// Numerator over `4(N² - 1)` of the `w₂` eigenvalue, `N² - 6N - 4`.
pub fn w2_eigenvalue_numer(ctx: &FieldContext) -> i64 {
    let n = n_of(ctx);
    n * n - 6 * n - 4
}
