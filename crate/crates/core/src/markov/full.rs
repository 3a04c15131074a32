//! The transvection walk on every ordered pair of one kind, before lumping.

use std::collections::HashMap;

use rayon::prelude::*;

use super::orbit::{orbit_states, q_empirical, ChainKind};
use super::TransitionMatrix;
use crate::error::{Error, Result};
use crate::gf2m::FieldContext;
use crate::graph::{classify_pair, orbit_invariant, OrbitInvariant, PauliPair};
use crate::pauli::{PauliIndex, Transvection};

pub const FULL_CHAIN_MAX_M: usize = 3;

fn pair_states(ctx: &FieldContext, chain: ChainKind) -> Result<Vec<PauliPair>> {
    let vertices: Vec<PauliIndex> = PauliIndex::nonzero(ctx).collect();
    let mut states = Vec::new();
    for p in &vertices {
        for q in vertices.iter().filter(|q| *q != p) {
            let pair = PauliPair::new(*p, *q)?;
            if chain.contains(classify_pair(ctx, &pair)?) {
                states.push(pair);
            }
        }
    }
    Ok(states)
}

/// Full-pair chain over the denominator `N² - 1`.
pub fn full_chain(ctx: &FieldContext, chain: ChainKind) -> Result<TransitionMatrix<PauliPair>> {
    if ctx.m() > FULL_CHAIN_MAX_M {
        return Err(Error::TooLarge { what: "full pair chain", m: ctx.m(), cap: FULL_CHAIN_MAX_M });
    }
    let states = pair_states(ctx, chain)?;
    let index: HashMap<PauliPair, usize> = states.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    let transvections: Vec<Transvection> = Transvection::all(ctx).collect();
    let n = states.len();
    let rows = states
        .par_iter()
        .map(|s| {
            let mut row = vec![0i64; n];
            for h in &transvections {
                let image = s.map(|p| h.apply(ctx, p));
                let j = index.get(&image).ok_or_else(|| Error::Transition("image left the state space".into()))?;
                row[*j] += 1;
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    TransitionMatrix::new(states, rows.into_iter().flatten().collect(), transvections.len() as i64)
}

/// Lumps the full chain by orbit invariant. Every state of one orbit must give
/// the same lumped row, and that row must equal the orbit chain.
pub fn lump(ctx: &FieldContext, chain: ChainKind, full: &TransitionMatrix<PauliPair>) -> Result<TransitionMatrix<OrbitInvariant>> {
    let classes = orbit_states(ctx, chain);
    let class_index: HashMap<OrbitInvariant, usize> = classes.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    let class_of = full
        .states()
        .iter()
        .map(|p| {
            let inv = orbit_invariant(ctx, p)?;
            class_index.get(&inv).copied().ok_or_else(|| Error::Lumping(format!("{inv} is not an orbit state")))
        })
        .collect::<Result<Vec<_>>>()?;
    let k = classes.len();
    let mut lumped: Vec<Option<Vec<i64>>> = vec![None; k];
    for (i, &ci) in class_of.iter().enumerate() {
        let mut row = vec![0i64; k];
        for (j, &x) in full.row(i).iter().enumerate() {
            row[class_of[j]] += x;
        }
        match &lumped[ci] {
            None => lumped[ci] = Some(row),
            Some(existing) if *existing != row => {
                return Err(Error::Lumping(format!("states of orbit {} disagree: {existing:?} vs {row:?}", classes[ci])));
            }
            Some(_) => {}
        }
    }
    let numer = lumped
        .into_iter()
        .enumerate()
        .map(|(c, r)| r.ok_or_else(|| Error::Lumping(format!("orbit {} has no states", classes[c]))))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let result = TransitionMatrix::new(classes, numer, full.denominator())?;
    let reference = q_empirical(ctx, chain)?;
    if !result.rational_eq(&reference) {
        return Err(Error::Lumping("lumped chain differs from the orbit chain".into()));
    }
    Ok(result)
}
