use std::collections::HashMap;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tdesign::graph::{
    census, census_closed_form, classify_pair, find_mapping, orbit_invariant, psl_orbits, EdgeKind, OrbitInvariant, PauliPair,
};
use tdesign::kerdock::PslElement;
use tdesign::pauli::{symplectic_inner, PauliIndex};
use tdesign::FieldContext;

fn all_pairs(ctx: &FieldContext) -> impl Iterator<Item = PauliPair> + '_ {
    PauliIndex::nonzero(ctx)
        .flat_map(move |p| PauliIndex::nonzero(ctx).filter(move |q| *q != p).map(move |q| PauliPair::new(p, q).unwrap()))
}

#[test]
fn invariance_exhaustive_m2() {
    let ctx = FieldContext::new(2, None).unwrap();
    let group: Vec<PslElement> = PslElement::all(&ctx).collect();
    for pair in all_pairs(&ctx) {
        let inv = orbit_invariant(&ctx, &pair).unwrap();
        for g in &group {
            let theta = g.to_symplectic(&ctx);
            assert_eq!(orbit_invariant(&ctx, &pair.map(|p| theta.apply(&ctx, p))).unwrap(), inv);
        }
    }
}

#[test]
fn invariance_sampled() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for m in 3..=4 {
        let ctx = FieldContext::new(m, None).unwrap();
        let total = tdesign::graph::ordered_pair_count(&ctx);
        for _ in 0..100_000 {
            let pair = PauliPair::from_code(&ctx, rng.gen_range(0..total));
            let g = PslElement::sample(&ctx, &mut rng);
            let image = pair.map(|p| g.apply(&ctx, p));
            assert_eq!(orbit_invariant(&ctx, &image).unwrap(), orbit_invariant(&ctx, &pair).unwrap());
        }
    }
}

#[test]
fn completeness_exhaustive_m2() {
    let ctx = FieldContext::new(2, None).unwrap();
    let mut by_invariant: HashMap<OrbitInvariant, Vec<PauliPair>> = HashMap::new();
    for pair in all_pairs(&ctx) {
        by_invariant.entry(orbit_invariant(&ctx, &pair).unwrap()).or_default().push(pair);
    }
    for (inv, pairs) in &by_invariant {
        let rep = PauliPair::representative(inv).unwrap();
        for pair in pairs {
            assert!(find_mapping(&ctx, &rep, pair).is_some(), "{rep} -> {pair}");
        }
    }
}

#[test]
fn completeness_per_orbit_m3() {
    let ctx = FieldContext::new(3, None).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut by_invariant: HashMap<OrbitInvariant, Vec<PauliPair>> = HashMap::new();
    for pair in all_pairs(&ctx) {
        by_invariant.entry(orbit_invariant(&ctx, &pair).unwrap()).or_default().push(pair);
    }
    for (inv, pairs) in &by_invariant {
        let rep = PauliPair::representative(inv).unwrap();
        for _ in 0..5 {
            let target = pairs[rng.gen_range(0..pairs.len())];
            let g = find_mapping(&ctx, &rep, &target).expect("same invariant, same orbit");
            assert_eq!(rep.map(|p| g.apply(&ctx, p)), target);
        }
    }
}

#[test]
fn edge_relation_is_commutation() {
    for m in 2..=3 {
        let ctx = FieldContext::new(m, None).unwrap();
        for pair in all_pairs(&ctx) {
            let kind = classify_pair(&ctx, &pair).unwrap();
            let swapped = PauliPair::new(pair.second, pair.first).unwrap();
            assert_eq!(kind.is_edge(), classify_pair(&ctx, &swapped).unwrap().is_edge());
            assert_eq!(kind.is_edge(), symplectic_inner(&ctx, &pair.first, &pair.second) == 0);
        }
    }
}

#[test]
fn degree_regularity() {
    for m in 2..=4 {
        let ctx = FieldContext::new(m, None).unwrap();
        let n = ctx.order() as usize;
        let vertices: Vec<PauliIndex> = PauliIndex::nonzero(&ctx).collect();
        for p in &vertices {
            let degree = vertices.iter().filter(|q| *q != p && symplectic_inner(&ctx, p, q) == 0).count();
            assert_eq!(degree, n * n / 2 - 2);
        }
    }
}

#[test]
fn orbit_sizes_sum_to_census() {
    for m in 2..=4 {
        let ctx = FieldContext::new(m, None).unwrap();
        let orbits = psl_orbits(&ctx).unwrap();
        let closed = census_closed_form(&ctx);
        let total = |kind: EdgeKind| orbits.iter().filter(|o| o.invariant.kind == kind).map(|o| o.size).sum::<u64>();
        assert_eq!(total(EdgeKind::Type1), closed.type1_edges);
        assert_eq!(total(EdgeKind::Type2), closed.type2_edges);
        assert_eq!(total(EdgeKind::NonEdge), closed.non_edges);
        let enumerated = census(&ctx).unwrap();
        for o in &orbits {
            assert_eq!(enumerated.orbits[&o.invariant], o.size);
        }
    }
}

#[test]
fn census_text_round_trip() {
    for m in 2..=4 {
        let ctx = FieldContext::new(m, None).unwrap();
        let c = census(&ctx).unwrap();
        assert_eq!(tdesign::graph::Census::from_text(&c.to_text()).unwrap(), c);
    }
}

proptest! {
    #[test]
    fn pair_code_round_trip(m in 2usize..=6, raw in any::<usize>()) {
        let ctx = FieldContext::new(m, None).unwrap();
        let code = raw % tdesign::graph::ordered_pair_count(&ctx);
        prop_assert_eq!(PauliPair::from_code(&ctx, code).code(&ctx), code);
    }

    #[test]
    fn invariant_under_theta(m in 2usize..=8, raw in any::<usize>(), gi in any::<u64>()) {
        let ctx = FieldContext::new(m, None).unwrap();
        let pair = PauliPair::from_code(&ctx, raw % tdesign::graph::ordered_pair_count(&ctx));
        let g = PslElement::from_index(&ctx, gi % PslElement::group_order(&ctx)).unwrap();
        let theta = g.to_symplectic(&ctx);
        let image = pair.map(|p| theta.apply(&ctx, p));
        prop_assert_eq!(orbit_invariant(&ctx, &image).unwrap(), orbit_invariant(&ctx, &pair).unwrap());
    }

    #[test]
    fn representative_has_its_invariant(m in 2usize..=8, raw in any::<usize>()) {
        let ctx = FieldContext::new(m, None).unwrap();
        let pair = PauliPair::from_code(&ctx, raw % tdesign::graph::ordered_pair_count(&ctx));
        let inv = orbit_invariant(&ctx, &pair).unwrap();
        prop_assert_eq!(orbit_invariant(&ctx, &PauliPair::representative(&inv).unwrap()).unwrap(), inv);
    }
}
