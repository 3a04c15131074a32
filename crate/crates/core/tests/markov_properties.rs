use std::collections::HashMap;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tdesign::graph::{orbit_invariant, ordered_pair_count, OrbitInvariant, PauliPair};
use tdesign::markov::{
    lambda_q1, orbit_states, q0_structure_check, q1_closed_form, q_empirical, spectral_report, transvection_counts, w1, w2,
    w2_eigenvalue_numer, ChainKind, TransitionMatrix,
};
use tdesign::FieldContext;

/// Every ordered pair of the given kind, grouped by invariant.
fn pairs_by_orbit(ctx: &FieldContext, chain: ChainKind) -> HashMap<OrbitInvariant, Vec<PauliPair>> {
    let states = orbit_states(ctx, chain);
    let mut out: HashMap<OrbitInvariant, Vec<PauliPair>> = HashMap::new();
    for code in 0..ordered_pair_count(ctx) {
        let pair = PauliPair::from_code(ctx, code);
        let inv = orbit_invariant(ctx, &pair).unwrap();
        if states.contains(&inv) {
            out.entry(inv).or_default().push(pair);
        }
    }
    out
}

#[test]
fn representative_independence_exhaustive() {
    for m in 2..=3 {
        let ctx = FieldContext::new(m, None).unwrap();
        for chain in [ChainKind::Edges, ChainKind::NonEdges] {
            let q = q_empirical(&ctx, chain).unwrap();
            let states = q.states().to_vec();
            for (inv, pairs) in pairs_by_orbit(&ctx, chain) {
                let row = states.iter().position(|s| *s == inv).unwrap();
                let expected: Vec<i64> = q.row(row).iter().map(|x| x / 4).collect();
                for pair in pairs {
                    assert_eq!(transvection_counts(&ctx, &states, &pair).unwrap(), expected, "m={m} {pair}");
                }
            }
        }
    }
}

#[test]
fn representative_independence_sampled() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for m in 4..=5 {
        let ctx = FieldContext::new(m, None).unwrap();
        let total = ordered_pair_count(&ctx);
        let tables: Vec<TransitionMatrix<OrbitInvariant>> =
            [ChainKind::Edges, ChainKind::NonEdges].iter().map(|&c| q_empirical(&ctx, c).unwrap()).collect();
        for _ in 0..200 {
            let pair = PauliPair::from_code(&ctx, rng.gen_range(0..total));
            let inv = orbit_invariant(&ctx, &pair).unwrap();
            let q = tables.iter().find(|q| q.states().contains(&inv)).unwrap();
            let row = q.states().iter().position(|s| *s == inv).unwrap();
            let expected: Vec<i64> = q.row(row).iter().map(|x| x / 4).collect();
            assert_eq!(transvection_counts(&ctx, q.states(), &pair).unwrap(), expected);
        }
    }
}

#[test]
fn count_conservation() {
    for m in 2..=5 {
        let ctx = FieldContext::new(m, None).unwrap();
        let n = i64::from(ctx.order());
        for chain in [ChainKind::Edges, ChainKind::NonEdges] {
            let q = q_empirical(&ctx, chain).unwrap();
            for i in 0..q.len() {
                assert_eq!(q.row(i).iter().map(|x| x / 4).sum::<i64>(), n * n - 1);
            }
        }
    }
}

#[test]
fn closed_forms_and_eigenvectors() {
    for m in 2..=5 {
        let ctx = FieldContext::new(m, None).unwrap();
        let q1 = q_empirical(&ctx, ChainKind::NonEdges).unwrap();
        assert!(q1.rational_eq(&q1_closed_form(&ctx)));
        let q0 = q_empirical(&ctx, ChainKind::Edges).unwrap();
        assert!(q0_structure_check(&ctx, &q0).passed());
        assert!(q0.is_left_eigenvector(&w1(&ctx), q0.denominator()));
        assert!(q0.is_left_eigenvector(&w2(&ctx), w2_eigenvalue_numer(&ctx)));
    }
}

#[test]
fn q1_eigenvalue_multiplicity() {
    for m in 2..=5 {
        let ctx = FieldContext::new(m, None).unwrap();
        let rep = spectral_report(&q1_closed_form(&ctx)).unwrap();
        let n = ctx.order() as usize;
        let target = lambda_q1(m);
        assert_eq!(rep.multiplicity(target, 1e-10), n / 2 - 1, "m={m}");
        assert!(rep.eigenvalues.iter().all(|&x| x == rep.eigenvalues[0] || (x - target).abs() < 1e-10));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn json_round_trip(m in 2usize..=6, edges in any::<bool>()) {
        let ctx = FieldContext::new(m, None).unwrap();
        let chain = if edges { ChainKind::Edges } else { ChainKind::NonEdges };
        let q = q_empirical(&ctx, chain).unwrap();
        let back: TransitionMatrix<OrbitInvariant> = TransitionMatrix::from_json(&q.to_json()).unwrap();
        prop_assert!(back.rational_eq(&q));
        prop_assert_eq!(back.states(), q.states());
    }

    #[test]
    fn mixing_bound_monotone(m in 2usize..=12, a in 1e-6f64..0.5, b in 1e-6f64..0.5) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let t_lo = tdesign::markov::mixing_time_bound(m, lo).unwrap();
        let t_hi = tdesign::markov::mixing_time_bound(m, hi).unwrap();
        prop_assert!(t_lo >= t_hi);
    }
}
