use proptest::prelude::*;
use tdesign::bitmat::BitMatrix;
use tdesign::kerdock::PslElement;
use tdesign::pauli::{generator, Generator, PauliIndex, SymplecticMatrix, Transvection};
use tdesign::sampler::{sample_at, sample_batch, PslMode, SamplerConfig, StepRule};
use tdesign::unitary::{
    conjugation_check, ensemble_from_samples, frame_potential, generator_unitary, pauli_unitary, psl_unitary,
    transvection_unitary, DenseUnitary, Ensemble,
};
use tdesign::FieldContext;

fn m2_generators() -> Vec<Generator> {
    let sym = |bits: &[&[u8]]| Generator::Shear(BitMatrix::from_bits(bits));
    let lin = |bits: &[&[u8]]| Generator::Linear(BitMatrix::from_bits(bits));
    vec![
        Generator::Omega,
        Generator::PartialOmega(1),
        Generator::PartialOmega(2),
        sym(&[&[1, 0], &[0, 0]]),
        sym(&[&[0, 1], &[1, 0]]),
        sym(&[&[1, 1], &[1, 1]]),
        lin(&[&[1, 1], &[0, 1]]),
        lin(&[&[0, 1], &[1, 0]]),
        lin(&[&[1, 0], &[1, 1]]),
    ]
}

#[test]
fn generator_pairs_compose_projectively() {
    let gens = m2_generators();
    for a in &gens {
        for b in &gens {
            let u = generator_unitary(2, b).unwrap().mul(&generator_unitary(2, a).unwrap());
            let f = generator(2, a).unwrap().compose(&generator(2, b).unwrap()).unwrap();
            conjugation_check(&u, &f).unwrap();
        }
    }
}

#[test]
fn every_psl_unitary_realizes_theta() {
    for m in 2..=3 {
        let ctx = FieldContext::new(m, None).unwrap();
        for g in PslElement::all(&ctx) {
            let u = psl_unitary(&ctx, &g).unwrap();
            assert!(u.is_unitary(1e-10));
            conjugation_check(&u, &g.to_symplectic(&ctx)).unwrap();
        }
    }
}

#[test]
fn transvection_commutes_with_orthogonal_paulis() {
    let ctx = FieldContext::new(2, None).unwrap();
    for h in Transvection::all(&ctx) {
        let u = transvection_unitary(&ctx, &h).unwrap();
        for p in PauliIndex::nonzero(&ctx) {
            if tdesign::pauli::symplectic_inner(&ctx, &p, &h.as_pauli()) == 0 {
                let e = pauli_unitary(&ctx, &p, true).unwrap();
                let diff = u.mul(&e).matrix() - e.mul(&u).matrix();
                assert!(diff.iter().all(|z| z.norm() < 1e-12));
            }
        }
    }
}

#[test]
fn realized_samples_match_composed() {
    let ctx = FieldContext::new(2, None).unwrap();
    let config = SamplerConfig::new(2, StepRule::Epsilon(0.01), 41, 1000);
    let samples = sample_batch(&ctx, &config, 0..1000).unwrap();
    let ensemble = ensemble_from_samples(&ctx, &samples).unwrap();
    for (u, s) in ensemble.unitaries().iter().zip(&samples) {
        assert!(u.is_unitary(1e-10));
        conjugation_check(u, &s.composed).unwrap();
    }
}

#[test]
fn trivial_sample_is_identity() {
    let ctx = FieldContext::new(2, None).unwrap();
    let mut config = SamplerConfig::new(2, StepRule::Steps(0), 0, 1);
    config.psl_mode = PslMode::Identity;
    let mut s = sample_at(&ctx, &config, 0).unwrap();
    s.pauli = PauliIndex::IDENTITY;
    let e = ensemble_from_samples(&ctx, &[s]).unwrap();
    assert_eq!(e.unitaries()[0], DenseUnitary::identity(2).unwrap());
}

#[test]
fn frame_potential_of_pauli_group() {
    // The Pauli group is a 1-design but not a 2-design: F₁ = 1, F₂ = N².
    let ctx = FieldContext::new(2, None).unwrap();
    let paulis = (0..16).map(|x| pauli_unitary(&ctx, &PauliIndex::from_code(x, 2), false).unwrap()).collect();
    let e = Ensemble::uniform(paulis).unwrap();
    assert!((frame_potential(&e, 1).value - 1.0).abs() < 1e-12);
    assert!((frame_potential(&e, 2).value - 16.0).abs() < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn frame_potential_at_least_factorial(seed in any::<u64>(), size in 2usize..40, t in 0u64..6, k in 1u32..=3) {
        let ctx = FieldContext::new(2, None).unwrap();
        let config = SamplerConfig::new(2, StepRule::Steps(t), seed, size as u64);
        let samples = sample_batch(&ctx, &config, 0..size as u64).unwrap();
        let fp = frame_potential(&ensemble_from_samples(&ctx, &samples).unwrap(), k);
        let factorial = (1..=k).product::<u32>() as f64;
        prop_assert!(fp.value >= factorial - 1e-9, "F_{} = {}", k, fp.value);
    }

    #[test]
    fn random_psl_m3(index in 0u64..504) {
        let ctx = FieldContext::new(3, None).unwrap();
        let g = PslElement::from_index(&ctx, index).unwrap();
        let u = psl_unitary(&ctx, &g).unwrap();
        prop_assert!(conjugation_check(&u, &g.to_symplectic(&ctx)).is_ok());
        prop_assert!(conjugation_check(&u, &SymplecticMatrix::identity(3)).is_err() || g == PslElement::identity());
    }
}
