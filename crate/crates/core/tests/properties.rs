mod common;

use common::{bipartite, dim_and_seed, state, unitary};
use proptest::prelude::*;
use qres::channels::random_mixture_of_unitaries;
use qres::coherence::{
    closest_incoherent, coherence_fidelity, coherence_l1, coherence_l1_from_bloch,
    maximal_coherence, tau_classifier,
};
use qres::fidelity::{fidelity_alt, fidelity_uhlmann};
use qres::io::{parse_state, state_to_json, StateSpec};
use qres::measurement::{
    quantum_correlation, qubit_correlation_exact, weak_fidelity, weak_purity, OptimizerSettings,
    WeakMeasurement,
};
use qres::purity::{fidelity_purity, hs_purity, linear_purity};
use qres::random::rng_from_seed;
use qres::states::{
    bloch_expand, bloch_reconstruct, generator_basis, BipartiteState, DensityMatrix,
};
use qres::ComplexMatrix;

const TOL: f64 = 1e-10;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn fidelity_is_symmetric_and_bounded((d, seed) in dim_and_seed(2, 5)) {
        let (a, b) = (state(d, seed), state(d, seed ^ 0x5eed));
        let f = fidelity_alt(&a, &b).unwrap();
        prop_assert_eq!(f, fidelity_alt(&b, &a).unwrap());
        prop_assert!((0.0..=1.0).contains(&f));
        prop_assert!((fidelity_alt(&a, &a).unwrap() - 1.0).abs() < TOL);
    }

    #[test]
    fn fidelity_is_unitarily_invariant((d, seed) in dim_and_seed(2, 4)) {
        let (a, b) = (state(d, seed), state(d, seed.wrapping_add(1)));
        let u = unitary(d, seed.wrapping_add(2));
        let before = fidelity_alt(&a, &b).unwrap();
        let after = fidelity_alt(&a.conjugate(&u).unwrap(), &b.conjugate(&u).unwrap()).unwrap();
        prop_assert!((before - after).abs() < TOL);
    }

    #[test]
    fn uhlmann_is_bounded_and_symmetric((d, seed) in dim_and_seed(2, 4)) {
        let (a, b) = (state(d, seed), state(d, seed.wrapping_mul(3)));
        let f = fidelity_uhlmann(&a, &b).unwrap();
        prop_assert!((-TOL..=1.0 + TOL).contains(&f));
        prop_assert!((f - fidelity_uhlmann(&b, &a).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn purity_measures_are_consistent((d, seed) in dim_and_seed(1, 6)) {
        let rho = state(d, seed);
        let lin = linear_purity(&rho);
        prop_assert!((hs_purity(&rho) - (lin - 1.0 / d as f64)).abs() < TOL);
        let pf = fidelity_purity(&rho, None);
        prop_assert!((-TOL..=1.0 + TOL).contains(&pf));
        if d > 1 {
            prop_assert!((pf - (d as f64 * lin).ln() / (d as f64).ln()).abs() < TOL);
        }
    }

    #[test]
    fn unital_channels_do_not_increase_purity((d, seed) in dim_and_seed(2, 4), n in 2usize..=5) {
        let rho = state(d, seed);
        let channel = random_mixture_of_unitaries(&mut rng_from_seed(seed ^ 1), d, n);
        let out = DensityMatrix::new(channel.apply_matrix(rho.matrix())).unwrap();
        prop_assert!(fidelity_purity(&out, None) <= fidelity_purity(&rho, None) + TOL);
    }

    #[test]
    fn coherence_bounds((d, seed) in dim_and_seed(2, 5)) {
        let rho = state(d, seed);
        let cf = coherence_fidelity(&rho);
        let cm = maximal_coherence(&rho);
        prop_assert!(cf >= -TOL);
        prop_assert!(cf <= cm + TOL);
        prop_assert!(cm <= 1.0 - 1.0 / d as f64 + TOL);
        let tau = tau_classifier(&rho).unwrap();
        prop_assert!((-TOL..=1.0 + TOL).contains(&tau));
    }

    #[test]
    fn closest_incoherent_attains_the_coherence((d, seed) in dim_and_seed(2, 5)) {
        let rho = state(d, seed);
        let sigma = closest_incoherent(&rho);
        let f = fidelity_alt(&rho, &sigma).unwrap();
        prop_assert!((1.0 - f - coherence_fidelity(&rho)).abs() < TOL);
    }

    #[test]
    fn coherence_ignores_diagonal_phases((d, seed) in dim_and_seed(2, 5)) {
        let rho = state(d, seed);
        let phases: Vec<f64> = (0..d).map(|k| (seed.rotate_left(k as u32 * 7) % 628) as f64 / 100.0).collect();
        let u = ComplexMatrix::from_fn(d, d, |i, j| {
            if i == j { qres::C64::from_polar(1.0, phases[i]) } else { qres::C64::new(0.0, 0.0) }
        });
        let rotated = rho.conjugate(&u).unwrap();
        prop_assert!((coherence_fidelity(&rho) - coherence_fidelity(&rotated)).abs() < TOL);
        prop_assert!((coherence_l1(&rho) - coherence_l1(&rotated)).abs() < TOL);
    }

    #[test]
    fn bloch_round_trip_and_l1((d, seed) in dim_and_seed(2, 5)) {
        let rho = state(d, seed);
        let basis = generator_basis(d).unwrap();
        let x = bloch_expand(&rho, &basis).unwrap();
        prop_assert!(bloch_reconstruct(&x, &basis).max_abs_diff(rho.matrix()) < TOL);
        prop_assert!((coherence_l1_from_bloch(&x, &basis) - coherence_l1(&rho)).abs() < TOL);
    }

    #[test]
    fn json_round_trip((da, seed) in dim_and_seed(2, 3), db in 1usize..=3) {
        let spec = StateSpec::Bipartite(bipartite(da, db, seed));
        let parsed = parse_state(&state_to_json(&spec)).unwrap();
        prop_assert_eq!(parsed, spec);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn qubit_optimizer_matches_exact_value(seed in any::<u64>(), db in 1usize..=3) {
        let rho = bipartite(2, db, seed);
        let exact = qubit_correlation_exact(&rho).unwrap();
        let found = quantum_correlation(&rho, &OptimizerSettings::default()).unwrap().value;
        prop_assert!((exact - found).abs() < 1e-8, "exact {} optimizer {}", exact, found);
    }

    #[test]
    fn product_states_carry_no_correlation(seed in any::<u64>(), db in 1usize..=3) {
        let a = DensityMatrix::new(state(2, seed).into_matrix()).unwrap();
        let rho = BipartiteState::product(&a, &state(db, seed ^ 7)).unwrap();
        let q = quantum_correlation(&rho, &OptimizerSettings::default()).unwrap().value;
        prop_assert!(q.abs() < 1e-8);
    }

    #[test]
    fn weak_fidelity_decreases_with_strength(seed in any::<u64>(), x in 0.0f64..6.0, dx in 0.0f64..2.0) {
        let rho = bipartite(2, 2, seed);
        let weak = |s: f64| WeakMeasurement::computational(2, 1, s).unwrap();
        let (f1, f2) = (weak_fidelity(&rho, &weak(x)).unwrap(), weak_fidelity(&rho, &weak(x + dx)).unwrap());
        prop_assert!((0.0..=1.0).contains(&f1));
        prop_assert!(f2 <= f1 + TOL);
        let (p1, p2) = (weak_purity(&rho, &weak(x)).unwrap(), weak_purity(&rho, &weak(x + dx)).unwrap());
        prop_assert!(p2 <= p1 + TOL);
    }
}
