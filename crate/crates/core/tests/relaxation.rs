// Copyright 2026 The tomoct Authors
// SPDX-License-Identifier: Apache-2.0

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tomoct::lindblad::{evolve, lindblad_rhs, nmr_noise_model, NmrNoiseParams, DEFAULT_DT};
use tomoct::linalg::ComplexMatrix;
use tomoct::state::{make_state, random_mixed_state, DensityMatrix};

fn nmr() -> tomoct::lindblad::LindbladModel {
    nmr_noise_model(&NmrNoiseParams::default()).unwrap()
}

#[test]
fn maximally_mixed_state_is_stationary() {
    let mixed = ComplexMatrix::identity(4).scale_real(0.25);
    let drift = lindblad_rhs(&nmr(), &mixed).unwrap();
    assert!(drift.max_abs() < 1e-15, "{}", drift.max_abs());
}

#[test]
fn long_times_approach_the_fixed_point() {
    // The slowest mode is the population relaxation of the qubit with the
    // longer T1, so after 10 such times the distance to I/4 from a pure
    // state is bounded by (3/4)·e^{-10}.
    let params = NmrNoiseParams::default();
    let t1 = params.t1[0].max(params.t1[1]);
    let rho = evolve(&make_state("00").unwrap(), &nmr(), 10.0 * t1, DEFAULT_DT).unwrap();
    let target = DensityMatrix::maximally_mixed(4).unwrap();
    let dist = rho.matrix().max_abs_diff(target.matrix());
    assert!(dist <= 0.75 * (-10.0f64).exp() + 1e-9, "{dist:e}");
    assert!(dist > 1e-7, "relaxation cannot be faster than the slowest rate: {dist:e}");
}

#[test]
fn halving_the_step_changes_little() {
    let b1 = make_state("B1").unwrap();
    for t in [0.05, 5.0] {
        let a = evolve(&b1, &nmr(), t, DEFAULT_DT).unwrap();
        let b = evolve(&b1, &nmr(), t, DEFAULT_DT / 2.0).unwrap();
        assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn evolution_composes_and_stays_physical(seed in any::<u64>(), ta in 0.0f64..2.0, tb in 0.0f64..2.0) {
        let model = nmr();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_mixed_state(2, &mut rng);
        let mid = evolve(&rho, &model, ta, DEFAULT_DT).unwrap();
        let split = evolve(&mid, &model, tb, DEFAULT_DT).unwrap();
        let whole = evolve(&rho, &model, ta + tb, DEFAULT_DT).unwrap();
        prop_assert!(split.matrix().max_abs_diff(whole.matrix()) < 1e-7);
        prop_assert!((whole.matrix().trace().re - 1.0).abs() < 1e-12);
        prop_assert!(whole.eigenvalues().iter().all(|&v| v >= -1e-12));
        // With p = ½ the channel is unital, so purity cannot grow.
        prop_assert!(whole.purity() <= rho.purity() + 1e-9);
    }
}
