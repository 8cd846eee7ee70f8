mod common;

use cvmdi_core::calibration::stream_rng;
use cvmdi_core::gaussian::{g_entropy, symplectic_form, CovarianceMatrix, Quadrature};
use proptest::prelude::*;

fn random_symplectic(seed: u64, modes: usize) -> nalgebra::DMatrix<f64> {
    // Williamson of a random state gives a genuine symplectic matrix that the
    // library did not construct from beamsplitters.
    let state = common::random_physical_state(&mut stream_rng(seed, 3), modes);
    state.williamson().unwrap().0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spectrum_invariant_under_symplectic_maps(seed in 0u64..10_000, modes in 1usize..=4) {
        let state = common::random_physical_state(&mut stream_rng(seed, 0), modes);
        let s = random_symplectic(seed + 1, modes);
        let omega = symplectic_form(modes);
        prop_assert!((&s * &omega * s.transpose() - &omega).amax() < 1e-7);

        let moved = CovarianceMatrix::new(&s * state.matrix() * s.transpose(), state.labels().to_vec()).unwrap();
        let a = state.symplectic_eigenvalues().unwrap();
        let b = moved.symplectic_eigenvalues().unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            prop_assert!((x - y).abs() <= 1e-6 * x.max(1.0), "{x} vs {y}");
        }
    }

    #[test]
    fn g_is_monotone_and_bounded_below(x in 0.0f64..1e4, dx in 1e-6f64..10.0) {
        let gx = g_entropy(x).unwrap();
        prop_assert!(g_entropy(x + dx).unwrap() > gx);
        prop_assert!(gx >= (x + 1.0).log2() - 1e-12);
    }

    #[test]
    fn heterodyne_never_raises_variances(seed in 0u64..10_000, modes in 2usize..=4) {
        let state = common::random_physical_state(&mut stream_rng(seed, 0), modes);
        let cond = state.condition_heterodyne("m0").unwrap();
        for label in cond.labels() {
            for q in [Quadrature::X, Quadrature::P] {
                let before = state.variance(label.as_str(), q).unwrap();
                let after = cond.variance(label.as_str(), q).unwrap();
                prop_assert!(after <= before + 1e-9, "{label}: {after} > {before}");
            }
        }
    }
}

#[test]
fn g_values() {
    assert_eq!(g_entropy(1.0).unwrap(), 2.0);
    assert_eq!(g_entropy(0.0).unwrap(), 0.0);
    let direct = 8.0 - 3.0 * 3f64.log2();
    assert!((g_entropy(3.0).unwrap() - direct).abs() < 1e-12);
    assert!(g_entropy(-0.5).is_err());
}

#[test]
fn conditioning_preserves_physicality() {
    let mut rng = stream_rng(5, 0);
    for k in 0..1000 {
        let modes = 2 + k % 3;
        let state = common::random_physical_state(&mut rng, modes);
        let hom = state.condition_homodyne("m1", Quadrature::X).unwrap();
        let het = state.condition_heterodyne("m0").unwrap();
        assert!(hom.is_physical(), "homodyne case {k}");
        assert!(het.is_physical(), "heterodyne case {k}");
        assert_eq!(het.modes(), modes - 1);
    }
}

#[test]
fn purification_is_pure_and_matches_marginal() {
    let mut rng = stream_rng(6, 0);
    for _ in 0..50 {
        let state = common::random_physical_state(&mut rng, 2);
        let pure = state.purify(&["r0", "r1"]).unwrap();
        assert!(pure.entropy().unwrap().abs() < 1e-8);
        let back = pure.partial_trace(&["m0", "m1"]).unwrap();
        assert!((back.matrix() - state.matrix()).amax() < 1e-8);
        let anc = pure.partial_trace(&["r0", "r1"]).unwrap();
        assert!((anc.entropy().unwrap() - state.entropy().unwrap()).abs() < 1e-8);
    }
}

#[test]
fn beamsplitter_is_passive() {
    let mut rng = stream_rng(8, 0);
    for _ in 0..100 {
        let state = common::random_physical_state(&mut rng, 3);
        let out = state.beamsplitter("m0", "m2", 0.37).unwrap();
        let trace = |c: &CovarianceMatrix| c.matrix().trace();
        assert!((trace(&state) - trace(&out)).abs() < 1e-9);
        assert!((state.entropy().unwrap() - out.entropy().unwrap()).abs() < 1e-8);
    }
}

#[test]
fn malformed_inputs_are_rejected() {
    let epr = CovarianceMatrix::epr("a", "b", 5.0).unwrap();
    assert!(epr.condition_homodyne("z", Quadrature::X).is_err());
    assert!(epr.partial_trace(&["a", "a"]).is_err());
    assert!(epr.beamsplitter("a", "b", 1.5).is_err());
    assert!(CovarianceMatrix::thermal("t", 0.5).is_err());
}
