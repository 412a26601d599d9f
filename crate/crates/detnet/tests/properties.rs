//! Randomized invariants for the linear-algebra kernel, the strategy
//! constructors, and the scenario curves.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use proptest::prelude::*;

use detnet::linalg::{c64, hermitian_eig, trace_norm, CMatrix, CVector};
use detnet::quantum::{
    ensemble_success, lift, outcome_probabilities, w_state, DensityMatrix, DetectorUnitary,
    FiringPattern, Hypothesis, HypothesisEnsemble, HypothesisState,
};
use detnet::scenarios::{crossover, evaluate, ScenarioId, ScenarioParams};
use detnet::strategies::{
    helstrom_binary, helstrom_pure_qubit, pgm, quartic_characteristic, unambiguous_product,
    ClusterPovmParams,
};

fn complex_entry() -> impl Strategy<Value = Complex64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| c64(re, im))
}

fn random_hermitian(dim: usize) -> impl Strategy<Value = CMatrix> {
    prop::collection::vec(complex_entry(), dim * dim).prop_map(move |entries| {
        let mut m = CMatrix::zeros(dim, dim);
        for (k, v) in entries.into_iter().enumerate() {
            m.set(k / dim, k % dim, v);
        }
        m.add(&m.adjoint()).scale(c64(0.5, 0.0))
    })
}

fn random_vector(dim: usize) -> impl Strategy<Value = CVector> {
    prop::collection::vec(complex_entry(), dim).prop_map(CVector::new)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jacobi_reconstructs_and_orthonormalizes(h in (2usize..=6).prop_flat_map(random_hermitian)) {
        let eig = hermitian_eig(&h).unwrap();
        prop_assert!(eig.reconstruct().max_abs_diff(&h) <= 1e-9);
        for (i, vi) in eig.eigenvectors.iter().enumerate() {
            for (j, vj) in eig.eigenvectors.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((vi.inner(vj) - c64(want, 0.0)).norm() <= 1e-10);
            }
        }
        for w in eig.eigenvalues.windows(2) {
            prop_assert!(w[0] <= w[1]);
        }
    }

    #[test]
    fn trace_norm_is_absolutely_homogeneous(
        h in (2usize..=5).prop_flat_map(random_hermitian),
        scale in -3.0f64..3.0,
    ) {
        let base = trace_norm(&h).unwrap();
        let scaled = trace_norm(&h.scale(c64(scale, 0.0))).unwrap();
        prop_assert!((scaled - scale.abs() * base).abs() <= 1e-9 * (1.0 + base));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn tensor_products_associate(
        a in random_vector(2),
        b in random_vector(3),
        c in random_vector(2),
    ) {
        let left = a.tensor(&b).tensor(&c);
        let right = a.tensor(&b.tensor(&c));
        prop_assert_eq!(left.dim(), 12);
        for i in 0..12 {
            prop_assert!((left.get(i) - right.get(i)).norm() <= 1e-12);
        }
    }

    #[test]
    fn lift_applies_firing_phases_slotwise(
        theta in 0.0f64..FRAC_PI_2,
        n in 1usize..=4,
        mask_seed in 0usize..16,
    ) {
        let mask = mask_seed & ((1 << n) - 1);
        let u = DetectorUnitary::new(theta).unwrap();
        let pattern = FiringPattern::new(n, mask).unwrap();

        let mut input = w_state(0, theta);
        let mut expected = w_state(u8::from(pattern.fired(0)), theta);
        for j in 1..n {
            input = input.tensor(&w_state(0, theta));
            expected = expected.tensor(&w_state(u8::from(pattern.fired(j)), theta));
        }
        let lifted = lift(&u, &pattern).apply(input.vector());
        for i in 0..lifted.dim() {
            prop_assert!((lifted.get(i) - expected.vector().get(i)).norm() <= 1e-12);
        }
    }

    #[test]
    fn qubit_decision_spectrum_follows_double_angle(
        theta in 0.0f64..FRAC_PI_2,
        p0 in 0.0f64..=1.0,
    ) {
        let p1 = 1.0 - p0;
        let res = helstrom_pure_qubit(p0, p1, theta).unwrap();
        let gap = (p0 * p0 + p1 * p1 - 2.0 * p0 * p1 * (2.0 * theta).cos()).sqrt();
        let lo = 0.5 * ((p1 - p0) - gap);
        let hi = 0.5 * ((p1 - p0) + gap);

        // The numerically diagonalized decision operator must land on the
        // same double-angle spectrum as the reported closed form.
        let spectrum = hermitian_eig(&res.lambda_operator).unwrap().eigenvalues;
        prop_assert_eq!(spectrum.len(), 2);
        prop_assert!((spectrum[0] - lo).abs() <= 1e-10);
        prop_assert!((spectrum[1] - hi).abs() <= 1e-10);
        prop_assert!((res.eigenvalues[0] - lo).abs() <= 1e-10);
        prop_assert!((res.eigenvalues[1] - hi).abs() <= 1e-10);
        prop_assert!((res.ps - 0.5 * (1.0 + gap)).abs() <= 1e-12);
    }

    #[test]
    fn matrix_route_agrees_with_qubit_route(
        theta in 0.0f64..FRAC_PI_2,
        p0 in 0.05f64..0.95,
    ) {
        let p1 = 1.0 - p0;
        let qubit = helstrom_pure_qubit(p0, p1, theta).unwrap();
        let rho0 = DensityMatrix::from_pure(&w_state(0, theta));
        let rho1 = DensityMatrix::from_pure(&w_state(1, theta));
        let matrix = helstrom_binary(&rho0, p0, &rho1, p1).unwrap();
        prop_assert!((qubit.ps - matrix.ps).abs() <= 1e-10);

        // The trace-norm shortcut must match the explicit Tr(Pi rho) route.
        let ensemble = HypothesisEnsemble::new(vec![
            Hypothesis { label: "0".into(), state: HypothesisState::Mixed(rho0), prior: p0 },
            Hypothesis { label: "1".into(), state: HypothesisState::Mixed(rho1), prior: p1 },
        ]).unwrap();
        let map = BTreeMap::from([
            ("0".to_string(), "0".to_string()),
            ("1".to_string(), "1".to_string()),
        ]);
        let numeric = ensemble_success(&matrix.povm, &ensemble, &map).unwrap();
        prop_assert!((matrix.ps - numeric).abs() <= 1e-10);
    }

    #[test]
    fn pgm_is_optimal_for_equal_prior_pure_pair(theta in 0.0f64..FRAC_PI_2) {
        let ensemble = HypothesisEnsemble::new(vec![
            Hypothesis {
                label: "0".into(),
                state: HypothesisState::Pure(w_state(0, theta)),
                prior: 0.5,
            },
            Hypothesis {
                label: "1".into(),
                state: HypothesisState::Pure(w_state(1, theta)),
                prior: 0.5,
            },
        ]).unwrap();
        let (_, pgm_ps) = pgm(&ensemble).unwrap();
        let optimal = helstrom_pure_qubit(0.5, 0.5, theta).unwrap().ps;
        prop_assert!((pgm_ps - optimal).abs() <= 1e-9);
    }

    #[test]
    fn unambiguous_measurements_never_misidentify(
        n in 1usize..=3,
        theta in 0.05f64..FRAC_PI_2,
    ) {
        let construction = unambiguous_product(n, theta).unwrap();
        for pattern in FiringPattern::all(n).unwrap() {
            let mut state = w_state(u8::from(pattern.fired(0)), theta);
            for j in 1..n {
                state = state.tensor(&w_state(u8::from(pattern.fired(j)), theta));
            }
            let rho = DensityMatrix::from_pure(&state);
            let probs = outcome_probabilities(&construction.povm, &rho).unwrap();
            for (label, p) in probs {
                if label != pattern.label() && label != "fail" {
                    prop_assert!(p.abs() <= 1e-12, "pattern {} outcome {label}: {p}", pattern.label());
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn scenario_curves_agree_on_shared_keys(
        theta in 0.05f64..FRAC_PI_2,
        which in 0usize..9,
    ) {
        let id = ScenarioId::ALL[which];
        let r = evaluate(id, theta, &ScenarioParams::default()).unwrap();
        prop_assert!(
            r.shared_key_deviation() <= 1e-9,
            "{id} at {theta}: {}",
            r.shared_key_deviation()
        );
    }

    #[test]
    fn quartic_roots_track_subspace_spectrum(
        theta in 0.1f64..1.5,
        c0 in 0.02f64..0.45,
        c1 in 0.02f64..0.45,
        c2 in 0.02f64..0.45,
    ) {
        let params = ClusterPovmParams::new(theta, c0, c1, c2).unwrap();
        if params.subspace_positive() {
            let check = quartic_characteristic(&params).unwrap();
            prop_assert!(
                check.max_root_deviation <= 1e-6,
                "deviation {} at theta {theta}, scales ({c0},{c1},{c2})",
                check.max_root_deviation
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn entangled_and_product_curves_keep_figure_order(side in 0usize..2, t in 0.0f64..1.0) {
        let params = ScenarioParams::default();
        let theta = if side == 0 {
            0.05 + t * (0.65 - 0.05)
        } else {
            0.75 + t * (FRAC_PI_2 - 0.75)
        };
        let ent = evaluate(ScenarioId::GroupedMultiFireEntangled, theta, &params)
            .unwrap()
            .numeric["ps"];
        let prod = evaluate(ScenarioId::GroupedMultiFireProduct, theta, &params)
            .unwrap()
            .numeric["ps"];
        if side == 0 {
            prop_assert!(ent >= prod - 1e-12, "at {theta}: {ent} < {prod}");
        } else {
            prop_assert!(prod >= ent - 1e-12, "at {theta}: {prod} < {ent}");
        }
    }

    #[test]
    fn crossover_brackets_nest_as_tolerance_tightens(
        lo in 0.5f64..0.58,
        hi in 0.82f64..0.9,
    ) {
        let params = ScenarioParams::default();
        let loose = crossover(
            ScenarioId::GroupedMultiFireEntangled,
            ScenarioId::GroupedMultiFireProduct,
            lo, hi, 1e-3, &params,
        ).unwrap();
        let tight = crossover(
            ScenarioId::GroupedMultiFireEntangled,
            ScenarioId::GroupedMultiFireProduct,
            lo, hi, 1e-5, &params,
        ).unwrap();
        prop_assert!(tight.bracket_lo >= loose.bracket_lo - 1e-15);
        prop_assert!(tight.bracket_hi <= loose.bracket_hi + 1e-15);
        prop_assert!(tight.theta_star > 0.65 && tight.theta_star < 0.75);
    }
}
