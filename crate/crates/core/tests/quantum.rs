use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, TAU};

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

use netbell::quantum::closed_form::{joint_probability, joint_table, single_source_probability};
use netbell::quantum::measure::{identity, pauli_x, pauli_y, BobScheme};
use netbell::quantum::{
    compose_network, network_table, single_source_table, CorrelationTable, DensityOperator,
    MeasurementScheme, Scheme, StateVector, XYObservable, BOB_AXES,
};
use netbell::NetworkConfig;

fn hermitian_min_eigenvalue(rho: &DensityOperator) -> f64 {
    // a Hermitian H = A + iB has the same spectrum (doubled) as [[A, -B], [B, A]]
    let d = rho.dim();
    let real = DMatrix::from_fn(2 * d, 2 * d, |r, c| {
        let z = rho.entry(r % d, c % d);
        match (r < d, c < d) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    real.symmetric_eigenvalues().min()
}

#[test]
fn ghz_amplitudes() {
    for m in 1..=12 {
        let s = StateVector::ghz(m).unwrap();
        let amps = s.amplitudes();
        assert!((amps[0].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((amps[(1 << m) - 1].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }
    assert!(StateVector::ghz(0).is_err());
    assert!(StateVector::ghz(13).is_err());
}

#[test]
fn projector_examples() {
    let half = Complex64::new(0.5, 0.0);
    let p = XYObservable::X.projector(0);
    let (i, x) = (identity(), pauli_x());
    for r in 0..2 {
        for c in 0..2 {
            assert!((p[r][c] - half * (i[r][c] + x[r][c])).norm() < 1e-15);
        }
    }
    let p = XYObservable::Y.projector(1);
    let y = pauli_y();
    for r in 0..2 {
        for c in 0..2 {
            assert!((p[r][c] - half * (i[r][c] - y[r][c])).norm() < 1e-15);
        }
    }
}

#[test]
fn noisy_states_are_valid_density_operators() {
    for m in 1..=4 {
        for &v in &[0.0, 0.3, 1.0] {
            let rho = DensityOperator::noisy_ghz(m, v).unwrap();
            assert!(rho.hermiticity_defect() < 1e-12);
            assert!((rho.trace() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
            assert!(hermitian_min_eigenvalue(&rho) >= -1e-10);
        }
    }
}

#[test]
fn single_source_l1_matches_closed_form() {
    let t = single_source_table(&[Scheme::Xy.angles()], BOB_AXES, 1.0).unwrap();
    for x in 0..2 {
        for y in 0..2 {
            for a in 0..2 {
                for b in 0..2u8 {
                    let exact = single_source_probability(1, x, y, a, b);
                    assert!((t.get(x, y, a, b) - exact).abs() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn l2_all_zero_settings() {
    assert_eq!(single_source_probability(2, 0, 0, 0, 0), 0.25);
}

#[test]
fn composed_network_matches_closed_form() {
    for (n, l) in [(1, 1), (1, 2), (1, 3), (2, 1), (2, 2), (3, 1)] {
        let c = NetworkConfig::homogeneous(n, l).unwrap();
        let per_source: Vec<CorrelationTable> = (0..n)
            .map(|_| single_source_table(&vec![Scheme::Xy.angles(); l], BOB_AXES, 1.0).unwrap())
            .collect();
        let composed = compose_network(&per_source).unwrap();
        let exact = joint_table(&c).unwrap();
        assert!(composed.max_abs_diff(&exact).unwrap() < 1e-12, "({n}, {l})");
        assert!(composed.normalization_defect() < 1e-12);
    }
}

#[test]
fn joint_examples() {
    let c = NetworkConfig::homogeneous(2, 2).unwrap();
    assert!((joint_probability(&c, 0, 0, 0, 0).unwrap() - 1.0 / 16.0).abs() < 1e-15);
}

#[test]
fn rotated_single_source_correlator() {
    // ⟨⊗(cos θ X + sin θ Y) ⊗ Bob⟩ on GHZ is cos(Σθ + π y / 2)
    let pair = (XYObservable::new(0.3), XYObservable::new(-1.1));
    let t = single_source_table(&[pair, pair], BOB_AXES, 1.0).unwrap();
    for x in 0..4u64 {
        for y in 0..2 {
            let sum: f64 = (0..2)
                .map(|k| if (x >> (1 - k)) & 1 == 0 { 0.3 } else { -1.1 })
                .sum();
            let expected = (sum + FRAC_PI_2 * y as f64).cos();
            assert!((t.correlator(x, y) - expected).abs() < 1e-12);
        }
    }
}

#[test]
fn swap_scheme_rejected_by_separable_assembly() {
    let c = NetworkConfig::homogeneous(2, 1).unwrap();
    let s = MeasurementScheme::uniform(&c, Scheme::Xy.angles(), BobScheme::GhzBasisSwap);
    assert!(network_table(&c, &s, &[1.0, 1.0]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn visibility_is_linear(p in 0.0f64..=1.0) {
        let angles = vec![Scheme::Rotated.angles(); 2];
        let noisy = single_source_table(&angles, BOB_AXES, p).unwrap();
        let pure = single_source_table(&angles, BOB_AXES, 1.0).unwrap();
        let uniform = CorrelationTable::uniform(pure.config().clone(), 2).unwrap();
        let mixed = pure.mix(&uniform, p).unwrap();
        prop_assert!(noisy.max_abs_diff(&mixed).unwrap() < 1e-12);
    }

    #[test]
    fn tables_are_normalized(
        angles in proptest::collection::vec((0.0f64..TAU, 0.0f64..TAU), 1..=3),
        p in 0.0f64..=1.0,
    ) {
        let pairs: Vec<_> = angles.iter().map(|&(a, b)| (XYObservable::new(a), XYObservable::new(b))).collect();
        let t = single_source_table(&pairs, BOB_AXES, p).unwrap();
        prop_assert!(t.normalization_defect() < 1e-12);
        prop_assert!(t.min_entry() > -1e-12);
    }
}
