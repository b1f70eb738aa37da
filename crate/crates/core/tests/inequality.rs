use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use proptest::prelude::*;

use netbell::inequality::combinatorics::{beta_coefficient, count_contributions, Variant};
use netbell::inequality::reduction::{
    chsh_form, chsh_mapping, mermin_form, mermin_mapping, single_experiment_value,
    SingleExperimentCorrelators,
};
use netbell::inequality::sweep::{conjectured_diagonal_value, diagonal_sweep, sweep_value};
use netbell::inequality::visibility::Threshold;
use netbell::inequality::{
    bell_value, find_critical_visibility, k_spectrum, predicted_quantum_value, q_spectrum,
    BobSettingMap,
};
use netbell::quantum::closed_form::joint_table;
use netbell::quantum::{
    network_table, single_source_table, CorrelationTable, MeasurementScheme, Scheme, XYObservable,
    BOB_AXES,
};
use netbell::NetworkConfig;

fn simulate(config: &NetworkConfig, scheme: Scheme, visibility: f64) -> CorrelationTable {
    network_table(
        config,
        &MeasurementScheme::standard(config, scheme),
        &vec![visibility; config.n()],
    )
    .unwrap()
}

#[test]
fn xy_spectrum_is_symmetric() {
    for (n, l) in [(1, 2), (2, 2), (1, 4), (2, 3)] {
        let c = NetworkConfig::homogeneous(n, l).unwrap();
        let s = k_spectrum(
            &joint_table(&c).unwrap(),
            &BobSettingMap::convention(l).unwrap(),
        )
        .unwrap();
        let k0 = s.entries()[0].abs();
        assert!(
            s.entries().iter().all(|k| (k.abs() - k0).abs() < 1e-12),
            "({n}, {l})"
        );
    }
}

#[test]
fn rotated_two_by_three() {
    let c = NetworkConfig::homogeneous(2, 3).unwrap();
    let s = k_spectrum(
        &simulate(&c, Scheme::Rotated, 1.0),
        &BobSettingMap::for_scheme(&c, Scheme::Rotated).unwrap(),
    )
    .unwrap();
    assert!((bell_value(&s) - 8f64.sqrt()).abs() < 1e-9);
}

#[test]
fn q_spectrum_heterogeneous_magnitude() {
    let c = NetworkConfig::new(vec![1, 2]).unwrap();
    let s = q_spectrum(
        &simulate(&c, Scheme::Rotated, 1.0),
        &BobSettingMap::for_scheme(&c, Scheme::Rotated).unwrap(),
    )
    .unwrap();
    for k in s.entries() {
        assert!((k.abs() - 2f64.powf(-1.5)).abs() < 1e-12);
    }
    assert!(k_spectrum(
        &simulate(&c, Scheme::Rotated, 1.0),
        &BobSettingMap::parity(2).unwrap()
    )
    .is_err());
}

#[test]
fn q_equals_k_on_homogeneous() {
    let c = NetworkConfig::homogeneous(2, 2).unwrap();
    let t = simulate(&c, Scheme::Rotated, 0.8);
    let m = BobSettingMap::parity(2).unwrap();
    assert_eq!(q_spectrum(&t, &m).unwrap(), k_spectrum(&t, &m).unwrap());
}

#[test]
fn noise_scales_spectrum() {
    let c = NetworkConfig::homogeneous(2, 2).unwrap();
    let m = BobSettingMap::convention(2).unwrap();
    let pure = k_spectrum(&simulate(&c, Scheme::Xy, 1.0), &m).unwrap();
    for v in [0.1f64, 0.5, 0.93] {
        let noisy = k_spectrum(&simulate(&c, Scheme::Xy, v.sqrt()), &m).unwrap();
        assert!(noisy.max_abs_diff(&pure.scaled(v)) < 1e-12);
    }
}

#[test]
fn bisection_thresholds() {
    let cases = [
        (
            NetworkConfig::homogeneous(1, 1).unwrap(),
            Scheme::Rotated,
            Some(0.5f64.sqrt()),
        ),
        (NetworkConfig::homogeneous(1, 1).unwrap(), Scheme::Xy, None),
        (
            NetworkConfig::homogeneous(2, 3).unwrap(),
            Scheme::Xy,
            Some(0.25),
        ),
    ];
    for (c, scheme, expected) in cases {
        match (find_critical_visibility(&c, scheme).unwrap(), expected) {
            (Threshold::Crossing { visibility }, Some(e)) => assert!((visibility - e).abs() < 1e-6),
            (Threshold::NoViolation { .. }, None) => {}
            (got, _) => panic!("{c} {scheme:?}: {got:?}"),
        }
    }
}

#[test]
fn counts_match_bit_counting() {
    for l in 1..=16usize {
        let mut by_residue = [0u64; 4];
        for s in 0..1u32 << l {
            by_residue[(s.count_ones() % 4) as usize] += 1;
        }
        let c0 = count_contributions(l, Variant::C0).unwrap();
        let c1 = count_contributions(l, Variant::C1).unwrap();
        assert_eq!(c0.binomial_sum, by_residue[3]);
        assert_eq!(c1.binomial_sum, by_residue[0]);
        assert!(c0.consistent() && c1.consistent(), "L = {l}");
    }
}

/// Coefficients of `(1 + t)^{L−c} (1 − t)^c` by repeated polynomial products.
fn expand(l: usize, c: usize) -> Vec<i64> {
    let mut poly = vec![1i64];
    for i in 0..l {
        let sign = if i < l - c { 1 } else { -1 };
        let mut next = vec![0i64; poly.len() + 1];
        for (k, &a) in poly.iter().enumerate() {
            next[k] += a;
            next[k + 1] += sign * a;
        }
        poly = next;
    }
    poly
}

#[test]
fn beta_matches_polynomial_expansion() {
    for l in 1..=8 {
        for c in 0..=l {
            let expected = expand(l, c);
            for (k, &e) in expected.iter().enumerate() {
                assert_eq!(
                    beta_coefficient(l, c, k).unwrap(),
                    e,
                    "L = {l}, |X| = {c}, k = {k}"
                );
            }
            if c >= 1 {
                assert_eq!(
                    (0..=l)
                        .map(|k| beta_coefficient(l, c, k).unwrap())
                        .sum::<i64>(),
                    0
                );
            }
        }
    }
}

#[test]
fn sweep_examples() {
    let v = sweep_value(FRAC_PI_4, FRAC_PI_4, 2).unwrap().value;
    assert!((v - 1.0).abs() < 1e-12);
    for l in 1..=6 {
        let v = sweep_value(0.0, FRAC_PI_2, l).unwrap().value;
        let c = NetworkConfig::homogeneous(2, l).unwrap();
        assert!((v - predicted_quantum_value(&c, Scheme::Xy)).abs() < 1e-12);
    }
}

#[test]
fn sweep_matches_simulation() {
    // the angle expansion against the full two-source simulation
    let c = NetworkConfig::homogeneous(2, 2).unwrap();
    for &(t0, t1) in &[(0.2, 1.1), (0.9, 0.4), (0.0, FRAC_PI_2)] {
        let pair = (XYObservable::new(t0), XYObservable::new(t1));
        let scheme = MeasurementScheme::uniform(&c, pair, netbell::quantum::BobScheme::SeparableXy);
        let t = network_table(&c, &scheme, &[1.0, 1.0]).unwrap();
        let s = k_spectrum(&t, &BobSettingMap::convention(2).unwrap()).unwrap();
        assert!((bell_value(&s) - sweep_value(t0, t1, 2).unwrap().value).abs() < 1e-12);
    }
}

#[test]
fn conjectured_diagonal_form() {
    for l in 1..=6 {
        for p in diagonal_sweep(l, 101).unwrap() {
            let expected = conjectured_diagonal_value(p.theta0, l);
            assert!(
                (p.value - expected).abs() < 1e-9,
                "L = {l}, θ = {}",
                p.theta0
            );
        }
    }
}

#[test]
fn chsh_and_mermin_quantum_values() {
    let single = NetworkConfig::homogeneous(1, 1).unwrap();
    let t = single_source_table(&[Scheme::Rotated.angles()], BOB_AXES, 1.0).unwrap();
    let corr = SingleExperimentCorrelators::from_table(&t).unwrap();
    let v = single_experiment_value(&corr, &chsh_mapping()).unwrap();
    assert!((v - 2f64.sqrt()).abs() < 1e-12);
    assert!((chsh_form(&corr).unwrap() - v).abs() < 1e-12);
    assert_eq!(corr.l(), single.l_max());

    let pair = (XYObservable::new(-FRAC_PI_4), XYObservable::new(FRAC_PI_4));
    let t = single_source_table(&[pair, pair], BOB_AXES, 1.0).unwrap();
    let corr = SingleExperimentCorrelators::from_table(&t).unwrap();
    assert!((mermin_form(&corr).unwrap() - 2.0).abs() < 1e-12);
    assert!((single_experiment_value(&corr, &mermin_mapping()).unwrap() - 2.0).abs() < 1e-12);

    let t = single_source_table(&[Scheme::Xy.angles(); 2], BOB_AXES, 1.0).unwrap();
    let corr = SingleExperimentCorrelators::from_table(&t).unwrap();
    let v = single_experiment_value(&corr, &BobSettingMap::convention(2).unwrap()).unwrap();
    assert!((v - 2.0).abs() < 1e-12);
}

fn random_table(c: &NetworkConfig, weights: &[f64]) -> CorrelationTable {
    let block = 2usize << c.total_observers();
    let mut i = 0usize;
    let raw = CorrelationTable::from_fn(c.clone(), 2, |_, _, _, _| {
        i += 1;
        weights[i % weights.len()]
    })
    .unwrap();
    let values: Vec<f64> = raw
        .values()
        .chunks(block)
        .flat_map(|chunk| {
            let total: f64 = chunk.iter().sum();
            chunk.iter().map(move |p| p / total).collect::<Vec<_>>()
        })
        .collect();
    CorrelationTable::new(c.clone(), 2, values).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn spectrum_is_linear(
        w1 in proptest::collection::vec(0.01f64..1.0, 7..20),
        w2 in proptest::collection::vec(0.01f64..1.0, 7..20),
        alpha in 0.0f64..=1.0,
    ) {
        let c = NetworkConfig::homogeneous(2, 1).unwrap();
        let m = BobSettingMap::convention(1).unwrap();
        let (p, q) = (random_table(&c, &w1), random_table(&c, &w2));
        let mixed = k_spectrum(&p.mix(&q, alpha).unwrap(), &m).unwrap();
        let kp = k_spectrum(&p, &m).unwrap();
        let kq = k_spectrum(&q, &m).unwrap();
        for i in 0..2 {
            let expected = alpha * kp.entries()[i] + (1.0 - alpha) * kq.entries()[i];
            prop_assert!((mixed.entries()[i] - expected).abs() < 1e-12);
        }
        prop_assert!(kp.entries().iter().all(|k| k.abs() <= 1.0 + 1e-12));
    }

    #[test]
    fn l2_diagonal_sweep(theta in 0.0f64..=FRAC_PI_2) {
        let v = sweep_value(theta, FRAC_PI_2 - theta, 2).unwrap().value;
        let expected = 1.0 + 2.0 * ((theta + FRAC_PI_4).sin() * (theta - FRAC_PI_4).sin()).abs();
        prop_assert!((v - expected).abs() < 1e-9);
    }
}
