//! Analytic distributions for GHZ sources measured with `X` (label 0) and
//! `Y` (label 1) and Bob's separable `X`/`Y` measurement.

use super::table::CorrelationTable;
use crate::error::{Error, Result};
use crate::network::NetworkConfig;

/// `cos(k π/2)`, exact.
pub fn cos_quarter_turns(k: u64) -> f64 {
    match k % 4 {
        0 => 1.0,
        2 => -1.0,
        _ => 0.0,
    }
}

fn parity_sign(e: u64) -> f64 {
    if e.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `P(a_j, b_j | x_j, y) = 2^{-(L+1)} [1 + (-1)^{b + Σa} cos(π/2 (Σx + y))]`
/// for one `(L+1)`-qubit GHZ source. `x` and `a` are packed `L`-bit strings.
pub fn single_source_probability(l: usize, x: u64, y: usize, a: u64, b: u8) -> f64 {
    let sign = parity_sign(a.count_ones() as u64 + b as u64);
    let cos = cos_quarter_turns(x.count_ones() as u64 + y as u64);
    (1.0 + sign * cos) / (1u64 << (l + 1)) as f64
}

/// `P(ā, b | x̄, y) = 2^{-(nL+1)} (1 + (-1)^{b+Σa} Π_j cos(π/2 (Σ_k x_j^k + y)))`.
pub fn joint_probability(config: &NetworkConfig, x: u64, y: usize, a: u64, b: u8) -> Result<f64> {
    if !config.is_homogeneous() {
        return Err(Error::contract(
            "closed-form joint distribution needs a homogeneous network",
        ));
    }
    let cos_product: f64 = (0..config.n())
        .map(|j| cos_quarter_turns(config.source_bits(x, j).count_ones() as u64 + y as u64))
        .product();
    let sign = parity_sign(a.count_ones() as u64 + b as u64);
    Ok((1.0 + sign * cos_product) / (1u64 << (config.total_observers() + 1)) as f64)
}

/// Full table of [`joint_probability`] with Bob's two settings.
pub fn joint_table(config: &NetworkConfig) -> Result<CorrelationTable> {
    if !config.is_homogeneous() {
        return Err(Error::contract(
            "closed-form joint distribution needs a homogeneous network",
        ));
    }
    let c = config.clone();
    CorrelationTable::from_fn(config.clone(), 2, move |x, y, a, b| {
        joint_probability(&c, x, y, a, b).expect("homogeneous")
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_source_examples() {
        // all settings 0: cosine = 1
        assert_eq!(single_source_probability(2, 0, 0, 0, 0), 0.25);
        // x = (1,0), y = 0: cosine = 0
        for a in 0..4 {
            for b in 0..2 {
                assert_eq!(single_source_probability(2, 0b10, 0, a, b), 0.125);
            }
        }
        for l in 1..=5usize {
            for x in 0..1u64 << l {
                for y in 0..2 {
                    let total: f64 = (0..1u64 << l)
                        .flat_map(|a| (0..2u8).map(move |b| (a, b)))
                        .map(|(a, b)| single_source_probability(l, x, y, a, b))
                        .sum();
                    assert!((total - 1.0).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn joint_examples() {
        let c = NetworkConfig::homogeneous(2, 2).unwrap();
        assert_eq!(joint_probability(&c, 0, 0, 0, 0).unwrap(), 1.0 / 16.0);
        assert_eq!(joint_probability(&c, 0, 0, 0b0011, 0).unwrap(), 1.0 / 16.0);
        // source 1 has Σx + y odd
        assert_eq!(joint_probability(&c, 0b1000, 0, 0, 0).unwrap(), 1.0 / 32.0);
        for x in 0..16 {
            for y in 0..2 {
                for a in 0..16 {
                    let marginal = joint_probability(&c, x, y, a, 0).unwrap()
                        + joint_probability(&c, x, y, a, 1).unwrap();
                    assert!((marginal - 1.0 / 16.0).abs() < 1e-15);
                }
            }
        }
        let het = NetworkConfig::new(vec![1, 2]).unwrap();
        assert!(joint_probability(&het, 0, 0, 0, 0).is_err());
    }
}
