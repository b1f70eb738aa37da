//! Bell value of the noiseless homogeneous GHZ network when every branch
//! observer measures `cos θ_x X + sin θ_x Y`, as a function of `(θ₀, θ₁)`.
//!
//! `K_X` factorizes over sources, so the value does not depend on `n`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use rayon::prelude::*;
use serde::Serialize;

use super::combinatorics::{beta_coefficient, binomial};
use crate::error::{Error, Result};
use crate::network::{y_convention, SubsetIndex, MAX_SUBSET_LABELS};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub theta0: f64,
    pub theta1: f64,
    pub l: usize,
    pub value: f64,
}

/// Largest `L` accepted by the sweep.
pub const MAX_SWEEP_LENGTH: usize = MAX_SUBSET_LABELS;

fn check_length(l: usize) -> Result<()> {
    if !(1..=MAX_SWEEP_LENGTH).contains(&l) {
        return Err(Error::size("branch size", l, 1, MAX_SWEEP_LENGTH));
    }
    Ok(())
}

fn bob_phase(cardinality: usize, l: usize) -> f64 {
    // y_X only depends on |X|
    let subset = SubsetIndex::from_mask((1u32 << cardinality) - 1);
    FRAC_PI_2 * y_convention(subset, l) as f64
}

/// Signed per-source factor `K_X^{1/n}` for a subset of size `cardinality`,
/// via the `β` expansion `2^{-L} Σ_k β_k cos(kθ₁ + (L−k)θ₀ + π y_X / 2)`.
pub fn source_factor(theta0: f64, theta1: f64, l: usize, cardinality: usize) -> Result<f64> {
    check_length(l)?;
    let phase = bob_phase(cardinality, l);
    let mut sum = 0.0;
    for k in 0..=l {
        let beta = beta_coefficient(l, cardinality, k)? as f64;
        sum += beta * (k as f64 * theta1 + (l - k) as f64 * theta0 + phase).cos();
    }
    Ok(sum / (l as f64).exp2())
}

/// `Σ_{|X|} C(L, |X|) |K_X|^{1/n}`.
pub fn sweep_value(theta0: f64, theta1: f64, l: usize) -> Result<SweepPoint> {
    check_length(l)?;
    let mut value = 0.0;
    for c in 0..=l {
        value += binomial(l, c) as f64 * source_factor(theta0, theta1, l, c)?.abs();
    }
    Ok(SweepPoint {
        theta0,
        theta1,
        l,
        value,
    })
}

/// The same value by summing the correlator `cos(Σ_k θ_{x^k} + π y_X / 2)`
/// over every setting string, without the binomial regrouping.
pub fn sweep_value_direct(theta0: f64, theta1: f64, l: usize) -> Result<f64> {
    if !(1..=12).contains(&l) {
        return Err(Error::size("branch size", l, 1, 12));
    }
    let strings = 1u32 << l;
    let mut value = 0.0;
    for mask in 0..strings {
        let subset = SubsetIndex::from_mask(mask);
        let phase = FRAC_PI_2 * y_convention(subset, l) as f64;
        let sum: f64 = (0..strings)
            .map(|x| {
                let ones = x.count_ones() as f64;
                let angle = ones * theta1 + (l as f64 - ones) * theta0 + phase;
                let sign = if (x & mask).count_ones() % 2 == 0 {
                    1.0
                } else {
                    -1.0
                };
                sign * angle.cos()
            })
            .sum();
        value += (sum / strings as f64).abs();
    }
    Ok(value)
}

/// `2^{⌊L/2⌋} cos^L θ` on `[0, π/4]` and `2^{⌊L/2⌋} sin^L θ` on `[π/4, π/2]`,
/// the observed form of the sweep along `θ₁ = π/2 − θ₀`.
pub fn conjectured_diagonal_value(theta: f64, l: usize) -> f64 {
    let scale = ((l / 2) as f64).exp2();
    let base = if theta <= FRAC_PI_4 {
        theta.cos()
    } else {
        theta.sin()
    };
    scale * base.powi(l as i32)
}

/// `points` evenly spaced values of `θ` over `[0, π/2]` inclusive.
pub fn angle_grid(points: usize) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(Error::contract("a sweep grid needs at least 2 points"));
    }
    Ok((0..points)
        .map(|i| FRAC_PI_2 * i as f64 / (points - 1) as f64)
        .collect())
}

/// Sweep along `θ₀ = θ`, `θ₁ = π/2 − θ`.
pub fn diagonal_sweep(l: usize, points: usize) -> Result<Vec<SweepPoint>> {
    angle_grid(points)?
        .into_par_iter()
        .map(|t| sweep_value(t, FRAC_PI_2 - t, l))
        .collect()
}

/// Sweep over the full `points × points` grid, `θ₀`-major.
pub fn grid_sweep(l: usize, points: usize) -> Result<Vec<SweepPoint>> {
    let grid = angle_grid(points)?;
    grid.par_iter()
        .flat_map_iter(|&t0| grid.iter().map(move |&t1| sweep_value(t0, t1, l)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn l2_diagonal_closed_form() {
        for t in angle_grid(101).unwrap() {
            let v = sweep_value(t, FRAC_PI_2 - t, 2).unwrap().value;
            let expected = 1.0 + 2.0 * ((t + FRAC_PI_4).sin() * (t - FRAC_PI_4).sin()).abs();
            assert!((v - expected).abs() < 1e-12, "θ = {t}");
        }
    }

    #[test]
    fn xy_endpoint() {
        for l in 1..=6 {
            let v = sweep_value(0.0, FRAC_PI_2, l).unwrap().value;
            assert!((v - ((l / 2) as f64).exp2()).abs() < 1e-12, "L = {l}");
        }
    }

    #[test]
    fn expansion_matches_direct_sum() {
        for l in 1..=5 {
            for &(a, b) in &[(0.1, 0.7), (1.2, -0.4), (0.0, FRAC_PI_2)] {
                let v = sweep_value(a, b, l).unwrap().value;
                assert!((v - sweep_value_direct(a, b, l).unwrap()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn grid_sizes() {
        assert_eq!(grid_sweep(2, 5).unwrap().len(), 25);
        assert_eq!(diagonal_sweep(2, 7).unwrap().len(), 7);
        assert!(diagonal_sweep(2, 1).is_err());
    }
}
