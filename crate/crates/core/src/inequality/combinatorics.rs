//! Counting identities behind the XY-scheme value of `K_∅`, and the
//! coefficients of the angle expansion.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Largest `L` for which counts are computed (`2^L` must fit comfortably).
pub const MAX_COUNT_LENGTH: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// Strings whose number of ones is `≡ 3 (mod 4)`.
    C0,
    /// Strings whose number of ones is a multiple of four.
    C1,
}

/// Both evaluations of a count, plus the integer closed form where it applies
/// (`C₀` for `L ≡ 2`, `C₁` for `L ≡ 0 (mod 4)`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContributionCount {
    pub binomial_sum: u64,
    pub trigonometric: f64,
    pub simplified: Option<i128>,
}

impl ContributionCount {
    /// Whether every available closed form agrees with the binomial sum.
    pub fn consistent(&self) -> bool {
        let exact = self.binomial_sum as f64;
        let tol = 1e-9 * exact.max(1.0);
        (self.trigonometric - exact).abs() <= tol
            && self
                .simplified
                .is_none_or(|s| s == self.binomial_sum as i128)
    }
}

pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

pub fn count_contributions(l: usize, variant: Variant) -> Result<ContributionCount> {
    if !(1..=MAX_COUNT_LENGTH).contains(&l) {
        return Err(Error::size("string length", l, 1, MAX_COUNT_LENGTH));
    }
    let residue = match variant {
        Variant::C0 => 3,
        Variant::C1 => 0,
    };
    let binomial_sum = (residue..=l).step_by(4).map(|k| binomial(l, k)).sum();

    let lf = l as f64;
    let sign = if l.is_multiple_of(2) { 1.0 } else { -1.0 };
    let scale = (lf / 2.0 - 2.0).exp2();
    let root = (lf / 2.0).exp2();
    let trigonometric = match variant {
        Variant::C1 => scale * (root + (PI * lf / 4.0).cos() + sign * (3.0 * PI * lf / 4.0).cos()),
        Variant::C0 => scale * (root - (PI * lf / 4.0).sin() + sign * (3.0 * PI * lf / 4.0).sin()),
    };

    let alt = |k: usize| if k.is_multiple_of(2) { 1i128 } else { -1 };
    let simplified = match (variant, l % 4) {
        (Variant::C0, 2) => {
            let k = (l - 2) / 4;
            Some(16i128.pow(k as u32) - 4i128.pow(k as u32) * alt(k))
        }
        (Variant::C1, 0) => {
            let k = l / 4;
            Some(4i128.pow(k as u32 - 1) * (4i128.pow(k as u32) + 2 * alt(k)))
        }
        _ => None,
    };

    Ok(ContributionCount {
        binomial_sum,
        trigonometric,
        simplified,
    })
}

/// `|K_∅|` of the noiseless homogeneous XY network for even `L`:
/// `(2^{-L} (2 max(C, 2^{L−1} − C) − 2^{L−1}))^n` with `C = C₁` when
/// `L ≡ 0` and `C = C₀` when `L ≡ 2 (mod 4)`.
pub fn k_empty_from_counts(n: usize, l: usize) -> Result<f64> {
    if !l.is_multiple_of(2) {
        return Err(Error::contract("the counting form of K_∅ needs even L"));
    }
    let variant = if l.is_multiple_of(4) { Variant::C1 } else { Variant::C0 };
    let c = count_contributions(l, variant)?.binomial_sum as f64;
    let half = (l as f64 - 1.0).exp2();
    let per_source = (2.0 * c.max(half - c) - half) / (l as f64).exp2();
    Ok(per_source.powi(n as i32))
}

/// `β_k^{L,|X|} = Σ_s (−1)^s C(L−|X|, k−s) C(|X|, s)`.
pub fn beta_coefficient(l: usize, cardinality: usize, k: usize) -> Result<i64> {
    if cardinality > l || k > l {
        return Err(Error::contract(format!(
            "β needs 0 ≤ |X|, k ≤ L, got L = {l}, |X| = {cardinality}, k = {k}"
        )));
    }
    Ok((0..=cardinality.min(k))
        .map(|s| {
            let term = binomial(l - cardinality, k - s) as i64 * binomial(cardinality, s) as i64;
            if s % 2 == 0 {
                term
            } else {
                -term
            }
        })
        .sum())
}
