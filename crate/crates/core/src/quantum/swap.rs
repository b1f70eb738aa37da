//! Joint statistics when the central node projects its `n` qubits onto the
//! GHZ-like basis `|ξ_{b¹…bⁿ}⟩ = Z^{b¹} ⊗ X^{b²} ⊗ … ⊗ X^{bⁿ} |GHZ⟩`.
//!
//! Only noiseless sources are simulated, as pure state vectors.

use num_complex::Complex64;
use rayon::prelude::*;

use super::measure::{pauli_x, pauli_z, MeasurementScheme, XYObservable};
use super::state::{StateVector, MAX_QUBITS};
use crate::error::{Error, Result};
use crate::network::NetworkConfig;

/// The `2ⁿ` basis states, indexed by the packed string `b¹…bⁿ` (`b¹` most
/// significant).
pub fn ghz_like_basis(n: usize) -> Result<Vec<StateVector>> {
    let ghz = StateVector::ghz(n)?;
    let z = pauli_z();
    let x = pauli_x();
    Ok((0..1usize << n)
        .map(|label| {
            let mut state = ghz.clone();
            for q in 0..n {
                if (label >> (n - 1 - q)) & 1 == 1 {
                    state.apply(q, if q == 0 { &z } else { &x });
                }
            }
            state
        })
        .collect())
}

/// `P(ā, b¹…bⁿ | x̄)` stored at `(x · 2^N + a) · 2ⁿ + b`.
#[derive(Debug, Clone)]
pub struct SwapTable {
    config: NetworkConfig,
    values: Vec<f64>,
}

impl SwapTable {
    pub fn config(&self) -> &NetworkConfig {
        &self.config
    }

    pub fn bob_outcomes(&self) -> usize {
        1 << self.config.n()
    }

    pub fn strings(&self) -> u64 {
        1 << self.config.total_observers()
    }

    pub fn get(&self, x: u64, a: u64, bob: usize) -> f64 {
        let idx = ((x * self.strings() + a) as usize) * self.bob_outcomes() + bob;
        self.values[idx]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Distribution of Bob's outcome string for settings `x`.
    pub fn bob_marginal(&self, x: u64) -> Vec<f64> {
        let mut marginal = vec![0.0; self.bob_outcomes()];
        for a in 0..self.strings() {
            for (b, m) in marginal.iter_mut().enumerate() {
                *m += self.get(x, a, b);
            }
        }
        marginal
    }

    pub fn normalization_defect(&self) -> f64 {
        (0..self.strings())
            .map(|x| (self.bob_marginal(x).iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Simulates the noiseless network with the joint GHZ-basis measurement at
/// the centre and the scheme's observables at every branch.
pub fn swap_joint_table(config: &NetworkConfig, scheme: &MeasurementScheme) -> Result<SwapTable> {
    let n = config.n();
    let n_obs = config.total_observers();
    let qubits = n_obs + n;
    if qubits > MAX_QUBITS {
        return Err(Error::size("swap qubits", qubits, 2, MAX_QUBITS));
    }
    if scheme.observer_angles().len() != n_obs {
        return Err(Error::contract(
            "measurement scheme does not match the network",
        ));
    }

    let mut joint = StateVector::ghz(config.branches()[0] + 1)?;
    for &l in &config.branches()[1..] {
        joint = joint.kron(&StateVector::ghz(l + 1)?)?;
    }
    // source-major (branches, Bob) → all branches in observer order, then Bob's qubits
    let mut order = Vec::with_capacity(qubits);
    for j in 0..n {
        let start = config.offset(j) + j;
        order.extend(start..start + config.branches()[j]);
    }
    for j in 0..n {
        order.push(config.offset(j) + j + config.branches()[j]);
    }
    let joint = joint.permute_qubits(&order)?;
    let psi = joint.amplitudes();
    let bob_dim = 1usize << n;
    let strings = 1usize << n_obs;

    // conditional (unnormalised) branch states after Bob's projection
    let branch_states: Vec<Vec<Complex64>> = ghz_like_basis(n)?
        .iter()
        .map(|xi| {
            let xi = xi.amplitudes();
            (0..strings)
                .map(|r| {
                    (0..bob_dim)
                        .map(|c| xi[c].conj() * psi[r * bob_dim + c])
                        .sum()
                })
                .collect()
        })
        .collect();

    let angles = scheme.observer_angles();
    let mut values = vec![0.0; strings * strings * bob_dim];
    values
        .par_chunks_mut(strings * bob_dim)
        .enumerate()
        .for_each(|(x, chunk)| {
            let observables: Vec<XYObservable> = (0..n_obs)
                .map(|i| {
                    let pair = angles[i];
                    if (x >> (n_obs - 1 - i)) & 1 == 0 {
                        pair.0
                    } else {
                        pair.1
                    }
                })
                .collect();
            for (b, phi) in branch_states.iter().enumerate() {
                let mut probs = vec![0.0; strings];
                project_outcomes(phi, &observables, 0, 0, &mut probs);
                for (a, p) in probs.into_iter().enumerate() {
                    chunk[a * bob_dim + b] = p;
                }
            }
        });

    Ok(SwapTable {
        config: config.clone(),
        values,
    })
}

/// Squared amplitudes of `state` in the product eigenbasis of `observables`.
fn project_outcomes(
    state: &[Complex64],
    observables: &[XYObservable],
    q: usize,
    outcome: usize,
    out: &mut [f64],
) {
    if q == observables.len() {
        out[outcome] = state[0].norm_sqr();
        return;
    }
    let half = state.len() / 2;
    for o in 0..2u8 {
        let e = observables[q].eigenvector(o);
        let reduced: Vec<Complex64> = (0..half)
            .map(|i| e[0].conj() * state[i] + e[1].conj() * state[half + i])
            .collect();
        project_outcomes(
            &reduced,
            observables,
            q + 1,
            (outcome << 1) | o as usize,
            out,
        );
    }
}

#[cfg(test)]
mod tests {
    use super::super::measure::{BobScheme, Scheme};
    use super::*;

    #[test]
    fn basis_is_orthonormal() {
        for n in 1..=4 {
            let basis = ghz_like_basis(n).unwrap();
            assert_eq!(basis.len(), 1 << n);
            for (i, u) in basis.iter().enumerate() {
                for (j, v) in basis.iter().enumerate() {
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert!((u.inner(v) - Complex64::new(expected, 0.0)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn basis_resolves_identity() {
        for n in 1..=3 {
            let basis = ghz_like_basis(n).unwrap();
            let dim = 1 << n;
            for r in 0..dim {
                for c in 0..dim {
                    let sum: Complex64 = basis
                        .iter()
                        .map(|v| v.amplitudes()[r] * v.amplitudes()[c].conj())
                        .sum();
                    let expected = if r == c { 1.0 } else { 0.0 };
                    assert!((sum - Complex64::new(expected, 0.0)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn swap_table_normalized() {
        let c = NetworkConfig::homogeneous(2, 2).unwrap();
        let scheme =
            MeasurementScheme::uniform(&c, Scheme::Rotated.angles(), BobScheme::GhzBasisSwap);
        let t = swap_joint_table(&c, &scheme).unwrap();
        assert!(t.normalization_defect() < 1e-12);
    }

    #[test]
    fn bell_outcome_uniform_for_two_pairs() {
        let c = NetworkConfig::homogeneous(2, 1).unwrap();
        for pair in [Scheme::Xy.angles(), Scheme::Rotated.angles()] {
            let scheme = MeasurementScheme::uniform(&c, pair, BobScheme::GhzBasisSwap);
            let t = swap_joint_table(&c, &scheme).unwrap();
            for x in 0..4 {
                for p in t.bob_marginal(x) {
                    assert!((p - 0.25).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn swapped_end_qubits_are_maximally_entangled() {
        // both end observers measure X: conditioned on Bob's outcome the
        // product of their outcomes is deterministic
        let c = NetworkConfig::homogeneous(2, 1).unwrap();
        let scheme = MeasurementScheme::uniform(&c, Scheme::Xy.angles(), BobScheme::GhzBasisSwap);
        let t = swap_joint_table(&c, &scheme).unwrap();
        for b in 0..4 {
            let pb: f64 = (0..4).map(|a| t.get(0, a, b)).sum();
            let corr: f64 = (0..4u64)
                .map(|a| {
                    let sign = if a.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                    sign * t.get(0, a, b)
                })
                .sum::<f64>()
                / pb;
            assert!((corr.abs() - 1.0).abs() < 1e-12, "b = {b}: {corr}");
        }
    }

    #[test]
    fn qubit_budget() {
        let c = NetworkConfig::homogeneous(3, 4).unwrap();
        let scheme = MeasurementScheme::uniform(&c, Scheme::Xy.angles(), BobScheme::GhzBasisSwap);
        assert!(matches!(
            swap_joint_table(&c, &scheme),
            Err(Error::Size { .. })
        ));
    }
}
