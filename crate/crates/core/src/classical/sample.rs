use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::network::NetworkConfig;
use crate::quantum::table::MAX_TABLE_OBSERVERS;
use crate::quantum::CorrelationTable;

/// Largest number of hidden values per source.
pub const MAX_LATTICE: usize = 64;

/// Binary digits shared by the `n` sources' weights. Each weight is a
/// multiple of `2^{-40/n}`, so products and every correlator sum stay exact
/// in `f64`; vanishing `K_X` come out as exact zeros rather than rounding
/// noise that the `1/n`-th root would amplify.
pub const WEIGHT_BITS: u32 = 40;

/// Finite local model: each source draws `λ_j` from `m` weighted values,
/// every observer answers `a(x, λ_j)` and Bob answers `b(λ₁ … λₙ, y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledClassicalModel {
    config: NetworkConfig,
    lattice: usize,
    bob_settings: usize,
    /// `weights[j][λ]`.
    weights: Vec<Vec<f64>>,
    /// `responses[observer][λ]` holds the outcome for settings 0 and 1.
    responses: Vec<Vec<[u8; 2]>>,
    /// Indexed by `λ̄ · S + y` with `λ̄` mixed-radix, source 0 most significant.
    bob: Vec<u8>,
}

impl SampledClassicalModel {
    /// Draws random weights and deterministic responses, reproducibly from `seed`.
    pub fn sample(
        seed: u64,
        config: &NetworkConfig,
        lattice: usize,
        bob_settings: usize,
    ) -> Result<Self> {
        if !(1..=MAX_LATTICE).contains(&lattice) {
            return Err(Error::size(
                "hidden values per source",
                lattice,
                1,
                MAX_LATTICE,
            ));
        }
        if bob_settings == 0 {
            return Err(Error::contract("Bob needs at least one setting"));
        }
        let joint = lattice
            .checked_pow(config.n() as u32)
            .filter(|&v| v <= 1 << 16)
            .ok_or_else(|| Error::size("joint hidden values", usize::MAX, 1, 1 << 16))?;

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bits = (WEIGHT_BITS / config.n() as u32).max(1);
        let scale = (1u64 << bits) as f64;
        let weights = (0..config.n())
            .map(|_| {
                // sorted cut points on the dyadic grid split [0, 1] exactly
                let mut cuts: Vec<u64> = (1..lattice)
                    .map(|_| rng.gen_range(0..=1u64 << bits))
                    .collect();
                cuts.sort_unstable();
                cuts.push(1 << bits);
                let mut prev = 0;
                cuts.iter()
                    .map(|&c| {
                        let w = (c - prev) as f64 / scale;
                        prev = c;
                        w
                    })
                    .collect()
            })
            .collect();
        let responses = (0..config.total_observers())
            .map(|_| {
                (0..lattice)
                    .map(|_| [rng.gen_range(0..2u8), rng.gen_range(0..2u8)])
                    .collect()
            })
            .collect();
        let bob = (0..joint * bob_settings)
            .map(|_| rng.gen_range(0..2u8))
            .collect();
        Ok(SampledClassicalModel {
            config: config.clone(),
            lattice,
            bob_settings,
            weights,
            responses,
            bob,
        })
    }

    pub fn config(&self) -> &NetworkConfig {
        &self.config
    }

    pub fn weights(&self, j: usize) -> &[f64] {
        &self.weights[j]
    }

    pub fn is_deterministic(&self) -> bool {
        self.weights
            .iter()
            .all(|w| w.iter().filter(|&&p| p > 0.0).count() == 1)
    }

    /// The induced distribution `Σ_λ̄ Π_j q_j(λ_j) [a = a(x, λ)] [b = b(λ̄, y)]`.
    pub fn table(&self) -> Result<CorrelationTable> {
        let n_obs = self.config.total_observers();
        if n_obs > MAX_TABLE_OBSERVERS {
            return Err(Error::size(
                "table observers",
                n_obs,
                1,
                MAX_TABLE_OBSERVERS,
            ));
        }
        let n = self.config.n();
        let strings = 1usize << n_obs;
        let s = self.bob_settings;
        let mut values = vec![0.0; strings * s * strings * 2];
        let mut lambdas = vec![0usize; n];
        for joint in 0..self.lattice.pow(n as u32) {
            let mut rest = joint;
            for j in (0..n).rev() {
                lambdas[j] = rest % self.lattice;
                rest /= self.lattice;
            }
            let weight: f64 = (0..n).map(|j| self.weights[j][lambdas[j]]).product();
            if weight == 0.0 {
                continue;
            }
            for x in 0..strings {
                let mut a = 0usize;
                for j in 0..n {
                    for k in 0..self.config.branches()[j] {
                        let obs = self.config.observer_index(j, k);
                        let setting = (x >> (n_obs - 1 - obs)) & 1;
                        a = (a << 1) | self.responses[obs][lambdas[j]][setting] as usize;
                    }
                }
                for y in 0..s {
                    let b = self.bob[joint * s + y] as usize;
                    values[((x * s + y) * strings + a) * 2 + b] += weight;
                }
            }
        }
        CorrelationTable::new(self.config.clone(), s, values)
    }
}
