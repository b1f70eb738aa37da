//! The network inequality evaluated with an entangling measurement at the
//! centre: each `K_X` correlates the branch outcomes with a bit `b̂_X`
//! derived from Bob's `n` output bits.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inequality::KSpectrum;
use crate::network::{subsets_of, NetworkConfig, SubsetIndex};
use crate::quantum::{swap_joint_table, BobScheme, MeasurementScheme, Scheme, SwapTable};

/// A bit computed from Bob's outputs `b¹ … bⁿ`; indices are 0-based, so
/// `{"bit": 0}` is `b¹`. An empty parity is the constant 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BitFunction {
    Bit(usize),
    Parity(Vec<usize>),
}

impl BitFunction {
    fn indices(&self) -> &[usize] {
        match self {
            BitFunction::Bit(i) => std::slice::from_ref(i),
            BitFunction::Parity(v) => v,
        }
    }

    /// Evaluates on the packed outcome (`b¹` most significant of `n` bits).
    pub fn eval(&self, n: usize, outcome: usize) -> u8 {
        self.indices()
            .iter()
            .map(|&i| ((outcome >> (n - 1 - i)) & 1) as u8)
            .fold(0, |acc, b| acc ^ b)
    }
}

/// `b̂_X` for every `X ⊆ {1, …, L}`, indexed by mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwapConditioning {
    labels: usize,
    bits: usize,
    functions: Vec<BitFunction>,
}

impl SwapConditioning {
    pub fn new(labels: usize, bits: usize, functions: Vec<BitFunction>) -> Result<Self> {
        if functions.len() != 1 << labels {
            return Err(Error::contract(format!(
                "conditioning over {labels} labels needs {} entries, got {}",
                1usize << labels,
                functions.len()
            )));
        }
        for (mask, f) in functions.iter().enumerate() {
            if let Some(i) = f.indices().iter().find(|&&i| i >= bits) {
                return Err(Error::contract(format!(
                    "subset {}: bit {i} out of range for {bits} outcome bits",
                    SubsetIndex::from_mask(mask as u32)
                )));
            }
        }
        Ok(SwapConditioning {
            labels,
            bits,
            functions,
        })
    }

    fn from_fn(config: &NetworkConfig, f: impl Fn(SubsetIndex) -> BitFunction) -> Result<Self> {
        let functions = subsets_of(config.l_max())?.into_iter().map(f).collect();
        Self::new(config.l_max(), config.n(), functions)
    }

    /// Even `|X|` read `b¹`; odd `|X|` read the parity of all of Bob's bits.
    pub fn default_for(config: &NetworkConfig) -> Result<Self> {
        let all: Vec<usize> = (0..config.n()).collect();
        Self::from_fn(config, |x| {
            if x.cardinality() % 2 == 0 {
                BitFunction::Bit(0)
            } else {
                BitFunction::Parity(all.clone())
            }
        })
    }

    /// Even `|X|` read `b¹`; odd `|X|` read `b²`. Needs `n ≥ 2`.
    pub fn first_second(config: &NetworkConfig) -> Result<Self> {
        if config.n() < 2 {
            return Err(Error::contract("reading b² needs at least two sources"));
        }
        Self::from_fn(config, |x| BitFunction::Bit(x.cardinality() % 2))
    }

    /// Every `X` reads the constant bit 0.
    pub fn constant(config: &NetworkConfig) -> Result<Self> {
        Self::from_fn(config, |_| BitFunction::Parity(Vec::new()))
    }

    /// Parses `{"mask": {"bit": i} | {"parity": [i, …]}, …}` with decimal mask
    /// keys; every mask below `2^L` must be present.
    pub fn from_json(text: &str, config: &NetworkConfig) -> Result<Self> {
        let raw: BTreeMap<String, BitFunction> = serde_json::from_str(text)
            .map_err(|e| Error::Parse(format!("conditioning JSON: {e}")))?;
        let size = 1usize << config.l_max();
        let mut functions: Vec<Option<BitFunction>> = vec![None; size];
        for (key, f) in raw {
            let mask: usize = key.parse().map_err(|_| {
                Error::Parse(format!("conditioning key \"{key}\": not a subset mask"))
            })?;
            if mask >= size {
                return Err(Error::Parse(format!(
                    "conditioning key \"{key}\": mask exceeds L = {}",
                    config.l_max()
                )));
            }
            if let Some(i) = f.indices().iter().find(|&&i| i >= config.n()) {
                return Err(Error::Parse(format!(
                    "conditioning key \"{key}\": bit {i} out of range for {} outcome bits",
                    config.n()
                )));
            }
            functions[mask] = Some(f);
        }
        let functions = functions
            .into_iter()
            .enumerate()
            .map(|(mask, f)| {
                f.ok_or_else(|| Error::Parse(format!("conditioning key \"{mask}\" is missing")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(config.l_max(), config.n(), functions)
    }

    pub fn to_json(&self) -> Result<String> {
        let map: BTreeMap<usize, &BitFunction> = self.functions.iter().enumerate().collect();
        Ok(serde_json::to_string(&map)?)
    }

    pub fn function(&self, subset: SubsetIndex) -> &BitFunction {
        &self.functions[subset.mask() as usize]
    }
}

/// `K_X = 2^{-N} Σ_x̄ h(X) Σ_{ā, b̄} (−1)^{Σa + b̂_X(b̄)} P(ā, b̄ | x̄)`.
pub fn spectrum_from_swap_table(
    table: &SwapTable,
    conditioning: &SwapConditioning,
) -> Result<KSpectrum> {
    let config = table.config();
    if conditioning.labels != config.l_max() || conditioning.bits != config.n() {
        return Err(Error::contract("conditioning does not match the network"));
    }
    let n = config.n();
    let strings = table.strings();
    let outcomes = table.bob_outcomes();
    let entries = subsets_of(config.l_max())?
        .into_iter()
        .map(|subset| {
            let f = conditioning.function(subset);
            let signs: Vec<f64> = (0..outcomes)
                .map(|b| if f.eval(n, b) == 0 { 1.0 } else { -1.0 })
                .collect();
            let total: f64 = (0..strings)
                .map(|x| {
                    let corr: f64 = (0..strings)
                        .map(|a| {
                            let sa = if a.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                            (0..outcomes)
                                .map(|b| sa * signs[b] * table.get(x, a, b))
                                .sum::<f64>()
                        })
                        .sum();
                    if config.subset_parity(subset, x) == 0 {
                        corr
                    } else {
                        -corr
                    }
                })
                .sum();
            total / strings as f64
        })
        .collect();
    KSpectrum::new(config.clone(), entries, None)
}

/// Simulates the swap network with every branch observer using `scheme` and
/// evaluates the conditioned spectrum.
pub fn swap_spectrum(
    config: &NetworkConfig,
    scheme: Scheme,
    conditioning: &SwapConditioning,
) -> Result<KSpectrum> {
    let measurements = MeasurementScheme::uniform(config, scheme.angles(), BobScheme::GhzBasisSwap);
    spectrum_from_swap_table(&swap_joint_table(config, &measurements)?, conditioning)
}
