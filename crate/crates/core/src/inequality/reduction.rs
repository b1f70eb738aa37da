//! The single-source inequality `Σ_X |2^{-L} Σ_x̄ (−1)^{Σ_{k∈X} x^k} ⟨B_{y_X} R…R⟩| ≤ 1`
//! and its CHSH (`L = 1`) and Mermin (`L = 2`) forms.

use super::mapping::BobSettingMap;
use crate::error::{Error, Result};
use crate::network::subsets_of;
use crate::quantum::CorrelationTable;

/// Correlators `⟨B_y R¹_{x¹} … R^L_{x^L}⟩` indexed by `(x, y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleExperimentCorrelators {
    l: usize,
    bob_settings: usize,
    values: Vec<f64>,
}

impl SingleExperimentCorrelators {
    pub fn from_fn(l: usize, bob_settings: usize, f: impl Fn(u64, usize) -> f64) -> Result<Self> {
        if !(1..=20).contains(&l) {
            return Err(Error::size("branch size", l, 1, 20));
        }
        let values = (0..1u64 << l)
            .flat_map(|x| (0..bob_settings).map(move |y| (x, y)))
            .map(|(x, y)| f(x, y))
            .collect();
        Ok(SingleExperimentCorrelators {
            l,
            bob_settings,
            values,
        })
    }

    pub fn from_table(table: &CorrelationTable) -> Result<Self> {
        if table.config().n() != 1 {
            return Err(Error::contract(
                "single-experiment correlators need one source",
            ));
        }
        Self::from_fn(table.config().l_max(), table.bob_settings(), |x, y| {
            table.correlator(x, y)
        })
    }

    pub fn l(&self) -> usize {
        self.l
    }

    /// `x` is the packed setting string, first observer most significant.
    pub fn get(&self, x: u64, y: usize) -> f64 {
        self.values[x as usize * self.bob_settings + y]
    }
}

/// Signed terms `2^{-L} Σ_x̄ (−1)^{Σ_{k∈X} x^k} ⟨B_{y_X} R…R⟩`, indexed by mask.
pub fn single_experiment_terms(
    corr: &SingleExperimentCorrelators,
    mapping: &BobSettingMap,
) -> Result<Vec<f64>> {
    if mapping.labels() != corr.l {
        return Err(Error::contract("setting map and correlators disagree on L"));
    }
    if mapping.required_settings() > corr.bob_settings {
        return Err(Error::contract(format!(
            "correlators for Bob setting {} are missing",
            mapping.required_settings() - 1
        )));
    }
    let l = corr.l;
    let strings = 1u64 << l;
    Ok(subsets_of(l)?
        .into_iter()
        .map(|subset| {
            let y = mapping.setting(subset);
            let sum: f64 = (0..strings)
                .map(|x| {
                    // packed bit for label k sits at position L − k
                    let parity = subset
                        .labels()
                        .iter()
                        .filter(|&&k| (x >> (l - k)) & 1 == 1)
                        .count();
                    if parity % 2 == 0 {
                        corr.get(x, y)
                    } else {
                        -corr.get(x, y)
                    }
                })
                .sum();
            sum / strings as f64
        })
        .collect())
}

pub fn single_experiment_value(
    corr: &SingleExperimentCorrelators,
    mapping: &BobSettingMap,
) -> Result<f64> {
    Ok(single_experiment_terms(corr, mapping)?
        .iter()
        .map(|t| t.abs())
        .sum())
}

/// `y_∅ = 0`, `y_{1} = 1`.
pub fn chsh_mapping() -> BobSettingMap {
    BobSettingMap::new(1, vec![0, 1]).expect("valid map")
}

/// `y_∅ = y_{1,2} = 0`, `y_{1} = y_{2} = 1`.
pub fn mermin_mapping() -> BobSettingMap {
    BobSettingMap::new(2, vec![0, 1, 1, 0]).expect("valid map")
}

/// `½|⟨B₀R₀⟩ + ⟨B₀R₁⟩| + ½|⟨B₁R₀⟩ − ⟨B₁R₁⟩|`, which equals the `L = 1`
/// single-experiment value under [`chsh_mapping`].
pub fn chsh_form(corr: &SingleExperimentCorrelators) -> Result<f64> {
    if corr.l != 1 || corr.bob_settings < 2 {
        return Err(Error::contract(
            "the CHSH form needs L = 1 and two Bob settings",
        ));
    }
    let e = |x, y| corr.get(x, y);
    Ok(0.5 * (e(0, 0) + e(1, 0)).abs() + 0.5 * (e(0, 1) - e(1, 1)).abs())
}

/// `½(⟨B₁R₀R₀⟩ + ⟨B₀R₀R₁⟩ + ⟨B₀R₁R₀⟩ − ⟨B₁R₁R₁⟩)`, which equals
/// `K_∅ + K_{1} + K_{2} − K_{1,2}` under [`mermin_mapping`].
pub fn mermin_form(corr: &SingleExperimentCorrelators) -> Result<f64> {
    if corr.l != 2 || corr.bob_settings < 2 {
        return Err(Error::contract(
            "the Mermin form needs L = 2 and two Bob settings",
        ));
    }
    let e = |x, y| corr.get(x, y);
    Ok(0.5 * (e(0b00, 1) + e(0b01, 0) + e(0b10, 0) - e(0b11, 1)))
}
