//! Correlator spectra `K_X` / `Q_X`, Bell values, bounds and thresholds.

pub mod combinatorics;
pub mod mapping;
pub mod reduction;
pub mod sweep;
pub mod visibility;

use rayon::prelude::*;
use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::format::round_sig;
use crate::network::{subsets_of, NetworkConfig, SubsetIndex};
use crate::quantum::{CorrelationTable, Scheme};

pub use combinatorics::{beta_coefficient, count_contributions, ContributionCount, Variant};
pub use mapping::BobSettingMap;
pub use reduction::{chsh_form, mermin_form, single_experiment_value, SingleExperimentCorrelators};
pub use sweep::{sweep_value, SweepPoint};
pub use visibility::{find_critical_visibility, Threshold};

/// Values `K_X` (or `Q_X`) for every subset `X ⊆ {1, …, L_max}`, indexed by mask.
#[derive(Debug, Clone, PartialEq)]
pub struct KSpectrum {
    config: NetworkConfig,
    entries: Vec<f64>,
    y_mapping: Option<BobSettingMap>,
}

impl KSpectrum {
    pub fn new(
        config: NetworkConfig,
        entries: Vec<f64>,
        y_mapping: Option<BobSettingMap>,
    ) -> Result<Self> {
        let expected = 1usize << config.l_max();
        if entries.len() != expected {
            return Err(Error::contract(format!(
                "spectrum for {config} needs {expected} entries, got {}",
                entries.len()
            )));
        }
        Ok(KSpectrum {
            config,
            entries,
            y_mapping,
        })
    }

    pub fn config(&self) -> &NetworkConfig {
        &self.config
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn get(&self, subset: SubsetIndex) -> f64 {
        self.entries[subset.mask() as usize]
    }

    pub fn y_mapping(&self) -> Option<&BobSettingMap> {
        self.y_mapping.as_ref()
    }

    /// Every entry multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> KSpectrum {
        KSpectrum {
            config: self.config.clone(),
            entries: self.entries.iter().map(|k| k * factor).collect(),
            y_mapping: self.y_mapping.clone(),
        }
    }

    pub fn bell_value(&self) -> f64 {
        bell_value(self)
    }

    pub fn max_abs_diff(&self, other: &KSpectrum) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

struct Entries<'a>(&'a [f64]);

impl Serialize for Entries<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (mask, v) in self.0.iter().enumerate() {
            map.serialize_entry(&mask.to_string(), &round_sig(*v))?;
        }
        map.end()
    }
}

impl Serialize for KSpectrum {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let value = self.bell_value();
        let bound = classical_bound(&self.config);
        let mut st = s.serialize_struct("KSpectrum", 5)?;
        st.serialize_field("config", &self.config)?;
        st.serialize_field("entries", &Entries(&self.entries))?;
        st.serialize_field("bell_value", &round_sig(value))?;
        st.serialize_field("classical_bound", &round_sig(bound))?;
        st.serialize_field("violated", &violates(value, bound))?;
        st.end()
    }
}

/// Slack granted to a Bell value before it counts as a violation.
pub const VIOLATION_TOLERANCE: f64 = 1e-9;

pub fn violates(value: f64, bound: f64) -> bool {
    value > bound + VIOLATION_TOLERANCE
}

/// `Q_X = 2^{-N} Σ_x̄ h(X) ⟨B_{y_X} R…R⟩` for every `X`; equals `K_X` on
/// homogeneous networks.
pub fn q_spectrum(table: &CorrelationTable, mapping: &BobSettingMap) -> Result<KSpectrum> {
    let config = table.config();
    if mapping.labels() != config.l_max() {
        return Err(Error::contract(format!(
            "setting map covers {} labels but the network has L = {}",
            mapping.labels(),
            config.l_max()
        )));
    }
    if mapping.required_settings() > table.bob_settings() {
        return Err(Error::contract(format!(
            "setting map uses Bob setting {} but the table has {}",
            mapping.required_settings() - 1,
            table.bob_settings()
        )));
    }
    let settings = table.bob_settings();
    let strings = table.strings();
    let correlators: Vec<f64> = (0..strings * settings as u64)
        .into_par_iter()
        .map(|i| table.correlator(i / settings as u64, (i % settings as u64) as usize))
        .collect();
    let label_masks: Vec<Vec<u32>> = (0..strings)
        .map(|x| {
            (0..config.n())
                .map(|j| config.source_label_mask(x, j))
                .collect()
        })
        .collect();

    let entries = subsets_of(config.l_max())?
        .into_iter()
        .map(|subset| {
            let y = mapping.setting(subset);
            let truncated: Vec<u32> = config
                .branches()
                .iter()
                .map(|&l| subset.truncate(l).mask())
                .collect();
            let sum: f64 = label_masks
                .iter()
                .enumerate()
                .map(|(x, masks)| {
                    let parity: u32 = masks
                        .iter()
                        .zip(&truncated)
                        .map(|(m, t)| (m & t).count_ones())
                        .sum();
                    let c = correlators[x * settings + y];
                    if parity.is_multiple_of(2) {
                        c
                    } else {
                        -c
                    }
                })
                .sum();
            sum / strings as f64
        })
        .collect();
    KSpectrum::new(config.clone(), entries, Some(mapping.clone()))
}

/// `K_X = 2^{-nL} Σ_x̄ g(X) ⟨B_{y_X} R…R⟩`; homogeneous networks only.
pub fn k_spectrum(table: &CorrelationTable, mapping: &BobSettingMap) -> Result<KSpectrum> {
    if !table.config().is_homogeneous() {
        return Err(Error::contract(
            "K_X is defined for homogeneous networks; use q_spectrum",
        ));
    }
    q_spectrum(table, mapping)
}

/// `Σ_X |K_X|^{1/n}` with the real non-negative root.
pub fn bell_value(spectrum: &KSpectrum) -> f64 {
    let n = spectrum.config.n() as f64;
    spectrum.entries.iter().map(|k| k.abs().powf(1.0 / n)).sum()
}

/// `2^L · 2^{-(1/n) Σ_j L_j}`, which is 1 for homogeneous networks.
pub fn classical_bound(config: &NetworkConfig) -> f64 {
    if config.is_homogeneous() {
        return 1.0;
    }
    let l = config.l_max() as f64;
    let mean = config.total_observers() as f64 / config.n() as f64;
    (l - mean).exp2()
}

/// Closed-form Bell value of the noiseless GHZ network under `scheme`.
///
/// Source `j` contributes `|K_X|`-factor `2^{-⌈L_j/2⌉}` under the XY scheme
/// and `2^{-L_j/2}` under the rotated scheme, so the value is
/// `2^L · 2^{-(1/n) Σ_j e_j}`. For homogeneous networks this is
/// `2^{⌊L/2⌋}` and `√(2^L)` respectively.
pub fn predicted_quantum_value(config: &NetworkConfig, scheme: Scheme) -> f64 {
    let exponent: f64 = config
        .branches()
        .iter()
        .map(|&l| match scheme {
            Scheme::Xy => l.div_ceil(2) as f64,
            Scheme::Rotated => l as f64 / 2.0,
        })
        .sum();
    (config.l_max() as f64 - exponent / config.n() as f64).exp2()
}

/// Total visibility `V = Π_j p_j` below which the noisy GHZ network stops
/// violating: `(bound / value)^n`. `None` when the noiseless value does not
/// exceed the bound.
pub fn critical_visibility(config: &NetworkConfig, scheme: Scheme) -> Option<f64> {
    let value = predicted_quantum_value(config, scheme);
    let bound = classical_bound(config);
    violates(value, bound).then(|| (bound / value).powi(config.n() as i32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::closed_form::joint_table;

    #[test]
    fn uniform_table_has_zero_spectrum() {
        let c = NetworkConfig::homogeneous(2, 2).unwrap();
        let t = CorrelationTable::uniform(c, 2).unwrap();
        let s = k_spectrum(&t, &BobSettingMap::convention(2).unwrap()).unwrap();
        assert!(s.entries().iter().all(|k| k.abs() < 1e-15));
        assert_eq!(bell_value(&s), 0.0);
    }

    #[test]
    fn xy_spectrum_is_flat() {
        let c = NetworkConfig::homogeneous(2, 2).unwrap();
        let s = k_spectrum(
            &joint_table(&c).unwrap(),
            &BobSettingMap::convention(2).unwrap(),
        )
        .unwrap();
        for k in s.entries() {
            assert!((k.abs() - 0.25).abs() < 1e-12);
        }
        assert!((bell_value(&s) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn missing_setting_rejected() {
        let c = NetworkConfig::homogeneous(1, 2).unwrap();
        let t = CorrelationTable::uniform(c, 2).unwrap();
        let m = BobSettingMap::per_subset(2).unwrap();
        assert!(matches!(k_spectrum(&t, &m), Err(Error::Contract(_))));
    }

    #[test]
    fn bounds() {
        assert_eq!(
            classical_bound(&NetworkConfig::homogeneous(3, 4).unwrap()),
            1.0
        );
        let het = NetworkConfig::new(vec![1, 2, 3]).unwrap();
        assert!((classical_bound(&het) - 2.0).abs() < 1e-15);
        assert!((predicted_quantum_value(&het, Scheme::Rotated) - 4.0).abs() < 1e-12);
        assert!((critical_visibility(&het, Scheme::Rotated).unwrap() - 0.125).abs() < 1e-12);
    }

    #[test]
    fn predicted_values() {
        let h = |n, l| NetworkConfig::homogeneous(n, l).unwrap();
        assert_eq!(predicted_quantum_value(&h(1, 1), Scheme::Xy), 1.0);
        assert_eq!(predicted_quantum_value(&h(2, 2), Scheme::Xy), 2.0);
        assert_eq!(predicted_quantum_value(&h(2, 3), Scheme::Xy), 2.0);
        assert!((predicted_quantum_value(&h(2, 3), Scheme::Rotated) - 8f64.sqrt()).abs() < 1e-12);
        assert_eq!(critical_visibility(&h(1, 1), Scheme::Xy), None);
        assert!((critical_visibility(&h(2, 2), Scheme::Xy).unwrap() - 0.25).abs() < 1e-15);
        assert!(
            (critical_visibility(&h(1, 1), Scheme::Rotated).unwrap() - 0.5f64.sqrt()).abs() < 1e-15
        );
    }

    #[test]
    fn json_layout() {
        let c = NetworkConfig::homogeneous(1, 1).unwrap();
        let s = KSpectrum::new(c, vec![0.5, -0.5], None).unwrap();
        let v: serde_json::Value = serde_json::to_value(&s).unwrap();
        assert_eq!(v["entries"]["1"], -0.5);
        assert_eq!(v["bell_value"], 1.0);
        assert_eq!(v["violated"], false);
        assert_eq!(v["config"]["branches"][0], 1);
    }
}
