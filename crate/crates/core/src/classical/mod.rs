//! Local models with one independent hidden variable per source: the
//! saturating family `D(p)`, random finite models, exhaustive search for a
//! single source, and slices of the classical `K`-space region.

pub mod enumerate;
pub mod region;
pub mod sample;

use crate::error::{Error, Result};
use crate::inequality::KSpectrum;
use crate::network::{subsets_of, NetworkConfig};
use crate::quantum::CorrelationTable;

pub use enumerate::{enumerate_deterministic_max, DeterministicStrategy};
pub use region::{region_slice, write_region_csv, RegionPoint};
pub use sample::SampledClassicalModel;

/// Observers answer `a_j^k = λ_j ⊕ α_j^k x_j^k` with a uniform bit `λ_j` and
/// `P(α_j^k = 0) = p_j^k`. Bob outputs `⊕_j λ_j` for odd `L` and `0` for even `L`.
#[derive(Debug, Clone, PartialEq)]
pub struct DFamily {
    config: NetworkConfig,
    keep: Vec<f64>,
}

impl DFamily {
    /// `keep` holds `p_j^k` in observer order (source-major).
    pub fn new(config: &NetworkConfig, keep: Vec<f64>) -> Result<Self> {
        if !config.is_homogeneous() {
            return Err(Error::contract(
                "the D family is defined for homogeneous networks",
            ));
        }
        if keep.len() != config.total_observers() {
            return Err(Error::contract(format!(
                "{} probabilities for {} observers",
                keep.len(),
                config.total_observers()
            )));
        }
        if let Some(p) = keep.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::Domain(format!("probability {p} outside [0, 1]")));
        }
        Ok(DFamily {
            config: config.clone(),
            keep,
        })
    }

    /// The same `p^k` at branch position `k` for every source.
    pub fn source_symmetric(config: &NetworkConfig, per_position: &[f64]) -> Result<Self> {
        let keep = (0..config.n())
            .flat_map(|_| per_position.iter().copied())
            .collect();
        Self::new(config, keep)
    }

    pub fn config(&self) -> &NetworkConfig {
        &self.config
    }

    pub fn keep_probability(&self, j: usize, k: usize) -> f64 {
        self.keep[self.config.observer_index(j, k)]
    }

    /// `K_X = Π_j Π_{k∈X} (1 − p_j^k) Π_{k∉X} p_j^k`.
    pub fn spectrum(&self) -> Result<KSpectrum> {
        let l = self.config.l_max();
        let entries = subsets_of(l)?
            .into_iter()
            .map(|x| {
                (0..self.config.n())
                    .flat_map(|j| (0..l).map(move |k| (j, k)))
                    .map(|(j, k)| {
                        let p = self.keep_probability(j, k);
                        if x.contains(k + 1) {
                            1.0 - p
                        } else {
                            p
                        }
                    })
                    .product()
            })
            .collect();
        KSpectrum::new(self.config.clone(), entries, None)
    }

    /// The exact distribution, averaged over every `λ̄` and `α`. Bob's setting
    /// is ignored, so the table carries two identical settings.
    pub fn table(&self) -> Result<CorrelationTable> {
        let config = &self.config;
        let n = config.n();
        let l = config.l_max();
        let odd = l % 2 == 1;
        // P(a_j | x_j, λ_j) for every source, λ and packed local strings
        let local: Vec<[Vec<f64>; 2]> = (0..n)
            .map(|j| {
                let per_lambda = |lambda: u64| -> Vec<f64> {
                    let mut out = vec![0.0; 1 << (2 * l)];
                    for x in 0..1u64 << l {
                        for a in 0..1u64 << l {
                            out[((x << l) | a) as usize] = (0..l)
                                .map(|k| {
                                    let shift = l - 1 - k;
                                    let xk = (x >> shift) & 1;
                                    let ak = (a >> shift) & 1;
                                    let p = self.keep_probability(j, k);
                                    match (xk, ak == lambda) {
                                        (0, true) => 1.0,
                                        (0, false) => 0.0,
                                        (_, true) => p,
                                        (_, false) => 1.0 - p,
                                    }
                                })
                                .product();
                        }
                    }
                    out
                };
                [per_lambda(0), per_lambda(1)]
            })
            .collect();

        let weight = 1.0 / (1u64 << n) as f64;
        CorrelationTable::from_fn(config.clone(), 2, |x, _y, a, b| {
            let mut total = 0.0;
            for lambdas in 0..1u64 << n {
                let bob = if odd {
                    (lambdas.count_ones() % 2) as u8
                } else {
                    0
                };
                if bob != b {
                    continue;
                }
                let mut p = weight;
                for (j, tables) in local.iter().enumerate() {
                    let lambda = ((lambdas >> (n - 1 - j)) & 1) as usize;
                    let xj = config.source_bits(x, j);
                    let aj = config.source_bits(a, j);
                    p *= tables[lambda][((xj << l) | aj) as usize];
                    if p == 0.0 {
                        break;
                    }
                }
                total += p;
            }
            total
        })
    }
}

/// Both sides of `Σ_l (Π_s c_s^l)^{1/n} ≤ Π_s (Σ_l c_s^l)^{1/n}` for a
/// non-negative `m × n` matrix given as rows `c[l][s]`.
pub fn amgm_sides(rows: &[Vec<f64>]) -> Result<(f64, f64)> {
    let n = rows.first().map_or(0, Vec::len);
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Error::contract(
            "rows must be non-empty and of equal length",
        ));
    }
    if rows.iter().flatten().any(|c| c.is_nan() || *c < 0.0) {
        return Err(Error::Domain("entries must be non-negative".into()));
    }
    let root = 1.0 / n as f64;
    let lhs = rows
        .iter()
        .map(|r| r.iter().product::<f64>().powf(root))
        .sum();
    let rhs = (0..n)
        .map(|s| rows.iter().map(|r| r[s]).sum::<f64>().powf(root))
        .product();
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inequality::{bell_value, k_spectrum, BobSettingMap};

    #[test]
    fn spectrum_examples() {
        let c = NetworkConfig::homogeneous(2, 2).unwrap();
        let d = DFamily::source_symmetric(&c, &[1.0, 1.0]).unwrap();
        assert_eq!(d.spectrum().unwrap().entries(), &[1.0, 0.0, 0.0, 0.0]);

        let c = NetworkConfig::homogeneous(1, 1).unwrap();
        let s = DFamily::new(&c, vec![0.3]).unwrap().spectrum().unwrap();
        assert!((s.entries()[0] - 0.3).abs() < 1e-15);
        assert!((s.entries()[1] - 0.7).abs() < 1e-15);
    }

    #[test]
    fn half_gives_flat_spectrum() {
        let c = NetworkConfig::homogeneous(2, 2).unwrap();
        let d = DFamily::source_symmetric(&c, &[0.5, 0.5]).unwrap();
        for k in d.spectrum().unwrap().entries() {
            assert!((k - 1.0 / 16.0).abs() < 1e-15);
        }
    }

    #[test]
    fn table_reproduces_spectrum() {
        for (n, l) in [(2, 2), (1, 3), (2, 1)] {
            let c = NetworkConfig::homogeneous(n, l).unwrap();
            let keep: Vec<f64> = (0..c.total_observers())
                .map(|i| 0.15 + 0.1 * i as f64)
                .collect();
            let d = DFamily::new(&c, keep).unwrap();
            let t = d.table().unwrap();
            assert!(t.normalization_defect() < 1e-12);
            let from_table = k_spectrum(&t, &BobSettingMap::convention(l).unwrap()).unwrap();
            assert!(
                from_table.max_abs_diff(&d.spectrum().unwrap()) < 1e-12,
                "({n}, {l})"
            );
        }
    }

    #[test]
    fn symmetric_family_saturates() {
        let c = NetworkConfig::homogeneous(3, 2).unwrap();
        let d = DFamily::source_symmetric(&c, &[0.2, 0.9]).unwrap();
        assert!((bell_value(&d.spectrum().unwrap()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn domain_checked() {
        let c = NetworkConfig::homogeneous(1, 1).unwrap();
        assert!(matches!(DFamily::new(&c, vec![1.5]), Err(Error::Domain(_))));
    }

    #[test]
    fn amgm_example() {
        let (lhs, rhs) = amgm_sides(&[vec![1.0, 4.0], vec![4.0, 1.0]]).unwrap();
        assert!((lhs - 4.0).abs() < 1e-12);
        assert!((rhs - 5.0).abs() < 1e-12);
    }
}
