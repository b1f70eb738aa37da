//! Network configurations 𝒩ₙ^{L₁…Lₙ}, subset labels for Bob's measurements
//! and the sign functions that enter the correlator sums.
//!
//! Encoding conventions used throughout the crate:
//!
//! * Non-Bob observers are numbered source-major, branch-minor: observer
//!   `(j, k)` (both zero-based here) has flat index `offset(j) + k`.
//! * Packed setting and outcome strings are integers where flat observer 0
//!   is the most significant bit. Lexicographic order of the bit strings is
//!   therefore numeric order of the packed integers.
//! * A [`SubsetIndex`] mask stores branch label `k` (one-based, as in
//!   `X ⊆ {1,…,L}`) at bit `k - 1`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest `L` accepted by [`subsets_of`].
pub const MAX_SUBSET_LABELS: usize = 20;

/// Largest total number of non-Bob observers representable in packed form.
pub const MAX_OBSERVERS: usize = 30;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawConfig", into = "RawConfig")]
pub struct NetworkConfig {
    branches: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct RawConfig {
    n: usize,
    branches: Vec<usize>,
}

impl TryFrom<RawConfig> for NetworkConfig {
    type Error = Error;

    fn try_from(raw: RawConfig) -> Result<Self> {
        if raw.n != raw.branches.len() {
            return Err(Error::contract(format!(
                "n = {} but {} branch sizes given",
                raw.n,
                raw.branches.len()
            )));
        }
        NetworkConfig::new(raw.branches)
    }
}

impl From<NetworkConfig> for RawConfig {
    fn from(c: NetworkConfig) -> Self {
        RawConfig {
            n: c.n(),
            branches: c.branches,
        }
    }
}

impl NetworkConfig {
    /// Network with one source per entry of `branches`; entry `j` is `L_j`.
    pub fn new(branches: Vec<usize>) -> Result<Self> {
        if branches.is_empty() {
            return Err(Error::Domain("a network needs at least one source".into()));
        }
        if let Some(j) = branches.iter().position(|&l| l == 0) {
            return Err(Error::Domain(format!(
                "source {} has no branch observers",
                j + 1
            )));
        }
        let total: usize = branches.iter().sum();
        if total > MAX_OBSERVERS {
            return Err(Error::size("total observers", total, 1, MAX_OBSERVERS));
        }
        Ok(NetworkConfig { branches })
    }

    /// The homogeneous network 𝒩ₙᴸ.
    pub fn homogeneous(n: usize, l: usize) -> Result<Self> {
        Self::new(vec![l; n])
    }

    pub fn n(&self) -> usize {
        self.branches.len()
    }

    pub fn branches(&self) -> &[usize] {
        &self.branches
    }

    pub fn l_max(&self) -> usize {
        *self
            .branches
            .iter()
            .max()
            .expect("nonempty by construction")
    }

    pub fn total_observers(&self) -> usize {
        self.branches.iter().sum()
    }

    pub fn is_homogeneous(&self) -> bool {
        self.branches.windows(2).all(|w| w[0] == w[1])
    }

    /// Flat index of the first observer of source `j`.
    pub fn offset(&self, j: usize) -> usize {
        self.branches[..j].iter().sum()
    }

    pub fn observer_index(&self, j: usize, k: usize) -> usize {
        debug_assert!(k < self.branches[j]);
        self.offset(j) + k
    }

    /// Bits of source `j` extracted from a packed string, in the source's own
    /// packed order (its first branch observer is the most significant bit).
    pub fn source_bits(&self, packed: u64, j: usize) -> u64 {
        let total = self.total_observers();
        let shift = total - self.offset(j) - self.branches[j];
        (packed >> shift) & ((1u64 << self.branches[j]) - 1)
    }

    /// Source `j`'s bits of a packed string as a subset-style mask:
    /// bit `k - 1` holds the value for branch label `k`.
    pub fn source_label_mask(&self, packed: u64, j: usize) -> u32 {
        let l = self.branches[j];
        let bits = self.source_bits(packed, j);
        let mut mask = 0u32;
        for k in 0..l {
            if (bits >> (l - 1 - k)) & 1 == 1 {
                mask |= 1 << k;
            }
        }
        mask
    }

    /// Parity of `Σ_j Σ_{k ∈ X_j} x_j^k` with `X_j = {s ∈ X | s ≤ L_j}`.
    pub fn subset_parity(&self, subset: SubsetIndex, packed_settings: u64) -> u32 {
        (0..self.n())
            .map(|j| {
                let truncated = subset.truncate(self.branches[j]).mask;
                (truncated & self.source_label_mask(packed_settings, j)).count_ones()
            })
            .sum::<u32>()
            & 1
    }

    /// Distinct branch sizes in ascending order (`r_1 < … < r_l`).
    pub fn distinct_sizes(&self) -> Vec<usize> {
        let mut sizes = self.branches.clone();
        sizes.sort_unstable();
        sizes.dedup();
        sizes
    }

    /// Position of `L_j` within [`Self::distinct_sizes`].
    pub fn size_class(&self, j: usize) -> usize {
        self.distinct_sizes()
            .binary_search(&self.branches[j])
            .expect("branch size is present")
    }

    /// Network consisting of source `j` alone.
    pub fn single_source(&self, j: usize) -> NetworkConfig {
        NetworkConfig {
            branches: vec![self.branches[j]],
        }
    }
}

impl fmt::Display for NetworkConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_homogeneous() {
            write!(f, "N_{}^{}", self.n(), self.branches[0])
        } else {
            let list: Vec<String> = self.branches.iter().map(|l| l.to_string()).collect();
            write!(f, "N_{}^{{{}}}", self.n(), list.join(","))
        }
    }
}

/// A subset `X ⊆ {1,…,L}` labelling one correlator `K_X`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SubsetIndex {
    mask: u32,
}

impl SubsetIndex {
    pub const EMPTY: SubsetIndex = SubsetIndex { mask: 0 };

    pub fn from_mask(mask: u32) -> Self {
        SubsetIndex { mask }
    }

    /// Builds a subset from one-based labels.
    pub fn from_labels(labels: &[usize]) -> Result<Self> {
        let mut mask = 0u32;
        for &k in labels {
            if k == 0 || k > MAX_SUBSET_LABELS {
                return Err(Error::Domain(format!("subset label {k} out of range")));
            }
            mask |= 1 << (k - 1);
        }
        Ok(SubsetIndex { mask })
    }

    pub fn mask(self) -> u32 {
        self.mask
    }

    pub fn cardinality(self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn contains(self, label: usize) -> bool {
        label >= 1 && (self.mask >> (label - 1)) & 1 == 1
    }

    /// One-based labels in ascending order.
    pub fn labels(self) -> Vec<usize> {
        (1..=32).filter(|&k| self.contains(k)).collect()
    }

    /// `{s ∈ X | s ≤ len}`.
    pub fn truncate(self, len: usize) -> SubsetIndex {
        if len >= 32 {
            self
        } else {
            SubsetIndex {
                mask: self.mask & ((1u32 << len) - 1),
            }
        }
    }

    /// Compact name used in CSV headers: `empty`, `1`, `12`, `1_10` …
    pub fn column_name(self) -> String {
        let labels = self.labels();
        if labels.is_empty() {
            "empty".to_string()
        } else if labels.iter().all(|&k| k < 10) {
            labels.iter().map(|k| k.to_string()).collect()
        } else {
            labels
                .iter()
                .map(|k| k.to_string())
                .collect::<Vec<_>>()
                .join("_")
        }
    }
}

impl fmt::Display for SubsetIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.mask == 0 {
            return write!(f, "∅");
        }
        let labels: Vec<String> = self.labels().iter().map(|k| k.to_string()).collect();
        write!(f, "{{{}}}", labels.join(","))
    }
}

/// All `2^L` subsets of `{1,…,L}` in ascending mask order.
pub fn subsets_of(l: usize) -> Result<Vec<SubsetIndex>> {
    if !(1..=MAX_SUBSET_LABELS).contains(&l) {
        return Err(Error::size("L", l, 1, MAX_SUBSET_LABELS));
    }
    Ok((0..1u32 << l).map(SubsetIndex::from_mask).collect())
}

/// Measurement choices of every non-Bob observer together with Bob's setting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SettingAssignment {
    x: Vec<u8>,
    y: usize,
}

impl SettingAssignment {
    pub fn new(config: &NetworkConfig, x: Vec<u8>, y: usize) -> Result<Self> {
        if x.len() != config.total_observers() {
            return Err(Error::contract(format!(
                "expected {} observer settings, got {}",
                config.total_observers(),
                x.len()
            )));
        }
        if x.iter().any(|&b| b > 1) {
            return Err(Error::Domain("observer settings must be 0 or 1".into()));
        }
        Ok(SettingAssignment { x, y })
    }

    pub fn from_packed(config: &NetworkConfig, packed: u64, y: usize) -> Self {
        let total = config.total_observers();
        let x = (0..total)
            .map(|i| ((packed >> (total - 1 - i)) & 1) as u8)
            .collect();
        SettingAssignment { x, y }
    }

    pub fn packed(&self) -> u64 {
        self.x.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64)
    }

    /// `x_j^k` with zero-based `j` and one-based branch label `k`.
    pub fn setting(&self, config: &NetworkConfig, j: usize, k: usize) -> u8 {
        self.x[config.observer_index(j, k - 1)]
    }

    pub fn bits(&self) -> &[u8] {
        &self.x
    }

    pub fn y(&self) -> usize {
        self.y
    }
}

fn sign_of_exponent(e: usize) -> i8 {
    if e.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// `g(X) = Π_j (-1)^{Σ_{k∈X} x_j^k}`, defined for homogeneous networks.
pub fn g_factor(subset: SubsetIndex, x: &SettingAssignment, config: &NetworkConfig) -> Result<i8> {
    if !config.is_homogeneous() {
        return Err(Error::contract(
            "g(X) is defined for homogeneous networks; use h_factor",
        ));
    }
    let l = config.l_max();
    if subset.mask >= 1 << l {
        return Err(Error::contract(format!("subset {subset} exceeds L = {l}")));
    }
    let mut exponent = 0usize;
    for j in 0..config.n() {
        for k in subset.labels() {
            exponent += x.setting(config, j, k) as usize;
        }
    }
    Ok(sign_of_exponent(exponent))
}

/// `h(X) = Π_j (-1)^{Σ_{k∈X_j} x_j^k}` with `X_j` the truncation of `X` to `L_j`.
pub fn h_factor(subset: SubsetIndex, x: &SettingAssignment, config: &NetworkConfig) -> i8 {
    let mut exponent = 0usize;
    for (j, &lj) in config.branches().iter().enumerate() {
        for k in subset.truncate(lj).labels() {
            exponent += x.setting(config, j, k) as usize;
        }
    }
    sign_of_exponent(exponent)
}

/// `R(L) = 1` iff `L ≡ 0 (mod 4)`.
pub fn r_parity(l: usize) -> usize {
    usize::from(l.is_multiple_of(4))
}

/// Bob's setting for `K_X` under the convention `y_X = ½(1 + (-1)^{|X| + R(L)})`.
pub fn y_convention(subset: SubsetIndex, l: usize) -> u8 {
    if (subset.cardinality() + r_parity(l)).is_multiple_of(2) {
        1
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assignment(config: &NetworkConfig, bits: &[u8]) -> SettingAssignment {
        SettingAssignment::new(config, bits.to_vec(), 0).unwrap()
    }

    #[test]
    fn subsets_in_mask_order() {
        let one = subsets_of(1).unwrap();
        assert_eq!(one, vec![SubsetIndex::EMPTY, SubsetIndex::from_mask(1)]);
        let two: Vec<Vec<usize>> = subsets_of(2).unwrap().iter().map(|s| s.labels()).collect();
        assert_eq!(two, vec![vec![], vec![1], vec![2], vec![1, 2]]);
        assert_eq!(subsets_of(3).unwrap().len(), 8);
    }

    #[test]
    fn subset_guard() {
        assert!(matches!(subsets_of(0), Err(Error::Size { .. })));
        assert!(matches!(subsets_of(21), Err(Error::Size { .. })));
        assert_eq!(subsets_of(20).unwrap().len(), 1 << 20);
    }

    #[test]
    fn subsets_cover_every_mask() {
        for l in 1..=12 {
            let subsets = subsets_of(l).unwrap();
            let mut seen = vec![false; 1 << l];
            for s in &subsets {
                assert!(!seen[s.mask() as usize]);
                seen[s.mask() as usize] = true;
            }
            assert!(seen.into_iter().all(|b| b));
        }
    }

    #[test]
    fn g_factor_examples() {
        let c1 = NetworkConfig::homogeneous(1, 1).unwrap();
        let c22 = NetworkConfig::homogeneous(2, 2).unwrap();
        let any = assignment(&c22, &[1, 0, 1, 1]);
        assert_eq!(g_factor(SubsetIndex::EMPTY, &any, &c22).unwrap(), 1);
        let x = assignment(&c1, &[1]);
        assert_eq!(g_factor(SubsetIndex::from_mask(1), &x, &c1).unwrap(), -1);
        let ones = assignment(&c22, &[1, 1, 1, 1]);
        let both = SubsetIndex::from_labels(&[1, 2]).unwrap();
        assert_eq!(g_factor(both, &ones, &c22).unwrap(), 1);
    }

    #[test]
    fn g_factor_rejects_heterogeneous() {
        let c = NetworkConfig::new(vec![1, 2]).unwrap();
        let x = assignment(&c, &[0, 0, 0]);
        assert!(matches!(
            g_factor(SubsetIndex::EMPTY, &x, &c),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn h_factor_truncates_per_source() {
        let c = NetworkConfig::new(vec![1, 2]).unwrap();
        let ones = assignment(&c, &[1, 1, 1]);
        assert_eq!(h_factor(SubsetIndex::EMPTY, &ones, &c), 1);
        // label 2 exists only for the second source
        let two = SubsetIndex::from_labels(&[2]).unwrap();
        assert_eq!(h_factor(two, &ones, &c), -1);
    }

    #[test]
    fn y_convention_examples() {
        assert_eq!(y_convention(SubsetIndex::EMPTY, 2), 1);
        assert_eq!(y_convention(SubsetIndex::EMPTY, 4), 0);
        assert_eq!(y_convention(SubsetIndex::from_mask(1), 2), 0);
        assert_eq!(y_convention(SubsetIndex::from_mask(2), 2), 0);
        assert_eq!(y_convention(SubsetIndex::from_mask(3), 4), 0);
    }

    #[test]
    fn packed_round_trip_and_parity() {
        let c = NetworkConfig::new(vec![2, 3]).unwrap();
        for packed in 0..32u64 {
            let s = SettingAssignment::from_packed(&c, packed, 0);
            assert_eq!(s.packed(), packed);
            for mask in 0..8u32 {
                let subset = SubsetIndex::from_mask(mask);
                let sign = h_factor(subset, &s, &c);
                let parity = c.subset_parity(subset, packed);
                assert_eq!(sign, if parity == 0 { 1 } else { -1 });
            }
        }
    }

    #[test]
    fn config_json_shape() {
        let c = NetworkConfig::new(vec![1, 2, 3]).unwrap();
        let json = serde_json::to_string(&c).unwrap();
        assert_eq!(json, r#"{"n":3,"branches":[1,2,3]}"#);
        let back: NetworkConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, c);
        assert!(serde_json::from_str::<NetworkConfig>(r#"{"n":2,"branches":[1]}"#).is_err());
        assert!(serde_json::from_str::<NetworkConfig>(r#"{"n":1,"branches":[0]}"#).is_err());
    }

    #[test]
    fn size_classes() {
        let c = NetworkConfig::new(vec![3, 1, 3, 2]).unwrap();
        assert_eq!(c.distinct_sizes(), vec![1, 2, 3]);
        assert_eq!(
            (0..4).map(|j| c.size_class(j)).collect::<Vec<_>>(),
            vec![2, 0, 2, 1]
        );
        assert!(!c.is_homogeneous());
        assert_eq!(c.l_max(), 3);
        assert!(NetworkConfig::homogeneous(3, 2).unwrap().is_homogeneous());
    }
}
