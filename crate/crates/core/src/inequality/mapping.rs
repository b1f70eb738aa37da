use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{subsets_of, y_convention, NetworkConfig, SubsetIndex, MAX_SUBSET_LABELS};
use crate::quantum::Scheme;

/// Which of Bob's settings enters the correlator of each `K_X`.
///
/// Indexed by subset mask over `{1, …, L}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BobSettingMap {
    labels: usize,
    settings: Vec<usize>,
}

impl BobSettingMap {
    pub fn new(labels: usize, settings: Vec<usize>) -> Result<Self> {
        if !(1..=MAX_SUBSET_LABELS).contains(&labels) {
            return Err(Error::size("subset labels", labels, 1, MAX_SUBSET_LABELS));
        }
        if settings.len() != 1 << labels {
            return Err(Error::contract(format!(
                "a setting map over {labels} labels needs {} entries, got {}",
                1usize << labels,
                settings.len()
            )));
        }
        Ok(BobSettingMap { labels, settings })
    }

    fn from_fn(labels: usize, f: impl Fn(SubsetIndex) -> usize) -> Result<Self> {
        let settings = subsets_of(labels)?.into_iter().map(f).collect();
        Self::new(labels, settings)
    }

    /// `y_X = ½(1 + (−1)^{|X| + R(L)})`.
    pub fn convention(l: usize) -> Result<Self> {
        Self::from_fn(l, |x| y_convention(x, l) as usize)
    }

    /// `y_X = |X| mod 2`.
    pub fn parity(l: usize) -> Result<Self> {
        Self::from_fn(l, |x| x.cardinality() % 2)
    }

    /// One Bob setting per subset, `y_X = mask(X)`.
    pub fn per_subset(l: usize) -> Result<Self> {
        Self::from_fn(l, |x| x.mask() as usize)
    }

    /// The map under which `scheme` reaches its predicted value.
    ///
    /// For heterogeneous networks Bob has one bit per distinct branch size and
    /// bit `c` is chosen from `X` truncated to that size.
    pub fn for_scheme(config: &NetworkConfig, scheme: Scheme) -> Result<Self> {
        let per_class = |x: SubsetIndex, r: usize| -> usize {
            let x = x.truncate(r);
            match scheme {
                Scheme::Xy => y_convention(x, r) as usize,
                Scheme::Rotated => x.cardinality() % 2,
            }
        };
        if config.is_homogeneous() {
            let l = config.l_max();
            return Self::from_fn(l, |x| per_class(x, l));
        }
        let sizes = config.distinct_sizes();
        Self::from_fn(config.l_max(), |x| {
            sizes
                .iter()
                .enumerate()
                .map(|(c, &r)| per_class(x, r) << c)
                .sum()
        })
    }

    pub fn labels(&self) -> usize {
        self.labels
    }

    pub fn setting(&self, subset: SubsetIndex) -> usize {
        self.settings[subset.mask() as usize]
    }

    pub fn settings(&self) -> &[usize] {
        &self.settings
    }

    /// Number of Bob settings the map needs: one past the largest used.
    pub fn required_settings(&self) -> usize {
        self.settings.iter().copied().max().unwrap_or(0) + 1
    }
}
