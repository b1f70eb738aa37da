use std::io::Write;

use crate::error::{Error, Result};
use crate::format::fmt_float;
use crate::network::NetworkConfig;

/// Dense conditional distribution `P(ā, b | x̄, y)`.
///
/// Entries are stored at `((x · S + y) · 2^N + a) · 2 + b` where `S` is the
/// number of Bob settings, `N` the number of non-Bob observers and `x`, `a`
/// are packed strings (observer 0 most significant).
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationTable {
    config: NetworkConfig,
    bob_settings: usize,
    values: Vec<f64>,
}

/// Largest number of non-Bob observers for which dense tables are built.
pub const MAX_TABLE_OBSERVERS: usize = 10;

fn table_len(config: &NetworkConfig, bob_settings: usize) -> Result<usize> {
    let n_obs = config.total_observers();
    if n_obs > MAX_TABLE_OBSERVERS {
        return Err(Error::size(
            "table observers",
            n_obs,
            1,
            MAX_TABLE_OBSERVERS,
        ));
    }
    if bob_settings == 0 {
        return Err(Error::contract("Bob needs at least one setting"));
    }
    Ok((1usize << (2 * n_obs)) * bob_settings * 2)
}

impl CorrelationTable {
    pub fn new(config: NetworkConfig, bob_settings: usize, values: Vec<f64>) -> Result<Self> {
        let len = table_len(&config, bob_settings)?;
        if values.len() != len {
            return Err(Error::contract(format!(
                "table for {config} with {bob_settings} Bob settings needs {len} entries, got {}",
                values.len()
            )));
        }
        Ok(CorrelationTable {
            config,
            bob_settings,
            values,
        })
    }

    /// Builds a table from `f(x, y, a, b)`.
    pub fn from_fn(
        config: NetworkConfig,
        bob_settings: usize,
        mut f: impl FnMut(u64, usize, u64, u8) -> f64,
    ) -> Result<Self> {
        let len = table_len(&config, bob_settings)?;
        let strings = 1u64 << config.total_observers();
        let mut values = Vec::with_capacity(len);
        for x in 0..strings {
            for y in 0..bob_settings {
                for a in 0..strings {
                    for b in 0..2u8 {
                        values.push(f(x, y, a, b));
                    }
                }
            }
        }
        Ok(CorrelationTable {
            config,
            bob_settings,
            values,
        })
    }

    pub fn uniform(config: NetworkConfig, bob_settings: usize) -> Result<Self> {
        let p = 1.0 / (1u64 << (config.total_observers() + 1)) as f64;
        Self::from_fn(config, bob_settings, |_, _, _, _| p)
    }

    pub fn config(&self) -> &NetworkConfig {
        &self.config
    }

    pub fn bob_settings(&self) -> usize {
        self.bob_settings
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn strings(&self) -> u64 {
        1u64 << self.config.total_observers()
    }

    pub fn index(&self, x: u64, y: usize, a: u64, b: u8) -> usize {
        let strings = self.strings() as usize;
        ((x as usize * self.bob_settings + y) * strings + a as usize) * 2 + b as usize
    }

    pub fn get(&self, x: u64, y: usize, a: u64, b: u8) -> f64 {
        self.values[self.index(x, y, a, b)]
    }

    /// Outcome distribution for one setting pair, indexed by `a · 2 + b`.
    pub fn block(&self, x: u64, y: usize) -> &[f64] {
        let start = self.index(x, y, 0, 0);
        &self.values[start..start + 2 * self.strings() as usize]
    }

    /// `Σ_{ā,b} (-1)^{b + Σa} P(ā, b | x̄, y)`.
    pub fn correlator(&self, x: u64, y: usize) -> f64 {
        self.block(x, y)
            .iter()
            .enumerate()
            .map(|(idx, p)| {
                let parity = (idx as u64 >> 1).count_ones() + (idx as u32 & 1);
                if parity.is_multiple_of(2) {
                    *p
                } else {
                    -*p
                }
            })
            .sum()
    }

    /// Largest deviation of a per-setting total from 1.
    pub fn normalization_defect(&self) -> f64 {
        let block = 2 * self.strings() as usize;
        self.values
            .chunks(block)
            .map(|c| (c.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn min_entry(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    fn check_compatible(&self, other: &CorrelationTable) -> Result<()> {
        if self.config != other.config || self.bob_settings != other.bob_settings {
            return Err(Error::contract("tables describe different scenarios"));
        }
        Ok(())
    }

    /// `α · self + (1 - α) · other`.
    pub fn mix(&self, other: &CorrelationTable, alpha: f64) -> Result<CorrelationTable> {
        self.check_compatible(other)?;
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::Domain(format!(
                "mixing weight {alpha} outside [0, 1]"
            )));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(p, q)| alpha * p + (1.0 - alpha) * q)
            .collect();
        Ok(CorrelationTable {
            config: self.config.clone(),
            bob_settings: self.bob_settings,
            values,
        })
    }

    pub fn max_abs_diff(&self, other: &CorrelationTable) -> Result<f64> {
        self.check_compatible(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(p, q)| (p - q).abs())
            .fold(0.0, f64::max))
    }

    /// Writes one row per entry with columns `x_j_k…, y, a_j_k…, b, p`
    /// (one-based `j`, `k`), in lexicographic order of those columns.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        let mut names = Vec::new();
        for (j, &l) in self.config.branches().iter().enumerate() {
            for k in 1..=l {
                names.push(format!("{}_{}", j + 1, k));
            }
        }
        let mut header: Vec<String> = names.iter().map(|s| format!("x_{s}")).collect();
        header.push("y".into());
        header.extend(names.iter().map(|s| format!("a_{s}")));
        header.push("b".into());
        header.push("p".into());
        out.write_record(&header)?;

        let n_obs = self.config.total_observers();
        let bits = |v: u64| -> Vec<String> {
            (0..n_obs)
                .map(|i| ((v >> (n_obs - 1 - i)) & 1).to_string())
                .collect()
        };
        let strings = self.strings();
        for x in 0..strings {
            for y in 0..self.bob_settings {
                for a in 0..strings {
                    for b in 0..2u8 {
                        let mut row = bits(x);
                        row.push(y.to_string());
                        row.extend(bits(a));
                        row.push(b.to_string());
                        row.push(fmt_float(self.get(x, y, a, b)));
                        out.write_record(&row)?;
                    }
                }
            }
        }
        out.flush()?;
        Ok(())
    }
}
