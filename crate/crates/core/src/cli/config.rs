use std::path::Path;

use serde::Deserialize;

use super::{usage, NetworkArgs};
use crate::error::{Error, Result};
use crate::network::NetworkConfig;
use crate::quantum::Scheme;

/// Contents of a `--config` file: the network serialization plus run fields.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub n: Option<usize>,
    pub branches: Option<Vec<usize>>,
    #[serde(rename = "L")]
    pub l: Option<usize>,
    pub scheme: Option<Scheme>,
    pub seed: Option<u64>,
    pub points: Option<usize>,
    pub trials: Option<usize>,
    pub lattice: Option<usize>,
    pub resolution: Option<usize>,
    pub value: Option<f64>,
    pub fixed: Option<u32>,
}

pub fn load(path: Option<&Path>) -> Result<FileConfig> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn apply(
    current: Vec<usize>,
    n: Option<usize>,
    l: Option<usize>,
    branches: Option<&Vec<usize>>,
    origin: &str,
) -> Result<Vec<usize>> {
    if let Some(b) = branches {
        if let Some(n) = n {
            if n != b.len() {
                return Err(usage(format!(
                    "{origin}: n = {n} but {} branch sizes were given",
                    b.len()
                )));
            }
        }
        if l.is_some() {
            return Err(usage(format!(
                "{origin}: give either L or branches, not both"
            )));
        }
        return Ok(b.clone());
    }
    if n.is_none() && l.is_none() {
        return Ok(current);
    }
    let n = n.unwrap_or(current.len());
    let l = l.unwrap_or_else(|| current.iter().copied().max().unwrap_or(2));
    Ok(vec![l; n])
}

/// Defaults `(n, L) = (2, 2)`, overridden by the file, then by flags.
pub fn resolve_network(flags: &NetworkArgs, file: &FileConfig) -> Result<NetworkConfig> {
    let branches = apply(
        vec![2, 2],
        file.n,
        file.l,
        file.branches.as_ref(),
        "config file",
    )?;
    let branches = apply(branches, flags.n, flags.l, flags.branches.as_ref(), "flags")?;
    NetworkConfig::new(branches)
}

pub fn resolve_scheme(flags: &NetworkArgs, file: &FileConfig, default: Scheme) -> Scheme {
    flags.scheme.or(file.scheme).unwrap_or(default)
}
