//! Numerical noise threshold: bisection on the total visibility of simulated
//! noisy networks.

use serde::Serialize;

use super::mapping::BobSettingMap;
use super::{bell_value, classical_bound, q_spectrum, violates};
use crate::error::Result;
use crate::network::NetworkConfig;
use crate::quantum::{network_table, split_visibility, MeasurementScheme, Scheme};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Threshold {
    /// Total visibility at which the Bell value meets the classical bound.
    Crossing { visibility: f64 },
    /// The noiseless network does not violate.
    NoViolation { value_at_full_visibility: f64 },
}

/// Bisection steps; the bracket shrinks below `1e-12`.
const BISECTION_STEPS: usize = 42;

/// Bell value of the network simulated with every source at visibility
/// `total^{1/n}`.
pub fn simulated_bell_value(config: &NetworkConfig, scheme: Scheme, total: f64) -> Result<f64> {
    let table = network_table(
        config,
        &MeasurementScheme::standard(config, scheme),
        &split_visibility(config, total),
    )?;
    let spectrum = q_spectrum(&table, &BobSettingMap::for_scheme(config, scheme)?)?;
    Ok(bell_value(&spectrum))
}

pub fn find_critical_visibility(config: &NetworkConfig, scheme: Scheme) -> Result<Threshold> {
    let bound = classical_bound(config);
    let full = simulated_bell_value(config, scheme, 1.0)?;
    if !violates(full, bound) {
        return Ok(Threshold::NoViolation {
            value_at_full_visibility: full,
        });
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if simulated_bell_value(config, scheme, mid)? > bound {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Threshold::Crossing {
        visibility: 0.5 * (lo + hi),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_xy() {
        let c = NetworkConfig::homogeneous(2, 2).unwrap();
        match find_critical_visibility(&c, Scheme::Xy).unwrap() {
            Threshold::Crossing { visibility } => assert!((visibility - 0.25).abs() < 1e-6),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn single_pair_xy_does_not_violate() {
        let c = NetworkConfig::homogeneous(1, 1).unwrap();
        match find_critical_visibility(&c, Scheme::Xy).unwrap() {
            Threshold::NoViolation {
                value_at_full_visibility,
            } => assert!((value_at_full_visibility - 1.0).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
    }
}
