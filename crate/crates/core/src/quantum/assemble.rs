//! Per-source simulation and composition into the network distribution.

use rayon::prelude::*;

use super::measure::{measure_product, BobScheme, MeasurementScheme, XYObservable, BOB_AXES};
use super::state::DensityOperator;
use super::table::{CorrelationTable, MAX_TABLE_OBSERVERS};
use crate::error::{Error, Result};
use crate::network::NetworkConfig;

/// Largest branch size accepted by [`single_source_table`].
pub const MAX_SOURCE_BRANCHES: usize = 10;

/// Distribution of one source: the noisy `(L+1)`-qubit GHZ state measured
/// with the given branch observables and one of Bob's two single-qubit axes.
///
/// Qubits are ordered branch 1 … L, then Bob's qubit.
pub fn single_source_table(
    angles: &[(XYObservable, XYObservable)],
    bob_axes: (XYObservable, XYObservable),
    visibility: f64,
) -> Result<CorrelationTable> {
    let l = angles.len();
    if !(1..=MAX_SOURCE_BRANCHES).contains(&l) {
        return Err(Error::size("branch size", l, 1, MAX_SOURCE_BRANCHES));
    }
    let rho = DensityOperator::noisy_ghz(l + 1, visibility)?;
    let mut settings: Vec<Vec<_>> = angles
        .iter()
        .map(|(a0, a1)| vec![a0.projectors(), a1.projectors()])
        .collect();
    settings.push(vec![bob_axes.0.projectors(), bob_axes.1.projectors()]);
    let stats = measure_product(&rho, &settings)?;
    // (x·2 + y)·2^{L+1} + (a·2 + b) is exactly the table layout
    CorrelationTable::new(
        NetworkConfig::homogeneous(1, l)?,
        2,
        stats.probabilities().to_vec(),
    )
}

/// Composes independent sources measured by a separable Bob who reports
/// `b = b₁ ⊕ … ⊕ bₙ`; every source sees the network's setting `y`.
pub fn compose_network(per_source: &[CorrelationTable]) -> Result<CorrelationTable> {
    let settings = per_source
        .first()
        .ok_or_else(|| Error::contract("no source tables"))?
        .bob_settings();
    if per_source.iter().any(|t| t.bob_settings() != settings) {
        return Err(Error::contract(
            "source tables disagree on Bob's setting count",
        ));
    }
    compose_network_routed(per_source, settings, |_, y| y)
}

/// As [`compose_network`], with source `j` measured under setting
/// `route(j, y)` when the network setting is `y`.
pub fn compose_network_routed(
    per_source: &[CorrelationTable],
    bob_settings: usize,
    route: impl Fn(usize, usize) -> usize + Sync,
) -> Result<CorrelationTable> {
    if per_source.is_empty() {
        return Err(Error::contract("no source tables"));
    }
    if let Some(t) = per_source.iter().find(|t| t.config().n() != 1) {
        return Err(Error::contract(format!(
            "source tables must describe one source, got {}",
            t.config()
        )));
    }
    let branches: Vec<usize> = per_source
        .iter()
        .map(|t| t.config().branches()[0])
        .collect();
    let config = NetworkConfig::new(branches)?;
    if config.total_observers() > MAX_TABLE_OBSERVERS {
        return Err(Error::size(
            "table observers",
            config.total_observers(),
            1,
            MAX_TABLE_OBSERVERS,
        ));
    }
    for (j, t) in per_source.iter().enumerate() {
        for y in 0..bob_settings {
            if route(j, y) >= t.bob_settings() {
                return Err(Error::contract(format!(
                    "setting {y} routes source {j} to an unknown setting"
                )));
            }
        }
    }

    let strings = 1usize << config.total_observers();
    let block = strings * 2;
    let mut values = vec![0.0; strings * bob_settings * block];
    values
        .par_chunks_mut(bob_settings * block)
        .enumerate()
        .for_each(|(x, chunk)| {
            let x = x as u64;
            let local_x: Vec<u64> = (0..config.n()).map(|j| config.source_bits(x, j)).collect();
            for y in 0..bob_settings {
                let out = &mut chunk[y * block..(y + 1) * block];
                for a in 0..strings as u64 {
                    // parity convolution over Bob's per-source outcomes
                    let (mut even, mut odd) = (1.0, 0.0);
                    for (j, table) in per_source.iter().enumerate() {
                        let yj = route(j, y);
                        let aj = config.source_bits(a, j);
                        let p0 = table.get(local_x[j], yj, aj, 0);
                        let p1 = table.get(local_x[j], yj, aj, 1);
                        let next = (even * p0 + odd * p1, even * p1 + odd * p0);
                        even = next.0;
                        odd = next.1;
                    }
                    out[a as usize * 2] = even;
                    out[a as usize * 2 + 1] = odd;
                }
            }
        });
    CorrelationTable::new(config, bob_settings, values)
}

/// Simulates the whole network under a separable Bob. `visibilities[j]` is
/// the GHZ weight of source `j`.
pub fn network_table(
    config: &NetworkConfig,
    scheme: &MeasurementScheme,
    visibilities: &[f64],
) -> Result<CorrelationTable> {
    if visibilities.len() != config.n() {
        return Err(Error::contract(format!(
            "{} visibilities for {} sources",
            visibilities.len(),
            config.n()
        )));
    }
    if scheme.bob() == BobScheme::GhzBasisSwap {
        return Err(Error::contract(
            "the GHZ-basis measurement is not separable; use swap_joint_table",
        ));
    }
    if scheme.observer_angles().len() != config.total_observers() {
        return Err(Error::contract(
            "measurement scheme does not match the network",
        ));
    }
    if config.total_observers() > MAX_TABLE_OBSERVERS {
        return Err(Error::size(
            "table observers",
            config.total_observers(),
            1,
            MAX_TABLE_OBSERVERS,
        ));
    }
    let per_source = (0..config.n())
        .map(|j| single_source_table(scheme.source_angles(config, j), BOB_AXES, visibilities[j]))
        .collect::<Result<Vec<_>>>()?;
    let bob = scheme.bob();
    compose_network_routed(&per_source, bob.settings(config), |j, y| {
        bob.source_setting(config, j, y)
    })
}

/// Equal per-source visibilities whose product is `total`.
pub fn split_visibility(config: &NetworkConfig, total: f64) -> Vec<f64> {
    vec![total.powf(1.0 / config.n() as f64); config.n()]
}
