//! Exhaustive search over deterministic strategies for one source.
//!
//! With a single source `Σ_X |K_X|` is convex in the distribution, so its
//! maximum over local models is attained at a deterministic vertex.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::inequality::BobSettingMap;
use crate::network::NetworkConfig;

/// Largest branch size accepted.
pub const MAX_ENUMERATION_BRANCHES: usize = 4;
/// Cap on `4^L · 2^S` strategies.
pub const MAX_STRATEGIES: usize = 1 << 20;

/// `responses[k]` gives observer `k`'s outcome for settings 0 and 1;
/// `bob[y]` is Bob's outcome for setting `y`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeterministicStrategy {
    pub responses: Vec<[u8; 2]>,
    pub bob: Vec<u8>,
}

fn strategy_value(l: usize, responses: &[[u8; 2]], bob: &[u8], mapping: &BobSettingMap) -> f64 {
    let strings = 1u32 << l;
    // parity of Σ_k a_k(x_k) for every packed x
    let outcome_parity: Vec<u32> = (0..strings)
        .map(|x| {
            (0..l)
                .map(|k| responses[k][((x >> (l - 1 - k)) & 1) as usize] as u32)
                .sum::<u32>()
                & 1
        })
        .collect();
    (0..1u32 << l)
        .map(|mask| {
            // label k sits at packed position L − k
            let packed_mask: u32 = (0..l)
                .filter(|k| (mask >> k) & 1 == 1)
                .map(|k| 1 << (l - 1 - k))
                .sum();
            let b = bob[mapping.settings()[mask as usize]] as u32;
            let sum: i64 = (0..strings)
                .map(|x| {
                    if ((x & packed_mask).count_ones() + outcome_parity[x as usize] + b).is_multiple_of(2) {
                        1
                    } else {
                        -1
                    }
                })
                .sum();
            (sum as f64 / strings as f64).abs()
        })
        .sum()
}

/// Maximum of `Σ_X |K_X|` over deterministic strategies, with a maximizer.
/// Ties resolve to the first strategy in enumeration order.
pub fn enumerate_deterministic_max(
    config: &NetworkConfig,
    mapping: &BobSettingMap,
) -> Result<(f64, DeterministicStrategy)> {
    if config.n() != 1 {
        return Err(Error::contract(
            "vertex enumeration certifies bounds only for a single source; sample instead",
        ));
    }
    let l = config.l_max();
    if l > MAX_ENUMERATION_BRANCHES {
        return Err(Error::size("branch size", l, 1, MAX_ENUMERATION_BRANCHES));
    }
    if mapping.labels() != l {
        return Err(Error::contract("setting map and network disagree on L"));
    }
    let settings = mapping.required_settings();
    let observer_strategies = 1usize << (2 * l);
    let total = observer_strategies
        .checked_shl(settings as u32)
        .filter(|&t| settings < usize::BITS as usize && t <= MAX_STRATEGIES)
        .ok_or_else(|| Error::size("deterministic strategies", usize::MAX, 1, MAX_STRATEGIES))?;

    let decode = |index: usize| -> DeterministicStrategy {
        let obs = index >> settings;
        let responses = (0..l)
            .map(|k| {
                let f = (obs >> (2 * k)) & 3;
                [(f & 1) as u8, (f >> 1) as u8]
            })
            .collect();
        let bob = (0..settings).map(|y| ((index >> y) & 1) as u8).collect();
        DeterministicStrategy { responses, bob }
    };

    let (best, index) = (0..total)
        .into_par_iter()
        .map(|i| {
            let s = decode(i);
            (strategy_value(l, &s.responses, &s.bob, mapping), i)
        })
        .reduce(
            || (f64::NEG_INFINITY, usize::MAX),
            |a, b| {
                if a.0 > b.0 || (a.0 == b.0 && a.1 < b.1) {
                    a
                } else {
                    b
                }
            },
        );
    Ok((best, decode(index)))
}
