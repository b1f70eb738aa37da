//! Points of the classical `K`-space region for `L = 2`, traced by the
//! source-symmetric `D` family with `K_{1,2}` held (nearly) fixed.

use std::io::Write;

use serde::Serialize;

use super::DFamily;
use crate::error::{Error, Result};
use crate::format::fmt_float;
use crate::network::{NetworkConfig, SubsetIndex};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionPoint {
    pub p1: f64,
    pub p2: f64,
    /// `K_∅, K_{1}, K_{2}, K_{1,2}`.
    pub k: [f64; 4],
}

/// Sweeps `(p¹, p²)` over a `resolution × resolution` grid on `[0, 1]²` and
/// keeps points with `|K_fixed − value|` below the grid step `1/(resolution − 1)`.
pub fn region_slice(
    config: &NetworkConfig,
    fixed: SubsetIndex,
    value: f64,
    resolution: usize,
) -> Result<Vec<RegionPoint>> {
    if !config.is_homogeneous() || config.l_max() != 2 {
        return Err(Error::contract(
            "region slices are defined for homogeneous L = 2 networks",
        ));
    }
    if fixed.mask() >= 4 {
        return Err(Error::contract(format!("subset {fixed} exceeds L = 2")));
    }
    if resolution < 2 {
        return Err(Error::contract(
            "a region grid needs at least 2 points per axis",
        ));
    }
    let step = 1.0 / (resolution - 1) as f64;
    let mut points = Vec::new();
    for i in 0..resolution {
        for j in 0..resolution {
            let (p1, p2) = (i as f64 * step, j as f64 * step);
            let spectrum = DFamily::source_symmetric(config, &[p1, p2])?.spectrum()?;
            let k: [f64; 4] = spectrum.entries().try_into().expect("four entries");
            if (k[fixed.mask() as usize] - value).abs() < step {
                points.push(RegionPoint { p1, p2, k });
            }
        }
    }
    Ok(points)
}

/// CSV with columns `K_empty, K_1, K_2`, preceded by a `#` comment line
/// recording the slice parameters.
pub fn write_region_csv<W: Write>(
    mut writer: W,
    config: &NetworkConfig,
    fixed: SubsetIndex,
    value: f64,
    resolution: usize,
    points: &[RegionPoint],
) -> Result<()> {
    writeln!(
        writer,
        "# n={} L={} fixed=K_{} value={} grid={}",
        config.n(),
        config.l_max(),
        fixed.column_name(),
        fmt_float(value),
        resolution
    )?;
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(["K_empty", "K_1", "K_2"])?;
    for p in points {
        out.write_record([fmt_float(p.k[0]), fmt_float(p.k[1]), fmt_float(p.k[2])])?;
    }
    out.flush()?;
    Ok(())
}
