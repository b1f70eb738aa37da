use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::state::DensityOperator;
use super::Op2;
use crate::error::{Error, Result};
use crate::network::NetworkConfig;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn identity() -> Op2 {
    [[ONE, ZERO], [ZERO, ONE]]
}

pub fn pauli_x() -> Op2 {
    [[ZERO, ONE], [ONE, ZERO]]
}

pub fn pauli_y() -> Op2 {
    let i = Complex64::new(0.0, 1.0);
    [[ZERO, -i], [i, ZERO]]
}

pub fn pauli_z() -> Op2 {
    [[ONE, ZERO], [ZERO, -ONE]]
}

pub fn mat_mul(a: &Op2, b: &Op2) -> Op2 {
    let mut out = [[ZERO; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// The observable `cos(θ) X + sin(θ) Y` on the equator of the Bloch sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct XYObservable {
    angle: f64,
}

impl XYObservable {
    pub const X: XYObservable = XYObservable { angle: 0.0 };
    pub const Y: XYObservable = XYObservable { angle: FRAC_PI_2 };

    /// Angle is reduced into `[0, 2π)`.
    pub fn new(angle: f64) -> Self {
        XYObservable {
            angle: angle.rem_euclid(TAU),
        }
    }

    pub fn angle(self) -> f64 {
        self.angle
    }

    pub fn matrix(self) -> Op2 {
        let phase = Complex64::from_polar(1.0, self.angle);
        [[ZERO, phase.conj()], [phase, ZERO]]
    }

    /// `½(𝟙 + (-1)^outcome (cos θ X + sin θ Y))`.
    pub fn projector(self, outcome: u8) -> Op2 {
        let sign = if outcome == 0 { 0.5 } else { -0.5 };
        let phase = Complex64::from_polar(1.0, self.angle) * sign;
        let half = Complex64::new(0.5, 0.0);
        [[half, phase.conj()], [phase, half]]
    }

    pub fn projectors(self) -> [Op2; 2] {
        [self.projector(0), self.projector(1)]
    }

    /// Eigenvector with eigenvalue `(-1)^outcome`.
    pub fn eigenvector(self, outcome: u8) -> [Complex64; 2] {
        let sign = if outcome == 0 { 1.0 } else { -1.0 };
        [
            Complex64::new(FRAC_1_SQRT_2, 0.0),
            Complex64::from_polar(FRAC_1_SQRT_2 * sign, self.angle),
        ]
    }
}

/// Named measurement families for the non-Bob observers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// `X` for setting 0, `Y` for setting 1.
    Xy,
    /// `(X + Y)/√2` for setting 0, `(X - Y)/√2` for setting 1.
    Rotated,
}

impl Scheme {
    pub fn angles(self) -> (XYObservable, XYObservable) {
        match self {
            Scheme::Xy => (XYObservable::X, XYObservable::Y),
            Scheme::Rotated => (XYObservable::new(FRAC_PI_4), XYObservable::new(-FRAC_PI_4)),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Xy => "xy",
            Scheme::Rotated => "rotated",
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "xy" => Ok(Scheme::Xy),
            "rotated" => Ok(Scheme::Rotated),
            other => Err(Error::Parse(format!(
                "unknown scheme '{other}' (expected xy or rotated)"
            ))),
        }
    }
}

/// How the central observer measures the `n` qubits it receives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BobScheme {
    /// Every qubit in `X` (setting 0) or every qubit in `Y` (setting 1),
    /// reporting the parity of the `n` outcomes.
    SeparableXy,
    /// One `X`/`Y` choice per distinct branch size; `2^l` settings where bit
    /// `c` of the setting selects the axis for sources of size class `c`.
    SeparableBlocks,
    /// Joint projection onto the GHZ-like basis `Z^{b¹} X^{b²} … X^{bⁿ} |GHZ⟩`.
    GhzBasisSwap,
}

impl BobScheme {
    pub fn settings(self, config: &NetworkConfig) -> usize {
        match self {
            BobScheme::SeparableXy => 2,
            BobScheme::SeparableBlocks => 1 << config.distinct_sizes().len(),
            BobScheme::GhzBasisSwap => 1,
        }
    }

    /// Axis applied to source `j`'s qubit under network setting `y`.
    pub fn source_setting(self, config: &NetworkConfig, j: usize, y: usize) -> usize {
        match self {
            BobScheme::SeparableXy => y,
            BobScheme::SeparableBlocks => (y >> config.size_class(j)) & 1,
            BobScheme::GhzBasisSwap => 0,
        }
    }
}

/// Bob's two single-qubit axes: `X` for setting 0, `Y` for setting 1.
pub const BOB_AXES: (XYObservable, XYObservable) = (XYObservable::X, XYObservable::Y);

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementScheme {
    observer_angles: Vec<(XYObservable, XYObservable)>,
    bob: BobScheme,
}

impl MeasurementScheme {
    pub fn new(
        config: &NetworkConfig,
        observer_angles: Vec<(XYObservable, XYObservable)>,
        bob: BobScheme,
    ) -> Result<Self> {
        if observer_angles.len() != config.total_observers() {
            return Err(Error::contract(format!(
                "{} observer angle pairs for {} observers",
                observer_angles.len(),
                config.total_observers()
            )));
        }
        Ok(MeasurementScheme {
            observer_angles,
            bob,
        })
    }

    /// Every observer uses the same pair of angles.
    pub fn uniform(
        config: &NetworkConfig,
        pair: (XYObservable, XYObservable),
        bob: BobScheme,
    ) -> Self {
        MeasurementScheme {
            observer_angles: vec![pair; config.total_observers()],
            bob,
        }
    }

    /// The named scheme with a separable Bob: two settings for homogeneous
    /// networks, one axis choice per size class otherwise.
    pub fn standard(config: &NetworkConfig, scheme: Scheme) -> Self {
        let bob = if config.is_homogeneous() {
            BobScheme::SeparableXy
        } else {
            BobScheme::SeparableBlocks
        };
        Self::uniform(config, scheme.angles(), bob)
    }

    pub fn observer_angles(&self) -> &[(XYObservable, XYObservable)] {
        &self.observer_angles
    }

    pub fn source_angles(
        &self,
        config: &NetworkConfig,
        j: usize,
    ) -> &[(XYObservable, XYObservable)] {
        let start = config.offset(j);
        &self.observer_angles[start..start + config.branches()[j]]
    }

    pub fn bob(&self) -> BobScheme {
        self.bob
    }
}

/// Joint outcome statistics of independent two-outcome measurements, one per
/// qubit, over every combination of per-qubit settings.
///
/// Probabilities are stored at `setting_index * 2^m + outcome_index`, where
/// the setting index is mixed-radix with qubit 0 most significant and the
/// outcome index has qubit 0 as its most significant bit.
#[derive(Debug, Clone)]
pub struct ProductStatistics {
    qubits: usize,
    radices: Vec<usize>,
    probabilities: Vec<f64>,
}

impl ProductStatistics {
    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn probability(&self, settings: &[usize], outcome: usize) -> f64 {
        let idx = settings
            .iter()
            .zip(&self.radices)
            .fold(0usize, |acc, (&s, &r)| acc * r + s);
        self.probabilities[(idx << self.qubits) + outcome]
    }
}

/// Evaluates `Tr((⊗_q P_q) ρ)` for every choice of per-qubit settings and
/// outcomes. `settings[q]` lists the projector pairs available on qubit `q`.
///
/// Qubits are contracted one at a time; partial traces are shared between all
/// branches with a common prefix of settings and outcomes.
pub fn measure_product(
    rho: &DensityOperator,
    settings: &[Vec<[Op2; 2]>],
) -> Result<ProductStatistics> {
    let m = rho.qubits();
    if settings.len() != m {
        return Err(Error::contract(format!(
            "{} qubit measurement lists for a {m}-qubit state",
            settings.len()
        )));
    }
    if let Some(q) = settings.iter().position(|s| s.is_empty()) {
        return Err(Error::contract(format!(
            "qubit {q} has no measurement settings"
        )));
    }
    let radices: Vec<usize> = settings.iter().map(Vec::len).collect();
    let total_settings: usize = radices.iter().product();
    let mut probabilities = vec![0.0; total_settings << m];
    descend(rho.matrix(), m, 0, settings, 0, 0, &mut probabilities);
    Ok(ProductStatistics {
        qubits: m,
        radices,
        probabilities,
    })
}

fn descend(
    matrix: &[Complex64],
    remaining: usize,
    q: usize,
    settings: &[Vec<[Op2; 2]>],
    setting_idx: usize,
    outcome_idx: usize,
    out: &mut [f64],
) {
    if remaining == 0 {
        let m = settings.len();
        out[(setting_idx << m) + outcome_idx] = matrix[0].re;
        return;
    }
    let dim = 1usize << remaining;
    let half = dim >> 1;
    let mut reduced = vec![ZERO; half * half];
    for (s, pair) in settings[q].iter().enumerate() {
        for (o, proj) in pair.iter().enumerate() {
            // reduced[i][j] = Σ_{a,b} ρ[(a,i),(b,j)] P[b][a]
            for i in 0..half {
                for j in 0..half {
                    let mut acc = ZERO;
                    for a in 0..2 {
                        let row = (a * half + i) * dim;
                        for b in 0..2 {
                            acc += matrix[row + b * half + j] * proj[b][a];
                        }
                    }
                    reduced[i * half + j] = acc;
                }
            }
            descend(
                &reduced,
                remaining - 1,
                q + 1,
                settings,
                setting_idx * settings[q].len() + s,
                (outcome_idx << 1) | o,
                out,
            );
        }
    }
}
