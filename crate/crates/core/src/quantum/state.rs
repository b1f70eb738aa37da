use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest register simulated densely.
pub const MAX_QUBITS: usize = 12;

/// Pure state on `m` qubits. Qubit 0 is the most significant bit of the
/// basis index.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if !len.is_power_of_two() {
            return Err(Error::contract(format!(
                "state length {len} is not a power of two"
            )));
        }
        let qubits = len.trailing_zeros() as usize;
        if qubits > MAX_QUBITS {
            return Err(Error::size("qubits", qubits, 0, MAX_QUBITS));
        }
        Ok(StateVector { qubits, amplitudes })
    }

    /// `(|0…0⟩ + |1…1⟩)/√2` on `m` qubits.
    pub fn ghz(m: usize) -> Result<Self> {
        if !(1..=MAX_QUBITS).contains(&m) {
            return Err(Error::size("GHZ qubits", m, 1, MAX_QUBITS));
        }
        let dim = 1usize << m;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        let h = std::f64::consts::FRAC_1_SQRT_2;
        amplitudes[0] = Complex64::new(h, 0.0);
        amplitudes[dim - 1] = Complex64::new(h, 0.0);
        Ok(StateVector {
            qubits: m,
            amplitudes,
        })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `self ⊗ other`, with `self` occupying the leading qubits.
    pub fn kron(&self, other: &StateVector) -> Result<StateVector> {
        let qubits = self.qubits + other.qubits;
        if qubits > MAX_QUBITS {
            return Err(Error::size("qubits", qubits, 0, MAX_QUBITS));
        }
        let mut amplitudes = Vec::with_capacity(1 << qubits);
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        Ok(StateVector { qubits, amplitudes })
    }

    /// Applies a single-qubit operator to qubit `q`.
    pub fn apply(&mut self, q: usize, op: &super::Op2) {
        let stride = 1usize << (self.qubits - 1 - q);
        let dim = self.amplitudes.len();
        let mut base = 0;
        while base < dim {
            for i in base..base + stride {
                let a0 = self.amplitudes[i];
                let a1 = self.amplitudes[i + stride];
                self.amplitudes[i] = op[0][0] * a0 + op[0][1] * a1;
                self.amplitudes[i + stride] = op[1][0] * a0 + op[1][1] * a1;
            }
            base += 2 * stride;
        }
    }

    /// Reorders qubits so that new qubit `i` is old qubit `order[i]`.
    pub fn permute_qubits(&self, order: &[usize]) -> Result<StateVector> {
        let m = self.qubits;
        let mut sorted = order.to_vec();
        sorted.sort_unstable();
        if sorted != (0..m).collect::<Vec<_>>() {
            return Err(Error::contract("qubit order must be a permutation"));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); self.amplitudes.len()];
        for (old_index, amp) in self.amplitudes.iter().enumerate() {
            let mut new_index = 0usize;
            for &old_q in order {
                let bit = (old_index >> (m - 1 - old_q)) & 1;
                new_index = (new_index << 1) | bit;
            }
            amplitudes[new_index] = *amp;
        }
        Ok(StateVector {
            qubits: m,
            amplitudes,
        })
    }
}

/// Mixed state on `m` qubits stored as a dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    qubits: usize,
    matrix: Vec<Complex64>,
}

impl DensityOperator {
    pub fn from_pure(state: &StateVector) -> Self {
        let amps = state.amplitudes();
        let dim = amps.len();
        let mut matrix = Vec::with_capacity(dim * dim);
        for a in amps {
            for b in amps {
                matrix.push(a * b.conj());
            }
        }
        DensityOperator {
            qubits: state.qubits(),
            matrix,
        }
    }

    /// `𝟙 / 2^m`.
    pub fn maximally_mixed(m: usize) -> Result<Self> {
        if m > MAX_QUBITS {
            return Err(Error::size("qubits", m, 0, MAX_QUBITS));
        }
        let dim = 1usize << m;
        let mut matrix = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            matrix[i * dim + i] = Complex64::new(1.0 / dim as f64, 0.0);
        }
        Ok(DensityOperator { qubits: m, matrix })
    }

    /// `p ρ + (1 - p) 𝟙 / 2^m`.
    pub fn with_white_noise(&self, visibility: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&visibility) {
            return Err(Error::Domain(format!(
                "visibility {visibility} outside [0, 1]"
            )));
        }
        let dim = self.dim();
        let noise = (1.0 - visibility) / dim as f64;
        let mut matrix: Vec<Complex64> = self.matrix.iter().map(|z| z * visibility).collect();
        for i in 0..dim {
            matrix[i * dim + i] += noise;
        }
        Ok(DensityOperator {
            qubits: self.qubits,
            matrix,
        })
    }

    /// Noisy GHZ source state `p |GHZ⟩⟨GHZ| + (1 - p) 𝟙 / 2^m`.
    pub fn noisy_ghz(m: usize, visibility: f64) -> Result<Self> {
        Self::from_pure(&StateVector::ghz(m)?).with_white_noise(visibility)
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.qubits
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[row * self.dim() + col]
    }

    pub fn matrix(&self) -> &[Complex64] {
        &self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.entry(i, i)).sum()
    }

    /// Largest `|ρ_ij - conj(ρ_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let dim = self.dim();
        let mut worst = 0.0f64;
        for i in 0..dim {
            for j in 0..=i {
                worst = worst.max((self.entry(i, j) - self.entry(j, i).conj()).norm());
            }
        }
        worst
    }
}
