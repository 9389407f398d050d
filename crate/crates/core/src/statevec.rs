//! Dense statevector simulation for small registers.
//!
//! Amplitudes are indexed by the integer value of the bitstring with qubit 0
//! as the least significant bit. All gates carry an explicit phase convention:
//! `exp(-i theta P)` with no global-phase freedom.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::pauli::{PauliString, PauliSum};

/// Largest register for which a state may be allocated.
pub const MAX_STATE_QUBITS: usize = 12;
/// Largest register accepted by dense diagonalization.
pub const MAX_DENSE_QUBITS: usize = 10;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

fn check_qubits(n: usize) -> Result<()> {
    if n == 0 || n > MAX_STATE_QUBITS {
        return Err(Error::invalid(format!("qubit count {n} outside 1..={MAX_STATE_QUBITS}")));
    }
    Ok(())
}

impl StateVector {
    /// `|+>^n`: every amplitude equals `2^(-n/2)`.
    pub fn plus(n: usize) -> Result<Self> {
        check_qubits(n)?;
        let dim = 1usize << n;
        let a = Complex64::new((dim as f64).sqrt().recip(), 0.0);
        Ok(StateVector { n_qubits: n, amplitudes: vec![a; dim] })
    }

    /// Computational basis state `|index>`.
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        check_qubits(n)?;
        let dim = 1usize << n;
        if index >= dim {
            return Err(Error::invalid(format!("basis index {index} out of range")));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n_qubits: n, amplitudes })
    }

    /// Wraps raw amplitudes. The caller is responsible for normalization.
    pub fn from_amplitudes(n: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_qubits(n)?;
        if amplitudes.len() != 1 << n {
            return Err(Error::invalid(format!("expected {} amplitudes, got {}", 1usize << n, amplitudes.len())));
        }
        Ok(StateVector { n_qubits: n, amplitudes })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            for a in &mut self.amplitudes {
                *a /= n;
            }
        }
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }

    /// Multiplies amplitude `z` by `exp(-i gamma diag[z])`.
    pub fn apply_diagonal_phase(&mut self, diag: &[f64], gamma: f64) -> Result<()> {
        if diag.len() != self.dim() {
            return Err(Error::invalid(format!(
                "diagonal of length {} applied to state of dimension {}",
                diag.len(),
                self.dim()
            )));
        }
        for (a, &d) in self.amplitudes.iter_mut().zip(diag) {
            let (s, c) = (gamma * d).sin_cos();
            *a *= Complex64::new(c, -s);
        }
        Ok(())
    }

    /// Applies `exp(-i beta X)` to every qubit.
    pub fn apply_x_rotation_layer(&mut self, beta: f64) {
        let (s, c) = beta.sin_cos();
        let dim = self.dim();
        for q in 0..self.n_qubits {
            let bit = 1usize << q;
            for b in 0..dim {
                if b & bit == 0 {
                    let a0 = self.amplitudes[b];
                    let a1 = self.amplitudes[b | bit];
                    self.amplitudes[b] = Complex64::new(c * a0.re + s * a1.im, c * a0.im - s * a1.re);
                    self.amplitudes[b | bit] = Complex64::new(c * a1.re + s * a0.im, c * a1.im - s * a0.re);
                }
            }
        }
    }

    /// Applies `exp(-i theta P) = cos(theta) I - i sin(theta) P`.
    pub fn apply_pauli_exponential(&mut self, string: &PauliString, theta: f64) {
        let (s, c) = theta.sin_cos();
        let x = string.x_mask() as usize;
        if x == 0 {
            let plus = Complex64::new(c, -s);
            let minus = Complex64::new(c, s);
            for (b, a) in self.amplitudes.iter_mut().enumerate() {
                *a *= if string.diagonal_sign(b) > 0.0 { plus } else { minus };
            }
            return;
        }
        let minus_i_s = Complex64::new(0.0, -s);
        for b in 0..self.dim() {
            let partner = b ^ x;
            if b < partner {
                let ab = self.amplitudes[b];
                let ap = self.amplitudes[partner];
                // (P psi)[b] = phase(partner) psi[partner]
                self.amplitudes[b] = ab * c + minus_i_s * string.phase(partner) * ap;
                self.amplitudes[partner] = ap * c + minus_i_s * string.phase(b) * ab;
            }
        }
    }

    /// Applies a Pauli string (no exponential).
    pub fn apply_pauli(&mut self, string: &PauliString) {
        let x = string.x_mask() as usize;
        let old = self.amplitudes.clone();
        for (b, a) in old.into_iter().enumerate() {
            self.amplitudes[b ^ x] = string.phase(b) * a;
        }
    }

    /// `Re <psi|H|psi>`.
    pub fn expectation(&self, h: &PauliSum) -> Result<f64> {
        if h.n_qubits() != self.n_qubits {
            return Err(Error::invalid(format!("{}-qubit operator on {}-qubit state", h.n_qubits(), self.n_qubits)));
        }
        let mut total = 0.0;
        for t in h.terms() {
            total += t.coefficient * self.pauli_expectation(&t.string);
        }
        Ok(total)
    }

    /// `Re <psi|P|psi>`.
    pub fn pauli_expectation(&self, string: &PauliString) -> f64 {
        let x = string.x_mask() as usize;
        if x == 0 {
            return self.amplitudes.iter().enumerate().map(|(b, a)| a.norm_sqr() * string.diagonal_sign(b)).sum();
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (b, a) in self.amplitudes.iter().enumerate() {
            acc += self.amplitudes[b ^ x].conj() * string.phase(b) * a;
        }
        acc.re
    }

    /// `sum_z |psi_z|^2 diag[z]`.
    pub fn expectation_diagonal(&self, diag: &[f64]) -> f64 {
        self.amplitudes.iter().zip(diag).map(|(a, d)| a.norm_sqr() * d).sum()
    }
}

/// Samples the mean of `diag[z]` over `shots` measurements of `state`.
pub fn sample_diagonal_estimate<R: Rng + ?Sized>(
    state: &StateVector,
    diag: &[f64],
    shots: u64,
    rng: &mut R,
) -> Result<f64> {
    if diag.len() != state.dim() {
        return Err(Error::invalid("diagonal length does not match state dimension"));
    }
    DiagonalObservable::new(diag.to_vec()).sample_mean(state, shots, rng)
}

/// Diagonal observable with its basis states grouped by distinct value, so
/// that sampling costs O(levels) regardless of the shot count.
#[derive(Clone, Debug)]
pub struct DiagonalObservable {
    values: Vec<f64>,
    levels: Vec<f64>,
    level_of: Vec<usize>,
}

impl DiagonalObservable {
    pub fn new(values: Vec<f64>) -> Self {
        let mut levels: Vec<f64> = Vec::new();
        let mut level_of = Vec::with_capacity(values.len());
        for &v in &values {
            // Values of Pauli sums with small integer-ish coefficients repeat exactly
            // up to rounding; treat values within 1e-12 as one level.
            match levels.iter().position(|&l| (l - v).abs() <= 1e-12 * (1.0 + v.abs())) {
                Some(i) => level_of.push(i),
                None => {
                    level_of.push(levels.len());
                    levels.push(v);
                }
            }
        }
        DiagonalObservable { values, levels, level_of }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn exact_mean(&self, state: &StateVector) -> f64 {
        state.expectation_diagonal(&self.values)
    }

    /// Mean of `shots` i.i.d. draws of `values[z]` with `z ~ |psi_z|^2`.
    ///
    /// Outcome counts are drawn as a multinomial over the distinct levels by
    /// sequential conditional binomials, which has the same distribution as
    /// drawing basis states one at a time.
    pub fn sample_mean<R: Rng + ?Sized>(&self, state: &StateVector, shots: u64, rng: &mut R) -> Result<f64> {
        if shots == 0 {
            return Err(Error::invalid("shot count must be at least 1"));
        }
        if state.dim() != self.values.len() {
            return Err(Error::invalid("diagonal length does not match state dimension"));
        }
        let mut probs = vec![0.0; self.levels.len()];
        for (a, &l) in state.amplitudes().iter().zip(&self.level_of) {
            probs[l] += a.norm_sqr();
        }
        let total: f64 = probs.iter().sum();
        let mut remaining_shots = shots;
        let mut remaining_p = total;
        let mut sum = 0.0;
        for (i, (&p, &level)) in probs.iter().zip(&self.levels).enumerate() {
            if remaining_shots == 0 {
                break;
            }
            let count = if i + 1 == probs.len() || remaining_p <= p {
                remaining_shots
            } else if p <= 0.0 {
                0
            } else {
                let q = (p / remaining_p).clamp(0.0, 1.0);
                Binomial::new(remaining_shots, q).expect("binomial parameters in range").sample(rng)
            };
            sum += count as f64 * level;
            remaining_shots -= count;
            remaining_p -= p;
        }
        Ok(sum / shots as f64)
    }
}

/// Lowest and highest eigenvalues of a Hermitian Pauli sum.
pub fn extremal_eigenvalues(h: &PauliSum) -> Result<(f64, f64)> {
    if let Some(diag) = h.diagonal() {
        let lo = diag.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = diag.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        return Ok((lo, hi));
    }
    if h.n_qubits() > MAX_DENSE_QUBITS {
        return Err(Error::unsupported(format!("dense diagonalization of {} qubits", h.n_qubits())));
    }
    let dense: DMatrix<Complex64> = h.to_dense();
    let eig = dense.symmetric_eigenvalues();
    let lo = eig.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = eig.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((lo, hi))
}
