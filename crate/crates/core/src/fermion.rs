//! Fermionic ladder operators under the Jordan-Wigner encoding.
//!
//! Mode `p` maps to qubit `p`; `a_p^dagger = Z_0 ... Z_{p-1} (X_p - i Y_p) / 2`.
//! An occupied mode is a set bit.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::{PauliString, PauliSum, PauliTerm};
use crate::statevec::StateVector;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Ladder {
    pub mode: usize,
    pub dagger: bool,
}

pub fn create(mode: usize) -> Ladder {
    Ladder { mode, dagger: true }
}

pub fn annihilate(mode: usize) -> Ladder {
    Ladder { mode, dagger: false }
}

/// Sum of products of ladder operators with complex coefficients.
#[derive(Clone, Debug, Default)]
pub struct FermionOperator {
    terms: Vec<(Complex64, Vec<Ladder>)>,
}

impl FermionOperator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_term(&mut self, coefficient: impl Into<Complex64>, ops: &[Ladder]) {
        self.terms.push((coefficient.into(), ops.to_vec()));
    }

    /// Adds `coefficient * (a_p^dagger a_q + a_q^dagger a_p)`.
    pub fn add_hopping(&mut self, coefficient: f64, p: usize, q: usize) {
        self.add_term(coefficient, &[create(p), annihilate(q)]);
        self.add_term(coefficient, &[create(q), annihilate(p)]);
    }

    /// Adds `coefficient * n_p n_q`.
    pub fn add_density_density(&mut self, coefficient: f64, p: usize, q: usize) {
        self.add_term(coefficient, &[create(p), annihilate(p), create(q), annihilate(q)]);
    }

    /// Jordan-Wigner image as a Hermitian Pauli sum on `n_qubits`.
    ///
    /// Fails if the operator is not Hermitian (imaginary Pauli coefficients).
    pub fn jordan_wigner(&self, n_qubits: usize) -> Result<PauliSum> {
        let mut acc: BTreeMap<PauliString, Complex64> = BTreeMap::new();
        for (coef, ops) in &self.terms {
            let mut partial: BTreeMap<PauliString, Complex64> = BTreeMap::new();
            partial.insert(PauliString::IDENTITY, *coef);
            for op in ops {
                if op.mode >= n_qubits {
                    return Err(Error::invalid(format!("mode {} outside register", op.mode)));
                }
                let parity = (1u32 << op.mode) - 1;
                let sx = PauliString::from_masks(1 << op.mode, parity);
                let sy = PauliString::from_masks(1 << op.mode, parity | (1 << op.mode));
                let y_coef = if op.dagger { Complex64::new(0.0, -0.5) } else { Complex64::new(0.0, 0.5) };
                let factors = [(Complex64::new(0.5, 0.0), sx), (y_coef, sy)];
                let mut next: BTreeMap<PauliString, Complex64> = BTreeMap::new();
                for (s, c) in &partial {
                    for (fc, fs) in &factors {
                        let (phase, prod) = s.mul(fs);
                        *next.entry(prod).or_default() += c * fc * phase;
                    }
                }
                partial = next;
            }
            for (s, c) in partial {
                *acc.entry(s).or_default() += c;
            }
        }
        let mut terms = Vec::new();
        for (s, c) in acc {
            if c.im.abs() > 1e-12 {
                return Err(Error::invalid(format!("non-Hermitian coefficient {c} on {s}")));
            }
            if c.re.abs() > 1e-14 {
                terms.push(PauliTerm { coefficient: c.re, string: s });
            }
        }
        PauliSum::new(n_qubits, terms)
    }
}

/// Applies `sum_p coefficients[p] a_p^dagger` to a state.
pub fn apply_creation_combination(state: &StateVector, coefficients: &[(usize, f64)]) -> StateVector {
    let dim = state.dim();
    let mut out = vec![Complex64::new(0.0, 0.0); dim];
    for &(mode, w) in coefficients {
        let bit = 1usize << mode;
        let below = bit - 1;
        for (b, a) in state.amplitudes().iter().enumerate() {
            if b & bit == 0 {
                let sign = if (b & below).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
                out[b | bit] += a * (w * sign);
            }
        }
    }
    StateVector::from_amplitudes(state.n_qubits(), out).expect("dimension preserved")
}

/// Applies a single ladder operator.
pub fn apply_ladder(state: &StateVector, op: Ladder) -> StateVector {
    let dim = state.dim();
    let bit = 1usize << op.mode;
    let below = bit - 1;
    let mut out = vec![Complex64::new(0.0, 0.0); dim];
    for (b, a) in state.amplitudes().iter().enumerate() {
        let occupied = b & bit != 0;
        if occupied != op.dagger {
            let sign = if (b & below).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
            out[b ^ bit] += a * sign;
        }
    }
    StateVector::from_amplitudes(state.n_qubits(), out).expect("dimension preserved")
}
