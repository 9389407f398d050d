//! Pauli strings and weighted sums of them.
//!
//! A string is stored as a pair of bitmasks `(x, z)` over qubits. Per qubit,
//! `x=1,z=0` is X, `x=0,z=1` is Z and `x=1,z=1` is Y. Qubit `q` is bit `q` of
//! a basis index (qubit 0 is the least significant bit).

use std::collections::HashMap;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest register handled anywhere in the crate.
pub const MAX_QUBITS: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    x: u32,
    z: u32,
}

impl PauliString {
    pub const IDENTITY: PauliString = PauliString { x: 0, z: 0 };

    pub fn from_masks(x: u32, z: u32) -> Self {
        PauliString { x, z }
    }

    pub fn new(ops: &[(usize, Pauli)]) -> Result<Self> {
        let mut s = PauliString::IDENTITY;
        for &(q, p) in ops {
            if q >= MAX_QUBITS {
                return Err(Error::invalid(format!("qubit index {q} out of range")));
            }
            let bit = 1u32 << q;
            if (s.x | s.z) & bit != 0 {
                return Err(Error::invalid(format!("qubit {q} appears twice in Pauli string")));
            }
            match p {
                Pauli::X => s.x |= bit,
                Pauli::Y => {
                    s.x |= bit;
                    s.z |= bit;
                }
                Pauli::Z => s.z |= bit,
            }
        }
        Ok(s)
    }

    pub fn x_mask(&self) -> u32 {
        self.x
    }

    pub fn z_mask(&self) -> u32 {
        self.z
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn is_diagonal(&self) -> bool {
        self.x == 0
    }

    pub fn support_mask(&self) -> u32 {
        self.x | self.z
    }

    /// Qubits acted on, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..32).filter(|q| self.support_mask() >> q & 1 == 1).collect()
    }

    pub fn get(&self, qubit: usize) -> Option<Pauli> {
        let bit = 1u32 << qubit;
        match (self.x & bit != 0, self.z & bit != 0) {
            (false, false) => None,
            (true, false) => Some(Pauli::X),
            (true, true) => Some(Pauli::Y),
            (false, true) => Some(Pauli::Z),
        }
    }

    pub fn paulis(&self) -> Vec<(usize, Pauli)> {
        self.support().into_iter().map(|q| (q, self.get(q).expect("qubit in support"))).collect()
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let anti = (self.x & other.z).count_ones() + (self.z & other.x).count_ones();
        anti.is_multiple_of(2)
    }

    /// `P|b> = phase(b) |b ^ x>`.
    #[inline]
    pub(crate) fn phase(&self, basis: usize) -> Complex64 {
        let ny = (self.x & self.z).count_ones();
        let sign = if (basis as u32 & self.z).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
        i_pow(ny) * sign
    }

    /// Sign of a diagonal string on a basis state.
    #[inline]
    pub(crate) fn diagonal_sign(&self, basis: usize) -> f64 {
        if (basis as u32 & self.z).count_ones().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    /// Product `self * other` as `(phase, string)`.
    pub fn mul(&self, other: &PauliString) -> (Complex64, PauliString) {
        // Hermitian form is i^{|x&z|} X^x Z^z; multiply in X^x Z^z form then convert back.
        let ny_a = (self.x & self.z).count_ones();
        let ny_b = (other.x & other.z).count_ones();
        let swap = (self.z & other.x).count_ones();
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        let ny_c = (x & z).count_ones();
        // P_a P_b = i^{ny_a + ny_b} (-1)^swap X^x Z^z = i^{ny_a + ny_b - ny_c} (-1)^swap P_c
        let exp = (ny_a + ny_b + 3 * ny_c + 2 * swap) % 4;
        (i_pow(exp), PauliString { x, z })
    }
}

#[inline]
fn i_pow(k: u32) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "I");
        }
        for (i, (q, p)) in self.paulis().into_iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{p:?}{q}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PauliTerm {
    pub coefficient: f64,
    pub string: PauliString,
}

impl PauliTerm {
    pub fn new(coefficient: f64, ops: &[(usize, Pauli)]) -> Result<Self> {
        Ok(PauliTerm { coefficient, string: PauliString::new(ops)? })
    }

    pub fn identity(coefficient: f64) -> Self {
        PauliTerm { coefficient, string: PauliString::IDENTITY }
    }

    pub fn z(q: usize) -> Self {
        PauliTerm { coefficient: 1.0, string: PauliString::from_masks(0, 1 << q) }
    }

    pub fn zz(a: usize, b: usize) -> Self {
        PauliTerm { coefficient: 1.0, string: PauliString::from_masks(0, (1 << a) | (1 << b)) }
    }

    pub fn x(q: usize) -> Self {
        PauliTerm { coefficient: 1.0, string: PauliString::from_masks(1 << q, 0) }
    }

    pub fn scaled(mut self, factor: f64) -> Self {
        self.coefficient *= factor;
        self
    }

    pub fn is_identity(&self) -> bool {
        self.string.is_identity()
    }

    pub fn is_diagonal(&self) -> bool {
        self.string.is_diagonal()
    }
}

/// Real-weighted sum of Pauli strings on a fixed register.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: Vec<PauliTerm>,
}

impl PauliSum {
    /// Builds a sum, merging terms with identical strings (first-appearance order kept).
    pub fn new(n_qubits: usize, terms: impl IntoIterator<Item = PauliTerm>) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::invalid(format!("register size {n_qubits} out of range")));
        }
        let mut merged: Vec<PauliTerm> = Vec::new();
        let mut index: HashMap<PauliString, usize> = HashMap::new();
        for t in terms {
            if t.string.support_mask() >> n_qubits != 0 {
                return Err(Error::invalid(format!("term {} acts outside a {n_qubits}-qubit register", t.string)));
            }
            match index.get(&t.string) {
                Some(&i) => merged[i].coefficient += t.coefficient,
                None => {
                    index.insert(t.string, merged.len());
                    merged.push(t);
                }
            }
        }
        Ok(PauliSum { n_qubits, terms: merged })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn is_diagonal(&self) -> bool {
        self.terms.iter().all(PauliTerm::is_diagonal)
    }

    pub fn identity_coefficient(&self) -> f64 {
        self.terms.iter().filter(|t| t.is_identity()).map(|t| t.coefficient).sum()
    }

    /// Terms other than the identity.
    pub fn non_identity(&self) -> impl Iterator<Item = &PauliTerm> {
        self.terms.iter().filter(|t| !t.is_identity())
    }

    /// Diagonal entries of the matrix, or `None` if any term is off-diagonal.
    pub fn diagonal(&self) -> Option<Vec<f64>> {
        if !self.is_diagonal() {
            return None;
        }
        let mut diag = vec![0.0; self.dim()];
        for t in &self.terms {
            for (b, d) in diag.iter_mut().enumerate() {
                *d += t.coefficient * t.string.diagonal_sign(b);
            }
        }
        Some(diag)
    }

    pub fn scaled(&self, factor: f64) -> PauliSum {
        PauliSum { n_qubits: self.n_qubits, terms: self.terms.iter().map(|t| t.scaled(factor)).collect() }
    }

    pub fn add(&self, other: &PauliSum) -> Result<PauliSum> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::invalid("register size mismatch"));
        }
        PauliSum::new(self.n_qubits, self.terms.iter().chain(other.terms.iter()).copied())
    }

    /// Dense `2^n x 2^n` matrix.
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let dim = self.dim();
        let mut m = DMatrix::<Complex64>::zeros(dim, dim);
        for t in &self.terms {
            let x = t.string.x_mask() as usize;
            for b in 0..dim {
                m[(b ^ x, b)] += t.string.phase(b) * t.coefficient;
            }
        }
        m
    }
}
