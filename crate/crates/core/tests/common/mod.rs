//! Dense-matrix oracles shared by the integration tests. Everything here is
//! built from explicit Kronecker products, independent of the crate's own
//! bitmask arithmetic.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use optbench_core::{Pauli, PauliString, PauliSum, StateVector};
use rand::Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn single(p: Option<Pauli>) -> DMatrix<Complex64> {
    let (o, z) = (c(1.0, 0.0), c(0.0, 0.0));
    match p {
        None => DMatrix::from_row_slice(2, 2, &[o, z, z, o]),
        Some(Pauli::X) => DMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        Some(Pauli::Y) => DMatrix::from_row_slice(2, 2, &[z, c(0.0, -1.0), c(0.0, 1.0), z]),
        Some(Pauli::Z) => DMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
    }
}

/// Qubit 0 is the least significant bit, so it is the rightmost factor.
pub fn dense_string(s: &PauliString, n: usize) -> DMatrix<Complex64> {
    let mut m = DMatrix::from_element(1, 1, c(1.0, 0.0));
    for q in (0..n).rev() {
        m = m.kronecker(&single(s.get(q)));
    }
    m
}

pub fn dense_sum(h: &PauliSum) -> DMatrix<Complex64> {
    let d = 1 << h.n_qubits();
    let mut m = DMatrix::zeros(d, d);
    for t in h.terms() {
        m += dense_string(&t.string, h.n_qubits()) * c(t.coefficient, 0.0);
    }
    m
}

/// `exp(-i theta A)` for Hermitian `A`.
pub fn expm_herm(a: &DMatrix<Complex64>, theta: f64) -> DMatrix<Complex64> {
    (a * c(0.0, -theta)).exp()
}

pub fn vector(s: &StateVector) -> DVector<Complex64> {
    DVector::from_column_slice(s.amplitudes())
}

pub fn random_state<R: Rng>(n: usize, rng: &mut R) -> StateVector {
    let amps: Vec<Complex64> = (0..1 << n).map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
    let mut s = StateVector::from_amplitudes(n, amps).unwrap();
    s.normalize();
    s
}

pub fn random_string<R: Rng>(n: usize, rng: &mut R) -> PauliString {
    let ops: Vec<(usize, Pauli)> = (0..n)
        .filter_map(|q| match rng.random_range(0..4) {
            0 => None,
            1 => Some((q, Pauli::X)),
            2 => Some((q, Pauli::Y)),
            _ => Some((q, Pauli::Z)),
        })
        .collect();
    PauliString::new(&ops).unwrap()
}

pub fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn central_difference(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    (0..x.len())
        .map(|i| {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[i] += h;
            xm[i] -= h;
            (f(&xp) - f(&xm)) / (2.0 * h)
        })
        .collect()
}

pub fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
