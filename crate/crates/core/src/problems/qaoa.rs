//! QAOA cost Hamiltonians and the alternating-layer ansatz.
//!
//! Parameter layout is `[gamma_1..gamma_p, beta_1..beta_p]`.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::graph::Graph;
use crate::circuit::{Circuit, Gate, InitialState};
use crate::error::{Error, Result};
use crate::pauli::{PauliSum, PauliTerm, MAX_QUBITS};
use crate::statevec::StateVector;

/// `C = sum_edges (I - Z_i Z_j) / 2`.
pub fn maxcut_hamiltonian(g: &Graph) -> Result<PauliSum> {
    let mut terms = vec![PauliTerm::identity(g.edges.len() as f64 / 2.0)];
    terms.extend(g.edges.iter().map(|&(a, b)| PauliTerm::zz(a, b).scaled(-0.5)));
    PauliSum::new(g.n_vertices, terms)
}

/// Couplings `J_ij` in `{-1, +1}` for `i < j`, in lexicographic order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkCouplings {
    pub n: usize,
    pub couplings: Vec<(usize, usize, f64)>,
}

impl SkCouplings {
    pub fn random(n: usize, seed: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid("SK model needs at least two spins"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut couplings = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                let s = if rng.random::<bool>() { 1.0 } else { -1.0 };
                couplings.push((i, j, s));
            }
        }
        Ok(SkCouplings { n, couplings })
    }

    pub fn hamiltonian(&self) -> Result<PauliSum> {
        PauliSum::new(self.n, self.couplings.iter().map(|&(i, j, c)| PauliTerm::zz(i, j).scaled(c)))
    }
}

/// `H = sum_{i<j} J_ij Z_i Z_j` with random signs.
pub fn sk_hamiltonian(n: usize, seed: u64) -> Result<PauliSum> {
    SkCouplings::random(n, seed)?.hamiltonian()
}

/// Exact extrema of a diagonal Hamiltonian by enumerating bitstrings.
/// Returns `(min, max, argmax)`.
pub fn brute_force_diagonal_extrema(h: &PauliSum) -> Result<(f64, f64, usize)> {
    if !h.is_diagonal() {
        return Err(Error::invalid("brute-force extrema require a diagonal Hamiltonian"));
    }
    if h.n_qubits() > MAX_QUBITS {
        return Err(Error::unsupported("register too large to enumerate"));
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut arg = 0;
    for z in 0..(1usize << h.n_qubits()) {
        let v: f64 = h.terms().iter().map(|t| t.coefficient * t.string.diagonal_sign(z)).sum();
        lo = lo.min(v);
        if v > hi {
            hi = v;
            arg = z;
        }
    }
    Ok((lo, hi, arg))
}

/// Alternating `U_C(gamma_k)` / `U_B(beta_k)` layers on `|+>^n`.
pub fn qaoa_circuit(h: &PauliSum, p: usize) -> Result<Circuit> {
    let diag: Arc<[f64]> = h.diagonal().ok_or_else(|| Error::invalid("QAOA cost Hamiltonian must be diagonal"))?.into();
    let generators: Arc<[PauliTerm]> = h.non_identity().copied().collect::<Vec<_>>().into();
    let mut gates = Vec::with_capacity(2 * p);
    for k in 0..p {
        gates.push(Gate::Diagonal { param: k, scale: 1.0, diag: diag.clone(), generators: generators.clone() });
        gates.push(Gate::XLayer { param: p + k, scale: 1.0 });
    }
    Circuit::new(h.n_qubits(), 2 * p, InitialState::Plus, gates)
}

/// `U_B(beta_p) U_C(gamma_p) ... U_B(beta_1) U_C(gamma_1) |+>^n`.
pub fn qaoa_state(h: &PauliSum, gammas: &[f64], betas: &[f64]) -> Result<StateVector> {
    if gammas.len() != betas.len() {
        return Err(Error::invalid("gamma and beta vectors differ in length"));
    }
    let params: Vec<f64> = gammas.iter().chain(betas).copied().collect();
    qaoa_circuit(h, gammas.len())?.prepare(&params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::graph::gen_3regular;

    #[test]
    fn single_edge_cut_values() {
        let g = Graph::new(2, [(0, 1)]).unwrap();
        let c = maxcut_hamiltonian(&g).unwrap();
        // |01>: qubit 0 = 1, qubit 1 = 0 -> index 1
        assert_eq!(StateVector::basis(2, 1).unwrap().expectation(&c).unwrap(), 1.0);
        assert_eq!(StateVector::basis(2, 0).unwrap().expectation(&c).unwrap(), 0.0);
    }

    #[test]
    fn k4_max_cut_is_four() {
        let g = gen_3regular(4, 0).unwrap();
        // brute force over labelings directly from the edge list
        let best =
            (0..16usize).map(|z| g.edges.iter().filter(|&&(a, b)| (z >> a & 1) != (z >> b & 1)).count()).max().unwrap();
        assert_eq!(best, 4);
        let (_, hi, arg) = brute_force_diagonal_extrema(&maxcut_hamiltonian(&g).unwrap()).unwrap();
        assert_eq!(hi, 4.0);
        let cut = g.edges.iter().filter(|&&(a, b)| (arg >> a & 1) != (arg >> b & 1)).count();
        assert_eq!(cut, 4);
    }

    #[test]
    fn sk_term_counts() {
        let h2 = sk_hamiltonian(2, 1).unwrap();
        assert_eq!(h2.terms().len(), 1);
        assert_eq!(h2.terms()[0].coefficient.abs(), 1.0);
        let (lo, hi, _) = brute_force_diagonal_extrema(&h2).unwrap();
        assert_eq!((lo, hi), (-1.0, 1.0));

        let h8 = sk_hamiltonian(8, 7).unwrap();
        assert_eq!(h8.terms().len(), 28);
        assert!(h8.terms().iter().all(|t| t.coefficient.abs() == 1.0));
        assert_eq!(h8, sk_hamiltonian(8, 7).unwrap());
    }

    #[test]
    fn sk_extrema_match_spin_enumeration() {
        let sk = SkCouplings::random(8, 11).unwrap();
        let h = sk.hamiltonian().unwrap();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for z in 0..256usize {
            let spin = |i: usize| if z >> i & 1 == 0 { 1.0 } else { -1.0 };
            let e: f64 = sk.couplings.iter().map(|&(i, j, c)| c * spin(i) * spin(j)).sum();
            lo = lo.min(e);
            hi = hi.max(e);
        }
        let (blo, bhi, _) = brute_force_diagonal_extrema(&h).unwrap();
        assert_eq!((blo, bhi), (lo, hi));
        assert_eq!(crate::statevec::extremal_eigenvalues(&h).unwrap(), (lo, hi));
    }

    #[test]
    fn non_diagonal_rejected() {
        let h = PauliSum::new(1, [PauliTerm::x(0)]).unwrap();
        assert!(brute_force_diagonal_extrema(&h).is_err());
        assert!(qaoa_circuit(&h, 1).is_err());
    }

    #[test]
    fn zero_parameters_give_plus_state() {
        let g = gen_3regular(8, 1).unwrap();
        let c = maxcut_hamiltonian(&g).unwrap();
        let s = qaoa_state(&c, &[0.0; 3], &[0.0; 3]).unwrap();
        assert!((s.expectation(&c).unwrap() - 6.0).abs() < 1e-12);
        assert!(qaoa_state(&c, &[0.0; 2], &[0.0; 3]).is_err());
    }
}
