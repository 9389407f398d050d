//! The 2x2 Fermi-Hubbard plaquette and its Hamiltonian-variational ansatz.
//!
//! Sites are labeled
//!
//! ```text
//! 0 -- 1
//! |    |
//! 2 -- 3
//! ```
//!
//! and spin-orbital `(site, spin)` lives on qubit `2 * site + spin` with
//! spin up = 0, spin down = 1.

use std::f64::consts::FRAC_1_SQRT_2;
use std::sync::Arc;

use crate::circuit::{Circuit, Gate, InitialState};
use crate::error::{Error, Result};
use crate::fermion::{annihilate, apply_creation_combination, create, FermionOperator};
use crate::pauli::{PauliSum, PauliTerm};
use crate::statevec::StateVector;

pub const N_SITES: usize = 4;
pub const N_QUBITS: usize = 8;
pub const HORIZONTAL_EDGES: [(usize, usize); 2] = [(0, 1), (2, 3)];
pub const VERTICAL_EDGES: [(usize, usize); 2] = [(0, 2), (1, 3)];

pub fn mode(site: usize, spin: usize) -> usize {
    2 * site + spin
}

#[derive(Clone, Debug)]
pub struct HubbardTerms {
    pub hamiltonian: PauliSum,
    pub horizontal: PauliSum,
    pub vertical: PauliSum,
    pub interaction: PauliSum,
}

fn hopping(t: f64, edges: &[(usize, usize)]) -> Result<PauliSum> {
    let mut op = FermionOperator::new();
    for &(i, j) in edges {
        for spin in 0..2 {
            op.add_hopping(-t, mode(i, spin), mode(j, spin));
        }
    }
    op.jordan_wigner(N_QUBITS)
}

/// Jordan-Wigner encoded `H = T_h + T_v + V`.
pub fn hubbard_hamiltonian(t: f64, u: f64) -> Result<HubbardTerms> {
    let horizontal = hopping(t, &HORIZONTAL_EDGES)?;
    let vertical = hopping(t, &VERTICAL_EDGES)?;
    let mut v = FermionOperator::new();
    for site in 0..N_SITES {
        v.add_density_density(u, mode(site, 0), mode(site, 1));
    }
    let interaction = v.jordan_wigner(N_QUBITS)?;
    let hamiltonian = horizontal.add(&vertical)?.add(&interaction)?;
    Ok(HubbardTerms { hamiltonian, horizontal, vertical, interaction })
}

/// Single-spin orbitals of the hopping term, as site amplitudes.
/// Energies (t = 1) are -2, 0, 0, 2 in this order.
pub fn hopping_orbitals() -> [[f64; N_SITES]; N_SITES] {
    [
        [0.5, 0.5, 0.5, 0.5],
        [FRAC_1_SQRT_2, 0.0, 0.0, -FRAC_1_SQRT_2],
        [0.0, FRAC_1_SQRT_2, -FRAC_1_SQRT_2, 0.0],
        [0.5, -0.5, -0.5, 0.5],
    ]
}

fn orbital_creation(state: &StateVector, orbital: usize, spin: usize) -> StateVector {
    let coeffs: Vec<(usize, f64)> =
        hopping_orbitals()[orbital].iter().enumerate().map(|(site, &w)| (mode(site, spin), w)).collect();
    apply_creation_combination(state, &coeffs)
}

/// Half-filled singlet ground state of the hopping term:
/// `(b1u^ b2d^ + b2u^ b1d^) / sqrt(2) * b0u^ b0d^ |vac>`.
pub fn hubbard_initial_state() -> StateVector {
    let vac = StateVector::basis(N_QUBITS, 0).expect("8 qubits");
    let core = orbital_creation(&orbital_creation(&vac, 0, 1), 0, 0);
    let a = orbital_creation(&orbital_creation(&core, 2, 1), 1, 0);
    let b = orbital_creation(&orbital_creation(&core, 1, 1), 2, 0);
    let amps = a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| (x + y) * FRAC_1_SQRT_2).collect();
    StateVector::from_amplitudes(N_QUBITS, amps).expect("8 qubits")
}

fn canonical_order(h: &PauliSum) -> Vec<PauliTerm> {
    let mut terms: Vec<PauliTerm> = h.non_identity().copied().collect();
    terms.sort_by_key(|t| (t.string.support(), t.string.x_mask(), t.string.z_mask()));
    terms
}

/// `p` second-order Trotter layers of `exp[-i(th T_h + tv T_v + tU V)]`.
///
/// Each layer applies the half-angle exponentials of every `T_h` term, every
/// `T_v` term (each group sorted by qubit support) and `V`, then the same
/// half-angle exponentials in exactly reversed order. Parameter layout is
/// `[th_1, tv_1, tU_1, th_2, ...]`.
pub fn hubbard_circuit(terms: &HubbardTerms, p: usize) -> Result<Circuit> {
    if p == 0 {
        return Err(Error::invalid("ansatz depth must be at least 1"));
    }
    let th = canonical_order(&terms.horizontal);
    let tv = canonical_order(&terms.vertical);
    let v_diag: Arc<[f64]> =
        terms.interaction.diagonal().ok_or_else(|| Error::invalid("interaction must be diagonal"))?.into();
    let v_gens: Arc<[PauliTerm]> = canonical_order(&terms.interaction).into();
    let mut gates = Vec::new();
    for layer in 0..p {
        let mut forward = Vec::new();
        for t in &th {
            forward.push(Gate::Rotation { param: 3 * layer, scale: 0.5 * t.coefficient, string: t.string });
        }
        for t in &tv {
            forward.push(Gate::Rotation { param: 3 * layer + 1, scale: 0.5 * t.coefficient, string: t.string });
        }
        forward.push(Gate::Diagonal {
            param: 3 * layer + 2,
            scale: 0.5,
            diag: v_diag.clone(),
            generators: v_gens.clone(),
        });
        let backward: Vec<Gate> = forward.iter().rev().cloned().collect();
        gates.extend(forward);
        gates.extend(backward);
    }
    Circuit::new(N_QUBITS, 3 * p, InitialState::State(hubbard_initial_state()), gates)
}

pub fn hubbard_ansatz_state(terms: &HubbardTerms, thetas: &[f64]) -> Result<StateVector> {
    if thetas.is_empty() || !thetas.len().is_multiple_of(3) {
        return Err(Error::invalid(format!("Hubbard ansatz needs a multiple of 3 parameters, got {}", thetas.len())));
    }
    hubbard_circuit(terms, thetas.len() / 3)?.prepare(thetas)
}

/// Adiabatic-ramp parameters for `H(s) = T + (s/A) V`, `s in [0, A]`,
/// `A = 0.1 U p`, using `p` steps of size `A/p` with the interaction
/// coefficient evaluated at each step midpoint.
pub fn hubbard_ramp_guess(p: usize, t: f64, u: f64) -> Vec<f64> {
    let total = 0.1 * u * p as f64;
    let dt = total / p as f64;
    let mut out = Vec::with_capacity(3 * p);
    for k in 1..=p {
        let mid = (k as f64 - 0.5) * dt;
        out.push(dt * t);
        out.push(dt * t);
        out.push(dt * u * mid / total);
    }
    out
}

/// Total particle number `N`.
pub fn number_operator() -> PauliSum {
    let mut op = FermionOperator::new();
    for m in 0..N_QUBITS {
        op.add_term(1.0, &[create(m), annihilate(m)]);
    }
    op.jordan_wigner(N_QUBITS).expect("Hermitian")
}

/// `S_z = (N_up - N_down) / 2`.
pub fn sz_operator() -> PauliSum {
    let mut op = FermionOperator::new();
    for site in 0..N_SITES {
        op.add_term(0.5, &[create(mode(site, 0)), annihilate(mode(site, 0))]);
        op.add_term(-0.5, &[create(mode(site, 1)), annihilate(mode(site, 1))]);
    }
    op.jordan_wigner(N_QUBITS).expect("Hermitian")
}

/// `S^2 = S_- S_+ + S_z^2 + S_z`.
pub fn total_spin_squared() -> PauliSum {
    let mut op = FermionOperator::new();
    for i in 0..N_SITES {
        for j in 0..N_SITES {
            // S_- S_+ = sum_ij a_{i,d}^ a_{i,u} a_{j,u}^ a_{j,d}
            op.add_term(1.0, &[create(mode(i, 1)), annihilate(mode(i, 0)), create(mode(j, 0)), annihilate(mode(j, 1))]);
            // S_z^2 = 1/4 sum_ij (n_iu - n_id)(n_ju - n_jd)
            for (si, sj, sign) in [(0, 0, 1.0), (0, 1, -1.0), (1, 0, -1.0), (1, 1, 1.0)] {
                op.add_term(
                    0.25 * sign,
                    &[create(mode(i, si)), annihilate(mode(i, si)), create(mode(j, sj)), annihilate(mode(j, sj))],
                );
            }
        }
        op.add_term(0.5, &[create(mode(i, 0)), annihilate(mode(i, 0))]);
        op.add_term(-0.5, &[create(mode(i, 1)), annihilate(mode(i, 1))]);
    }
    op.jordan_wigner(N_QUBITS).expect("Hermitian")
}
