//! Parameterized circuits built from commuting-generator gates.
//!
//! Every gate is `exp(-i theta_j * scale * G)` where `G` is a sum of mutually
//! commuting Pauli strings. That structure is what the parameter-shift rule
//! needs: each string of each gate is a separate generator term, and shifting
//! one term's rotation angle is the same as inserting an extra rotation about
//! that string right after the gate.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::pauli::{PauliString, PauliTerm};
use crate::statevec::StateVector;

#[derive(Clone, Debug)]
pub enum Gate {
    /// `exp(-i theta * scale * D)` for a diagonal operator `D` given by its
    /// diagonal; `generators` is the Pauli expansion of `D` without identity.
    Diagonal { param: usize, scale: f64, diag: Arc<[f64]>, generators: Arc<[PauliTerm]> },
    /// `exp(-i theta * scale * sum_q X_q)`.
    XLayer { param: usize, scale: f64 },
    /// `exp(-i theta * scale * P)`.
    Rotation { param: usize, scale: f64, string: PauliString },
}

impl Gate {
    pub fn param(&self) -> usize {
        match self {
            Gate::Diagonal { param, .. } | Gate::XLayer { param, .. } | Gate::Rotation { param, .. } => *param,
        }
    }
}

#[derive(Clone, Debug)]
pub enum InitialState {
    Plus,
    State(StateVector),
}

/// One Pauli rotation inside a gate whose angle depends on a parameter:
/// the rotation is `exp(-i phi P)` with `d phi / d theta = coefficient`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeneratorTerm {
    pub param: usize,
    pub gate: usize,
    pub string: PauliString,
    pub coefficient: f64,
}

/// An extra rotation `exp(-i angle P)` inserted right after `gate`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Shift {
    pub gate: usize,
    pub string: PauliString,
    pub angle: f64,
}

#[derive(Clone, Debug)]
pub struct Circuit {
    n_qubits: usize,
    n_params: usize,
    initial: InitialState,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize, n_params: usize, initial: InitialState, gates: Vec<Gate>) -> Result<Self> {
        if let InitialState::State(s) = &initial {
            if s.n_qubits() != n_qubits {
                return Err(Error::invalid("initial state size does not match circuit"));
            }
        }
        for g in &gates {
            if g.param() >= n_params {
                return Err(Error::invalid(format!("gate refers to parameter {}", g.param())));
            }
            if let Gate::Diagonal { diag, .. } = g {
                if diag.len() != 1 << n_qubits {
                    return Err(Error::invalid("diagonal gate has wrong length"));
                }
            }
        }
        Ok(Circuit { n_qubits, n_params, initial, gates })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn initial_state(&self) -> StateVector {
        match &self.initial {
            InitialState::Plus => StateVector::plus(self.n_qubits).expect("validated register"),
            InitialState::State(s) => s.clone(),
        }
    }

    pub fn prepare(&self, params: &[f64]) -> Result<StateVector> {
        self.prepare_shifted(params, None)
    }

    pub fn prepare_shifted(&self, params: &[f64], shift: Option<&Shift>) -> Result<StateVector> {
        if params.len() != self.n_params {
            return Err(Error::invalid(format!("expected {} parameters, got {}", self.n_params, params.len())));
        }
        let mut state = self.initial_state();
        for (i, gate) in self.gates.iter().enumerate() {
            match gate {
                Gate::Diagonal { param, scale, diag, .. } => {
                    state.apply_diagonal_phase(diag, params[*param] * scale)?;
                }
                Gate::XLayer { param, scale } => state.apply_x_rotation_layer(params[*param] * scale),
                Gate::Rotation { param, scale, string } => {
                    state.apply_pauli_exponential(string, params[*param] * scale)
                }
            }
            if let Some(s) = shift {
                if s.gate == i {
                    state.apply_pauli_exponential(&s.string, s.angle);
                }
            }
        }
        Ok(state)
    }

    /// All generator terms, grouped by gate order.
    pub fn generator_terms(&self) -> Vec<GeneratorTerm> {
        let mut out = Vec::new();
        for (i, gate) in self.gates.iter().enumerate() {
            match gate {
                Gate::Diagonal { param, scale, generators, .. } => {
                    for t in generators.iter() {
                        out.push(GeneratorTerm {
                            param: *param,
                            gate: i,
                            string: t.string,
                            coefficient: t.coefficient * scale,
                        });
                    }
                }
                Gate::XLayer { param, scale } => {
                    for q in 0..self.n_qubits {
                        out.push(GeneratorTerm {
                            param: *param,
                            gate: i,
                            string: PauliTerm::x(q).string,
                            coefficient: *scale,
                        });
                    }
                }
                Gate::Rotation { param, scale, string } => {
                    out.push(GeneratorTerm { param: *param, gate: i, string: *string, coefficient: *scale })
                }
            }
        }
        out
    }

    /// Number of generator terms attached to each parameter.
    pub fn generator_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_params];
        for t in self.generator_terms() {
            counts[t.param] += 1;
        }
        counts
    }
}

/// The two shifted evaluations of one generator term and its weight.
///
/// For a rotation `exp(-i phi P)` the shift rule reads
/// `d f / d phi = f(phi + pi/4) - f(phi - pi/4)`, so the parameter derivative
/// contribution is `coefficient * (f(+) - f(-))`.
pub fn shift_pair(term: &GeneratorTerm) -> (Shift, Shift) {
    let q = std::f64::consts::FRAC_PI_4;
    (
        Shift { gate: term.gate, string: term.string, angle: q },
        Shift { gate: term.gate, string: term.string, angle: -q },
    )
}
