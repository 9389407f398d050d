mod common;

use common::*;
use nalgebra::DMatrix;
use num_complex::Complex64;
use optbench_core::circuit::{Circuit, Gate, InitialState};
use optbench_core::problems::qaoa::qaoa_state;
use optbench_core::{PauliSum, PauliTerm, StateVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

const TOL: f64 = 1e-10;

#[test]
fn pauli_exponentials_match_matrix_exponential() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n in 1..=3 {
        for _ in 0..40 {
            let s = random_string(n, &mut rng);
            let theta = rng.random_range(-3.0..3.0);
            let psi = random_state(n, &mut rng);
            let want = expm_herm(&dense_string(&s, n), theta) * vector(&psi);
            let mut got = psi.clone();
            got.apply_pauli_exponential(&s, theta);
            assert!(max_diff(got.amplitudes(), want.as_slice()) < TOL, "{s:?} theta={theta}");
        }
    }
}

#[test]
fn pauli_application_matches_dense() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for n in 1..=3 {
        for _ in 0..30 {
            let s = random_string(n, &mut rng);
            let psi = random_state(n, &mut rng);
            let want = dense_string(&s, n) * vector(&psi);
            let mut got = psi.clone();
            got.apply_pauli(&s);
            assert!(max_diff(got.amplitudes(), want.as_slice()) < TOL);
        }
    }
}

#[test]
fn diagonal_phase_matches_matrix_exponential() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in 1..=3 {
        let d = 1 << n;
        let diag: Vec<f64> = (0..d).map(|_| rng.random_range(-2.0..2.0)).collect();
        let gamma = rng.random_range(-2.0..2.0);
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(d, diag.iter().map(|&v| c(v, 0.0))));
        let psi = random_state(n, &mut rng);
        let want = expm_herm(&m, gamma) * vector(&psi);
        let mut got = psi.clone();
        got.apply_diagonal_phase(&diag, gamma).unwrap();
        assert!(max_diff(got.amplitudes(), want.as_slice()) < TOL);
    }
}

#[test]
fn x_layer_matches_matrix_exponential() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for n in 1..=3 {
        let b = PauliSum::new(n, (0..n).map(PauliTerm::x)).unwrap();
        let beta = rng.random_range(-2.0..2.0);
        let psi = random_state(n, &mut rng);
        let want = expm_herm(&dense_sum(&b), beta) * vector(&psi);
        let mut got = psi.clone();
        got.apply_x_rotation_layer(beta);
        assert!(max_diff(got.amplitudes(), want.as_slice()) < TOL);
    }
}

#[test]
fn expectations_match_quadratic_forms() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in 1..=3 {
        for _ in 0..20 {
            let terms: Vec<PauliTerm> = (0..5)
                .map(|_| PauliTerm { coefficient: rng.random_range(-1.0..1.0), string: random_string(n, &mut rng) })
                .collect();
            let h = PauliSum::new(n, terms).unwrap();
            let psi = random_state(n, &mut rng);
            let v = vector(&psi);
            let want = (v.adjoint() * dense_sum(&h) * &v)[(0, 0)].re;
            assert!((psi.expectation(&h).unwrap() - want).abs() < TOL);
        }
    }
}

#[test]
fn to_dense_matches_kronecker_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for n in 1..=3 {
        let terms: Vec<PauliTerm> = (0..6)
            .map(|_| PauliTerm { coefficient: rng.random_range(-1.0..1.0), string: random_string(n, &mut rng) })
            .collect();
        let h = PauliSum::new(n, terms).unwrap();
        let diff = max_abs(&(h.to_dense() - dense_sum(&h)));
        assert!(diff < TOL);
    }
}

#[test]
fn string_products_and_commutation_match_dense() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in 1..=3 {
        for _ in 0..40 {
            let a = random_string(n, &mut rng);
            let b = random_string(n, &mut rng);
            let (phase, prod) = a.mul(&b);
            let want = dense_string(&a, n) * dense_string(&b, n);
            let got = dense_string(&prod, n) * phase;
            assert!(max_abs(&(got - &want)) < TOL);
            let comm = dense_string(&a, n) * dense_string(&b, n) - dense_string(&b, n) * dense_string(&a, n);
            assert_eq!(a.commutes_with(&b), max_abs(&comm) < TOL);
        }
    }
}

#[test]
fn circuit_matches_product_of_exponentials() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let n = 3;
    let h =
        PauliSum::new(n, [PauliTerm::zz(0, 1).scaled(0.7), PauliTerm::zz(1, 2).scaled(-0.4), PauliTerm::z(2)]).unwrap();
    let s1 = random_string(n, &mut rng);
    let gates = vec![
        Gate::Diagonal {
            param: 0,
            scale: 1.0,
            diag: Arc::from(h.diagonal().unwrap()),
            generators: Arc::from(h.non_identity().copied().collect::<Vec<_>>()),
        },
        Gate::Rotation { param: 1, scale: 0.5, string: s1 },
        Gate::XLayer { param: 2, scale: 2.0 },
    ];
    let circ = Circuit::new(n, 3, InitialState::Plus, gates).unwrap();
    let theta = [0.3, -1.1, 0.25];
    let b = PauliSum::new(n, (0..n).map(PauliTerm::x)).unwrap();
    let plus = vector(&StateVector::plus(n).unwrap());
    let want = expm_herm(&dense_sum(&b), 2.0 * theta[2])
        * expm_herm(&dense_string(&s1, n), 0.5 * theta[1])
        * expm_herm(&dense_sum(&h), theta[0])
        * plus;
    let got = circ.prepare(&theta).unwrap();
    assert!(max_diff(got.amplitudes(), want.as_slice()) < TOL);
}

#[test]
fn qaoa_state_matches_dense_layers() {
    let n = 3;
    let h = PauliSum::new(n, [PauliTerm::zz(0, 1), PauliTerm::zz(0, 2).scaled(-1.0), PauliTerm::zz(1, 2)]).unwrap();
    let (g, b) = ([0.4, -0.2], [0.9, 0.3]);
    let mixer = dense_sum(&PauliSum::new(n, (0..n).map(PauliTerm::x)).unwrap());
    let cost = dense_sum(&h);
    let mut want = vector(&StateVector::plus(n).unwrap());
    for k in 0..2 {
        want = expm_herm(&mixer, b[k]) * expm_herm(&cost, g[k]) * want;
    }
    let got = qaoa_state(&h, &g, &b).unwrap();
    assert!(max_diff(got.amplitudes(), want.as_slice()) < TOL);
}

#[test]
fn plus_state_is_uniform() {
    let s = StateVector::plus(3).unwrap();
    let a = Complex64::new(1.0 / 8f64.sqrt(), 0.0);
    assert!(s.amplitudes().iter().all(|x| (x - a).norm() < TOL));
}
