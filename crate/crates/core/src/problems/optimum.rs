//! Noiseless local minimization used to locate ansatz optima.
//!
//! BFGS with an Armijo backtracking line search, followed by a polishing
//! phase that accepts steps on gradient-norm decrease. Near a minimum the
//! objective itself stops resolving improvements long before the gradient
//! reaches 1e-8, so the polish phase uses the gradient as its merit function.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct LocalOptimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub grad_norm: f64,
    pub iterations: usize,
}

const MAX_STEP: f64 = 0.25;

fn norm(v: &DVector<f64>) -> f64 {
    v.norm()
}

pub fn local_minimize<F, G>(f: F, grad: G, x0: &[f64], gtol: f64, max_iter: usize) -> Result<LocalOptimum>
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> Vec<f64>,
{
    let n = x0.len();
    let eval_g = |x: &DVector<f64>| DVector::from_vec(grad(x.as_slice()));
    let mut x = DVector::from_column_slice(x0);
    let mut fx = f(x.as_slice());
    let mut g = eval_g(&x);
    let mut h = DMatrix::<f64>::identity(n, n);
    let mut iterations = 0;

    while iterations < max_iter && norm(&g) >= gtol {
        iterations += 1;
        let mut d = -(&h * &g);
        if g.dot(&d) >= 0.0 {
            h = DMatrix::identity(n, n);
            d = -g.clone();
        }
        // Keep steps short so the search settles on the optimum nearest x0.
        let dn = norm(&d);
        if dn > MAX_STEP {
            d *= MAX_STEP / dn;
        }
        let slope = g.dot(&d);
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let xn = &x + &d * step;
            let fn_ = f(xn.as_slice());
            if fn_ <= fx + 1e-4 * step * slope {
                accepted = Some((xn, fn_));
                break;
            }
            step *= 0.5;
        }
        let Some((xn, fn_)) = accepted else { break };
        let gn = eval_g(&xn);
        let s = &xn - &x;
        let y = &gn - &g;
        let sy = s.dot(&y);
        if sy > 1e-300 {
            let rho = 1.0 / sy;
            let eye = DMatrix::<f64>::identity(n, n);
            let left = &eye - &s * y.transpose() * rho;
            let right = &eye - &y * s.transpose() * rho;
            h = &left * &h * &right + &s * s.transpose() * rho;
        }
        x = xn;
        fx = fn_;
        g = gn;
    }

    // Polish on gradient norm.
    let mut polish = 0;
    while norm(&g) >= gtol * 1e-2 && polish < 50 {
        polish += 1;
        let hess = fd_hessian(&eval_g, &x);
        let Some(step) = newton_step(&hess, &g) else { break };
        let gnorm = norm(&g);
        let mut improved = false;
        let mut t = 1.0;
        for _ in 0..30 {
            let xn = &x + &step * t;
            let gn = eval_g(&xn);
            if norm(&gn) < gnorm {
                x = xn;
                g = gn;
                improved = true;
                break;
            }
            t *= 0.5;
        }
        if !improved {
            break;
        }
    }
    let value = f(x.as_slice());
    let grad_norm = norm(&g);
    if grad_norm >= gtol {
        return Err(Error::NotConverged(format!("local minimization stopped with gradient norm {grad_norm:e}")));
    }
    Ok(LocalOptimum { x: x.as_slice().to_vec(), value, grad_norm, iterations: iterations + polish })
}

fn fd_hessian<G: Fn(&DVector<f64>) -> DVector<f64>>(grad: &G, x: &DVector<f64>) -> DMatrix<f64> {
    let n = x.len();
    let h = 1e-4;
    let mut m = DMatrix::zeros(n, n);
    for j in 0..n {
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[j] += h;
        xm[j] -= h;
        let col = (grad(&xp) - grad(&xm)) / (2.0 * h);
        m.set_column(j, &col);
    }
    (&m + m.transpose()) * 0.5
}

/// Solves `H s = -g` through the symmetric eigendecomposition, using |lambda|
/// so that saddle directions are not followed uphill.
fn newton_step(hess: &DMatrix<f64>, g: &DVector<f64>) -> Option<DVector<f64>> {
    let eig = hess.clone().symmetric_eigen();
    let max = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max == 0.0 || !max.is_finite() {
        return None;
    }
    let proj = eig.eigenvectors.transpose() * g;
    let scaled = DVector::from_iterator(
        proj.len(),
        proj.iter().zip(eig.eigenvalues.iter()).map(|(p, l)| {
            let l = l.abs().max(1e-10 * max);
            -p / l
        }),
    );
    Some(&eig.eigenvectors * scaled)
}
