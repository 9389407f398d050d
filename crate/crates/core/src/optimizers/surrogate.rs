//! Least-squares quadratic surrogates.
//!
//! Points are mapped to `z = (x - center) / scale` and the model is
//! `c + b.z + z.Q.z` with `Q` symmetric. The regression uses the monomials
//! `1, z_i, z_i z_j (i <= j)`; when the fit is underdetermined the solution with
//! the smallest coefficient norm in that basis is returned. Center and scale are
//! chosen by the caller (the trust-region center and radius), never from the
//! data, so that the minimum-norm choice does not move when points are added.

use nalgebra::{DMatrix, DVector};

#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticSurrogate {
    center: Vec<f64>,
    scale: f64,
    constant: f64,
    linear: DVector<f64>,
    quadratic: DMatrix<f64>,
}

/// Number of monomials of degree <= 2 in `d` variables.
pub fn n_features(d: usize) -> usize {
    (d + 1) * (d + 2) / 2
}

fn features(z: &[f64], out: &mut [f64]) {
    let d = z.len();
    out[0] = 1.0;
    out[1..=d].copy_from_slice(z);
    let mut k = d + 1;
    for i in 0..d {
        for j in i..d {
            out[k] = z[i] * z[j];
            k += 1;
        }
    }
}

impl QuadraticSurrogate {
    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    /// `b`, in scaled coordinates.
    pub fn linear(&self) -> &DVector<f64> {
        &self.linear
    }

    /// Symmetric `Q`, in scaled coordinates.
    pub fn quadratic(&self) -> &DMatrix<f64> {
        &self.quadratic
    }

    fn to_local(&self, x: &[f64]) -> DVector<f64> {
        DVector::from_iterator(x.len(), x.iter().zip(&self.center).map(|(a, c)| (a - c) / self.scale))
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let z = self.to_local(x);
        self.constant + self.linear.dot(&z) + z.dot(&(&self.quadratic * &z))
    }

    /// `(b + 2 Q z) / scale`.
    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let z = self.to_local(x);
        let g = (&self.linear + &self.quadratic * &z * 2.0) / self.scale;
        g.as_slice().to_vec()
    }
}

/// Fit centered at the first point with unit scale.
pub fn fit_quadratic(points: &[(Vec<f64>, f64)]) -> QuadraticSurrogate {
    assert!(!points.is_empty(), "quadratic fit needs at least one point");
    let center = points[0].0.clone();
    fit_quadratic_at(points, &center, 1.0)
}

/// Least-squares quadratic in the coordinates `(x - center) / scale`.
pub fn fit_quadratic_at(points: &[(Vec<f64>, f64)], center: &[f64], scale: f64) -> QuadraticSurrogate {
    assert!(!points.is_empty(), "quadratic fit needs at least one point");
    let d = center.len();
    let p = n_features(d);
    let n = points.len();
    let scale = if scale > 0.0 && scale.is_finite() { scale } else { 1.0 };
    let mut a = DMatrix::<f64>::zeros(n, p);
    let mut y = DVector::<f64>::zeros(n);
    let mut row = vec![0.0; p];
    let mut z = vec![0.0; d];
    for (r, (x, v)) in points.iter().enumerate() {
        assert_eq!(x.len(), d, "point dimension mismatch");
        for i in 0..d {
            z[i] = (x[i] - center[i]) / scale;
        }
        features(&z, &mut row);
        for (c, f) in row.iter().enumerate() {
            a[(r, c)] = *f;
        }
        y[r] = *v;
    }
    // Identical values are fitted exactly by a constant; the minimum-norm
    // tie-break could otherwise invent slopes on degenerate designs.
    let coef = if points.iter().all(|p| p.1 == points[0].1) {
        let mut c = DVector::zeros(p);
        c[0] = points[0].1;
        c
    } else {
        min_norm_lstsq(a, y)
    };

    let mut linear = DVector::zeros(d);
    let mut quadratic = DMatrix::zeros(d, d);
    for i in 0..d {
        linear[i] = coef[1 + i];
    }
    let mut k = d + 1;
    for i in 0..d {
        for j in i..d {
            if i == j {
                quadratic[(i, i)] = coef[k];
            } else {
                quadratic[(i, j)] = coef[k] / 2.0;
                quadratic[(j, i)] = coef[k] / 2.0;
            }
            k += 1;
        }
    }
    QuadraticSurrogate { center: center.to_vec(), scale, constant: coef[0], linear, quadratic }
}

const RCOND: f64 = 1e-12;

/// Minimum-norm least-squares solution of `a c = y`.
fn min_norm_lstsq(a: DMatrix<f64>, y: DVector<f64>) -> DVector<f64> {
    let (n, p) = a.shape();
    if n > 2 * p {
        // Tall designs: the normal equations are much cheaper than a full SVD,
        // and the pseudo-inverse of A^T A gives the same minimum-norm solution.
        let gram = a.tr_mul(&a);
        let rhs = a.tr_mul(&y);
        let eig = gram.symmetric_eigen();
        let max = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        // Eigenvalues of the Gram matrix carry roundoff of order eps * max.
        let cut = max * RCOND * 10.0;
        let proj = eig.eigenvectors.tr_mul(&rhs);
        let scaled = DVector::from_iterator(
            p,
            proj.iter().zip(eig.eigenvalues.iter()).map(|(v, l)| if *l > cut { v / l } else { 0.0 }),
        );
        &eig.eigenvectors * scaled
    } else {
        let svd = a.svd(true, true);
        let max = svd.singular_values.iter().fold(0.0f64, |m, v| m.max(*v));
        let eps = max * RCOND * (n.max(p) as f64);
        svd.solve(&y, eps).unwrap_or_else(|_| DVector::zeros(p))
    }
}
