// Copyright 2026 The tomoct Authors
// SPDX-License-Identifier: Apache-2.0

//! Projected-gradient reference solver for
//! `min ‖A x − b‖₂ s.t. Tr H(x) = 1, H(x) ⪰ 0` over 4x4 Hermitian `H`.
//!
//! Shares nothing with the library solver: its own parameter map, its own
//! eigensolver (nalgebra, on the real 8x8 embedding `[[Re, −Im], [Im, Re]]`)
//! and a closed-form projection onto the unit-trace PSD set (eigenvalue
//! projection onto the simplex).

use nalgebra::{DMatrix, DVector, SymmetricEigen};

pub const DIM: usize = 4;
/// Iteration cap; well-conditioned instances stop far earlier.
pub const MAX_ITERATIONS: usize = 2_000_000;
/// Stop once an iteration moves `x` by less than this.
pub const STEP_TOL: f64 = 1e-14;

/// Same isometric convention as the library: diagonals, then
/// upper-triangle `(re, im)` pairs times √2.
fn to_embedding(x: &[f64]) -> DMatrix<f64> {
    let mut re = DMatrix::<f64>::zeros(DIM, DIM);
    let mut im = DMatrix::<f64>::zeros(DIM, DIM);
    for i in 0..DIM {
        re[(i, i)] = x[i];
    }
    let mut k = DIM;
    for i in 0..DIM {
        for j in (i + 1)..DIM {
            let (a, b) = (x[k] / 2f64.sqrt(), x[k + 1] / 2f64.sqrt());
            re[(i, j)] = a;
            re[(j, i)] = a;
            im[(i, j)] = b;
            im[(j, i)] = -b;
            k += 2;
        }
    }
    let mut s = DMatrix::<f64>::zeros(2 * DIM, 2 * DIM);
    s.view_mut((0, 0), (DIM, DIM)).copy_from(&re);
    s.view_mut((DIM, DIM), (DIM, DIM)).copy_from(&re);
    s.view_mut((0, DIM), (DIM, DIM)).copy_from(&(-&im));
    s.view_mut((DIM, 0), (DIM, DIM)).copy_from(&im);
    s
}

fn from_embedding(s: &DMatrix<f64>) -> Vec<f64> {
    let mut x = Vec::with_capacity(DIM * DIM);
    for i in 0..DIM {
        x.push(s[(i, i)]);
    }
    for i in 0..DIM {
        for j in (i + 1)..DIM {
            x.push(s[(i, j)] * 2f64.sqrt());
            x.push(s[(DIM + i, j)] * 2f64.sqrt());
        }
    }
    x
}

/// Euclidean projection of `v` onto `{μ ≥ 0, Σ μ = total}`.
fn simplex(v: &[f64], total: f64) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cumsum = 0.0;
    let mut tau = 0.0;
    for (k, &s) in sorted.iter().enumerate() {
        cumsum += s;
        let t = (cumsum - total) / (k + 1) as f64;
        if s - t > 0.0 {
            tau = t;
        }
    }
    v.iter().map(|&e| (e - tau).max(0.0)).collect()
}

/// Projection onto unit-trace PSD matrices, in parameter space.
pub fn project_spectraplex(x: &[f64]) -> Vec<f64> {
    let s = to_embedding(x);
    let eig = SymmetricEigen::new(s);
    // The embedding doubles each eigenvalue, so the trace target doubles too.
    let mu = simplex(eig.eigenvalues.as_slice(), 2.0);
    let v = &eig.eigenvectors;
    let rebuilt = v * DMatrix::from_diagonal(&DVector::from_vec(mu)) * v.transpose();
    from_embedding(&rebuilt)
}

/// Projected gradient with step `1/L`, `L = λ_max(AᵀA)`, started from the
/// maximally mixed point.
pub fn projected_gradient(a: &DMatrix<f64>, b: &DVector<f64>) -> Vec<f64> {
    let n = DIM * DIM;
    assert_eq!(a.ncols(), n);
    let ata = a.transpose() * a;
    let atb = a.transpose() * b;
    let lipschitz = SymmetricEigen::new(ata.clone()).eigenvalues.max();
    let step = 1.0 / lipschitz;
    let mut x = DVector::from_vec(project_spectraplex(&vec![0.0; n]));
    for _ in 0..MAX_ITERATIONS {
        let grad = &ata * &x - &atb;
        let next = DVector::from_vec(project_spectraplex((&x - grad * step).as_slice()));
        let moved = (&next - &x).norm();
        x = next;
        if moved < STEP_TOL {
            return x.as_slice().to_vec();
        }
    }
    panic!("projected gradient did not settle in {MAX_ITERATIONS} iterations");
}

pub fn objective(a: &DMatrix<f64>, b: &DVector<f64>, x: &[f64]) -> f64 {
    (a * DVector::from_column_slice(x) - b).norm()
}
