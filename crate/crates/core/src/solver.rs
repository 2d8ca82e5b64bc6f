// Copyright 2026 The tomoct Authors
// SPDX-License-Identifier: Apache-2.0

//! Least squares over a positive semidefinite cone with affine equality
//! constraints:
//!
//! ```text
//! minimize   ‖A x − b‖₂
//! subject to C x = r,  H(x) ⪰ 0
//! ```
//!
//! where `H` is the isometric Hermitian parameterization of [`HermitianParam`].
//! The solver is ADMM on the split `x = z`: the `x` block carries the
//! quadratic objective and the affine constraints (eliminated through an
//! orthonormal null-space basis, so every iterate satisfies `C x = r` to
//! rounding), the `z` block is the PSD cone, handled by eigenvalue clipping.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, ComplexMatrix, C64};

/// Dense real matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Self::from_vec(rows.len(), cols, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// `selfᵀ · y`.
    pub fn tmatvec(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(y.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for (i, &yi) in y.iter().enumerate() {
            if yi == 0.0 {
                continue;
            }
            axpy(yi, self.row(i), &mut out);
        }
        out
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows);
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let src = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                axpy(a, src, &mut out.data[i * rhs.cols..(i + 1) * rhs.cols]);
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }
}

impl Index<(usize, usize)> for RealMatrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RealMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Isometric real parameterization of `dim × dim` Hermitian matrices.
///
/// Parameter order: the `dim` diagonal entries, then each upper-triangle
/// entry in row-major order as a `(re, im)` pair scaled by `√2`, so that the
/// Euclidean norm of the parameters equals the Frobenius norm of the matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HermitianParam {
    dim: usize,
}

impl HermitianParam {
    pub fn new(dim: usize) -> Self {
        assert!(dim >= 1);
        Self { dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of real parameters, `dim²`.
    pub fn len(&self) -> usize {
        self.dim * self.dim
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Parameter indices of the diagonal entries.
    pub fn diagonal_indices(&self) -> std::ops::Range<usize> {
        0..self.dim
    }

    pub fn to_matrix(&self, x: &[f64]) -> ComplexMatrix {
        assert_eq!(x.len(), self.len(), "parameter length");
        let n = self.dim;
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(x[i], 0.0);
        }
        let mut k = n;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for i in 0..n {
            for j in (i + 1)..n {
                let z = C64::new(x[k] * s, x[k + 1] * s);
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
                k += 2;
            }
        }
        m
    }

    /// Parameters of the Hermitian part of `m`.
    pub fn from_matrix(&self, m: &ComplexMatrix) -> Vec<f64> {
        assert_eq!((m.rows(), m.cols()), (self.dim, self.dim), "matrix shape");
        let n = self.dim;
        let mut x = Vec::with_capacity(self.len());
        for i in 0..n {
            x.push(m[(i, i)].re);
        }
        let r2 = std::f64::consts::SQRT_2;
        for i in 0..n {
            for j in (i + 1)..n {
                let z = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
                x.push(z.re * r2);
                x.push(z.im * r2);
            }
        }
        x
    }

    /// Matrix for the unit parameter vector `e_k`.
    pub fn basis_element(&self, k: usize) -> ComplexMatrix {
        let mut e = vec![0.0; self.len()];
        e[k] = 1.0;
        self.to_matrix(&e)
    }

    pub fn basis(&self) -> Vec<ComplexMatrix> {
        (0..self.len()).map(|k| self.basis_element(k)).collect()
    }
}

/// `c · x = r`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineConstraint {
    pub row: Vec<f64>,
    pub rhs: f64,
}

impl AffineConstraint {
    pub fn new(row: Vec<f64>, rhs: f64) -> Self {
        Self { row, rhs }
    }
}

#[derive(Debug, Clone)]
pub struct ConstrainedLsqProblem {
    pub design: RealMatrix,
    pub target: Vec<f64>,
    pub psd_map: HermitianParam,
    pub constraints: Vec<AffineConstraint>,
}

impl ConstrainedLsqProblem {
    pub fn new(
        design: RealMatrix,
        target: Vec<f64>,
        psd_map: HermitianParam,
        constraints: Vec<AffineConstraint>,
    ) -> Result<Self> {
        let p = Self {
            design,
            target,
            psd_map,
            constraints,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn parameter_count(&self) -> usize {
        self.design.cols()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.design.cols();
        if n != self.psd_map.len() {
            return Err(Error::Dimension(format!(
                "design has {n} columns but the PSD map takes {} parameters",
                self.psd_map.len()
            )));
        }
        if self.target.len() != self.design.rows() {
            return Err(Error::Dimension(format!(
                "design has {} rows but target has {} entries",
                self.design.rows(),
                self.target.len()
            )));
        }
        if let Some(c) = self.constraints.iter().find(|c| c.row.len() != n) {
            return Err(Error::Dimension(format!(
                "constraint row has {} entries, expected {n}",
                c.row.len()
            )));
        }
        Ok(())
    }

    /// `‖A x − b‖₂`.
    pub fn objective(&self, x: &[f64]) -> f64 {
        norm2(&sub(&self.design.matvec(x), &self.target))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// ADMM penalty (step) parameter.
    pub penalty: f64,
    pub tol_primal: f64,
    pub tol_dual: f64,
    pub max_iters: usize,
    /// Eigenvalues below this are clipped up to it during PSD projection.
    pub psd_floor: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            penalty: 1.0,
            tol_primal: 1e-8,
            tol_dual: 1e-8,
            max_iters: 100_000,
            psd_floor: 0.0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [self.penalty, self.tol_primal, self.tol_dual];
        if positive.iter().any(|v| !(*v > 0.0) || !v.is_finite()) || self.max_iters == 0 {
            return Err(Error::Parameter(format!(
                "solver penalty, tolerances and iteration cap must be positive: {self:?}"
            )));
        }
        if !(self.psd_floor >= 0.0) {
            return Err(Error::Parameter("psd_floor must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverReport {
    pub solution: Vec<f64>,
    /// Final `‖A x − b‖₂`.
    pub objective: f64,
    pub iterations: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub converged: bool,
    /// Smallest eigenvalue of `H(solution)`.
    pub min_eigenvalue: f64,
}

/// Frobenius-nearest matrix to Hermitian `m` with eigenvalues `≥ floor`.
pub fn project_psd(m: &ComplexMatrix, floor: f64) -> Result<ComplexMatrix> {
    let eig = eig_hermitian(m)?;
    Ok(eig.reconstruct_with(|d| d.max(floor)))
}

/// Affine set `{x : C x = r}` reduced to orthonormal rows, with a cached
/// null-space basis.
#[derive(Debug, Clone)]
pub struct AffineSet {
    dim: usize,
    /// Orthonormal basis of the row space of `C`.
    rows: Vec<Vec<f64>>,
    /// `Q x = s` is equivalent to `C x = r`.
    rhs: Vec<f64>,
}

const RANK_TOL: f64 = 1e-10;

impl AffineSet {
    /// Reduces the constraints by Gram-Schmidt (with reorthogonalization).
    /// Dependent rows are dropped when consistent and reported as
    /// infeasible otherwise.
    pub fn new(dim: usize, constraints: &[AffineConstraint]) -> Result<Self> {
        let mut rows: Vec<Vec<f64>> = Vec::new();
        let mut rhs: Vec<f64> = Vec::new();
        for (idx, c) in constraints.iter().enumerate() {
            if c.row.len() != dim {
                return Err(Error::Dimension(format!(
                    "constraint {idx} has {} entries, expected {dim}",
                    c.row.len()
                )));
            }
            let scale = norm2(&c.row);
            let mut v = c.row.clone();
            let mut r = c.rhs;
            for _ in 0..2 {
                for (q, s) in rows.iter().zip(&rhs) {
                    let proj = dot(q, &v);
                    axpy(-proj, q, &mut v);
                    r -= proj * s;
                }
            }
            let len = norm2(&v);
            if len <= RANK_TOL * scale.max(1.0) {
                if r.abs() > 1e-9 * c.rhs.abs().max(1.0) {
                    return Err(Error::Infeasible(format!(
                        "constraint {idx} is a combination of earlier rows with inconsistent right-hand side (residual {r:.3e})"
                    )));
                }
                continue;
            }
            v.iter_mut().for_each(|e| *e /= len);
            rows.push(v);
            rhs.push(r / len);
        }
        Ok(Self { dim, rows, rhs })
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Euclidean projection of `x` onto the set.
    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim);
        let mut out = x.to_vec();
        for (q, s) in self.rows.iter().zip(&self.rhs) {
            let excess = dot(q, &out) - s;
            axpy(-excess, q, &mut out);
        }
        // A second pass removes the rounding left by the first.
        for (q, s) in self.rows.iter().zip(&self.rhs) {
            let excess = dot(q, &out) - s;
            axpy(-excess, q, &mut out);
        }
        out
    }

    /// Minimum-norm point of the set.
    pub fn min_norm_point(&self) -> Vec<f64> {
        let mut p = vec![0.0; self.dim];
        for (q, s) in self.rows.iter().zip(&self.rhs) {
            axpy(*s, q, &mut p);
        }
        p
    }

    /// Orthonormal basis of the null space of `C`, as columns of a
    /// `dim × (dim − rank)` matrix.
    pub fn null_space(&self) -> RealMatrix {
        let mut basis: Vec<Vec<f64>> = self.rows.clone();
        let mut null: Vec<Vec<f64>> = Vec::with_capacity(self.dim - self.rank());
        for j in 0..self.dim {
            if null.len() == self.dim - self.rank() {
                break;
            }
            let mut v = vec![0.0; self.dim];
            v[j] = 1.0;
            for _ in 0..2 {
                for q in &basis {
                    let proj = dot(q, &v);
                    axpy(-proj, q, &mut v);
                }
            }
            let len = norm2(&v);
            if len > 1e-6 {
                v.iter_mut().for_each(|e| *e /= len);
                basis.push(v.clone());
                null.push(v);
            }
        }
        let k = null.len();
        let mut m = RealMatrix::zeros(self.dim, k);
        for (c, v) in null.iter().enumerate() {
            for (r, &e) in v.iter().enumerate() {
                m[(r, c)] = e;
            }
        }
        m
    }
}

/// Euclidean projection onto `{x : C x = r}`.
pub fn project_affine(x: &[f64], constraints: &[AffineConstraint]) -> Result<Vec<f64>> {
    Ok(AffineSet::new(x.len(), constraints)?.project(x))
}

/// Cholesky factor of a symmetric positive definite matrix.
#[derive(Debug, Clone)]
struct Cholesky {
    n: usize,
    l: Vec<f64>,
}

impl Cholesky {
    fn new(m: &RealMatrix) -> Result<Self> {
        let n = m.rows();
        let mut l = vec![0.0; n * n];
        for j in 0..n {
            let mut d = m[(j, j)] - l[j * n..j * n + j].iter().map(|v| v * v).sum::<f64>();
            if !(d > 0.0) {
                return Err(Error::Numeric(format!(
                    "Cholesky pivot {j} is not positive ({d:.3e})"
                )));
            }
            d = d.sqrt();
            l[j * n + j] = d;
            for i in (j + 1)..n {
                let s = m[(i, j)] - dot(&l[i * n..i * n + j], &l[j * n..j * n + j]);
                l[i * n + j] = s / d;
            }
        }
        Ok(Self { n, l })
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y = b.to_vec();
        for i in 0..n {
            let s = y[i] - dot(&self.l[i * n..i * n + i], &y[..i]);
            y[i] = s / self.l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n {
                s -= self.l[k * n + i] * y[k];
            }
            y[i] = s / self.l[i * n + i];
        }
        y
    }
}

/// Solves the constrained least-squares problem by ADMM.
///
/// Returns `Err` only for malformed or infeasible problems; running out of
/// iterations yields a report with `converged == false`.
pub fn solve(problem: &ConstrainedLsqProblem, config: &SolverConfig) -> Result<SolverReport> {
    problem.validate()?;
    config.validate()?;
    let n = problem.parameter_count();
    let param = problem.psd_map;
    let affine = AffineSet::new(n, &problem.constraints)?;
    let anchor = affine.min_norm_point();

    // x = anchor + N y with y free; the x-update is then an unconstrained
    // ridge problem in y whose normal matrix is factored once.
    let null = affine.null_space();
    let k = null.cols();
    let a = &problem.design;
    let an = a.matmul(&null);
    let mut normal = an.transpose().matmul(&an);
    for i in 0..k {
        normal[(i, i)] += config.penalty;
    }
    let chol = if k > 0 { Some(Cholesky::new(&normal)?) } else { None };
    let resid0 = sub(&problem.target, &a.matvec(&anchor));
    let g0 = an.tmatvec(&resid0);

    let rho = config.penalty;
    let mut x = anchor.clone();
    let mut z = vec![0.0; n];
    let mut u = vec![0.0; n];
    let mut primal = f64::INFINITY;
    let mut dual = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;

    while iterations < config.max_iters {
        iterations += 1;
        if let Some(chol) = &chol {
            let v: Vec<f64> = z.iter().zip(&u).zip(&anchor).map(|((zi, ui), ai)| zi - ui - ai).collect();
            let mut rhs = null.tmatvec(&v);
            rhs.iter_mut().zip(&g0).for_each(|(r, g)| *r = g + rho * *r);
            let y = chol.solve(&rhs);
            x = anchor.clone();
            let ny = null.matvec(&y);
            axpy(1.0, &ny, &mut x);
        }

        let shifted: Vec<f64> = x.iter().zip(&u).map(|(xi, ui)| xi + ui).collect();
        let projected = project_psd(&param.to_matrix(&shifted), config.psd_floor)?;
        let z_new = param.from_matrix(&projected);

        let mut r2 = 0.0;
        let mut s2 = 0.0;
        for i in 0..n {
            let diff = x[i] - z_new[i];
            u[i] += diff;
            r2 += diff * diff;
            let dz = z_new[i] - z[i];
            s2 += dz * dz;
        }
        z = z_new;
        primal = r2.sqrt();
        dual = rho * s2.sqrt();
        if primal <= config.tol_primal && dual <= config.tol_dual {
            converged = true;
            break;
        }
    }

    let solution = finalize(&x, &z, &anchor, &affine, param, config.psd_floor)?;
    let min_eigenvalue = eig_hermitian(&param.to_matrix(&solution))?.min_value();
    Ok(SolverReport {
        objective: problem.objective(&solution),
        solution,
        iterations,
        primal_residual: primal,
        dual_residual: dual,
        converged,
        min_eigenvalue,
    })
}

/// Picks the returned point. The `x` iterate satisfies the affine
/// constraints exactly but may sit a residual's width outside the cone; it
/// is pulled back along the segment to the minimum-norm affine point when
/// that point is strictly inside the cone, which keeps the constraints
/// exact.
fn finalize(
    x: &[f64],
    z: &[f64],
    anchor: &[f64],
    affine: &AffineSet,
    param: HermitianParam,
    floor: f64,
) -> Result<Vec<f64>> {
    if affine.rank() == 0 {
        return Ok(z.to_vec());
    }
    let lam_x = eig_hermitian(&param.to_matrix(x))?.min_value() - floor;
    if lam_x >= 0.0 {
        return Ok(x.to_vec());
    }
    let lam_c = eig_hermitian(&param.to_matrix(anchor))?.min_value() - floor;
    if lam_c <= 0.0 {
        return Ok(x.to_vec());
    }
    let theta = -lam_x / (lam_c - lam_x);
    Ok(x.iter()
        .zip(anchor)
        .map(|(xi, ci)| (1.0 - theta) * xi + theta * ci)
        .collect())
}
