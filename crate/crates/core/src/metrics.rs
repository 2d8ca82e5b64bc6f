// Copyright 2026 The tomoct Authors
// SPDX-License-Identifier: Apache-2.0

//! Figures of merit.
//!
//! "Fidelity" here is the normalized Hilbert-Schmidt overlap
//! `|Tr(A B†)| / √(Tr(A†A) Tr(B†B))`, not the Uhlmann fidelity. It is
//! symmetric, scale invariant and equals 1 exactly for proportional
//! arguments.

use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, ComplexMatrix};
use crate::pauli::OperatorBasis;
use crate::qpt::{chi_action, ProcessMatrix};
use crate::state::DensityMatrix;

/// Normalized Hilbert-Schmidt overlap of two matrices, clamped to `[0, 1]`.
pub fn overlap_fidelity(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    a.check_same_shape(b)?;
    let na = a.frobenius_norm();
    let nb = b.frobenius_norm();
    if !(na > 0.0) || !(nb > 0.0) {
        return Err(Error::Domain("fidelity of a zero matrix is undefined".into()));
    }
    // Tr(A B†) = Σ a_ij conj(b_ij).
    let tr: crate::linalg::C64 = a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| x * y.conj()).sum();
    Ok((tr.norm() / (na * nb)).clamp(0.0, 1.0))
}

/// State fidelity in the overlap sense above.
pub fn state_fidelity(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    overlap_fidelity(a, b)
}

/// Overlap fidelity of two χ matrices expressed in the same basis.
pub fn process_fidelity(a: &ProcessMatrix, b: &ProcessMatrix) -> Result<f64> {
    if a.basis_tag() != b.basis_tag() {
        return Err(Error::Dimension(format!(
            "cannot compare χ in {} with χ in {}",
            a.basis_tag(),
            b.basis_tag()
        )));
    }
    overlap_fidelity(a.chi(), b.chi())
}

/// `Σ_ij |a_ij − b_ij|² / d²`.
pub fn state_deviation(predicted: &ComplexMatrix, ideal: &ComplexMatrix) -> Result<f64> {
    predicted.check_same_shape(ideal)?;
    let d = predicted.rows() as f64;
    let sum: f64 = predicted
        .as_slice()
        .iter()
        .zip(ideal.as_slice())
        .map(|(p, i)| (p - i).norm_sqr())
        .sum();
    Ok(sum / (d * d))
}

/// Mean of [`state_deviation`] between `ε_χ(ρ_j)` and `U ρ_j U†` over the
/// inputs. The χ action is applied as is, so indefinite estimates from
/// linear inversion can be scored too.
pub fn average_state_deviation(
    chi: &ProcessMatrix,
    basis: &OperatorBasis,
    unitary: &ComplexMatrix,
    inputs: &[DensityMatrix],
) -> Result<f64> {
    chi.check_basis(basis)?;
    if inputs.is_empty() {
        return Err(Error::Domain("no input states".into()));
    }
    let mut total = 0.0;
    for rho in inputs {
        let predicted = chi_action(chi.chi(), basis, rho.matrix())?;
        let ideal = unitary.conjugate(rho.matrix())?;
        total += state_deviation(&predicted, &ideal)?;
    }
    Ok(total / inputs.len() as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenvalueReport {
    /// Descending.
    pub values: Vec<f64>,
    pub min: f64,
}

pub fn eigenvalue_report(m: &ComplexMatrix) -> Result<EigenvalueReport> {
    let values = eig_hermitian(m)?.values;
    let min = *values.last().ok_or_else(|| Error::Domain("empty matrix".into()))?;
    Ok(EigenvalueReport { values, min })
}
