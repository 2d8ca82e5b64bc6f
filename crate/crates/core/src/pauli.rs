// Copyright 2026 The tomoct Authors
// SPDX-License-Identifier: Apache-2.0

//! Unnormalized Pauli product bases.
//!
//! Element `m` of the `n`-qubit basis is the Kronecker product of the
//! single-qubit Paulis named by the base-4 digits of `m`, most significant
//! digit first, with `I→0, X→1, Y→2, Z→3`. So for two qubits element 7 is
//! `X⊗Z`. Elements satisfy `Tr(A_m† A_n) = 2^n δ_mn`.

use crate::error::{Error, Result};
use crate::linalg::{kron_all, ComplexMatrix, C64, I, ONE, ZERO};

pub const MAX_QUBITS: usize = 4;

const LETTERS: [char; 4] = ['I', 'X', 'Y', 'Z'];

pub fn single_qubit_pauli(index: usize) -> ComplexMatrix {
    let (a, b, c, d) = match index {
        0 => (ONE, ZERO, ZERO, ONE),
        1 => (ZERO, ONE, ONE, ZERO),
        2 => (ZERO, -I, I, ZERO),
        3 => (ONE, ZERO, ZERO, -ONE),
        _ => panic!("Pauli index {index} out of range"),
    };
    ComplexMatrix::from_vec(2, 2, vec![a, b, c, d]).expect("2x2")
}

/// Parses a label like `"XZ"` into the Kronecker product it names.
pub fn pauli_from_label(label: &str) -> Result<ComplexMatrix> {
    let digits = label_digits(label)?;
    Ok(kron_all(
        &digits.iter().map(|&d| single_qubit_pauli(d)).collect::<Vec<_>>(),
    ))
}

fn label_digits(label: &str) -> Result<Vec<usize>> {
    if label.is_empty() {
        return Err(Error::Parse("empty Pauli label".into()));
    }
    label
        .chars()
        .map(|ch| {
            LETTERS
                .iter()
                .position(|&l| l == ch.to_ascii_uppercase())
                .ok_or_else(|| Error::Parse(format!("invalid Pauli letter '{ch}' in \"{label}\"")))
        })
        .collect()
}

/// Index of a Pauli label within the canonical ordering.
pub fn label_index(label: &str) -> Result<usize> {
    Ok(label_digits(label)?.iter().fold(0, |acc, d| acc * 4 + d))
}

pub fn index_label(index: usize, n_qubits: usize) -> String {
    (0..n_qubits)
        .rev()
        .map(|k| LETTERS[(index >> (2 * k)) & 3])
        .collect()
}

/// The `4^n` Pauli products for `n` qubits, in canonical order.
#[derive(Debug, Clone)]
pub struct OperatorBasis {
    n_qubits: usize,
    elements: Vec<ComplexMatrix>,
    labels: Vec<String>,
}

impl OperatorBasis {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Hilbert-space dimension `2^n`.
    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn element(&self, m: usize) -> &ComplexMatrix {
        &self.elements[m]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Tag written into process-matrix files, e.g. `pauli-2q-v1`.
    pub fn tag(&self) -> String {
        basis_tag(self.n_qubits)
    }

    /// Coefficients `a_m = Tr(A_m† M) / 2^n` of `M = Σ a_m A_m`.
    pub fn coefficients(&self, m: &ComplexMatrix) -> Result<Vec<C64>> {
        let norm = self.dim() as f64;
        self.elements
            .iter()
            .map(|a| Ok(a.inner(m)? / norm))
            .collect()
    }

    /// `Σ a_m A_m`.
    pub fn combine(&self, coeffs: &[C64]) -> Result<ComplexMatrix> {
        if coeffs.len() != self.len() {
            return Err(Error::Dimension(format!(
                "expected {} coefficients, got {}",
                self.len(),
                coeffs.len()
            )));
        }
        let d = self.dim();
        let mut out = ComplexMatrix::zeros(d, d);
        for (a, &c) in self.elements.iter().zip(coeffs) {
            if c == ZERO {
                continue;
            }
            for (o, &x) in out.as_mut_slice().iter_mut().zip(a.as_slice()) {
                *o += c * x;
            }
        }
        Ok(out)
    }
}

pub fn basis_tag(n_qubits: usize) -> String {
    format!("pauli-{n_qubits}q-v1")
}

/// Canonical Pauli product basis for `1 ≤ n_qubits ≤ 4`.
pub fn pauli_basis(n_qubits: usize) -> Result<OperatorBasis> {
    if !(1..=MAX_QUBITS).contains(&n_qubits) {
        return Err(Error::Domain(format!(
            "n_qubits must be in 1..={MAX_QUBITS}, got {n_qubits}"
        )));
    }
    let count = 1usize << (2 * n_qubits);
    let labels: Vec<String> = (0..count).map(|m| index_label(m, n_qubits)).collect();
    let elements = labels
        .iter()
        .map(|l| pauli_from_label(l))
        .collect::<Result<_>>()?;
    Ok(OperatorBasis {
        n_qubits,
        elements,
        labels,
    })
}
