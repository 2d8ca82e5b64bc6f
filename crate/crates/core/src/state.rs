// Copyright 2026 The tomoct Authors
// SPDX-License-Identifier: Apache-2.0

//! Density matrices and the named states used by the tomography pipelines.

use std::f64::consts::FRAC_1_SQRT_2;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, ComplexMatrix, C64, I, ONE, ZERO};

/// Largest Hermitian defect a [`DensityMatrix`] may carry before it is rejected.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Largest trace error accepted (and then normalized away) on construction.
pub const TRACE_TOL: f64 = 1e-9;
/// Most negative eigenvalue a valid state may have.
pub const PSD_TOL: f64 = 1e-9;

/// A Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates `m` as a state. Small Hermitian and trace defects (within
    /// [`HERMITIAN_TOL`] and [`TRACE_TOL`]) are removed; eigenvalues below
    /// `-PSD_TOL` are an error.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let m = Self::normalize_checked(m)?;
        let min = eig_hermitian(&m)?.min_value();
        if min < -PSD_TOL {
            return Err(Error::Validity(format!(
                "density matrix has negative eigenvalue {min:.3e}"
            )));
        }
        Ok(Self { matrix: m })
    }

    /// Pure state `|ψ⟩⟨ψ|` from an unnormalized ket.
    pub fn from_ket(ket: &[C64]) -> Result<Self> {
        let norm: f64 = ket.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 1e-300) || !norm.is_finite() {
            return Err(Error::Domain("ket has zero norm".into()));
        }
        check_power_of_two(ket.len())?;
        let psi: Vec<C64> = ket.iter().map(|z| z / norm).collect();
        let mut m = ComplexMatrix::outer(&psi, &psi);
        for i in 0..m.rows() {
            m[(i, i)] = C64::new(m[(i, i)].re, 0.0);
        }
        Ok(Self { matrix: m })
    }

    /// Maximally mixed state `I / d`.
    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        check_power_of_two(dim)?;
        Ok(Self {
            matrix: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64),
        })
    }

    fn normalize_checked(m: ComplexMatrix) -> Result<ComplexMatrix> {
        if !m.is_square() {
            return Err(Error::Dimension(format!(
                "density matrix must be square, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        check_power_of_two(m.rows())?;
        let defect = m.hermitian_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::Validity(format!(
                "density matrix is not Hermitian (defect {defect:.3e})"
            )));
        }
        let m = m.hermitian_part();
        let tr = m.trace().re;
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::Validity(format!("density matrix trace is {tr}")));
        }
        Ok(m.scale_real(1.0 / tr))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn n_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.matrix.frobenius_norm_sqr()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        eig_hermitian(&self.matrix)
            .expect("density matrix is Hermitian")
            .values
    }

    /// `U ρ U†` for unitary `U`.
    pub fn evolve_unitary(&self, u: &ComplexMatrix) -> Result<Self> {
        Self::new(u.conjugate(&self.matrix)?)
    }
}

/// Output of unconstrained linear inversion: Hermitian and unit trace, but
/// possibly with negative eigenvalues.
#[derive(Debug, Clone)]
pub struct HermitianEstimate {
    pub matrix: ComplexMatrix,
    pub min_eigenvalue: f64,
}

impl HermitianEstimate {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let min_eigenvalue = eig_hermitian(&matrix)?.min_value();
        Ok(Self {
            matrix: matrix.hermitian_part(),
            min_eigenvalue,
        })
    }

    pub fn is_physical(&self) -> bool {
        self.min_eigenvalue >= -PSD_TOL
    }
}

fn check_power_of_two(dim: usize) -> Result<()> {
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::Dimension(format!(
            "state dimension must be a power of two ≥ 2, got {dim}"
        )));
    }
    Ok(())
}

/// `Tr(observable · ρ)`.
pub fn expectation(observable: &ComplexMatrix, rho: &DensityMatrix) -> Result<f64> {
    if observable.rows() != rho.dim() || observable.cols() != rho.dim() {
        return Err(Error::Dimension(format!(
            "observable is {}x{}, state is {}x{}",
            observable.rows(),
            observable.cols(),
            rho.dim(),
            rho.dim()
        )));
    }
    if !observable.is_hermitian(HERMITIAN_TOL) {
        return Err(Error::Domain("observable is not Hermitian".into()));
    }
    let value = observable.trace_product(rho.matrix())?;
    if value.im.abs() > 1e-10 * observable.max_abs().max(1.0) {
        return Err(Error::Numeric(format!(
            "expectation has imaginary residue {:.3e}",
            value.im
        )));
    }
    Ok(value.re)
}

fn single_qubit_ket(symbol: char) -> Option<[C64; 2]> {
    let s = C64::new(FRAC_1_SQRT_2, 0.0);
    match symbol {
        '0' => Some([ONE, ZERO]),
        '1' => Some([ZERO, ONE]),
        '+' => Some([s, s]),
        // (|0⟩ + i|1⟩)/√2, the convention of the process-tomography input set.
        '-' => Some([s, I * FRAC_1_SQRT_2]),
        _ => None,
    }
}

fn kron_kets(factors: &[[C64; 2]]) -> Vec<C64> {
    factors.iter().fold(vec![ONE], |acc, f| {
        acc.iter()
            .flat_map(|a| f.iter().map(move |b| a * b))
            .collect()
    })
}

/// Ket for a named state or ket expression.
///
/// Accepted forms:
/// - `B1`..`B4`: Bell states `(|00⟩+|11⟩)`, `(|01⟩+|10⟩)`, `(|00⟩−|11⟩)`, `(|01⟩−|10⟩)`, each /√2;
/// - a product string over `0 1 + -` such as `0-` or `++`, where
///   `|+⟩ = (|0⟩+|1⟩)/√2` and `|−⟩ = (|0⟩+i|1⟩)/√2`;
/// - a superposition of computational kets such as `|00> + i|11>`,
///   `(|01>-|10>)/sqrt2` or `0.6|0> - 0.8i|1>`. Overall scale is ignored.
pub fn parse_ket(spec: &str) -> Result<Vec<C64>> {
    let s: String = spec.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(Error::Parse("empty state specification".into()));
    }
    let bell = |a: usize, b: usize, sign: f64| {
        let mut v = vec![ZERO; 4];
        v[a] = ONE;
        v[b] = C64::new(sign, 0.0);
        v
    };
    match s.as_str() {
        "B1" => return Ok(bell(0, 3, 1.0)),
        "B2" => return Ok(bell(1, 2, 1.0)),
        "B3" => return Ok(bell(0, 3, -1.0)),
        "B4" => return Ok(bell(1, 2, -1.0)),
        _ => {}
    }
    if !s.contains('|') {
        let factors: Option<Vec<[C64; 2]>> = s.chars().map(single_qubit_ket).collect();
        return match factors {
            Some(f) if f.len() <= crate::pauli::MAX_QUBITS => Ok(kron_kets(&f)),
            Some(_) => Err(Error::Domain(format!("too many qubits in \"{spec}\""))),
            None => Err(Error::Parse(format!("unknown state \"{spec}\""))),
        };
    }
    parse_superposition(&s).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{msg} in \"{spec}\"")),
        other => other,
    })
}

fn parse_superposition(s: &str) -> Result<Vec<C64>> {
    // Drop an outer "(...)" together with any trailing normalization factor.
    let body = match (s.starts_with('('), s.rfind(')')) {
        (true, Some(close)) => {
            let tail = &s[close + 1..];
            if !(tail.is_empty() || tail.starts_with('/')) {
                return Err(Error::Parse(format!("unexpected \"{tail}\"")));
            }
            &s[1..close]
        }
        _ => s,
    };

    let mut amplitudes: Vec<(usize, usize, C64)> = Vec::new();
    let mut width = None;
    let mut rest = body;
    while !rest.is_empty() {
        let mut sign = 1.0;
        while let Some(c) = rest.chars().next().filter(|c| *c == '+' || *c == '-') {
            if c == '-' {
                sign = -sign;
            }
            rest = &rest[1..];
        }
        let bar = rest
            .find('|')
            .ok_or_else(|| Error::Parse("expected '|'".into()))?;
        let coeff = parse_coefficient(&rest[..bar])? * sign;
        rest = &rest[bar + 1..];
        let close = rest
            .find(['>', '⟩'])
            .ok_or_else(|| Error::Parse("unterminated ket".into()))?;
        let bits = &rest[..close];
        rest = &rest[close + rest[close..].chars().next().unwrap().len_utf8()..];
        if bits.is_empty() || !bits.chars().all(|c| c == '0' || c == '1') {
            return Err(Error::Parse(format!("ket label \"{bits}\" is not binary")));
        }
        if bits.len() > crate::pauli::MAX_QUBITS {
            return Err(Error::Domain(format!("too many qubits in ket \"{bits}\"")));
        }
        match width {
            None => width = Some(bits.len()),
            Some(w) if w != bits.len() => {
                return Err(Error::Parse("kets have different lengths".into()))
            }
            _ => {}
        }
        let index = usize::from_str_radix(bits, 2).expect("binary");
        amplitudes.push((bits.len(), index, coeff));
    }
    let width = width.ok_or_else(|| Error::Parse("no kets".into()))?;
    let mut ket = vec![ZERO; 1 << width];
    for (_, index, coeff) in amplitudes {
        ket[index] += coeff;
    }
    Ok(ket)
}

fn parse_coefficient(text: &str) -> Result<C64> {
    let t = text.trim_end_matches('*');
    if t.is_empty() {
        return Ok(ONE);
    }
    let (mantissa, imaginary) = match t.strip_suffix('i') {
        Some(m) => (m.trim_end_matches('*'), true),
        None => (t, false),
    };
    let value = if mantissa.is_empty() {
        1.0
    } else {
        mantissa
            .parse::<f64>()
            .map_err(|_| Error::Parse(format!("bad coefficient \"{text}\"")))?
    };
    Ok(if imaginary {
        C64::new(0.0, value)
    } else {
        C64::new(value, 0.0)
    })
}

/// Density matrix for a named state or ket expression (see [`parse_ket`]).
pub fn make_state(spec: &str) -> Result<DensityMatrix> {
    DensityMatrix::from_ket(&parse_ket(spec)?)
}

/// Haar-distributed pure state on `n_qubits`.
pub fn random_pure_state<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> DensityMatrix {
    let dim = 1 << n_qubits;
    let ket: Vec<C64> = (0..dim)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    DensityMatrix::from_ket(&ket).expect("Gaussian ket is nonzero")
}

/// Random full-rank mixed state `G G† / Tr(G G†)` with Ginibre `G`.
pub fn random_mixed_state<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> DensityMatrix {
    let dim = 1 << n_qubits;
    let data = (0..dim * dim)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let g = ComplexMatrix::from_vec(dim, dim, data).expect("square");
    let w = g.matmul(&g.dagger()).expect("square");
    let tr = w.trace().re;
    DensityMatrix::new(w.scale_real(1.0 / tr)).expect("Wishart matrix is a state")
}
