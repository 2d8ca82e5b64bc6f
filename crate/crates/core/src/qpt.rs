// Copyright 2026 The tomoct Authors
// SPDX-License-Identifier: Apache-2.0

//! Process tomography in the χ representation
//! `ε(ρ) = Σ_mn χ_mn A_m ρ A_n†` over the unnormalized Pauli basis.
//!
//! With this basis a trace-preserving channel has `Tr χ = 1` and the
//! identity channel has `χ_00 = 1`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, is_unitary, unvectorize, vectorize, ComplexLu, ComplexMatrix, C64, ONE, ZERO};
use crate::pauli::{basis_tag, pauli_basis, OperatorBasis};
use crate::qst::{self, build_design_matrix, MeasurementScheme};
use crate::rng;
use crate::solver::{self, project_psd, AffineConstraint, ConstrainedLsqProblem, HermitianParam, RealMatrix, SolverConfig, SolverReport};
use crate::state::{make_state, DensityMatrix, HERMITIAN_TOL, PSD_TOL};

/// Tolerance on `‖Σ χ_mn A_n†A_m − I‖_max` for reconstructed channels.
pub const CPTP_TOL: f64 = 1e-7;
/// Relative eigenvalue cutoff used by [`extract_kraus`] by default.
pub const DEFAULT_KRAUS_THRESHOLD: f64 = 1e-6;
/// Exactness demanded of a channel by [`ChannelMode::Strict`].
pub const STRICT_CHANNEL_TOL: f64 = 1e-6;
const NUMERICAL_ZERO: f64 = 1e-12;

/// A χ matrix tagged with the basis it is expressed in.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessMatrix {
    basis: String,
    n_qubits: usize,
    chi: ComplexMatrix,
}

impl ProcessMatrix {
    /// Wraps `chi`, removing a Hermitian defect up to [`HERMITIAN_TOL`].
    pub fn new(basis: &OperatorBasis, chi: ComplexMatrix) -> Result<Self> {
        Self::with_tag(&basis.tag(), chi)
    }

    /// Like [`ProcessMatrix::new`] but from a tag such as `pauli-2q-v1`.
    pub fn with_tag(tag: &str, chi: ComplexMatrix) -> Result<Self> {
        let n_qubits = parse_basis_tag(tag)?;
        let len = 1usize << (2 * n_qubits);
        if chi.rows() != len || chi.cols() != len {
            return Err(Error::Dimension(format!(
                "χ for basis {tag} must be {len}x{len}, got {}x{}",
                chi.rows(),
                chi.cols()
            )));
        }
        let defect = chi.hermitian_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::Validity(format!("χ is not Hermitian (defect {defect:.3e})")));
        }
        Ok(Self {
            basis: tag.to_string(),
            n_qubits,
            chi: chi.hermitian_part(),
        })
    }

    pub fn basis_tag(&self) -> &str {
        &self.basis
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn chi(&self) -> &ComplexMatrix {
        &self.chi
    }

    pub fn into_chi(self) -> ComplexMatrix {
        self.chi
    }

    /// Descending eigenvalues of χ.
    pub fn eigenvalues(&self) -> Vec<f64> {
        eig_hermitian(&self.chi).expect("χ is Hermitian").values
    }

    pub fn min_eigenvalue(&self) -> f64 {
        *self.eigenvalues().last().expect("non-empty")
    }

    pub fn trace(&self) -> f64 {
        self.chi.trace().re
    }

    /// `Σ_mn χ_mn A_n†A_m`, the identity for trace-preserving channels.
    pub fn trace_map(&self, basis: &OperatorBasis) -> Result<ComplexMatrix> {
        self.check_basis(basis)?;
        let d = basis.dim();
        let mut out = ComplexMatrix::zeros(d, d);
        for (m, am) in basis.elements().iter().enumerate() {
            for (n, an) in basis.elements().iter().enumerate() {
                let c = self.chi[(m, n)];
                if c == ZERO {
                    continue;
                }
                let q = an.dagger().matmul(am)?;
                for (o, &x) in out.as_mut_slice().iter_mut().zip(q.as_slice()) {
                    *o += c * x;
                }
            }
        }
        Ok(out)
    }

    /// `‖Σ χ_mn A_n†A_m − I‖_max`.
    pub fn cptp_residual(&self, basis: &OperatorBasis) -> Result<f64> {
        let t = self.trace_map(basis)?;
        Ok(t.max_abs_diff(&ComplexMatrix::identity(basis.dim())))
    }

    /// Errors unless χ is PSD within [`PSD_TOL`] and trace preserving
    /// within `cptp_tol`.
    pub fn check_valid(&self, basis: &OperatorBasis, cptp_tol: f64) -> Result<()> {
        let min = self.min_eigenvalue();
        if min < -PSD_TOL {
            return Err(Error::Validity(format!("χ has negative eigenvalue {min:.3e}")));
        }
        let residual = self.cptp_residual(basis)?;
        if residual > cptp_tol {
            return Err(Error::Validity(format!(
                "χ is not trace preserving (residual {residual:.3e})"
            )));
        }
        Ok(())
    }

    pub fn check_basis(&self, basis: &OperatorBasis) -> Result<()> {
        if basis.tag() != self.basis {
            return Err(Error::Dimension(format!(
                "χ is expressed in {} but basis is {}",
                self.basis,
                basis.tag()
            )));
        }
        Ok(())
    }
}

fn parse_basis_tag(tag: &str) -> Result<usize> {
    (1..=crate::pauli::MAX_QUBITS)
        .find(|&n| basis_tag(n) == tag)
        .ok_or_else(|| Error::Parse(format!("unknown basis tag \"{tag}\"")))
}

/// Operator-sum form `ε(ρ) = Σ E_i ρ E_i†`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    pub operators: Vec<ComplexMatrix>,
    /// Descending; `d_i = ‖E_i‖_F² / 2^n`, the matching χ eigenvalue.
    pub weights: Vec<f64>,
    /// `‖Σ E_i†E_i − I‖_max`.
    pub completeness_residual: f64,
}

impl KrausSet {
    /// Builds a set from raw operators, ordering them by weight.
    pub fn from_operators(operators: Vec<ComplexMatrix>) -> Result<Self> {
        let first = operators
            .first()
            .ok_or_else(|| Error::Domain("empty Kraus set".into()))?;
        let d = first.rows();
        if operators.iter().any(|e| e.rows() != d || e.cols() != d) {
            return Err(Error::Dimension("Kraus operators must be square and equally sized".into()));
        }
        let mut pairs: Vec<(f64, ComplexMatrix)> = operators
            .into_iter()
            .map(|e| (e.frobenius_norm_sqr() / d as f64, e))
            .collect();
        pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
        let (weights, operators): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        let completeness_residual = completeness_residual(&operators)?;
        Ok(Self {
            operators,
            weights,
            completeness_residual,
        })
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.operators.first().map_or(0, |e| e.rows())
    }
}

pub fn completeness_residual(operators: &[ComplexMatrix]) -> Result<f64> {
    let d = operators.first().map_or(0, |e| e.rows());
    let mut sum = ComplexMatrix::zeros(d, d);
    for e in operators {
        sum = &sum + &e.dagger().matmul(e)?;
    }
    Ok(sum.max_abs_diff(&ComplexMatrix::identity(d)))
}

/// Inputs, their (tomographed) outputs and the stacked vectorized outputs.
#[derive(Debug, Clone)]
pub struct ProcessTomographyData {
    pub input_states: Vec<DensityMatrix>,
    pub output_states: Vec<DensityMatrix>,
    pub lambda: Vec<C64>,
}

impl ProcessTomographyData {
    pub fn new(input_states: Vec<DensityMatrix>, output_states: Vec<DensityMatrix>) -> Result<Self> {
        if input_states.len() != output_states.len() {
            return Err(Error::Dimension(format!(
                "{} inputs but {} outputs",
                input_states.len(),
                output_states.len()
            )));
        }
        let lambda = stack_outputs(&output_states);
        Ok(Self {
            input_states,
            output_states,
            lambda,
        })
    }
}

pub fn stack_outputs(outputs: &[DensityMatrix]) -> Vec<C64> {
    outputs.iter().flat_map(|o| vectorize(o.matrix())).collect()
}

const INPUT_LABELS: [&str; 16] = [
    "00", "01", "0+", "0-", "10", "11", "1+", "1-", "+0", "+1", "++", "+-", "-0", "-1", "-+", "--",
];

/// The 16 two-qubit product inputs, built from `|0⟩, |1⟩, |+⟩` and
/// `|−⟩ = (|0⟩ + i|1⟩)/√2`.
pub fn qpt_input_states() -> Vec<DensityMatrix> {
    INPUT_LABELS
        .iter()
        .map(|l| make_state(l).expect("fixed input label"))
        .collect()
}

pub fn qpt_input_labels() -> &'static [&'static str] {
    &INPUT_LABELS
}

/// `β` with row `j·d² + a·d + b`, column `m·4ⁿ + n` and entry
/// `(A_m ρ_j A_n†)_ab`, so `β vec(χ) = vec` of the stacked outputs.
pub fn build_beta(basis: &OperatorBasis, inputs: &[DensityMatrix]) -> Result<ComplexMatrix> {
    let d = basis.dim();
    let len = basis.len();
    if inputs.len() != d * d {
        return Err(Error::Dimension(format!(
            "β must be square: need {} input states for {} qubits, got {}",
            d * d,
            basis.n_qubits(),
            inputs.len()
        )));
    }
    if let Some(bad) = inputs.iter().find(|r| r.dim() != d) {
        return Err(Error::Dimension(format!("input state of dimension {} for basis dimension {d}", bad.dim())));
    }
    let daggers: Vec<ComplexMatrix> = basis.elements().iter().map(|a| a.dagger()).collect();
    let mut beta = ComplexMatrix::zeros(inputs.len() * d * d, len * len);
    for (j, rho) in inputs.iter().enumerate() {
        for (m, am) in basis.elements().iter().enumerate() {
            let left = am.matmul(rho.matrix())?;
            for (n, an_dag) in daggers.iter().enumerate() {
                let block = left.matmul(an_dag)?;
                for (ab, &v) in block.as_slice().iter().enumerate() {
                    beta[(j * d * d + ab, m * len + n)] = v;
                }
            }
        }
    }
    Ok(beta)
}

/// `Σ_mn χ_mn A_m ρ A_n†` without any validity checks.
pub fn chi_action(chi: &ComplexMatrix, basis: &OperatorBasis, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    let len = basis.len();
    if chi.rows() != len || chi.cols() != len {
        return Err(Error::Dimension(format!("χ must be {len}x{len}")));
    }
    let d = basis.dim();
    let mut out = ComplexMatrix::zeros(d, d);
    for (n, an) in basis.elements().iter().enumerate() {
        let mut left = ComplexMatrix::zeros(d, d);
        for (m, am) in basis.elements().iter().enumerate() {
            let c = chi[(m, n)];
            if c == ZERO {
                continue;
            }
            for (o, &x) in left.as_mut_slice().iter_mut().zip(am.as_slice()) {
                *o += c * x;
            }
        }
        out = &out + &left.matmul(rho)?.matmul(&an.dagger())?;
    }
    Ok(out)
}

/// `Σ E_i ρ E_i†` without any validity checks.
pub fn kraus_action(operators: &[ComplexMatrix], rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    let d = rho.rows();
    let mut out = ComplexMatrix::zeros(d, d);
    for e in operators {
        out = &out + &e.conjugate(rho)?;
    }
    Ok(out)
}

/// How strictly [`apply_chi`] and [`apply_kraus`] treat the channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelMode {
    /// The channel must be CPTP within [`STRICT_CHANNEL_TOL`].
    Strict,
    /// Any channel is accepted. The output is made Hermitian, renormalized
    /// to unit trace and, if needed, projected onto the PSD cone. Meant for
    /// rounded published operators.
    Lenient,
}

pub fn apply_chi(chi: &ProcessMatrix, basis: &OperatorBasis, rho: &DensityMatrix, mode: ChannelMode) -> Result<DensityMatrix> {
    chi.check_basis(basis)?;
    if mode == ChannelMode::Strict {
        chi.check_valid(basis, STRICT_CHANNEL_TOL)?;
    }
    finish_output(chi_action(chi.chi(), basis, rho.matrix())?, mode)
}

pub fn apply_kraus(kraus: &KrausSet, rho: &DensityMatrix, mode: ChannelMode) -> Result<DensityMatrix> {
    if kraus.dim() != rho.dim() {
        return Err(Error::Dimension(format!(
            "Kraus operators are {0}x{0}, state is {1}x{1}",
            kraus.dim(),
            rho.dim()
        )));
    }
    if mode == ChannelMode::Strict && kraus.completeness_residual > STRICT_CHANNEL_TOL {
        return Err(Error::Validity(format!(
            "Kraus set is incomplete (residual {:.3e})",
            kraus.completeness_residual
        )));
    }
    finish_output(kraus_action(&kraus.operators, rho.matrix())?, mode)
}

fn finish_output(out: ComplexMatrix, mode: ChannelMode) -> Result<DensityMatrix> {
    match mode {
        ChannelMode::Strict => {
            let tr = out.trace().re;
            if (tr - 1.0).abs() > STRICT_CHANNEL_TOL {
                return Err(Error::Validity(format!("channel output has trace {tr}")));
            }
            DensityMatrix::new(out.hermitian_part().scale_real(1.0 / tr))
        }
        ChannelMode::Lenient => {
            let h = out.hermitian_part();
            let h = if eig_hermitian(&h)?.min_value() < 0.0 { project_psd(&h, 0.0)? } else { h };
            let tr = h.trace().re;
            if !(tr > 0.0) {
                return Err(Error::Validity("channel output vanishes".into()));
            }
            DensityMatrix::new(h.scale_real(1.0 / tr))
        }
    }
}

/// Expansion `χ_mn = Σ_i a_im a_in*` with `a_im = Tr(A_m†E_i)/2^n`.
pub fn chi_from_kraus(operators: &[ComplexMatrix], basis: &OperatorBasis) -> Result<ProcessMatrix> {
    let len = basis.len();
    let mut chi = ComplexMatrix::zeros(len, len);
    for e in operators {
        if e.rows() != basis.dim() || e.cols() != basis.dim() {
            return Err(Error::Dimension(format!(
                "Kraus operator is {}x{}, basis dimension is {}",
                e.rows(),
                e.cols(),
                basis.dim()
            )));
        }
        let a = basis.coefficients(e)?;
        for m in 0..len {
            for n in 0..len {
                chi[(m, n)] += a[m] * a[n].conj();
            }
        }
    }
    ProcessMatrix::new(basis, chi)
}

/// Kraus operators `E_i = √d_i Σ_j U_ji A_j` from the eigendecomposition
/// `χ = U diag(d) U†`, keeping `d_i ≥ threshold · d_max`. Eigenvalues below
/// `1e-12 · d_max` are roundoff and always dropped.
pub fn extract_kraus(chi: &ProcessMatrix, basis: &OperatorBasis, threshold: f64) -> Result<KrausSet> {
    chi.check_basis(basis)?;
    if !(threshold >= 0.0) {
        return Err(Error::Parameter(format!("threshold must be ≥ 0, got {threshold}")));
    }
    let eig = eig_hermitian(chi.chi())?;
    let negative: Vec<f64> = eig.values.iter().copied().filter(|&v| v < -PSD_TOL).collect();
    if !negative.is_empty() {
        let listed: Vec<String> = negative.iter().map(|v| format!("{v:.4e}")).collect();
        return Err(Error::Validity(format!(
            "χ is not positive semidefinite; negative eigenvalues: {}",
            listed.join(", ")
        )));
    }
    let cutoff = threshold.max(NUMERICAL_ZERO) * eig.max_value().max(0.0);
    let mut operators = Vec::new();
    let mut weights = Vec::new();
    for (i, &w) in eig.values.iter().enumerate() {
        if w <= 0.0 || w < cutoff {
            continue;
        }
        let coeffs: Vec<C64> = (0..basis.len()).map(|j| eig.vectors[(j, i)] * w.sqrt()).collect();
        operators.push(basis.combine(&coeffs)?);
        weights.push(w);
    }
    let completeness_residual = completeness_residual(&operators)?;
    Ok(KrausSet {
        operators,
        weights,
        completeness_residual,
    })
}

/// Gates with reference χ matrices.
#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    Identity,
    /// Control on the first qubit.
    Cnot,
    /// Controlled `Rx(π) = −iX`, control on the first qubit.
    CrxPi,
    Custom(ComplexMatrix),
}

impl Gate {
    pub fn unitary(&self) -> ComplexMatrix {
        let mi = C64::new(0.0, -1.0);
        let rows: [[C64; 4]; 4] = match self {
            Gate::Identity => return ComplexMatrix::identity(4),
            Gate::Custom(u) => return u.clone(),
            Gate::Cnot => [
                [ONE, ZERO, ZERO, ZERO],
                [ZERO, ONE, ZERO, ZERO],
                [ZERO, ZERO, ZERO, ONE],
                [ZERO, ZERO, ONE, ZERO],
            ],
            Gate::CrxPi => [
                [ONE, ZERO, ZERO, ZERO],
                [ZERO, ONE, ZERO, ZERO],
                [ZERO, ZERO, ZERO, mi],
                [ZERO, ZERO, mi, ZERO],
            ],
        };
        ComplexMatrix::from_vec(4, 4, rows.concat()).expect("4x4")
    }

    pub fn name(&self) -> &'static str {
        match self {
            Gate::Identity => "identity",
            Gate::Cnot => "cnot",
            Gate::CrxPi => "crx_pi",
            Gate::Custom(_) => "custom",
        }
    }

    pub fn named() -> [Gate; 3] {
        [Gate::Identity, Gate::Cnot, Gate::CrxPi]
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Gate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "identity" | "id" => Ok(Gate::Identity),
            "cnot" => Ok(Gate::Cnot),
            "crx_pi" | "crx" => Ok(Gate::CrxPi),
            _ => Err(Error::Parse(format!("unknown gate \"{s}\" (expected identity, cnot or crx_pi)"))),
        }
    }
}

/// Rank-one χ of the unitary channel `ρ ↦ UρU†`.
pub fn ideal_chi(gate: &Gate) -> Result<ProcessMatrix> {
    let u = gate.unitary();
    if !u.is_square() || !u.rows().is_power_of_two() || u.rows() < 2 {
        return Err(Error::Dimension(format!("gate must be 2^n x 2^n, got {}x{}", u.rows(), u.cols())));
    }
    if !is_unitary(&u, 1e-10) {
        return Err(Error::Domain(format!("{gate} is not unitary")));
    }
    let basis = pauli_basis(u.rows().trailing_zeros() as usize)?;
    chi_from_kraus(&[u], &basis)
}

/// Precomputed linear systems for repeated reconstructions with one input
/// set: β, its LU factors, and the real-split CPTP-constrained problem.
#[derive(Debug, Clone)]
pub struct QptExperiment {
    basis: OperatorBasis,
    inputs: Vec<DensityMatrix>,
    beta: ComplexMatrix,
    lu: ComplexLu,
    cco_design: RealMatrix,
    cptp: Vec<AffineConstraint>,
}

impl QptExperiment {
    /// The standard two-qubit experiment over [`qpt_input_states`].
    pub fn two_qubit() -> Result<Self> {
        Self::new(pauli_basis(2)?, qpt_input_states())
    }

    pub fn new(basis: OperatorBasis, inputs: Vec<DensityMatrix>) -> Result<Self> {
        let beta = build_beta(&basis, &inputs)?;
        let lu = ComplexLu::new(&beta)?;
        if lu.is_singular() {
            return Err(Error::Numeric("β is singular for this input set".into()));
        }
        let param = HermitianParam::new(basis.len());
        let cco_design = real_split_design(&beta, param)?;
        let cptp = cptp_constraints(&basis, param)?;
        Ok(Self {
            basis,
            inputs,
            beta,
            lu,
            cco_design,
            cptp,
        })
    }

    pub fn basis(&self) -> &OperatorBasis {
        &self.basis
    }

    pub fn inputs(&self) -> &[DensityMatrix] {
        &self.inputs
    }

    pub fn beta(&self) -> &ComplexMatrix {
        &self.beta
    }

    /// `χ = β⁻¹λ`, hermitized. Also returns the Hermitian defect removed.
    pub fn standard(&self, lambda: &[C64]) -> Result<(ProcessMatrix, f64)> {
        self.check_lambda(lambda)?;
        let x = self.lu.solve(lambda)?;
        let len = self.basis.len();
        let raw = unvectorize(&x, len, len)?;
        let residual = raw.hermitian_defect();
        Ok((ProcessMatrix::new(&self.basis, raw.hermitian_part())?, residual))
    }

    /// Constrained least-squares problem over the `16ⁿ` real parameters of χ.
    pub fn cco_problem(&self, lambda: &[C64]) -> Result<ConstrainedLsqProblem> {
        self.check_lambda(lambda)?;
        let target = lambda.iter().map(|z| z.re).chain(lambda.iter().map(|z| z.im)).collect();
        ConstrainedLsqProblem::new(
            self.cco_design.clone(),
            target,
            HermitianParam::new(self.basis.len()),
            self.cptp.clone(),
        )
    }

    pub fn cco(&self, lambda: &[C64], config: &SolverConfig) -> Result<(ProcessMatrix, SolverReport)> {
        let problem = self.cco_problem(lambda)?;
        let report = solver::solve(&problem, config)?;
        if !report.converged {
            return Err(Error::NotConverged(Box::new(report)));
        }
        let chi = ProcessMatrix::new(&self.basis, problem.psd_map.to_matrix(&report.solution))?;
        Ok((chi, report))
    }

    /// Exact outputs of `gate` on the inputs.
    pub fn gate_outputs(&self, gate: &Gate) -> Result<Vec<DensityMatrix>> {
        let u = gate.unitary();
        self.inputs.iter().map(|r| r.evolve_unitary(&u)).collect()
    }

    /// Tomographs each exact output with CCO state tomography from noisy
    /// Pauli expectation values. Output `j` draws from stream `j` of `seed`.
    pub fn tomograph_outputs(
        &self,
        exact: &[DensityMatrix],
        noise_std: f64,
        seed: u64,
        config: &SolverConfig,
    ) -> Result<ProcessTomographyData> {
        if exact.len() != self.inputs.len() {
            return Err(Error::Dimension(format!("expected {} outputs, got {}", self.inputs.len(), exact.len())));
        }
        let scheme = MeasurementScheme::pauli_default(&self.basis);
        let design = build_design_matrix(&scheme, &self.basis)?;
        let outputs = exact
            .iter()
            .enumerate()
            .map(|(j, rho)| {
                let mut rng = rng::substream(seed, j as u64);
                let record = qst::simulate_with_rng(rho, &scheme, noise_std, seed, &mut rng)?;
                Ok(qst::reconstruct_cco(&design, &record, &self.basis, config)?.0)
            })
            .collect::<Result<Vec<_>>>()?;
        ProcessTomographyData::new(self.inputs.clone(), outputs)
    }

    /// Simulated data for `gate` with measurement noise `noise_std`.
    pub fn simulate(&self, gate: &Gate, noise_std: f64, seed: u64, config: &SolverConfig) -> Result<ProcessTomographyData> {
        self.tomograph_outputs(&self.gate_outputs(gate)?, noise_std, seed, config)
    }

    fn check_lambda(&self, lambda: &[C64]) -> Result<()> {
        if lambda.len() != self.beta.rows() {
            return Err(Error::Dimension(format!(
                "λ has {} entries, β has {} rows",
                lambda.len(),
                self.beta.rows()
            )));
        }
        Ok(())
    }
}

/// Columns `β vec(G_i)` for the Hermitian parameter basis `G_i`, with the
/// real parts stacked above the imaginary parts.
fn real_split_design(beta: &ComplexMatrix, param: HermitianParam) -> Result<RealMatrix> {
    let rows = beta.rows();
    let mut design = RealMatrix::zeros(2 * rows, param.len());
    for (i, g) in param.basis().iter().enumerate() {
        let nonzero: Vec<(usize, C64)> = g
            .as_slice()
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != ZERO)
            .map(|(k, v)| (k, *v))
            .collect();
        for r in 0..rows {
            let row = beta.row(r);
            let v: C64 = nonzero.iter().map(|&(k, c)| row[k] * c).sum();
            design[(r, i)] = v.re;
            design[(rows + r, i)] = v.im;
        }
    }
    Ok(design)
}

/// Real rows of `Σ χ_mn A_n†A_m = I`: the real part of each entry on and
/// above the diagonal, then the imaginary part of each entry above it.
fn cptp_constraints(basis: &OperatorBasis, param: HermitianParam) -> Result<Vec<AffineConstraint>> {
    let d = basis.dim();
    let images: Vec<ComplexMatrix> = param
        .basis()
        .iter()
        .map(|g| ProcessMatrix::new(basis, g.clone())?.trace_map(basis))
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for a in 0..d {
        for b in a..d {
            let re: Vec<f64> = images.iter().map(|t| t[(a, b)].re).collect();
            rows.push(AffineConstraint::new(re, if a == b { 1.0 } else { 0.0 }));
        }
    }
    for a in 0..d {
        for b in (a + 1)..d {
            let im: Vec<f64> = images.iter().map(|t| t[(a, b)].im).collect();
            rows.push(AffineConstraint::new(im, 0.0));
        }
    }
    Ok(rows)
}

/// Standard linear-inversion χ, hermitized; returns the removed defect too.
pub fn reconstruct_standard_chi(
    beta: &ComplexMatrix,
    lambda: &[C64],
    basis: &OperatorBasis,
) -> Result<(ProcessMatrix, f64)> {
    let lu = ComplexLu::new(beta)?;
    if lu.is_singular() {
        return Err(Error::Numeric("β is singular".into()));
    }
    if lambda.len() != beta.rows() {
        return Err(Error::Dimension(format!("λ has {} entries, β has {} rows", lambda.len(), beta.rows())));
    }
    let x = lu.solve(lambda)?;
    let raw = unvectorize(&x, basis.len(), basis.len())?;
    let residual = raw.hermitian_defect();
    Ok((ProcessMatrix::new(basis, raw.hermitian_part())?, residual))
}

/// CPTP-constrained least-squares χ.
pub fn reconstruct_cco_chi(
    beta: &ComplexMatrix,
    lambda: &[C64],
    basis: &OperatorBasis,
    config: &SolverConfig,
) -> Result<(ProcessMatrix, SolverReport)> {
    let param = HermitianParam::new(basis.len());
    let problem = ConstrainedLsqProblem::new(
        real_split_design(beta, param)?,
        lambda.iter().map(|z| z.re).chain(lambda.iter().map(|z| z.im)).collect(),
        param,
        cptp_constraints(basis, param)?,
    )?;
    let report = solver::solve(&problem, config)?;
    if !report.converged {
        return Err(Error::NotConverged(Box::new(report)));
    }
    let chi = ProcessMatrix::new(basis, param.to_matrix(&report.solution))?;
    Ok((chi, report))
}
