// Copyright 2026 The tomoct Authors
// SPDX-License-Identifier: Apache-2.0

//! Markovian open-system dynamics
//! `dρ/dt = −i[H, ρ] + Σ_k (L_k ρ L_k† − ½{L_k†L_k, ρ})`,
//! a two-qubit NMR relaxation model, and χ snapshots of the resulting
//! channel.
//!
//! Integration is classical RK4 with a fixed step. Because the generator is
//! linear, one RK4 step is the fixed matrix `P = Σ_{k≤4} (hℒ)^k / k!` acting
//! on `vec(ρ)`, and `N` steps are `P^N`. [`evolve`] forms that power by
//! repeated squaring, which gives the same map as stepping `N` times in
//! `O(log N)` products; [`rk4_step`] is the explicit per-step form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, kron_all, unitary_propagator, unvectorize, vectorize, ComplexMatrix, I, ONE, ZERO};
use crate::metrics::state_fidelity;
use crate::pauli::single_qubit_pauli;
use crate::qpt::{apply_chi, ideal_chi, ChannelMode, Gate, ProcessMatrix, QptExperiment};
use crate::solver::{project_psd, SolverConfig};
use crate::state::{make_state, DensityMatrix};

/// Default integration step, seconds.
pub const DEFAULT_DT: f64 = 1e-5;
/// Negative eigenvalues down to this are clipped; below it the step is
/// reported as too coarse.
pub const POSITIVITY_BAND: f64 = 1e-7;

/// Hamiltonian (rad/s) plus jump operators `L_k = √rate · J_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct LindbladModel {
    hamiltonian: ComplexMatrix,
    lindblad_ops: Vec<ComplexMatrix>,
}

impl LindbladModel {
    pub fn new(hamiltonian: ComplexMatrix, lindblad_ops: Vec<ComplexMatrix>) -> Result<Self> {
        if !hamiltonian.is_square() {
            return Err(Error::Dimension("Hamiltonian must be square".into()));
        }
        let d = hamiltonian.rows();
        if let Some(l) = lindblad_ops.iter().find(|l| l.rows() != d || l.cols() != d) {
            return Err(Error::Dimension(format!(
                "Lindblad operator is {}x{}, Hamiltonian is {d}x{d}",
                l.rows(),
                l.cols()
            )));
        }
        let scale = hamiltonian.max_abs().max(1.0);
        if hamiltonian.hermitian_defect() > 1e-12 * scale {
            return Err(Error::Domain("Hamiltonian is not Hermitian".into()));
        }
        Ok(Self {
            hamiltonian: hamiltonian.hermitian_part(),
            lindblad_ops,
        })
    }

    pub fn hamiltonian(&self) -> &ComplexMatrix {
        &self.hamiltonian
    }

    pub fn lindblad_ops(&self) -> &[ComplexMatrix] {
        &self.lindblad_ops
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.rows()
    }

    /// Generator `ℒ` acting on row-major `vec(ρ)`, using
    /// `vec(AXB) = (A ⊗ Bᵀ) vec(X)`.
    pub fn superoperator(&self) -> ComplexMatrix {
        let d = self.dim();
        let id = ComplexMatrix::identity(d);
        let mut gen = (&self.hamiltonian.kron(&id) - &id.kron(&self.hamiltonian.transpose())).scale(-I);
        for l in &self.lindblad_ops {
            let ldl = l.dagger().matmul(l).expect("square");
            gen = &gen + &l.kron(&l.conj());
            gen = &gen - &ldl.kron(&id).scale_real(0.5);
            gen = &gen - &id.kron(&ldl.transpose()).scale_real(0.5);
        }
        gen
    }
}

/// Relaxation parameters of a two-qubit NMR sample. Times in seconds,
/// coupling in Hz; `p` is the excited-state population at equilibrium.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NmrNoiseParams {
    pub t1: [f64; 2],
    pub t2: [f64; 2],
    pub j_hz: f64,
    pub p: f64,
}

impl Default for NmrNoiseParams {
    /// ¹H and ¹³C of a two-spin molecule, with `J` from `1/(2J) = 2.33 ms`
    /// and the high-temperature equilibrium `p = ½`.
    fn default() -> Self {
        Self {
            t1: [8.0, 16.5],
            t2: [2.9, 0.3],
            j_hz: 214.59,
            p: 0.5,
        }
    }
}

impl NmrNoiseParams {
    /// Pure-dephasing rate `1/T2 − 1/(2T1)` of each qubit.
    pub fn dephasing_rates(&self) -> [f64; 2] {
        [0, 1].map(|q| 1.0 / self.t2[q] - 1.0 / (2.0 * self.t1[q]))
    }

    pub fn validate(&self) -> Result<()> {
        let times = self.t1.iter().chain(&self.t2);
        if times.clone().any(|t| !(*t > 0.0) || !t.is_finite()) {
            return Err(Error::Parameter(format!(
                "relaxation times must be positive and finite: T1 {:?}, T2 {:?}",
                self.t1, self.t2
            )));
        }
        if !self.j_hz.is_finite() {
            return Err(Error::Parameter(format!("J must be finite, got {}", self.j_hz)));
        }
        if !(0.0..=0.5).contains(&self.p) {
            return Err(Error::Parameter(format!("p must lie in [0, 0.5], got {}", self.p)));
        }
        for (q, rate) in self.dephasing_rates().iter().enumerate() {
            if *rate < 0.0 {
                return Err(Error::Parameter(format!(
                    "qubit {q}: T2 = {} exceeds 2·T1 = {} (negative dephasing rate)",
                    self.t2[q],
                    2.0 * self.t1[q]
                )));
            }
        }
        Ok(())
    }
}

/// `op` acting on qubit `qubit` (0 = leftmost factor) of `n_qubits`.
pub fn embed(op: &ComplexMatrix, qubit: usize, n_qubits: usize) -> ComplexMatrix {
    let factors: Vec<ComplexMatrix> = (0..n_qubits)
        .map(|k| if k == qubit { op.clone() } else { ComplexMatrix::identity(2) })
        .collect();
    kron_all(&factors)
}

/// `|0⟩⟨1|`, taking `|1⟩` as the excited level.
pub fn sigma_minus() -> ComplexMatrix {
    ComplexMatrix::from_vec(2, 2, vec![ZERO, ONE, ZERO, ZERO]).expect("2x2")
}

pub fn sigma_plus() -> ComplexMatrix {
    sigma_minus().dagger()
}

/// `H = 2πJ (Z⊗Z)/4` with per-qubit generalized amplitude damping
/// (`√((1−p)/T1) σ−`, `√(p/T1) σ+`) and phase damping `√(γ_φ/2) Z`.
/// Operators with zero rate are left out.
pub fn nmr_noise_model(params: &NmrNoiseParams) -> Result<LindbladModel> {
    params.validate()?;
    let z = single_qubit_pauli(3);
    let h = z.kron(&z).scale_real(2.0 * std::f64::consts::PI * params.j_hz / 4.0);
    let mut ops = Vec::new();
    for (q, gamma_phi) in params.dephasing_rates().into_iter().enumerate() {
        let t1 = params.t1[q];
        let terms = [
            ((1.0 - params.p) / t1, sigma_minus()),
            (params.p / t1, sigma_plus()),
            (gamma_phi / 2.0, z.clone()),
        ];
        for (rate, jump) in terms {
            if rate > 0.0 {
                ops.push(embed(&jump.scale_real(rate.sqrt()), q, 2));
            }
        }
    }
    LindbladModel::new(h, ops)
}

fn check_shape(model: &LindbladModel, rho: &ComplexMatrix) -> Result<()> {
    if rho.rows() != model.dim() || rho.cols() != model.dim() {
        return Err(Error::Dimension(format!(
            "state is {}x{}, model is {d}x{d}",
            rho.rows(),
            rho.cols(),
            d = model.dim()
        )));
    }
    Ok(())
}

/// `−i[H, ρ] + ½ Σ_k ([L_k ρ, L_k†] + [L_k, ρ L_k†])`.
pub fn lindblad_rhs(model: &LindbladModel, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_shape(model, rho)?;
    let h = &model.hamiltonian;
    let mut out = (&(h * rho) - &(rho * h)).scale(-I);
    for l in &model.lindblad_ops {
        let ld = l.dagger();
        let l_rho = l * rho;
        let rho_ld = rho * &ld;
        let first = &(&l_rho * &ld) - &(&ld * &l_rho);
        let second = &(l * &rho_ld) - &(&rho_ld * l);
        out = &out + &(&first + &second).scale_real(0.5);
    }
    Ok(out)
}

/// One classical Runge-Kutta step of length `h`.
pub fn rk4_step(model: &LindbladModel, rho: &ComplexMatrix, h: f64) -> Result<ComplexMatrix> {
    let k1 = lindblad_rhs(model, rho)?;
    let k2 = lindblad_rhs(model, &(rho + &k1.scale_real(h / 2.0)))?;
    let k3 = lindblad_rhs(model, &(rho + &k2.scale_real(h / 2.0)))?;
    let k4 = lindblad_rhs(model, &(rho + &k3.scale_real(h)))?;
    let incr = &(&k1 + &k2.scale_real(2.0)) + &(&k3.scale_real(2.0) + &k4);
    Ok(rho + &incr.scale_real(h / 6.0))
}

/// Number of steps and step length used to cover `t` with steps of at
/// most `dt`. Ratios within `1e-9` of an integer are taken as exact.
pub fn step_plan(t: f64, dt: f64) -> Result<(u64, f64)> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Parameter(format!("t must be ≥ 0, got {t}")));
    }
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::Parameter(format!("dt must be > 0, got {dt}")));
    }
    if t == 0.0 {
        return Ok((0, 0.0));
    }
    let ratio = t / dt;
    let nearest = ratio.round();
    let n = if (ratio - nearest).abs() <= 1e-9 * ratio.max(1.0) { nearest } else { ratio.ceil() };
    let n = n.max(1.0);
    if n > u64::MAX as f64 {
        return Err(Error::Parameter(format!("t/dt = {ratio:e} is too large")));
    }
    Ok((n as u64, t / n))
}

/// Superoperator of `N` RK4 steps covering `t`.
pub fn rk4_propagator(model: &LindbladModel, t: f64, dt: f64) -> Result<ComplexMatrix> {
    let (n, h) = step_plan(t, dt)?;
    let big = model.dim() * model.dim();
    let gen = model.superoperator().scale_real(h);
    // P = I + G + G²/2 + G³/6 + G⁴/24 by Horner.
    let id = ComplexMatrix::identity(big);
    let mut step = &id + &gen.scale_real(0.25);
    for k in [3.0, 2.0, 1.0] {
        step = &id + &(&gen * &step).scale_real(1.0 / k);
    }
    Ok(matrix_power(&step, n))
}

fn matrix_power(m: &ComplexMatrix, mut n: u64) -> ComplexMatrix {
    let mut result = ComplexMatrix::identity(m.rows());
    let mut base = m.clone();
    while n > 0 {
        if n & 1 == 1 {
            result = &result * &base;
        }
        n >>= 1;
        if n > 0 {
            base = &base * &base;
        }
    }
    result
}

/// Applies a propagator from [`rk4_propagator`] and validates the result.
pub fn propagate(propagator: &ComplexMatrix, rho0: &DensityMatrix) -> Result<DensityMatrix> {
    let d = rho0.dim();
    let v = propagator.matvec(&vectorize(rho0.matrix()))?;
    finish_state(unvectorize(&v, d, d)?)
}

fn finish_state(m: ComplexMatrix) -> Result<DensityMatrix> {
    if m.as_slice().iter().any(|z| !z.is_finite()) {
        return Err(Error::StepSize("integration diverged; reduce dt".into()));
    }
    let m = m.hermitian_part();
    let tr = m.trace().re;
    if !(tr > 0.0) {
        return Err(Error::StepSize(format!("evolved trace collapsed to {tr}")));
    }
    let m = m.scale_real(1.0 / tr);
    let min = eig_hermitian(&m)?.min_value();
    if min < -POSITIVITY_BAND {
        return Err(Error::StepSize(format!(
            "evolved state has eigenvalue {min:.3e}; reduce dt"
        )));
    }
    if min < 0.0 {
        let clipped = project_psd(&m, 0.0)?;
        let tr = clipped.trace().re;
        return DensityMatrix::new(clipped.scale_real(1.0 / tr));
    }
    DensityMatrix::new(m)
}

/// State at time `t` under `model`, integrated with RK4 steps of at most
/// `dt`. Returns `rho0` unchanged for `t = 0`.
pub fn evolve(rho0: &DensityMatrix, model: &LindbladModel, t: f64, dt: f64) -> Result<DensityMatrix> {
    check_shape(model, rho0.matrix())?;
    step_plan(t, dt)?;
    if t == 0.0 {
        return Ok(rho0.clone());
    }
    propagate(&rk4_propagator(model, t, dt)?, rho0)
}

/// Evolves the process-tomography inputs to time `t` and fits a CPTP χ to
/// the resulting outputs.
pub fn markovian_chi(model: &LindbladModel, t: f64, dt: f64, config: &SolverConfig) -> Result<ProcessMatrix> {
    markovian_chi_with(&QptExperiment::two_qubit()?, model, t, dt, config)
}

/// [`markovian_chi`] reusing a prepared experiment.
pub fn markovian_chi_with(
    experiment: &QptExperiment,
    model: &LindbladModel,
    t: f64,
    dt: f64,
    config: &SolverConfig,
) -> Result<ProcessMatrix> {
    if model.dim() != experiment.basis().dim() {
        return Err(Error::Dimension("model and experiment dimensions differ".into()));
    }
    let propagator = rk4_propagator(model, t, dt)?;
    let outputs = experiment
        .inputs()
        .iter()
        .map(|rho| if t == 0.0 { Ok(rho.clone()) } else { propagate(&propagator, rho) })
        .collect::<Result<Vec<_>>>()?;
    let lambda = crate::qpt::stack_outputs(&outputs);
    Ok(experiment.cco(&lambda, config)?.0)
}

/// χ of the coherent part alone, `ρ ↦ e^{−iHt} ρ e^{iHt}`: the noiseless
/// reference a relaxing snapshot is compared against.
pub fn coherent_reference_chi(model: &LindbladModel, t: f64) -> Result<ProcessMatrix> {
    ideal_chi(&Gate::Custom(unitary_propagator(model.hamiltonian(), t)?))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BellDecayRow {
    pub t: f64,
    pub state: String,
    /// Direct integration against `ε_χ(t)(ρ_0)`.
    pub fidelity_evolved_vs_predicted: f64,
    pub fidelity_vs_initial: f64,
}

pub const BELL_STATES: [&str; 4] = ["B1", "B2", "B3", "B4"];

/// For each time and Bell state, compares the directly evolved state with
/// the prediction of the χ snapshot at that time.
pub fn bell_decay_study(model: &LindbladModel, times: &[f64], dt: f64, config: &SolverConfig) -> Result<Vec<BellDecayRow>> {
    if times.is_empty() {
        return Err(Error::Parameter("no time points".into()));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Parameter(format!("times must be strictly ascending: {times:?}")));
    }
    let experiment = QptExperiment::two_qubit()?;
    let bells: Vec<DensityMatrix> = BELL_STATES.iter().map(|s| make_state(s)).collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for &t in times {
        let chi = markovian_chi_with(&experiment, model, t, dt, config)?;
        let propagator = rk4_propagator(model, t, dt)?;
        for (name, rho0) in BELL_STATES.iter().zip(&bells) {
            let evolved = if t == 0.0 { rho0.clone() } else { propagate(&propagator, rho0)? };
            let predicted = apply_chi(&chi, experiment.basis(), rho0, ChannelMode::Strict)?;
            rows.push(BellDecayRow {
                t,
                state: name.to_string(),
                fidelity_evolved_vs_predicted: state_fidelity(evolved.matrix(), predicted.matrix())?,
                fidelity_vs_initial: state_fidelity(evolved.matrix(), rho0.matrix())?,
            });
        }
    }
    Ok(rows)
}

/// Dimensionless helper for tests and reports: `Tr(ρ σ)`.
pub fn overlap(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    Ok(a.matrix().trace_product(b.matrix())?.re)
}
