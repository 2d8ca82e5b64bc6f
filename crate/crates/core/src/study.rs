// Copyright 2026 The tomoct Authors
// SPDX-License-Identifier: Apache-2.0

//! Single simulated runs comparing linear inversion with constrained
//! reconstruction. Ensembles are built by mapping these over seeds; each run
//! depends only on its seed, so the runs can be farmed out in any order.

use crate::error::Result;
use crate::linalg::eig_hermitian;
use crate::metrics::{average_state_deviation, process_fidelity, state_fidelity};
use crate::pauli::OperatorBasis;
use crate::qpt::{ideal_chi, Gate, QptExperiment};
use crate::qst::{build_design_matrix, reconstruct_cco, reconstruct_standard, simulate_measurements, MeasurementScheme};
use crate::rng;
use crate::solver::{RealMatrix, SolverConfig};
use crate::state::{random_mixed_state, random_pure_state, DensityMatrix};

/// Prepared state-tomography setup for repeated runs.
#[derive(Debug, Clone)]
pub struct QstSetup {
    pub basis: OperatorBasis,
    pub scheme: MeasurementScheme,
    pub design: RealMatrix,
}

impl QstSetup {
    pub fn two_qubit() -> Result<Self> {
        let basis = crate::pauli::pauli_basis(2)?;
        let scheme = MeasurementScheme::pauli_default(&basis);
        let design = build_design_matrix(&scheme, &basis)?;
        Ok(Self { basis, scheme, design })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QstRun {
    pub seed: u64,
    pub noise_std: f64,
    pub standard_min_eigenvalue: f64,
    pub standard_fidelity: f64,
    pub cco_min_eigenvalue: f64,
    pub cco_trace: f64,
    pub cco_fidelity: f64,
}

/// Truth state for QST run `seed`: pure for even seeds, Ginibre-mixed for
/// odd ones.
pub fn qst_truth(seed: u64) -> DensityMatrix {
    let mut r = rng::substream(seed, 1);
    if seed.is_multiple_of(2) {
        random_pure_state(2, &mut r)
    } else {
        random_mixed_state(2, &mut r)
    }
}

pub fn qst_run(setup: &QstSetup, truth: &DensityMatrix, noise_std: f64, seed: u64, config: &SolverConfig) -> Result<QstRun> {
    let record = simulate_measurements(truth, &setup.scheme, noise_std, seed)?;
    let std = reconstruct_standard(&setup.design, &record, &setup.basis)?;
    let (cco, _) = reconstruct_cco(&setup.design, &record, &setup.basis, config)?;
    Ok(QstRun {
        seed,
        noise_std,
        standard_min_eigenvalue: std.min_eigenvalue,
        standard_fidelity: state_fidelity(&std.matrix, truth.matrix())?,
        cco_min_eigenvalue: eig_hermitian(cco.matrix())?.min_value(),
        cco_trace: cco.matrix().trace().re,
        cco_fidelity: state_fidelity(cco.matrix(), truth.matrix())?,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct QptRun {
    pub gate: &'static str,
    pub seed: u64,
    pub noise_std: f64,
    pub standard_min_eigenvalue: f64,
    pub standard_fidelity: f64,
    pub standard_avg_deviation: f64,
    pub cco_min_eigenvalue: f64,
    pub cco_trace: f64,
    pub cco_cptp_residual: f64,
    pub cco_fidelity: f64,
    pub cco_avg_deviation: f64,
}

pub fn qpt_run(experiment: &QptExperiment, gate: &Gate, noise_std: f64, seed: u64, config: &SolverConfig) -> Result<QptRun> {
    let basis = experiment.basis();
    let ideal = ideal_chi(gate)?;
    let u = gate.unitary();
    let data = experiment.simulate(gate, noise_std, seed, config)?;
    let (std, _) = experiment.standard(&data.lambda)?;
    let (cco, _) = experiment.cco(&data.lambda, config)?;
    Ok(QptRun {
        gate: gate.name(),
        seed,
        noise_std,
        standard_min_eigenvalue: std.min_eigenvalue(),
        standard_fidelity: process_fidelity(&std, &ideal)?,
        standard_avg_deviation: average_state_deviation(&std, basis, &u, experiment.inputs())?,
        cco_min_eigenvalue: cco.min_eigenvalue(),
        cco_trace: cco.trace(),
        cco_cptp_residual: cco.cptp_residual(basis)?,
        cco_fidelity: process_fidelity(&cco, &ideal)?,
        cco_avg_deviation: average_state_deviation(&cco, basis, &u, experiment.inputs())?,
    })
}

pub fn mean(values: impl IntoIterator<Item = f64>) -> f64 {
    let (sum, n) = values.into_iter().fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        sum / n as f64
    }
}
