// Copyright 2026 The tomoct Authors
// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tomoct::io::{self, MatrixJson};
use tomoct::lindblad::{self, LindbladModel, NmrNoiseParams};
use tomoct::linalg::ComplexMatrix;
use tomoct::metrics::{average_state_deviation, eigenvalue_report, process_fidelity, state_fidelity};
use tomoct::pauli::{pauli_basis, OperatorBasis};
use tomoct::qpt::{self, extract_kraus, ideal_chi, Gate, QptExperiment};
use tomoct::qst::{self, MeasurementRecord, MeasurementScheme};
use tomoct::solver::SolverConfig;
use tomoct::state::{make_state, DensityMatrix};
use tomoct::{Error, Result};

use crate::args::{LindbladCommand, Method, ModelArgs, ProcessCommand, SolverArgs, StateCommand};
use crate::report::Report;

impl SolverArgs {
    pub fn config(&self) -> Result<SolverConfig> {
        let config = SolverConfig {
            tol_primal: self.tol,
            tol_dual: self.tol,
            ..SolverConfig::default()
        };
        config.validate()?;
        Ok(config)
    }
}

/// On-disk form of simulated process-tomography data.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessDataJson {
    pub gate: String,
    pub noise_std: f64,
    pub seed: u64,
    /// Input-state labels, in the order of `outputs`.
    pub inputs: Vec<String>,
    pub outputs: Vec<MatrixJson>,
}

/// Parses `identity`, `cnot`, `crx_pi` or `file:<unitary.json>`.
pub fn parse_gate(spec: &str) -> Result<Gate> {
    match spec.strip_prefix("file:") {
        Some(path) => Ok(Gate::Custom(io::read_matrix(Path::new(path))?)),
        None => spec.parse(),
    }
}

fn basis_for_dim(dim: usize) -> Result<OperatorBasis> {
    if !dim.is_power_of_two() || dim < 2 {
        return Err(Error::Dimension(format!("dimension {dim} is not a qubit register")));
    }
    pauli_basis(dim.trailing_zeros() as usize)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display())))
}

/// Writes `text` to `out`, or to standard output when no path is given.
fn emit(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => write_text(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn state(cmd: StateCommand) -> Result<()> {
    match cmd {
        StateCommand::Simulate { state, noise_std, seed, out } => {
            let rho = make_state(&state)?;
            let basis = basis_for_dim(rho.dim())?;
            let scheme = MeasurementScheme::pauli_default(&basis);
            let record = qst::simulate_measurements(&rho, &scheme, noise_std, seed)?;
            emit(out.as_ref(), &io::to_json(&record)?)
        }
        StateCommand::Reconstruct { input, method, state, out, solver } => {
            let record: MeasurementRecord = io::read_json(&input)?;
            record.validate()?;
            let scheme = record.scheme()?;
            let basis = basis_for_dim(scheme.dim())?;
            let design = qst::build_design_matrix(&scheme, &basis)?;
            let rho = match method {
                Method::Standard => qst::reconstruct_standard(&design, &record, &basis)?.matrix,
                Method::Cco => qst::reconstruct_cco(&design, &record, &basis, &solver.config()?)?.0.into_matrix(),
            };
            let m = method.name();
            let mut report = Report::new();
            report.eigenvalues(m, &eigenvalue_report(&rho)?.values);
            report.number("trace", m, rho.trace().re);
            if let Some(reference) = state {
                let truth = make_state(&reference)?;
                report.number("fidelity", m, state_fidelity(&rho, truth.matrix())?);
            }
            if let Some(path) = out {
                io::write_matrix(&path, &rho)?;
            }
            report.print();
            Ok(())
        }
    }
}

fn read_process_data(path: &Path, experiment: &QptExperiment) -> Result<Vec<DensityMatrix>> {
    let data: ProcessDataJson = io::read_json(path)?;
    let expected = qpt::qpt_input_labels();
    if data.inputs.len() != expected.len() || data.inputs.iter().zip(expected).any(|(a, b)| a != b) {
        return Err(Error::Parse(format!(
            "{}: inputs must be {expected:?} in that order",
            path.display()
        )));
    }
    if data.outputs.len() != experiment.inputs().len() {
        return Err(Error::Dimension(format!("{} outputs for {} inputs", data.outputs.len(), expected.len())));
    }
    data.outputs
        .into_iter()
        .map(|m| DensityMatrix::new(ComplexMatrix::try_from(m)?))
        .collect()
}

pub fn process(cmd: ProcessCommand) -> Result<()> {
    match cmd {
        ProcessCommand::Simulate { gate, noise_std, seed, out, solver } => {
            let gate = parse_gate(&gate)?;
            let experiment = QptExperiment::two_qubit()?;
            let data = experiment.simulate(&gate, noise_std, seed, &solver.config()?)?;
            let outputs = data
                .output_states
                .iter()
                .map(|o| MatrixJson::from(o.matrix()))
                .collect();
            let json = ProcessDataJson {
                gate: gate.name().to_string(),
                noise_std,
                seed,
                inputs: qpt::qpt_input_labels().iter().map(|s| s.to_string()).collect(),
                outputs,
            };
            emit(out.as_ref(), &io::to_json(&json)?)
        }
        ProcessCommand::Reconstruct { gate, input, noise_std, seed, method, out, solver } => {
            let gate = parse_gate(&gate)?;
            let config = solver.config()?;
            let experiment = QptExperiment::two_qubit()?;
            let lambda = match input {
                Some(path) => qpt::stack_outputs(&read_process_data(&path, &experiment)?),
                None => experiment.simulate(&gate, noise_std, seed, &config)?.lambda,
            };
            let chi = match method {
                Method::Standard => experiment.standard(&lambda)?.0,
                Method::Cco => experiment.cco(&lambda, &config)?.0,
            };
            let basis = experiment.basis();
            let m = method.name();
            let mut report = Report::new();
            report.eigenvalues(m, &chi.eigenvalues());
            report.number("trace", m, chi.trace());
            report.row("cptp_residual", m, format!("{:.6e}", chi.cptp_residual(basis)?));
            report.number("fidelity", m, process_fidelity(&chi, &ideal_chi(&gate)?)?);
            let dev = average_state_deviation(&chi, basis, &gate.unitary(), experiment.inputs())?;
            report.row("avg_deviation", m, format!("{dev:.6e}"));
            if let Some(path) = out {
                io::write_chi(&path, &chi)?;
            }
            report.print();
            Ok(())
        }
        ProcessCommand::Kraus { input, threshold, out } => {
            let chi = io::read_chi(&input)?;
            let basis = pauli_basis(chi.n_qubits())?;
            let set = extract_kraus(&chi, &basis, threshold)?;
            let mut report = Report::new();
            report.row("operators", "kraus", set.len());
            report.list("weights", "kraus", &set.weights);
            report.row("completeness_residual", "kraus", format!("{:.6e}", set.completeness_residual));
            if let Some(path) = out {
                io::write_kraus(&path, &set)?;
            }
            report.print();
            Ok(())
        }
        ProcessCommand::Ideal { gate, out } => {
            let chi = ideal_chi(&parse_gate(&gate)?)?;
            match out {
                Some(path) => io::write_chi(&path, &chi),
                None => {
                    print!("{}", io::to_json(&io::ChiJson::from(&chi))?);
                    Ok(())
                }
            }
        }
    }
}

fn load_model(args: &ModelArgs) -> Result<LindbladModel> {
    let params = match &args.model {
        Some(path) => io::read_json::<NmrNoiseParams>(path)?,
        None => NmrNoiseParams::default(),
    };
    lindblad::nmr_noise_model(&params)
}

/// `chi_t0.05.json`-style file name for a snapshot.
fn snapshot_name(t: f64) -> String {
    format!("chi_t{t}.json")
}

pub fn lindblad(cmd: LindbladCommand) -> Result<()> {
    match cmd {
        LindbladCommand::Evolve { model, state, t, out } => {
            let lm = load_model(&model)?;
            let rho0 = make_state(&state)?;
            let rho = lindblad::evolve(&rho0, &lm, t, model.dt)?;
            let mut report = Report::new();
            report.number("fidelity_vs_initial", "lindblad", state_fidelity(rho.matrix(), rho0.matrix())?);
            report.number("purity", "lindblad", rho.purity());
            report.eigenvalues("lindblad", &rho.eigenvalues());
            if let Some(path) = out {
                io::write_matrix(&path, rho.matrix())?;
            }
            report.print();
            Ok(())
        }
        LindbladCommand::Chi { model, t, times, out_dir, solver } => {
            let lm = load_model(&model)?;
            let config = solver.config()?;
            let times = match t {
                Some(t) => vec![t],
                None if times.is_empty() => return Err(Error::Parameter("give --t or --times".into())),
                None => times,
            };
            if let Some(dir) = &out_dir {
                fs::create_dir_all(dir).map_err(|e| Error::Parse(format!("cannot create {}: {e}", dir.display())))?;
            }
            let experiment = QptExperiment::two_qubit()?;
            let basis = experiment.basis();
            let mut report = Report::new();
            for &t in &times {
                let chi = lindblad::markovian_chi_with(&experiment, &lm, t, model.dt, &config)?;
                let reference = lindblad::coherent_reference_chi(&lm, t)?;
                let tag = format!("[t={t}]");
                report.number(&format!("fidelity_vs_coherent{tag}"), "cco", process_fidelity(&chi, &reference)?);
                report.number(
                    &format!("fidelity_vs_identity{tag}"),
                    "cco",
                    process_fidelity(&chi, &ideal_chi(&Gate::Identity)?)?,
                );
                report.row(&format!("min_eigenvalue{tag}"), "cco", format!("{:.6e}", chi.min_eigenvalue()));
                report.row(&format!("cptp_residual{tag}"), "cco", format!("{:.6e}", chi.cptp_residual(basis)?));
                if let Some(dir) = &out_dir {
                    io::write_chi(&dir.join(snapshot_name(t)), &chi)?;
                }
            }
            report.print();
            Ok(())
        }
        LindbladCommand::BellStudy { model, times, solver } => {
            let lm = load_model(&model)?;
            let rows = lindblad::bell_decay_study(&lm, &times, model.dt, &solver.config()?)?;
            let mut report = Report::new();
            for r in rows {
                let tag = format!("[{}@t={}]", r.state, r.t);
                report.number(&format!("fidelity_evolved_vs_predicted{tag}"), "cco", r.fidelity_evolved_vs_predicted);
                report.number(&format!("fidelity_vs_initial{tag}"), "lindblad", r.fidelity_vs_initial);
            }
            report.print();
            Ok(())
        }
    }
}
