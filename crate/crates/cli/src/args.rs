// Copyright 2026 The tomoct Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "tomoct", version, about = "Quantum state and process tomography with physical constraints")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Two-qubit state tomography.
    #[command(subcommand)]
    State(StateCommand),
    /// Two-qubit process tomography.
    #[command(subcommand)]
    Process(ProcessCommand),
    /// NMR relaxation model and its χ snapshots.
    #[command(subcommand)]
    Lindblad(LindbladCommand),
    /// Recompute the published reference values and run the simulated
    /// ensembles; exits nonzero if any check fails.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Standard,
    Cco,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Standard => "standard",
            Method::Cco => "cco",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// Primal and dual stopping tolerance of the constrained solver.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

#[derive(Debug, Subcommand)]
pub enum StateCommand {
    /// Simulate a noisy Pauli measurement record.
    Simulate {
        /// Named state (00, +-, B1, ...) or ket expression like "|00>+i|11>".
        #[arg(long)]
        state: String,
        #[arg(long, default_value_t = 0.0)]
        noise_std: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Record file; standard output if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reconstruct a density matrix from a record.
    Reconstruct {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Cco)]
        method: Method,
        /// Reference state for the fidelity row.
        #[arg(long)]
        state: Option<String>,
        /// Where to write the reconstructed matrix.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        solver: SolverArgs,
    },
}

#[derive(Debug, Subcommand)]
pub enum ProcessCommand {
    /// Simulate tomographed outputs for the 16 standard inputs.
    Simulate {
        /// identity, cnot, crx_pi or file:<unitary.json>.
        #[arg(long)]
        gate: String,
        #[arg(long, default_value_t = 0.0)]
        noise_std: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Reconstruct χ and report eigenvalues, fidelity and Δ_avg.
    Reconstruct {
        /// Target gate; also what is simulated when --in is absent.
        #[arg(long)]
        gate: String,
        /// Process data from `process simulate`.
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 0.0)]
        noise_std: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Method::Cco)]
        method: Method,
        /// Where to write χ.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Kraus operators of a χ file.
    Kraus {
        #[arg(long = "in")]
        input: PathBuf,
        /// Relative eigenvalue cutoff.
        #[arg(long, default_value_t = tomoct::qpt::DEFAULT_KRAUS_THRESHOLD)]
        threshold: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// χ of an ideal gate.
    Ideal {
        #[arg(long)]
        gate: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Model file {"t1": [..], "t2": [..], "j_hz": v, "p": v}; built-in
    /// NMR parameters if omitted.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Integration step in seconds.
    #[arg(long, default_value_t = tomoct::lindblad::DEFAULT_DT)]
    pub dt: f64,
}

#[derive(Debug, Subcommand)]
pub enum LindbladCommand {
    /// Evolve a state under the model.
    Evolve {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value = "B1")]
        state: String,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// χ snapshots of the model's channel.
    Chi {
        #[command(flatten)]
        model: ModelArgs,
        /// Single time point.
        #[arg(long, conflicts_with = "times")]
        t: Option<f64>,
        /// Comma-separated time points.
        #[arg(long, value_delimiter = ',')]
        times: Vec<f64>,
        /// Directory for chi_t<t>.json files.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Bell-state decay: direct integration against χ prediction.
    BellStudy {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_delimiter = ',', default_value = "0.05,0.5,5,15")]
        times: Vec<f64>,
        #[command(flatten)]
        solver: SolverArgs,
    },
}

#[derive(Debug, Clone, Args)]
pub struct ReproduceArgs {
    /// State-tomography runs per noise level.
    #[arg(long, default_value_t = 20)]
    pub qst_runs: u64,
    /// Process-tomography runs per gate.
    #[arg(long, default_value_t = 4)]
    pub qpt_runs: u64,
    /// First seed of each ensemble.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}
