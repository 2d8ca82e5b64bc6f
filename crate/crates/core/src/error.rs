// Copyright 2026 The tomoct Authors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

use crate::solver::SolverReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the operation's domain (non-Hermitian, zero norm, ...).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("infeasible constraints: {0}")]
    Infeasible(String),

    /// The least-squares design cannot identify every parameter.
    #[error("rank deficient design; unidentifiable directions: {}", .0.join(", "))]
    RankDeficient(Vec<String>),

    /// A state or channel fails a physical validity check.
    #[error("invalid: {0}")]
    Validity(String),

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("step size too coarse: {0}")]
    StepSize(String),

    #[error("solver did not converge after {} iterations (primal {:.3e}, dual {:.3e})",
        .0.iterations, .0.primal_residual, .0.dual_residual)]
    NotConverged(Box<SolverReport>),

    #[error("parse error: {0}")]
    Parse(String),
}
