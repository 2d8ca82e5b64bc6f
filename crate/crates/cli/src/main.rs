// Copyright 2026 The tomoct Authors
// SPDX-License-Identifier: Apache-2.0

mod args;
mod commands;
mod report;
mod reproduce;

use std::process::ExitCode;

use clap::Parser;
use tomoct::Error;

use crate::args::{Cli, Command};

/// Input rejected: bad file, bad parameter, unphysical data.
const EXIT_INPUT: u8 = 2;
/// Computation failed: no convergence, coarse step, numerical breakdown.
const EXIT_COMPUTE: u8 = 3;

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Parse(_)
        | Error::Validity(_)
        | Error::Domain(_)
        | Error::Dimension(_)
        | Error::Parameter(_)
        | Error::RankDeficient(_) => EXIT_INPUT,
        Error::NotConverged(_) | Error::StepSize(_) | Error::Numeric(_) | Error::Infeasible(_) => EXIT_COMPUTE,
    }
}

fn init_threads() {
    let Ok(raw) = std::env::var("TOMOCT_THREADS") else {
        return;
    };
    match raw.trim().parse::<usize>() {
        Ok(n) if n > 0 => {
            // Fails only if a pool already exists, which cannot happen this early.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
        _ => eprintln!("warning: ignoring TOMOCT_THREADS={raw:?}"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_threads();
    let result = match cli.command {
        Command::State(c) => commands::state(c),
        Command::Process(c) => commands::process(c),
        Command::Lindblad(c) => commands::lindblad(c),
        Command::Reproduce(a) => return reproduce::run(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
