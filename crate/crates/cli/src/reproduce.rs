// Copyright 2026 The tomoct Authors
// SPDX-License-Identifier: Apache-2.0

//! `tomoct reproduce`: reference Kraus sets, simulated ensembles and a
//! relaxation smoke check, each reported as a PASS/FAIL row.

use std::process::ExitCode;

use rayon::prelude::*;
use tomoct::fixtures::{reference_fixtures, COMPLETENESS_TOL, EIGENVALUE_TOL, FIDELITY_TOL};
use tomoct::lindblad::{coherent_reference_chi, markovian_chi_with, nmr_noise_model, NmrNoiseParams, DEFAULT_DT};
use tomoct::metrics::process_fidelity;
use tomoct::qpt::{chi_from_kraus, ideal_chi, Gate, QptExperiment, CPTP_TOL};
use tomoct::solver::SolverConfig;
use tomoct::state::{PSD_TOL, TRACE_TOL};
use tomoct::study::{mean, qpt_run, qst_run, qst_truth, QptRun, QstRun, QstSetup};
use tomoct::Result;

use crate::args::ReproduceArgs;
use crate::report::Report;

const QST_NOISE: [f64; 3] = [0.01, 0.05, 0.1];
const QPT_NOISE: f64 = 0.05;

struct Checks {
    report: Report,
    failed: usize,
}

impl Checks {
    fn check(&mut self, name: &str, method: &str, ok: bool) {
        self.report.row(&format!("check:{name}"), method, if ok { "PASS" } else { "FAIL" });
        if !ok {
            self.failed += 1;
        }
    }
}

fn fixtures(c: &mut Checks) -> Result<()> {
    let experiment = QptExperiment::two_qubit()?;
    let basis = experiment.basis();
    for fx in reference_fixtures() {
        let name = fx.gate.name();
        let set = fx.kraus_set()?;
        let chi = chi_from_kraus(&set.operators, basis)?;
        let eig = chi.eigenvalues();
        let worst = fx
            .cco_eigenvalues
            .iter()
            .zip(&eig)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        c.report.row(&format!("eigenvalue_error[{name}]"), "kraus", format!("{worst:.6e}"));
        c.check(&format!("eigenvalues[{name}]"), "kraus", worst <= EIGENVALUE_TOL);

        let fid = process_fidelity(&chi, &ideal_chi(&fx.gate)?)?;
        c.report.number(&format!("fidelity[{name}]"), "kraus", fid);
        c.check(&format!("fidelity[{name}]"), "kraus", (fid - fx.cco_fidelity).abs() <= FIDELITY_TOL);

        c.report.row(&format!("completeness_residual[{name}]"), "kraus", format!("{:.6e}", set.completeness_residual));
        c.check(&format!("completeness[{name}]"), "kraus", set.completeness_residual <= COMPLETENESS_TOL);
    }
    Ok(())
}

fn qst_ensemble(c: &mut Checks, args: &ReproduceArgs, config: &SolverConfig) -> Result<()> {
    let setup = QstSetup::two_qubit()?;
    for sigma in QST_NOISE {
        let runs: Vec<QstRun> = (args.seed..args.seed + args.qst_runs)
            .into_par_iter()
            .map(|seed| qst_run(&setup, &qst_truth(seed), sigma, seed, config))
            .collect::<Result<_>>()?;
        let tag = format!("[sigma={sigma}]");
        let invalid = runs.iter().filter(|r| r.standard_min_eigenvalue < -PSD_TOL).count();
        let cco_valid = runs
            .iter()
            .all(|r| r.cco_min_eigenvalue >= -PSD_TOL && (r.cco_trace - 1.0).abs() <= TRACE_TOL);
        let f_std = mean(runs.iter().map(|r| r.standard_fidelity));
        let f_cco = mean(runs.iter().map(|r| r.cco_fidelity));
        c.report.row(&format!("invalid_runs{tag}"), "standard", invalid);
        c.report.number(&format!("mean_fidelity{tag}"), "standard", f_std);
        c.report.number(&format!("mean_fidelity{tag}"), "cco", f_cco);
        c.check(&format!("qst_valid{tag}"), "cco", cco_valid);
        c.check(&format!("qst_fidelity_order{tag}"), "cco", f_cco >= f_std);
    }
    Ok(())
}

fn qpt_ensemble(c: &mut Checks, args: &ReproduceArgs, config: &SolverConfig) -> Result<()> {
    let experiment = QptExperiment::two_qubit()?;
    for gate in Gate::named() {
        let runs: Vec<QptRun> = (args.seed..args.seed + args.qpt_runs)
            .into_par_iter()
            .map(|seed| qpt_run(&experiment, &gate, QPT_NOISE, seed, config))
            .collect::<Result<_>>()?;
        let tag = format!("[{}]", gate.name());
        let valid = runs
            .iter()
            .all(|r| r.cco_min_eigenvalue >= -PSD_TOL && r.cco_cptp_residual <= CPTP_TOL);
        let f_std = mean(runs.iter().map(|r| r.standard_fidelity));
        let f_cco = mean(runs.iter().map(|r| r.cco_fidelity));
        let d_std = mean(runs.iter().map(|r| r.standard_avg_deviation));
        let d_cco = mean(runs.iter().map(|r| r.cco_avg_deviation));
        c.report.number(&format!("mean_fidelity{tag}"), "standard", f_std);
        c.report.number(&format!("mean_fidelity{tag}"), "cco", f_cco);
        c.report.row(&format!("mean_avg_deviation{tag}"), "standard", format!("{d_std:.6e}"));
        c.report.row(&format!("mean_avg_deviation{tag}"), "cco", format!("{d_cco:.6e}"));
        c.check(&format!("qpt_valid{tag}"), "cco", valid);
        c.check(&format!("qpt_fidelity_order{tag}"), "cco", f_cco >= f_std);
        c.check(&format!("qpt_deviation_order{tag}"), "cco", d_cco <= d_std);
    }
    Ok(())
}

fn relaxation(c: &mut Checks, config: &SolverConfig) -> Result<()> {
    let model = nmr_noise_model(&NmrNoiseParams::default())?;
    let experiment = QptExperiment::two_qubit()?;
    let t = 0.05;
    let chi = markovian_chi_with(&experiment, &model, t, DEFAULT_DT, config)?;
    let fid = process_fidelity(&chi, &coherent_reference_chi(&model, t)?)?;
    c.report.number("fidelity_vs_coherent[t=0.05]", "cco", fid);
    c.check("relaxation_short_time", "cco", fid > 0.99 && fid < 1.0);
    c.check(
        "relaxation_valid",
        "cco",
        chi.min_eigenvalue() >= -PSD_TOL && chi.cptp_residual(experiment.basis())? <= CPTP_TOL,
    );
    Ok(())
}

fn run_all(c: &mut Checks, args: &ReproduceArgs) -> Result<()> {
    let config = SolverConfig::default();
    fixtures(c)?;
    qst_ensemble(c, args, &config)?;
    qpt_ensemble(c, args, &config)?;
    relaxation(c, &config)
}

pub fn run(args: &ReproduceArgs) -> ExitCode {
    let mut c = Checks {
        report: Report::new(),
        failed: 0,
    };
    let outcome = run_all(&mut c, args);
    c.report.print();
    match outcome {
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(crate::exit_code(&e))
        }
        Ok(()) if c.failed > 0 => {
            eprintln!("{} check(s) failed", c.failed);
            ExitCode::from(1)
        }
        Ok(()) => ExitCode::SUCCESS,
    }
}
