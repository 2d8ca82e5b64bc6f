// Copyright 2026 The tomoct Authors
// SPDX-License-Identifier: Apache-2.0

//! Acceptance checks, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines are always printed; exits nonzero on any FAIL.

use std::process::ExitCode;
use std::time::Instant;

use rayon::prelude::*;
use tomoct::fixtures::{reference_fixtures, COMPLETENESS_TOL, EIGENVALUE_TOL, FIDELITY_TOL};
use tomoct::lindblad::{
    bell_decay_study, coherent_reference_chi, evolve, markovian_chi_with, nmr_noise_model, sigma_minus,
    LindbladModel, NmrNoiseParams, DEFAULT_DT,
};
use tomoct::linalg::{ComplexMatrix, C64};
use tomoct::metrics::process_fidelity;
use tomoct::pauli::{pauli_basis, single_qubit_pauli};
use tomoct::qpt::{chi_from_kraus, ideal_chi, Gate, QptExperiment, CPTP_TOL};
use tomoct::solver::{solve, AffineConstraint, ConstrainedLsqProblem, HermitianParam, RealMatrix, SolverConfig};
use tomoct::state::{DensityMatrix, PSD_TOL, TRACE_TOL};
use tomoct::study::{mean, qpt_run, qst_run, qst_truth, QptRun, QstRun, QstSetup};

mod common;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e(err: tomoct::Error) -> String {
    err.to_string()
}

const QST_NOISE: [f64; 3] = [0.01, 0.05, 0.1];
const QST_RUNS: u64 = 500;
const QPT_RUNS_PER_GATE: u64 = 20;
const QPT_NOISE: f64 = 0.05;

/// Ensembles shared by the validity and ordering checks.
struct Ensembles {
    qst: Vec<QstRun>,
    qpt: Vec<QptRun>,
}

fn ensembles(config: &SolverConfig) -> Result<Ensembles, String> {
    let setup = QstSetup::two_qubit().map_err(e)?;
    let qst = (0..QST_RUNS)
        .into_par_iter()
        .map(|seed| {
            let sigma = QST_NOISE[(seed % 3) as usize];
            qst_run(&setup, &qst_truth(seed), sigma, seed, config)
        })
        .collect::<tomoct::Result<Vec<_>>>()
        .map_err(e)?;
    let experiment = QptExperiment::two_qubit().map_err(e)?;
    let mut qpt = Vec::new();
    for gate in Gate::named() {
        let runs = (0..QPT_RUNS_PER_GATE)
            .into_par_iter()
            .map(|seed| qpt_run(&experiment, &gate, QPT_NOISE, seed, config))
            .collect::<tomoct::Result<Vec<_>>>()
            .map_err(e)?;
        qpt.extend(runs);
    }
    Ok(Ensembles { qst, qpt })
}

fn fixture_eigenvalues() -> Outcome {
    let start = Instant::now();
    let basis = pauli_basis(2).map_err(e)?;
    let mut worst = 0.0f64;
    for fx in reference_fixtures() {
        let chi = chi_from_kraus(&fx.kraus_set().map_err(e)?.operators, &basis).map_err(e)?;
        let eig = chi.eigenvalues();
        for (k, (want, got)) in fx.cco_eigenvalues.iter().zip(&eig).enumerate() {
            let err = (want - got).abs();
            worst = worst.max(err);
            ensure(err <= EIGENVALUE_TOL, || format!("{} λ{k}: {got:.5} vs {want}", fx.gate))?;
        }
        // The remaining eigenvalues are zero up to transcription error.
        let tail = eig[fx.cco_eigenvalues.len()..].iter().map(|v| v.abs()).fold(0.0, f64::max);
        ensure(tail <= EIGENVALUE_TOL, || format!("{}: stray eigenvalue {tail:.2e}", fx.gate))?;
    }
    let elapsed = start.elapsed().as_secs_f64();
    ensure(elapsed < 1.0, || format!("took {elapsed:.2} s"))?;
    Ok(format!("max |Δλ| = {worst:.2e}, {elapsed:.3} s"))
}

fn fixture_fidelities() -> Outcome {
    let basis = pauli_basis(2).map_err(e)?;
    let mut parts = Vec::new();
    for fx in reference_fixtures() {
        let chi = chi_from_kraus(&fx.kraus_set().map_err(e)?.operators, &basis).map_err(e)?;
        let f = process_fidelity(&chi, &ideal_chi(&fx.gate).map_err(e)?).map_err(e)?;
        ensure((f - fx.cco_fidelity).abs() <= FIDELITY_TOL, || {
            format!("{}: {f:.4} vs {}", fx.gate, fx.cco_fidelity)
        })?;
        parts.push(format!("{} {f:.4}", fx.gate));
    }
    Ok(parts.join(", "))
}

fn fixture_completeness() -> Outcome {
    let mut parts = Vec::new();
    for fx in reference_fixtures() {
        let r = fx.kraus_set().map_err(e)?.completeness_residual;
        ensure(r <= COMPLETENESS_TOL, || format!("{}: residual {r:.3e}", fx.gate))?;
        parts.push(format!("{} {r:.2e}", fx.gate));
    }
    Ok(parts.join(", "))
}

fn validity(ens: &Ensembles) -> Outcome {
    for r in &ens.qst {
        ensure(r.cco_min_eigenvalue >= -PSD_TOL, || format!("QST seed {}: λmin {:e}", r.seed, r.cco_min_eigenvalue))?;
        ensure((r.cco_trace - 1.0).abs() <= TRACE_TOL, || format!("QST seed {}: trace {}", r.seed, r.cco_trace))?;
    }
    for r in &ens.qpt {
        ensure(r.cco_min_eigenvalue >= -PSD_TOL, || {
            format!("QPT {} seed {}: λmin {:e}", r.gate, r.seed, r.cco_min_eigenvalue)
        })?;
        ensure(r.cco_cptp_residual <= CPTP_TOL, || {
            format!("QPT {} seed {}: CPTP residual {:e}", r.gate, r.seed, r.cco_cptp_residual)
        })?;
    }
    let invalid_std = ens.qst.iter().filter(|r| r.standard_min_eigenvalue < -PSD_TOL).count()
        + ens.qpt.iter().filter(|r| r.standard_min_eigenvalue < -PSD_TOL).count();
    let worst_qst = ens.qst.iter().map(|r| r.cco_min_eigenvalue).fold(f64::INFINITY, f64::min);
    let worst_cptp = ens.qpt.iter().map(|r| r.cco_cptp_residual).fold(0.0, f64::max);
    Ok(format!(
        "{} QST + {} QPT runs valid (min λ {worst_qst:.1e}, max CPTP residual {worst_cptp:.1e}); standard invalid in {invalid_std}",
        ens.qst.len(),
        ens.qpt.len()
    ))
}

fn ordering(ens: &Ensembles) -> Outcome {
    let mut parts = Vec::new();
    for sigma in QST_NOISE {
        let runs: Vec<&QstRun> = ens.qst.iter().filter(|r| r.noise_std == sigma).collect();
        let fs = mean(runs.iter().map(|r| r.standard_fidelity));
        let fc = mean(runs.iter().map(|r| r.cco_fidelity));
        ensure(fc >= fs, || format!("QST σ={sigma}: cco {fc:.5} < standard {fs:.5}"))?;
        parts.push(format!("QST σ={sigma} F {fc:.4}/{fs:.4}"));
    }
    for gate in Gate::named() {
        let runs: Vec<&QptRun> = ens.qpt.iter().filter(|r| r.gate == gate.name()).collect();
        let fs = mean(runs.iter().map(|r| r.standard_fidelity));
        let fc = mean(runs.iter().map(|r| r.cco_fidelity));
        let ds = mean(runs.iter().map(|r| r.standard_avg_deviation));
        let dc = mean(runs.iter().map(|r| r.cco_avg_deviation));
        ensure(fc >= fs, || format!("QPT {gate}: fidelity cco {fc:.5} < standard {fs:.5}"))?;
        ensure(dc < ds, || format!("QPT {gate}: Δ_avg cco {dc:.3e} ≥ standard {ds:.3e}"))?;
        parts.push(format!("QPT {gate} F {fc:.4}/{fs:.4} Δ {dc:.2e}/{ds:.2e}"));
    }
    Ok(parts.join("; "))
}

fn noiseless(config: &SolverConfig) -> Outcome {
    const FLOOR: f64 = 1.0 - 1e-6;
    let setup = QstSetup::two_qubit().map_err(e)?;
    let mut worst = 1.0f64;
    for seed in 1000..1050 {
        let r = qst_run(&setup, &qst_truth(seed), 0.0, seed, config).map_err(e)?;
        worst = worst.min(r.cco_fidelity).min(r.standard_fidelity);
        ensure(r.cco_fidelity >= FLOOR && r.standard_fidelity >= FLOOR, || {
            format!("QST seed {seed}: cco {} standard {}", r.cco_fidelity, r.standard_fidelity)
        })?;
    }
    let experiment = QptExperiment::two_qubit().map_err(e)?;
    for gate in Gate::named() {
        let r = qpt_run(&experiment, &gate, 0.0, 0, config).map_err(e)?;
        worst = worst.min(r.cco_fidelity).min(r.standard_fidelity);
        ensure(r.cco_fidelity >= FLOOR && r.standard_fidelity >= FLOOR, || {
            format!("QPT {gate}: cco {} standard {}", r.cco_fidelity, r.standard_fidelity)
        })?;
    }
    Ok(format!("50 states + 3 gates, worst fidelity 1 − {:.1e}", 1.0 - worst))
}

fn solver_oracle() -> Outcome {
    use nalgebra::{DMatrix, DVector};
    use rand::SeedableRng;

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2026);
    let param = HermitianParam::new(4);
    let mut row = vec![0.0; 16];
    row[..4].fill(1.0);
    let mut worst = 0.0f64;
    for k in 0..10 {
        let h = common::hermitian_with_one_negative(&mut rng);
        let b = param.from_matrix(&h);
        let problem = ConstrainedLsqProblem::new(
            RealMatrix::identity(16),
            b.clone(),
            param,
            vec![AffineConstraint::new(row.clone(), 1.0)],
        )
        .map_err(e)?;
        let ours = solve(&problem, &SolverConfig::default()).map_err(e)?.solution;
        let reference = common::oracle::projected_gradient(&DMatrix::identity(16, 16), &DVector::from_vec(b));
        let gap = ours.iter().zip(&reference).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        worst = worst.max(gap);
        ensure(gap <= 1e-6, || format!("instance {k}: distance {gap:e}"))?;
    }
    Ok(format!("10 instances, max parameter distance {worst:.2e}"))
}

fn dephasing_decay() -> Result<f64, String> {
    let gamma = 2.0f64;
    let z = single_qubit_pauli(3);
    let model = LindbladModel::new(ComplexMatrix::zeros(2, 2), vec![z.scale_real((gamma / 2.0).sqrt())]).map_err(e)?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let plus = DensityMatrix::from_ket(&[C64::new(h, 0.0), C64::new(h, 0.0)]).map_err(e)?;
    let mut worst = 0.0f64;
    for t in [0.1, 0.5, 1.0, 2.0] {
        let rho = evolve(&plus, &model, t, DEFAULT_DT).map_err(e)?;
        let err = (rho.matrix()[(0, 1)].norm() - 0.5 * (-gamma * t).exp()).abs();
        worst = worst.max(err);
        ensure(err <= 1e-6, || format!("dephasing at t={t}: error {err:e}"))?;
    }
    Ok(worst)
}

fn amplitude_decay() -> Result<f64, String> {
    let t1 = 0.8f64;
    let model = LindbladModel::new(ComplexMatrix::zeros(2, 2), vec![sigma_minus().scale_real((1.0 / t1).sqrt())]).map_err(e)?;
    let one = DensityMatrix::from_ket(&[C64::new(0.0, 0.0), C64::new(1.0, 0.0)]).map_err(e)?;
    let mut worst = 0.0f64;
    for t in [0.1, 0.8, 2.0] {
        let rho = evolve(&one, &model, t, DEFAULT_DT).map_err(e)?;
        let err = (rho.matrix()[(1, 1)].re - (-t / t1).exp()).abs();
        worst = worst.max(err);
        ensure(err <= 1e-4, || format!("T1 decay at t={t}: error {err:e}"))?;
    }
    Ok(worst)
}

fn lindblad(config: &SolverConfig) -> Outcome {
    let dephasing = dephasing_decay()?;
    let damping = amplitude_decay()?;

    let params = NmrNoiseParams::default();
    let model = nmr_noise_model(&params).map_err(e)?;
    let b1 = tomoct::state::make_state("B1").map_err(e)?;
    let (ta, tb) = (0.123_456_7, 0.3);
    let split = evolve(&evolve(&b1, &model, ta, DEFAULT_DT).map_err(e)?, &model, tb, DEFAULT_DT).map_err(e)?;
    let whole = evolve(&b1, &model, ta + tb, DEFAULT_DT).map_err(e)?;
    let semigroup = split.matrix().max_abs_diff(whole.matrix());
    ensure(semigroup <= 1e-7, || format!("semigroup defect {semigroup:e}"))?;

    // Fidelity against the identity, read in the frame that removes the
    // coherent ZZ evolution: the relaxation-only channel must lose fidelity
    // monotonically. The lab-frame values are printed alongside.
    let times = [0.05, 0.5, 5.0, 15.0];
    let experiment = QptExperiment::two_qubit().map_err(e)?;
    let identity = ideal_chi(&Gate::Identity).map_err(e)?;
    let uncoupled = nmr_noise_model(&NmrNoiseParams { j_hz: 0.0, ..params.clone() }).map_err(e)?;
    let mut framed = Vec::new();
    let mut lab = Vec::new();
    let mut uncoupled_fid = Vec::new();
    for &t in &times {
        let chi = markovian_chi_with(&experiment, &model, t, DEFAULT_DT, config).map_err(e)?;
        framed.push(process_fidelity(&chi, &coherent_reference_chi(&model, t).map_err(e)?).map_err(e)?);
        lab.push(process_fidelity(&chi, &identity).map_err(e)?);
        let chi0 = markovian_chi_with(&experiment, &uncoupled, t, DEFAULT_DT, config).map_err(e)?;
        uncoupled_fid.push(process_fidelity(&chi0, &identity).map_err(e)?);
    }
    let decreasing = |v: &[f64]| v.windows(2).all(|w| w[1] < w[0]);
    ensure(decreasing(&framed), || format!("coherent-frame fidelities not decreasing: {framed:.4?}"))?;
    ensure(decreasing(&uncoupled_fid), || format!("J = 0 fidelities not decreasing: {uncoupled_fid:.4?}"))?;

    let rows = bell_decay_study(&model, &times, DEFAULT_DT, config).map_err(e)?;
    let bell = rows.iter().map(|r| r.fidelity_evolved_vs_predicted).fold(1.0, f64::min);
    ensure(bell >= 1.0 - 1e-4, || format!("Bell self-consistency {bell}"))?;

    Ok(format!(
        "dephasing err {dephasing:.1e}, T1 err {damping:.1e}, semigroup {semigroup:.1e}, \
         F(χ, coherent) {framed:.4?}, F(χ, I) at J=0 {uncoupled_fid:.4?}, \
         lab-frame F(χ, I) {lab:.4?} (not monotone), Bell min {bell:.8}"
    ))
}

fn main() -> ExitCode {
    // Under `cargo test -- --list` or filters, behave like an empty harness.
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let config = SolverConfig::default();
    let start = Instant::now();
    let ens = ensembles(&config);
    let ensemble_time = start.elapsed().as_secs_f64();
    let with_ens = |f: fn(&Ensembles) -> Outcome| -> Outcome {
        match &ens {
            Ok(ens) => f(ens),
            Err(err) => Err(format!("ensemble failed: {err}")),
        }
    };
    let results: Vec<(&str, Outcome)> = vec![
        ("1 fixture eigenvalues", fixture_eigenvalues()),
        ("2 fixture fidelities", fixture_fidelities()),
        ("3 fixture completeness", fixture_completeness()),
        ("4 validity guarantee", with_ens(validity).map(|s| format!("{s}; {ensemble_time:.1} s"))),
        ("5 standard vs cco ordering", with_ens(ordering)),
        ("6 noiseless exactness", noiseless(&config)),
        ("7 solver oracle", solver_oracle()),
        ("8 lindblad", lindblad(&config)),
    ];
    let mut failed = 0;
    for (name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name}: {detail}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} of {} criteria failed", results.len());
        ExitCode::FAILURE
    }
}
