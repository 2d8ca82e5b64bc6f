// Copyright 2026 The tomoct Authors
// SPDX-License-Identifier: Apache-2.0

//! State tomography: design matrices, simulated expectation-value records,
//! and the two reconstructions (linear inversion and constrained fit).
//!
//! The parameter vector of the linear model is the Pauli coefficient vector
//! `c` of `ρ = Σ c_m A_m`; column `m` of the design holds `Tr(M_k A_m)`.
//! The identity coefficient is pinned to `1/2^n` by the trace condition.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, ComplexMatrix};
use crate::pauli::{pauli_from_label, OperatorBasis};
use crate::rng;
use crate::solver::{
    self, AffineConstraint, ConstrainedLsqProblem, HermitianParam, RealMatrix, SolverConfig,
    SolverReport,
};
use crate::state::{DensityMatrix, HermitianEstimate};

/// The measured observables `M_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementScheme {
    observables: Vec<ComplexMatrix>,
    labels: Vec<String>,
}

impl MeasurementScheme {
    pub fn new(observables: Vec<ComplexMatrix>, labels: Vec<String>) -> Result<Self> {
        if observables.is_empty() {
            return Err(Error::Domain("measurement scheme is empty".into()));
        }
        if observables.len() != labels.len() {
            return Err(Error::Dimension("one label per observable".into()));
        }
        let dim = observables[0].rows();
        for (m, l) in observables.iter().zip(&labels) {
            if !m.is_square() || m.rows() != dim {
                return Err(Error::Dimension(format!("observable {l} has the wrong shape")));
            }
            if !m.is_hermitian(1e-12) {
                return Err(Error::Domain(format!("observable {l} is not Hermitian")));
            }
        }
        Ok(Self {
            observables,
            labels,
        })
    }

    /// Observables named by Pauli labels; a label may be a `+`-joined sum
    /// such as `XI+ZI`.
    pub fn from_labels<S: AsRef<str>>(labels: &[S]) -> Result<Self> {
        let observables = labels
            .iter()
            .map(|l| {
                let mut terms = l.as_ref().split('+');
                let first = pauli_from_label(terms.next().unwrap_or_default())?;
                terms.try_fold(first, |acc, t| {
                    let term = pauli_from_label(t)?;
                    acc.check_same_shape(&term)?;
                    Ok(&acc + &term)
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(
            observables,
            labels.iter().map(|l| l.as_ref().to_string()).collect(),
        )
    }

    /// Every non-identity Pauli product on the basis' qubits.
    pub fn pauli_default(basis: &OperatorBasis) -> Self {
        Self {
            observables: basis.elements()[1..].to_vec(),
            labels: basis.labels()[1..].to_vec(),
        }
    }

    pub fn observables(&self) -> &[ComplexMatrix] {
        &self.observables
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.observables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observables.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.observables[0].rows()
    }
}

/// Measured expectation values, one per observable of the scheme.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    #[serde(rename = "scheme")]
    pub labels: Vec<String>,
    pub values: Vec<f64>,
    pub noise_std: f64,
    pub seed: u64,
}

impl MeasurementRecord {
    pub fn scheme(&self) -> Result<MeasurementScheme> {
        MeasurementScheme::from_labels(&self.labels)
    }

    /// Checks the length and range invariants.
    pub fn validate(&self) -> Result<()> {
        if self.values.len() != self.labels.len() {
            return Err(Error::Dimension(format!(
                "record has {} values for {} observables",
                self.values.len(),
                self.labels.len()
            )));
        }
        if !(self.noise_std >= 0.0) {
            return Err(Error::Parameter("noise_std must be non-negative".into()));
        }
        let bound = value_bound(self.noise_std);
        if let Some((l, v)) = self
            .labels
            .iter()
            .zip(&self.values)
            .find(|(_, v)| !v.is_finite() || v.abs() > bound)
        {
            return Err(Error::Domain(format!(
                "value {v} for {l} is outside [-{bound}, {bound}]"
            )));
        }
        Ok(())
    }
}

fn value_bound(noise_std: f64) -> f64 {
    1.0 + 5.0 * noise_std
}

/// `A[k][m] = Tr(M_k A_m)`.
pub fn build_design_matrix(scheme: &MeasurementScheme, basis: &OperatorBasis) -> Result<RealMatrix> {
    if scheme.dim() != basis.dim() {
        return Err(Error::Dimension(format!(
            "scheme acts on dimension {}, basis on {}",
            scheme.dim(),
            basis.dim()
        )));
    }
    let mut design = RealMatrix::zeros(scheme.len(), basis.len());
    for (k, obs) in scheme.observables().iter().enumerate() {
        for (m, a) in basis.elements().iter().enumerate() {
            let t = obs.trace_product(a)?;
            if t.im.abs() > 1e-12 * obs.max_abs().max(1.0) {
                return Err(Error::Numeric(format!(
                    "Tr(M_{k} A_{m}) has imaginary part {:.3e}",
                    t.im
                )));
            }
            design[(k, m)] = t.re;
        }
    }
    Ok(design)
}

/// Expectation values `Tr(M_k ρ)` plus i.i.d. Gaussian noise of standard
/// deviation `noise_std`, reproducible per `seed`. Values are clamped to
/// `±(1 + 5σ)`.
pub fn simulate_measurements(
    rho: &DensityMatrix,
    scheme: &MeasurementScheme,
    noise_std: f64,
    seed: u64,
) -> Result<MeasurementRecord> {
    simulate_with_rng(rho, scheme, noise_std, seed, &mut rng::seeded(seed))
}

pub(crate) fn simulate_with_rng<R: Rng + ?Sized>(
    rho: &DensityMatrix,
    scheme: &MeasurementScheme,
    noise_std: f64,
    seed: u64,
    rng: &mut R,
) -> Result<MeasurementRecord> {
    if !(noise_std >= 0.0) || !noise_std.is_finite() {
        return Err(Error::Parameter(format!("noise_std must be ≥ 0, got {noise_std}")));
    }
    let bound = value_bound(noise_std);
    let values = scheme
        .observables()
        .iter()
        .map(|m| {
            let exact = crate::state::expectation(m, rho)?;
            let noise: f64 = rng.sample(StandardNormal);
            Ok((exact + noise_std * noise).clamp(-bound, bound))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MeasurementRecord {
        labels: scheme.labels().to_vec(),
        values,
        noise_std,
        seed,
    })
}

fn check_record(design: &RealMatrix, record: &MeasurementRecord, basis: &OperatorBasis) -> Result<()> {
    record.validate()?;
    if design.rows() != record.values.len() || design.cols() != basis.len() {
        return Err(Error::Dimension(format!(
            "design is {}x{}, record has {} values, basis has {} elements",
            design.rows(),
            design.cols(),
            record.values.len(),
            basis.len()
        )));
    }
    Ok(())
}

/// Linear-inversion estimate `ρ = I/2^n + Σ_{m≥1} x_m A_m` with `x` the
/// least-squares solution. Hermitian with unit trace by construction, but
/// not necessarily positive.
pub fn reconstruct_standard(
    design: &RealMatrix,
    record: &MeasurementRecord,
    basis: &OperatorBasis,
) -> Result<HermitianEstimate> {
    check_record(design, record, basis)?;
    let pinned = 1.0 / basis.dim() as f64;
    let free: Vec<usize> = (1..basis.len()).collect();
    let reduced = RealMatrix::from_rows(
        &(0..design.rows())
            .map(|k| free.iter().map(|&m| design[(k, m)]).collect())
            .collect::<Vec<_>>(),
    )?;
    let target: Vec<f64> = (0..design.rows())
        .map(|k| record.values[k] - design[(k, 0)] * pinned)
        .collect();
    let coeffs = least_squares(&reduced, &target).map_err(|cols| {
        Error::RankDeficient(cols.iter().map(|&c| basis.labels()[free[c]].clone()).collect())
    })?;
    let mut full = vec![crate::linalg::C64::new(pinned, 0.0)];
    full.extend(coeffs.iter().map(|&c| crate::linalg::C64::new(c, 0.0)));
    HermitianEstimate::new(basis.combine(&full)?)
}

/// Least squares by modified Gram-Schmidt QR. On rank deficiency returns
/// the indices of columns that depend on earlier ones.
pub(crate) fn least_squares(a: &RealMatrix, b: &[f64]) -> std::result::Result<Vec<f64>, Vec<usize>> {
    let (m, n) = (a.rows(), a.cols());
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut r = vec![0.0; n * n];
    let mut dependent = Vec::new();
    for j in 0..n {
        let mut v = a.column(j);
        let scale = solver::norm2(&v);
        for _ in 0..2 {
            for (i, qi) in q.iter().enumerate() {
                let p = solver::dot(qi, &v);
                r[i * n + j] += p;
                solver::axpy(-p, qi, &mut v);
            }
        }
        let len = solver::norm2(&v);
        if len <= 1e-10 * scale.max(1.0) {
            dependent.push(j);
            q.push(vec![0.0; m]);
            continue;
        }
        r[j * n + j] = len;
        q.push(v.iter().map(|e| e / len).collect());
    }
    if !dependent.is_empty() {
        return Err(dependent);
    }
    let qtb: Vec<f64> = q.iter().map(|qi| solver::dot(qi, b)).collect();
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = qtb[i];
        for k in (i + 1)..n {
            s -= r[i * n + k] * x[k];
        }
        x[i] = s / r[i * n + i];
    }
    Ok(x)
}

/// The constrained problem solved by [`reconstruct_cco`], over the `4^n`
/// real parameters of the isometric Hermitian parameterization of `ρ`,
/// with `Tr ρ = 1` as the single affine row.
pub fn cco_problem(
    design: &RealMatrix,
    record: &MeasurementRecord,
    basis: &OperatorBasis,
) -> Result<ConstrainedLsqProblem> {
    check_record(design, record, basis)?;
    let param = HermitianParam::new(basis.dim());
    let d = basis.dim() as f64;
    // Pauli coefficient m of the Hermitian basis element G_i is Tr(A_m G_i)/d.
    let mut to_pauli = RealMatrix::zeros(basis.len(), param.len());
    for (i, g) in param.basis().iter().enumerate() {
        for (m, a) in basis.elements().iter().enumerate() {
            to_pauli[(m, i)] = a.trace_product(g)?.re / d;
        }
    }
    let mut trace_row = vec![0.0; param.len()];
    for i in param.diagonal_indices() {
        trace_row[i] = 1.0;
    }
    ConstrainedLsqProblem::new(
        design.matmul(&to_pauli),
        record.values.clone(),
        param,
        vec![AffineConstraint::new(trace_row, 1.0)],
    )
}

/// Least-squares fit to the record over valid density matrices.
pub fn reconstruct_cco(
    design: &RealMatrix,
    record: &MeasurementRecord,
    basis: &OperatorBasis,
    config: &SolverConfig,
) -> Result<(DensityMatrix, SolverReport)> {
    let problem = cco_problem(design, record, basis)?;
    let report = solver::solve(&problem, config)?;
    if !report.converged {
        return Err(Error::NotConverged(Box::new(report)));
    }
    let rho = DensityMatrix::new(problem.psd_map.to_matrix(&report.solution))?;
    Ok((rho, report))
}

/// `‖A c − b‖₂` for the Pauli coefficients `c` of `m`.
pub fn pauli_objective(
    design: &RealMatrix,
    record: &MeasurementRecord,
    basis: &OperatorBasis,
    m: &ComplexMatrix,
) -> Result<f64> {
    let coeffs: Vec<f64> = basis.coefficients(m)?.iter().map(|c| c.re).collect();
    let fit = design.matvec(&coeffs);
    Ok(fit
        .iter()
        .zip(&record.values)
        .map(|(f, v)| (f - v).powi(2))
        .sum::<f64>()
        .sqrt())
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    Ok(eig_hermitian(m)?.min_value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{label_index, pauli_basis};
    use crate::state::make_state;

    fn setup() -> (OperatorBasis, MeasurementScheme, RealMatrix) {
        let basis = pauli_basis(2).unwrap();
        let scheme = MeasurementScheme::pauli_default(&basis);
        let design = build_design_matrix(&scheme, &basis).unwrap();
        (basis, scheme, design)
    }

    #[test]
    fn single_observable_row() {
        let basis = pauli_basis(2).unwrap();
        let scheme = MeasurementScheme::from_labels(&["ZI"]).unwrap();
        let a = build_design_matrix(&scheme, &basis).unwrap();
        let zi = label_index("ZI").unwrap();
        for m in 0..16 {
            assert_eq!(a[(0, m)], if m == zi { 4.0 } else { 0.0 });
        }
    }

    #[test]
    fn full_scheme_is_four_identity() {
        let (_, _, a) = setup();
        assert_eq!((a.rows(), a.cols()), (15, 16));
        for k in 0..15 {
            for m in 0..16 {
                let expected = if m == k + 1 { 4.0 } else { 0.0 };
                assert!((a[(k, m)] - expected).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn summed_observable() {
        let basis = pauli_basis(2).unwrap();
        let scheme = MeasurementScheme::from_labels(&["XI+ZI"]).unwrap();
        let a = build_design_matrix(&scheme, &basis).unwrap();
        let nonzero: Vec<usize> = (0..16).filter(|&m| a[(0, m)] != 0.0).collect();
        assert_eq!(nonzero, vec![label_index("XI").unwrap(), label_index("ZI").unwrap()]);
        assert!(nonzero.iter().all(|&m| a[(0, m)] == 4.0));
    }

    #[test]
    fn dimension_mismatch() {
        let basis = pauli_basis(1).unwrap();
        let scheme = MeasurementScheme::from_labels(&["ZZ"]).unwrap();
        assert!(matches!(build_design_matrix(&scheme, &basis), Err(Error::Dimension(_))));
    }

    #[test]
    fn noiseless_simulation() {
        let basis = pauli_basis(2).unwrap();
        let zi = MeasurementScheme::from_labels(&["ZI"]).unwrap();
        let r = simulate_measurements(&make_state("00").unwrap(), &zi, 0.0, 1).unwrap();
        assert_eq!(r.values, vec![1.0]);

        let scheme = MeasurementScheme::pauli_default(&basis);
        let r = simulate_measurements(&make_state("B1").unwrap(), &scheme, 0.0, 1).unwrap();
        for (l, v) in r.labels.iter().zip(&r.values) {
            let expected = match l.as_str() {
                "XX" | "ZZ" => 1.0,
                "YY" => -1.0,
                _ => 0.0,
            };
            assert!((v - expected).abs() < 1e-15, "{l}");
        }
    }

    #[test]
    fn seeded_simulation_is_reproducible() {
        let (_, scheme, _) = setup();
        let rho = make_state("B1").unwrap();
        let a = simulate_measurements(&rho, &scheme, 0.05, 42).unwrap();
        let b = simulate_measurements(&rho, &scheme, 0.05, 42).unwrap();
        assert_eq!(a, b);
        let c = simulate_measurements(&rho, &scheme, 0.05, 43).unwrap();
        assert_ne!(a.values, c.values);
        assert!(a.validate().is_ok());
    }

    #[test]
    fn standard_recovers_noiseless_state() {
        let (basis, scheme, design) = setup();
        let truth = make_state("01").unwrap();
        let record = simulate_measurements(&truth, &scheme, 0.0, 0).unwrap();
        let est = reconstruct_standard(&design, &record, &basis).unwrap();
        assert!(est.matrix.approx_eq(truth.matrix(), 1e-15));
        assert!(est.min_eigenvalue.abs() < 1e-15);
    }

    fn crafted_record() -> MeasurementRecord {
        let (_, scheme, _) = setup();
        let mut record = simulate_measurements(&make_state("00").unwrap(), &scheme, 0.0, 0).unwrap();
        let zz = record.labels.iter().position(|l| l == "ZZ").unwrap();
        record.values[zz] += 0.06;
        record.noise_std = 0.05;
        record
    }

    #[test]
    fn crafted_record_goes_negative() {
        // ρ = diag(1.015, −0.015, −0.015, 0.015) from the perturbed ZZ coefficient.
        let (basis, _, design) = setup();
        let est = reconstruct_standard(&design, &crafted_record(), &basis).unwrap();
        let ev = eig_hermitian(&est.matrix).unwrap().values;
        let expected = [1.015, 0.015, -0.015, -0.015];
        for (e, x) in ev.iter().zip(expected) {
            assert!((e - x).abs() < 1e-14);
        }
        assert!((est.min_eigenvalue + 0.015).abs() < 1e-14);
        assert!(!est.is_physical());
        assert!((est.matrix.trace().re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn cco_clips_crafted_record_to_boundary() {
        // The design is 4·(Pauli coordinates), so the fit is the Frobenius
        // projection of diag(1.015, −0.015, −0.015, 0.015) onto the unit-trace
        // PSD set: diag(1, 0, 0, 0).
        let (basis, _, design) = setup();
        let (rho, report) =
            reconstruct_cco(&design, &crafted_record(), &basis, &SolverConfig::default()).unwrap();
        assert!(report.converged);
        assert!(rho.matrix().approx_eq(make_state("00").unwrap().matrix(), 1e-7));
        let ev = rho.eigenvalues();
        assert!(ev[3] >= -1e-9);
        assert!(ev[1..].iter().all(|e| e.abs() < 1e-7));
    }

    #[test]
    fn cco_recovers_noiseless_pure_state() {
        let (basis, scheme, design) = setup();
        for name in ["00", "B3", "+-", "|01> + i|11>"] {
            let truth = make_state(name).unwrap();
            let record = simulate_measurements(&truth, &scheme, 0.0, 0).unwrap();
            let (rho, _) = reconstruct_cco(&design, &record, &basis, &SolverConfig::default()).unwrap();
            assert!(rho.matrix().frobenius_distance(truth.matrix()) < 1e-6, "{name}");
        }
    }

    #[test]
    fn rank_deficient_scheme_names_directions() {
        let basis = pauli_basis(2).unwrap();
        let scheme = MeasurementScheme::from_labels(&["ZI", "IZ", "ZZ"]).unwrap();
        let design = build_design_matrix(&scheme, &basis).unwrap();
        let record = simulate_measurements(&make_state("00").unwrap(), &scheme, 0.0, 0).unwrap();
        match reconstruct_standard(&design, &record, &basis) {
            Err(Error::RankDeficient(labels)) => {
                assert_eq!(labels.len(), 12);
                assert!(labels.contains(&"XX".to_string()));
                assert!(!labels.contains(&"ZZ".to_string()));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn record_validation() {
        let mut r = crafted_record();
        r.values[0] = 3.0;
        assert!(r.validate().is_err());
        r.values.pop();
        assert!(matches!(r.validate(), Err(Error::Dimension(_))));
    }
}
