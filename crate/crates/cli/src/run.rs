use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use hiqe::dynamics::{propagate, write_trajectory_csv, TrajectoryColumns};
use hiqe::extraction::{
    coefficient_series, write_coefficients_csv, CoefficientSample, CoefficientSelector,
    CoefficientSource, ExtractedHamiltonian, ExtractionConfig, FConvention,
};
use hiqe::format::{sig17, to_json_string};
use hiqe::linalg::{fidelity, StateVector};
use hiqe::protocols::{
    deutsch_oracle_path, deutsch_run, grover_full_run, grover_reduced_run, grover_target_angle,
    GroverInstance, GroverMode, GroverReport,
};
use hiqe::synthesis::{PathReport, UnitaryPath};
use serde::Serialize;

use crate::config::{RunConfig, ThetaFinal};
use crate::error::CliError;

pub const DEFAULT_SAMPLES: usize = 101;
const VALIDATE_SAMPLES: usize = 33;

fn write_file(
    path: &Path,
    f: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>,
) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = BufWriter::new(file);
    f(&mut w)
        .and_then(|_| w.flush())
        .map_err(|e| CliError::io(path, e))
}

/// Report JSON to `--out` or stdout.
fn emit<S: Serialize>(cfg: &RunConfig, report: &S) -> Result<(), CliError> {
    let json = to_json_string(report).map_err(|e| CliError::Numeric(e.to_string()))?;
    match &cfg.out {
        Some(path) => write_file(path, |w| writeln!(w, "{json}")),
        None => {
            let mut out = io::stdout().lock();
            writeln!(out, "{json}").map_err(|e| CliError::io("<stdout>", e))
        }
    }
}

fn extraction(cfg: &RunConfig) -> ExtractionConfig<f64> {
    ExtractionConfig {
        fd_step: cfg.fd_step,
        ..ExtractionConfig::default()
    }
}

fn selector(cfg: &RunConfig) -> Result<CoefficientSelector<f64>, CliError> {
    Ok(
        match cfg.source.unwrap_or(CoefficientSource::FiniteDifference) {
            CoefficientSource::FiniteDifference => {
                CoefficientSelector::FiniteDifference(extraction(cfg))
            }
            CoefficientSource::ClosedFormEq8 => CoefficientSelector::ClosedFormEq8,
            CoefficientSource::ClosedFormGrover => CoefficientSelector::ClosedFormGrover,
            CoefficientSource::ClosedFormDeutsch => {
                let f = cfg.function()?;
                CoefficientSelector::ClosedFormDeutsch {
                    f0: f.f0,
                    f1: f.f1,
                    convention: cfg.f_convention.unwrap_or(FConvention::Corrected),
                }
            }
        },
    )
}

fn samples(cfg: &RunConfig, default: usize) -> Result<usize, CliError> {
    match cfg.samples.unwrap_or(default) {
        n if n >= 2 => Ok(n),
        n => Err(CliError::Validation(format!(
            "samples must be at least 2, got {n}"
        ))),
    }
}

fn write_coefficients(cfg: &RunConfig, series: &[CoefficientSample<f64>]) -> Result<(), CliError> {
    match &cfg.csv {
        Some(path) => write_file(path, |w| write_coefficients_csv(w, series)),
        None => Ok(()),
    }
}

/// Builds the configured path and enforces its boundary specs.
fn checked_path(cfg: &RunConfig) -> Result<UnitaryPath<f64>, CliError> {
    let path = cfg.path_spec()?.build(cfg.tau()?)?;
    if let Some(b) = &cfg.boundaries {
        let pairs = [
            ("theta", &b.theta, &path.frame.theta),
            ("omega", &b.omega, &path.frame.omega),
            ("phase1", &b.phase1, &path.phase1),
            ("phase2", &b.phase2, &path.phase2),
        ];
        for (name, spec, schedule) in pairs {
            if let Some(spec) = spec {
                schedule.require_boundaries(name, spec)?;
            }
        }
    }
    Ok(path)
}

pub fn deutsch(cfg: &RunConfig) -> Result<(), CliError> {
    let f = cfg.function()?;
    let tau = cfg.tau()?;
    let mode = cfg.mode.unwrap_or_default();
    let report = deutsch_run(f, tau, &cfg.integrator()?, mode)?;
    if cfg.csv.is_some() {
        let path = deutsch_oracle_path(f, tau, mode)?;
        let series = coefficient_series(&path, &selector(cfg)?, samples(cfg, DEFAULT_SAMPLES)?)?;
        write_coefficients(cfg, &series)?;
    }
    emit(cfg, &report)
}

fn theta_tau(cfg: &RunConfig, size: u64) -> Result<f64, CliError> {
    match cfg
        .theta_final
        .unwrap_or(ThetaFinal::Keyword(crate::config::Auto::Auto))
    {
        ThetaFinal::Value(v) if v.is_finite() => Ok(v),
        ThetaFinal::Value(v) => Err(CliError::Validation(format!(
            "theta_final must be finite, got {v}"
        ))),
        ThetaFinal::Keyword(_) => Ok(grover_target_angle(size, cfg.a.unwrap_or(0))?),
    }
}

pub fn grover(cfg: &RunConfig) -> Result<(), CliError> {
    let n_qubits = cfg
        .n
        .ok_or_else(|| CliError::Validation("missing n (number of qubits)".into()))?;
    if n_qubits == 0 || n_qubits > 62 {
        return Err(CliError::Validation(format!(
            "n must be in 1..=62, got {n_qubits}"
        )));
    }
    let size = 1u64 << n_qubits;
    let tau = cfg.tau()?;
    let theta = theta_tau(cfg, size)?;
    let integrator = cfg.integrator()?;
    let theta_mode = cfg.theta_mode.unwrap_or_default();
    let report = if cfg.reduced.unwrap_or(false) {
        if cfg.csv.is_some() {
            return Err(CliError::Validation(
                "the p_m(t) trajectory is only recorded by the full-register run".into(),
            ));
        }
        grover_reduced_run(size, theta, tau, &integrator, theta_mode)?
    } else {
        let marked = cfg
            .marked
            .ok_or_else(|| CliError::Validation("missing marked index".into()))?;
        let inst = GroverInstance::new(n_qubits, marked)?;
        grover_full_run(&inst, theta, tau, &integrator, theta_mode)?
    };
    if let Some(path) = &cfg.csv {
        write_file(path, |w| write_population_csv(w, &report))?;
    }
    emit(cfg, &report)
}

fn write_population_csv<W: Write>(w: &mut W, report: &GroverReport<f64>) -> io::Result<()> {
    debug_assert_eq!(report.mode, GroverMode::FullRegister);
    writeln!(w, "t,p_m")?;
    for (t, p) in report.trajectory_times.iter().zip(&report.p_trajectory) {
        writeln!(w, "{},{}", sig17(*t), sig17(*p))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct ExtractReport {
    path_report: PathReport<f64>,
    samples: Vec<CoefficientSample<f64>>,
}

pub fn extract(cfg: &RunConfig) -> Result<(), CliError> {
    let path = checked_path(cfg)?;
    let path_report = path.validate(VALIDATE_SAMPLES)?;
    let samples = coefficient_series(&path, &selector(cfg)?, samples(cfg, DEFAULT_SAMPLES)?)?;
    write_coefficients(cfg, &samples)?;
    emit(
        cfg,
        &ExtractReport {
            path_report,
            samples,
        },
    )
}

#[derive(Serialize)]
struct EvolveReport {
    path_report: PathReport<f64>,
    final_state: StateVector<f64>,
    /// Fidelity of the final state to `U(τ)U†(0)|ψ₀⟩`.
    target_fidelity: f64,
    max_norm_drift: f64,
    times: usize,
}

pub fn evolve(cfg: &RunConfig) -> Result<(), CliError> {
    let path = checked_path(cfg)?;
    let tau = path.tau();
    let path_report = path.validate(VALIDATE_SAMPLES)?;
    let psi0 = cfg.initial_state()?;
    if psi0.dim() != path.dim() {
        return Err(CliError::Validation(format!(
            "psi0 has dimension {}, path acts on {}",
            psi0.dim(),
            path.dim()
        )));
    }
    let target = path
        .unitary_at(tau)?
        .matmul(&path.unitary_at(0.0)?.dagger())?
        .apply(&psi0)?;
    let h = ExtractedHamiltonian::new(path, extraction(cfg))?;
    let traj = propagate(&h, &psi0, tau, &cfg.integrator()?)?;
    if let Some(csv) = &cfg.csv {
        let columns = match &cfg.populations {
            None => TrajectoryColumns::Amplitudes,
            Some(idx) => TrajectoryColumns::Populations(
                idx.iter()
                    .map(|&k| Ok((k.to_string(), StateVector::basis(psi0.dim(), k)?)))
                    .collect::<Result<_, hiqe::Error>>()?,
            ),
        };
        write_file(csv, |w| write_trajectory_csv(w, &traj, &columns))?;
    }
    let final_state = traj.final_state().clone();
    emit(
        cfg,
        &EvolveReport {
            path_report,
            target_fidelity: fidelity(&target, &final_state)?,
            final_state,
            max_norm_drift: traj.max_norm_drift(),
            times: traj.times.len(),
        },
    )
}

pub fn validate(cfg: &RunConfig) -> Result<(), CliError> {
    let path = checked_path(cfg)?;
    let report = path.validate(samples(cfg, VALIDATE_SAMPLES)?)?;
    emit(cfg, &report)?;
    if !report.is_unitary {
        return Err(CliError::Numeric(format!(
            "path is not unitary (max defect {:e})",
            report.max_unitarity_defect
        )));
    }
    if !report.identity_at_zero {
        return Err(CliError::Validation(format!(
            "identity-at-zero check failed: max |U(0) - 1| = {:e}",
            report.max_identity_defect
        )));
    }
    Ok(())
}
