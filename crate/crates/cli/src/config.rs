//! Run configuration. Every key has a flag of the same name (underscores
//! become dashes); flags win over the file.

use std::fs;
use std::path::{Path, PathBuf};

use hiqe::dynamics::{IntegratorConfig, Method};
use hiqe::extraction::{CoefficientSource, FConvention};
use hiqe::linalg::StateVector;
use hiqe::protocols::{BooleanFunction, DeutschMode, ThetaMode};
use hiqe::schedule::BoundarySpec;
use hiqe::synthesis::PathSpec;
use hiqe::C;
use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ThetaFinal {
    Value(f64),
    Keyword(Auto),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Auto {
    Auto,
}

/// Optional boundary checks applied to the configured path before any run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Boundaries {
    pub theta: Option<BoundarySpec<f64>>,
    pub omega: Option<BoundarySpec<f64>>,
    pub phase1: Option<BoundarySpec<f64>>,
    pub phase2: Option<BoundarySpec<f64>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<String>,
    pub tau: Option<f64>,
    pub steps: Option<usize>,
    pub method: Option<Method>,
    pub record_every: Option<usize>,
    pub out: Option<PathBuf>,
    pub csv: Option<PathBuf>,

    pub f: Option<[u8; 2]>,
    pub mode: Option<DeutschMode>,

    #[serde(alias = "n_qubits")]
    pub n: Option<u32>,
    #[serde(alias = "marked_index")]
    pub marked: Option<u64>,
    #[serde(alias = "theta_tau")]
    pub theta_final: Option<ThetaFinal>,
    pub a: Option<i64>,
    pub theta_mode: Option<ThetaMode>,
    pub reduced: Option<bool>,

    pub samples: Option<usize>,
    pub source: Option<CoefficientSource>,
    pub fd_step: Option<f64>,
    pub f_convention: Option<FConvention>,

    pub path: Option<PathSpec<f64>>,
    pub boundaries: Option<Boundaries>,
    /// Initial state as `[re, im]` pairs.
    pub psi0: Option<Vec<[f64; 2]>>,
    /// Basis indices whose populations go to the trajectory CSV.
    pub populations: Option<Vec<usize>>,
}

macro_rules! overlay {
    ($base:ident, $top:ident; $($field:ident),* $(,)?) => {
        RunConfig { $($field: $top.$field.or($base.$field)),* }
    };
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
    }

    /// Fields set in `top` replace those in `self`.
    pub fn overlay(self, top: RunConfig) -> RunConfig {
        let base = self;
        overlay!(base, top;
            command, tau, steps, method, record_every, out, csv, f, mode, n, marked,
            theta_final, a, theta_mode, reduced, samples, source, fd_step, f_convention,
            path, boundaries, psi0, populations,
        )
    }

    pub fn tau(&self) -> Result<f64, CliError> {
        let tau = self.tau.unwrap_or(1.0);
        if tau > 0.0 && tau.is_finite() {
            Ok(tau)
        } else {
            Err(CliError::Validation(format!(
                "tau must be positive and finite, got {tau}"
            )))
        }
    }

    pub fn integrator(&self) -> Result<IntegratorConfig, CliError> {
        let d = IntegratorConfig::default();
        let cfg = IntegratorConfig {
            method: self.method.unwrap_or(d.method),
            steps: self.steps.unwrap_or(d.steps),
            record_every: self.record_every.unwrap_or(d.record_every),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn function(&self) -> Result<BooleanFunction, CliError> {
        let [f0, f1] = self
            .f
            .ok_or_else(|| CliError::Validation("missing f (e.g. --f 0,1)".into()))?;
        Ok(BooleanFunction::from_bits(f0, f1)?)
    }

    pub fn path_spec(&self) -> Result<&PathSpec<f64>, CliError> {
        self.path
            .as_ref()
            .ok_or_else(|| CliError::Validation("config has no path".into()))
    }

    pub fn initial_state(&self) -> Result<StateVector<f64>, CliError> {
        match &self.psi0 {
            None => Ok(StateVector::basis(2, 0)?),
            Some(pairs) => {
                let amps = pairs.iter().map(|[re, im]| C::new(*re, *im)).collect();
                Ok(StateVector::new(amps)?)
            }
        }
    }
}

/// Parses a flag value with the same spelling the config file uses.
pub fn parse_keyword<T: DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|e| e.to_string())
}

pub fn parse_bits(s: &str) -> Result<[u8; 2], String> {
    let bits: Vec<&str> = s.split(',').map(str::trim).collect();
    match bits.as_slice() {
        [a, b] => Ok([
            a.parse().map_err(|_| format!("bad bit {a:?}"))?,
            b.parse().map_err(|_| format!("bad bit {b:?}"))?,
        ]),
        _ => Err(format!("expected two comma-separated bits, got {s:?}")),
    }
}

pub fn parse_theta_final(s: &str) -> Result<ThetaFinal, String> {
    if s.eq_ignore_ascii_case("auto") {
        Ok(ThetaFinal::Keyword(Auto::Auto))
    } else {
        s.parse::<f64>()
            .map(ThetaFinal::Value)
            .map_err(|_| format!("expected \"auto\" or an angle in radians, got {s:?}"))
    }
}
