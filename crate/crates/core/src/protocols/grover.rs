//! Single-evolution Grover search in the two-level model spanned by the marked
//! state `|m⟩` and the uniform superposition of the rest, `|m⊥⟩`.
//!
//! The input `cos α|m⊥⟩ + sin α|m⟩` is driven by a path with Ω ≡ 0, φ₁ ≡ 0
//! and φ₂: 0 → π, which at `t = τ` reflects it to angle `α − θ(τ)`. The
//! success probability is `sin²(α − θ(τ))`.

use serde::{Deserialize, Serialize};

use crate::dynamics::{population, propagate, IntegratorConfig};
use crate::error::{Error, Result};
use crate::extraction::{ExtractedHamiltonian, ExtractionConfig};
use crate::linalg::{StateVector, TwoLevelSubspace};
use crate::scalar::{re, Real};
use crate::schedule::Schedule;
use crate::synthesis::{FrameParams, UnitaryPath};

/// Largest register the full-register runner accepts.
pub const MAX_QUBITS: u32 = 10;

/// `α` with `cos α = √((N−1)/N)`, computed as `atan2(1, √(N−1))`.
pub fn grover_alpha<T: Real>(n: u64) -> Result<T> {
    if n < 2 {
        return Err(Error::invalid(format!(
            "database size must be at least 2, got {n}"
        )));
    }
    Ok(T::one().atan2(T::lit((n - 1) as f64).sqrt()))
}

/// `θ(τ) = (a + ½)π + α(N)`.
pub fn grover_target_angle<T: Real>(n: u64, a: i64) -> Result<T> {
    Ok((T::lit(a as f64) + T::lit(0.5)) * T::PI() + grover_alpha::<T>(n)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsilonCheck<T: Real> {
    /// `α − θ(τ) − π/2`, reduced to `[−π/2, π/2]`.
    pub epsilon: T,
    /// `sin²(α − θ(τ))`
    pub predicted_p: T,
    /// `1 − ε²`
    pub quadratic_approx: T,
}

/// Exact success probability next to its small-ε expansion `1 − ε²`.
pub fn epsilon_probability_check<T: Real>(alpha: T, theta_tau: T) -> EpsilonCheck<T> {
    let epsilon = reduce_epsilon(alpha - theta_tau - T::FRAC_PI_2());
    let s = (alpha - theta_tau).sin();
    EpsilonCheck {
        epsilon,
        predicted_p: s * s,
        quadratic_approx: T::one() - epsilon * epsilon,
    }
}

fn reduce_epsilon<T: Real>(raw: T) -> T {
    raw - T::PI() * (raw / T::PI()).round()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ThetaMode {
    /// θ ≡ θ(τ): time-independent Hamiltonian with ωy = 0.
    #[default]
    Constant,
    /// θ: 0 → θ(τ).
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroverMode {
    Reduced,
    FullRegister,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroverInstance {
    pub n_qubits: u32,
    pub marked_index: u64,
}

impl GroverInstance {
    pub fn new(n_qubits: u32, marked_index: u64) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::invalid(format!(
                "n_qubits must be in 1..={MAX_QUBITS}, got {n_qubits}"
            )));
        }
        let inst = Self {
            n_qubits,
            marked_index,
        };
        if marked_index >= inst.size() {
            return Err(Error::invalid(format!(
                "marked index {marked_index} out of range for N = {}",
                inst.size()
            )));
        }
        Ok(inst)
    }

    /// `N = 2ⁿ`
    pub fn size(&self) -> u64 {
        1u64 << self.n_qubits
    }

    pub fn marked_state<T: Real>(&self) -> StateVector<T> {
        StateVector::basis(self.size() as usize, self.marked_index as usize).expect("index checked")
    }

    /// Uniform superposition of all unmarked basis states.
    pub fn unmarked_state<T: Real>(&self) -> StateVector<T> {
        let m = self.marked_index as usize;
        StateVector::normalized(
            (0..self.size() as usize)
                .map(|k| re(if k == m { T::zero() } else { T::one() }))
                .collect(),
        )
        .expect("N >= 2")
    }

    /// `(1/√N) Σₖ |k⟩`
    pub fn uniform_state<T: Real>(&self) -> StateVector<T> {
        StateVector::normalized(vec![re(T::one()); self.size() as usize]).expect("N >= 2")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroverReport<T: Real> {
    pub alpha: T,
    pub theta_tau: T,
    pub epsilon: T,
    pub predicted_p: T,
    pub integrated_p: T,
    pub mode: GroverMode,
    /// `p_m(t)` at the recorded times (full-register runs only).
    pub p_trajectory: Vec<T>,
    pub trajectory_times: Vec<T>,
    /// Largest probability found outside `span{|m⟩, |m⊥⟩}`.
    pub max_leakage: T,
}

/// Two-level Grover path: Ω ≡ 0, φ₁ ≡ 0, φ₂: 0 → π.
pub fn grover_path<T: Real>(theta_tau: T, tau: T, theta_mode: ThetaMode) -> Result<UnitaryPath<T>> {
    let theta = match theta_mode {
        ThetaMode::Constant => Schedule::constant(theta_tau, tau)?,
        ThetaMode::Linear => Schedule::linear(T::zero(), theta_tau, tau)?,
    };
    UnitaryPath::with_phase(
        FrameParams::real(theta)?,
        Schedule::linear(T::zero(), T::PI(), tau)?,
    )
}

fn report_header<T: Real>(n: u64, theta_tau: T) -> Result<(T, EpsilonCheck<T>)> {
    let alpha = grover_alpha::<T>(n)?;
    Ok((alpha, epsilon_probability_check(alpha, theta_tau)))
}

/// Integrates the extracted two-level Hamiltonian from `cos α|m⊥⟩ + sin α|m⟩`
/// (index 0 is `|m⊥⟩`, index 1 is `|m⟩`).
pub fn grover_reduced_run<T: Real>(
    n: u64,
    theta_tau: T,
    tau: T,
    cfg: &IntegratorConfig,
    theta_mode: ThetaMode,
) -> Result<GroverReport<T>> {
    let (alpha, eps) = report_header(n, theta_tau)?;
    let path = grover_path(theta_tau, tau, theta_mode)?;
    let h = ExtractedHamiltonian::new(path, ExtractionConfig::default())?;
    let psi0 = StateVector::from_real(&[alpha.cos(), alpha.sin()])?;
    let run_cfg = cfg.with_record_every(cfg.steps);
    let traj = propagate(&h, &psi0, tau, &run_cfg)?;
    let out = traj.final_state();
    let integrated_p = out[1].norm_sqr() / out.norm_sqr();
    Ok(GroverReport {
        alpha,
        theta_tau,
        epsilon: eps.epsilon,
        predicted_p: eps.predicted_p,
        integrated_p,
        mode: GroverMode::Reduced,
        p_trajectory: Vec::new(),
        trajectory_times: Vec::new(),
        max_leakage: T::zero(),
    })
}

/// Same dynamics on the full `2ⁿ`-dimensional register, starting from the
/// uniform superposition. The two-level Hamiltonian acts on
/// `span{|m⊥⟩, |m⟩}` and as zero elsewhere.
pub fn grover_full_run<T: Real>(
    inst: &GroverInstance,
    theta_tau: T,
    tau: T,
    cfg: &IntegratorConfig,
    theta_mode: ThetaMode,
) -> Result<GroverReport<T>> {
    let inst = GroverInstance::new(inst.n_qubits, inst.marked_index)?;
    let (alpha, eps) = report_header(inst.size(), theta_tau)?;
    let marked = inst.marked_state::<T>();
    let subspace = TwoLevelSubspace::new(inst.unmarked_state(), marked.clone())?;
    let path = grover_path(theta_tau, tau, theta_mode)?.embedded(subspace.clone());
    let h = ExtractedHamiltonian::new(path, ExtractionConfig::default())?;
    let traj = propagate(&h, &inst.uniform_state(), tau, cfg)?;
    let p_trajectory = population(&traj, &marked)?;
    let max_leakage = traj
        .states
        .iter()
        .map(|s| subspace.leakage(s.amplitudes()))
        .fold(T::zero(), T::max);
    Ok(GroverReport {
        alpha,
        theta_tau,
        epsilon: eps.epsilon,
        predicted_p: eps.predicted_p,
        integrated_p: *p_trajectory.last().expect("final state recorded"),
        mode: GroverMode::FullRegister,
        p_trajectory,
        trajectory_times: traj.times,
        max_leakage,
    })
}
