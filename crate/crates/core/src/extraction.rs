//! Recovering the Hamiltonian that drives a unitary path.
//!
//! The numerical route differentiates the path directly, `H = i U̇ U†`, with
//! second-order finite differences. It is the reference every closed-form
//! coefficient set is checked against.

use std::io::{self, Write};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dynamics::{Hamiltonian, HamiltonianSample};
use crate::error::{Error, Result};
use crate::format::sig17;
use crate::linalg::{pauli_decompose, OperatorMatrix, PauliCoefficients, TwoLevelSubspace};
use crate::scalar::{c, Real};
use crate::schedule::Schedule;
use crate::synthesis::{FrameParams, UnitaryPath};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtractionConfig<T: Real> {
    /// Finite-difference step; `None` means `T::default_fd_fraction()·τ`
    /// (`1e−5·τ` in double precision).
    pub fd_step: Option<T>,
    /// Replace the raw estimate by its Hermitian part.
    pub hermitize: bool,
}

impl<T: Real> Default for ExtractionConfig<T> {
    fn default() -> Self {
        Self {
            fd_step: None,
            hermitize: true,
        }
    }
}

impl<T: Real> ExtractionConfig<T> {
    pub fn step_for(&self, tau: T) -> Result<T> {
        let h = self
            .fd_step
            .unwrap_or_else(|| T::default_fd_fraction() * tau);
        if !(h > T::zero()) || !(h < tau * T::lit(0.5)) {
            return Err(Error::invalid(format!(
                "finite-difference step must lie in (0, tau/2), got {h}"
            )));
        }
        Ok(h)
    }
}

/// Finite-difference Hamiltonian together with the anti-Hermitian part of the
/// raw estimate (max entry of `(H − H†)/2`), measured before symmetrization.
#[derive(Debug, Clone)]
pub struct FdHamiltonian<T: Real> {
    pub matrix: OperatorMatrix<T>,
    pub anti_hermitian_residue: T,
}

/// `H(t) = i U̇(t) U†(t)` on the two-level block of `path`.
///
/// Central differences in the interior; second-order one-sided stencils when
/// `t` is within one step of either end.
pub fn hamiltonian_fd<T: Real>(
    path: &UnitaryPath<T>,
    t: T,
    cfg: &ExtractionConfig<T>,
) -> Result<FdHamiltonian<T>> {
    let tau = path.tau();
    let h = cfg.step_for(tau)?;
    if !(t >= T::zero() && t <= tau) {
        return Err(Error::TimeOutOfRange {
            t: t.to_f64().unwrap_or(f64::NAN),
            tau: tau.to_f64().unwrap_or(f64::NAN),
        });
    }
    let u = |s: T| path.reduced_unitary_at(s);
    let two = T::lit(2.0);
    let (three, four) = (T::lit(3.0), T::lit(4.0));
    let scaled = |m: OperatorMatrix<T>| m.scale(c(T::one() / (two * h), T::zero()));
    let u_dot = if t - h >= T::zero() && t + h <= tau {
        scaled(u(t + h)?.sub(&u(t - h)?)?)
    } else if t + two * h <= tau {
        let m = u(t)?
            .scale(c(-three, T::zero()))
            .add(&u(t + h)?.scale(c(four, T::zero())))?
            .sub(&u(t + two * h)?)?;
        scaled(m)
    } else if t - two * h >= T::zero() {
        let m = u(t)?
            .scale(c(three, T::zero()))
            .sub(&u(t - h)?.scale(c(four, T::zero())))?
            .add(&u(t - two * h)?)?;
        scaled(m)
    } else {
        return Err(Error::invalid(
            "finite-difference stencil does not fit in [0, tau]",
        ));
    };
    let raw = u_dot.matmul(&u(t)?.dagger())?.scale(c(T::zero(), T::one()));
    if !raw.is_finite() {
        return Err(Error::NonFinite(format!(
            "finite-difference Hamiltonian at t = {t}"
        )));
    }
    let anti_hermitian_residue = raw.hermiticity_defect() * T::lit(0.5);
    let matrix = if cfg.hermitize {
        raw.hermitian_part()
    } else {
        raw
    };
    Ok(FdHamiltonian {
        matrix,
        anti_hermitian_residue,
    })
}

/// Driving Hamiltonian of a path, extracted on demand by finite differences.
///
/// Embedded paths yield subspace samples (zero on the complement).
pub struct ExtractedHamiltonian<T: Real> {
    path: UnitaryPath<T>,
    cfg: ExtractionConfig<T>,
    subspace: Option<Arc<TwoLevelSubspace<T>>>,
}

impl<T: Real> ExtractedHamiltonian<T> {
    pub fn new(path: UnitaryPath<T>, cfg: ExtractionConfig<T>) -> Result<Self> {
        cfg.step_for(path.tau())?;
        let subspace = path.basis().cloned().map(Arc::new);
        Ok(Self {
            path,
            cfg,
            subspace,
        })
    }

    pub fn path(&self) -> &UnitaryPath<T> {
        &self.path
    }
}

impl<T: Real> Hamiltonian<T> for ExtractedHamiltonian<T> {
    fn dim(&self) -> usize {
        self.path.dim()
    }

    fn sample(&self, t: T) -> Result<HamiltonianSample<T>> {
        let block = hamiltonian_fd(&self.path, t, &self.cfg)?.matrix;
        Ok(match &self.subspace {
            None => HamiltonianSample::Dense(block),
            Some(s) => HamiltonianSample::Embedded {
                block,
                subspace: Arc::clone(s),
            },
        })
    }
}

/// Values and rates of the frame and relative phase at one instant.
#[derive(Debug, Clone, Copy)]
struct Kinematics<T> {
    theta: T,
    theta_dot: T,
    omega: T,
    omega_dot: T,
    phi: T,
    phi_dot: T,
}

impl<T: Real> Kinematics<T> {
    fn sample(frame: &FrameParams<T>, phi: (T, T), t: T) -> Result<Self> {
        Ok(Self {
            theta: frame.theta.evaluate(t)?,
            theta_dot: frame.theta.derivative(t)?,
            omega: frame.omega.evaluate(t)?,
            omega_dot: frame.omega.derivative(t)?,
            phi: phi.0,
            phi_dot: phi.1,
        })
    }

    fn general(&self) -> PauliCoefficients<T> {
        let Self {
            theta,
            theta_dot: td,
            omega,
            omega_dot: od,
            phi,
            phi_dot: pd,
        } = *self;
        let (st, ct) = theta.sin_cos();
        let (so, co) = omega.sin_cos();
        let (sp, cp) = phi.sin_cos();
        let cm1 = cp - T::one();
        let shared = td * ct * sp + pd * st;
        let wx = cm1 * od * co * ct * st + shared * co + (od * st * sp + cm1 * td) * so;
        let wy = cm1 * od * so * st * ct + so * shared + (od * st * sp - cm1 * td) * co;
        let wz = -td * st * sp - cm1 * od * st * st + pd * ct;
        PauliCoefficients::traceless(wx, wy, wz)
    }

    fn grover(&self) -> PauliCoefficients<T> {
        let (st, ct) = self.theta.sin_cos();
        let sp = self.phi.sin();
        let sh = (self.phi * T::lit(0.5)).sin();
        PauliCoefficients::traceless(
            self.phi_dot * st - self.theta_dot * ct * sp,
            T::lit(2.0) * self.theta_dot * sh * sh,
            self.phi_dot * ct - self.theta_dot * st * sp,
        )
    }
}

fn phase_sample<T: Real>(phi: &Schedule<T>, t: T) -> Result<(T, T)> {
    Ok((phi.evaluate(t)?, phi.derivative(t)?))
}

fn check_same_tau<T: Real>(a: T, b: T) -> Result<()> {
    if a != b {
        return Err(Error::invalid("schedules must share the same duration"));
    }
    Ok(())
}

/// Traceless single-qubit coefficients for the gauge φ₁ = 0, φ₂ = φ, written
/// term by term in the general-Ω closed form.
///
/// These agree with [`hamiltonian_fd`] whenever Ω ≡ 0. For time-varying Ω the
/// ωx expression does not match direct differentiation (ωy and ωz do).
pub fn closed_form_eq8<T: Real>(
    frame: &FrameParams<T>,
    phi: &Schedule<T>,
    t: T,
) -> Result<PauliCoefficients<T>> {
    check_same_tau(frame.tau(), phi.tau())?;
    Ok(Kinematics::sample(frame, phase_sample(phi, t)?, t)?.general())
}

/// Grover-subspace coefficients in the ordered basis `{|m⊥⟩, |m⟩}`
/// (`σz = |m⊥⟩⟨m⊥| − |m⟩⟨m|`), Ω ≡ 0:
///
/// ```text
/// ωx = φ̇ sin θ − θ̇ cos θ sin φ
/// ωy = 2 θ̇ sin²(φ/2)
/// ωz = φ̇ cos θ − θ̇ sin θ sin φ
/// ```
///
/// Exact for constant θ. With θ̇ ≠ 0 the sign of the θ̇ term in ωx is opposite
/// to what differentiation of the path gives.
pub fn closed_form_grover<T: Real>(
    theta: &Schedule<T>,
    phi: &Schedule<T>,
    t: T,
) -> Result<PauliCoefficients<T>> {
    check_same_tau(theta.tau(), phi.tau())?;
    let frame = FrameParams::real(theta.clone())?;
    Ok(Kinematics::sample(&frame, phase_sample(phi, t)?, t)?.grover())
}

/// How the Deutsch oracle prefactor `sin²(Fπ/2)` is formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum FConvention {
    /// `F = (−1)^{f(0)} − (−1)^{f(1)}`; always even, so the prefactor vanishes.
    PaperLiteral,
    /// `F = f(0) − f(1)`, i.e. `sin²((φ₁ − φ₂)/2)` with `φₙ = π f(n)`.
    #[default]
    Corrected,
}

impl FConvention {
    pub fn f_value(self, f0: bool, f1: bool) -> i32 {
        let (a, b) = (f0 as i32, f1 as i32);
        match self {
            FConvention::PaperLiteral => (1 - 2 * a) - (1 - 2 * b),
            FConvention::Corrected => a - b,
        }
    }
}

/// Deutsch-oracle coefficients for constant phases `φₙ = π f(n)`:
///
/// ```text
/// ωx = 2 sin²(Fπ/2) [Ω̇ cos Ω sin θ cos θ + θ̇ sin Ω]
/// ωy = 2 sin²(Fπ/2) [θ̇ cos Ω − Ω̇ sin Ω sin θ cos θ]
/// ωz = 2 sin²(Fπ/2) Ω̇ sin² θ
/// ```
pub fn closed_form_deutsch<T: Real>(
    frame: &FrameParams<T>,
    f0: bool,
    f1: bool,
    t: T,
    convention: FConvention,
) -> Result<PauliCoefficients<T>> {
    let k = Kinematics::sample(frame, (T::zero(), T::zero()), t)?;
    // F is an integer: sin²(Fπ/2) is exactly 0 or 1
    let prefactor = if convention.f_value(f0, f1) % 2 == 0 {
        T::zero()
    } else {
        T::lit(2.0)
    };
    let (st, ct) = k.theta.sin_cos();
    let (so, co) = k.omega.sin_cos();
    Ok(PauliCoefficients::traceless(
        prefactor * (k.omega_dot * co * st * ct + so * k.theta_dot),
        prefactor * (co * k.theta_dot - k.omega_dot * so * st * ct),
        prefactor * k.omega_dot * st * st,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientSource {
    FiniteDifference,
    ClosedFormEq8,
    ClosedFormGrover,
    ClosedFormDeutsch,
}

impl CoefficientSource {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::FiniteDifference => "finite_difference",
            Self::ClosedFormEq8 => "closed_form_eq8",
            Self::ClosedFormGrover => "closed_form_grover",
            Self::ClosedFormDeutsch => "closed_form_deutsch",
        }
    }
}

/// Which extractor [`coefficient_series`] runs at each sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoefficientSelector<T: Real> {
    FiniteDifference(ExtractionConfig<T>),
    /// Uses the relative phase φ₂ − φ₁ (the traceless part only depends on it).
    ClosedFormEq8,
    ClosedFormGrover,
    ClosedFormDeutsch {
        f0: bool,
        f1: bool,
        convention: FConvention,
    },
}

impl<T: Real> CoefficientSelector<T> {
    pub fn source(&self) -> CoefficientSource {
        match self {
            Self::FiniteDifference(_) => CoefficientSource::FiniteDifference,
            Self::ClosedFormEq8 => CoefficientSource::ClosedFormEq8,
            Self::ClosedFormGrover => CoefficientSource::ClosedFormGrover,
            Self::ClosedFormDeutsch { .. } => CoefficientSource::ClosedFormDeutsch,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSample<T: Real> {
    pub t: T,
    pub coeffs: PauliCoefficients<T>,
    pub source: CoefficientSource,
}

/// Coefficients at one instant from the chosen extractor.
pub fn coefficients_at<T: Real>(
    path: &UnitaryPath<T>,
    selector: &CoefficientSelector<T>,
    t: T,
) -> Result<PauliCoefficients<T>> {
    let relative_phase = || -> Result<(T, T)> {
        Ok((
            path.phase2.evaluate(t)? - path.phase1.evaluate(t)?,
            path.phase2.derivative(t)? - path.phase1.derivative(t)?,
        ))
    };
    match selector {
        CoefficientSelector::FiniteDifference(cfg) => {
            pauli_decompose(&hamiltonian_fd(path, t, cfg)?.matrix)
        }
        CoefficientSelector::ClosedFormEq8 => {
            Ok(Kinematics::sample(&path.frame, relative_phase()?, t)?.general())
        }
        CoefficientSelector::ClosedFormGrover => {
            Ok(Kinematics::sample(&path.frame, relative_phase()?, t)?.grover())
        }
        CoefficientSelector::ClosedFormDeutsch { f0, f1, convention } => {
            closed_form_deutsch(&path.frame, *f0, *f1, t, *convention)
        }
    }
}

/// Uniform grid over `[0, τ]` including both ends.
pub fn coefficient_series<T: Real>(
    path: &UnitaryPath<T>,
    selector: &CoefficientSelector<T>,
    n_samples: usize,
) -> Result<Vec<CoefficientSample<T>>> {
    if n_samples < 2 {
        return Err(Error::invalid(
            "coefficient series needs at least 2 samples",
        ));
    }
    let tau = path.tau();
    (0..n_samples)
        .map(|k| {
            let t = if k + 1 == n_samples {
                tau
            } else {
                tau * T::lit(k as f64 / (n_samples - 1) as f64)
            };
            Ok(CoefficientSample {
                t,
                coeffs: coefficients_at(path, selector, t)?,
                source: selector.source(),
            })
        })
        .collect()
}

/// `t,omega_0,omega_x,omega_y,omega_z,source` with 17 significant digits.
pub fn write_coefficients_csv<T: Real, W: Write>(
    mut w: W,
    samples: &[CoefficientSample<T>],
) -> io::Result<()> {
    writeln!(w, "t,omega_0,omega_x,omega_y,omega_z,source")?;
    for s in samples {
        let p = &s.coeffs;
        writeln!(
            w,
            "{},{},{},{},{},{}",
            sig17(s.t),
            sig17(p.omega0),
            sig17(p.omega_x),
            sig17(p.omega_y),
            sig17(p.omega_z),
            s.source.as_str()
        )?;
    }
    Ok(())
}
