//! Real-valued control schedules on `[0, τ]` with analytic derivatives.
//!
//! A schedule's JSON form carries only its profile; the duration `τ` comes
//! from the surrounding run configuration:
//!
//! ```json
//! {"kind": "linear", "from": 0.0, "to": 3.141592653589793}
//! {"kind": "constant", "value": 0.7853981633974483}
//! {"kind": "smooth", "from": 0.0, "to": 3.141592653589793}
//! {"kind": "polynomial", "coefficients": [0.0, 1.0, -0.5]}
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Shape of a schedule, independent of its duration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Profile<T: Real> {
    Constant {
        value: T,
    },
    Linear {
        from: T,
        to: T,
    },
    /// `from + (to − from)·sin²(πt/2τ)`; zero slope at both ends.
    Smooth {
        from: T,
        to: T,
    },
    /// `Σ cₖ sᵏ` in the normalized time `s = t/τ`.
    Polynomial {
        coefficients: Vec<T>,
    },
}

impl<T: Real> Profile<T> {
    pub fn constant(value: T) -> Self {
        Profile::Constant { value }
    }

    pub fn linear(from: T, to: T) -> Self {
        Profile::Linear { from, to }
    }

    pub fn smooth(from: T, to: T) -> Self {
        Profile::Smooth { from, to }
    }

    pub fn polynomial(coefficients: Vec<T>) -> Self {
        Profile::Polynomial { coefficients }
    }

    pub fn over(self, tau: T) -> Result<Schedule<T>> {
        Schedule::new(self, tau)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule<T: Real> {
    pub profile: Profile<T>,
    pub tau: T,
}

impl<T: Real> Schedule<T> {
    pub fn new(profile: Profile<T>, tau: T) -> Result<Self> {
        if !(tau > T::zero()) || !tau.is_finite() {
            return Err(Error::invalid(format!(
                "schedule duration must be positive, got {tau}"
            )));
        }
        let params_finite = match &profile {
            Profile::Constant { value } => value.is_finite(),
            Profile::Linear { from, to } | Profile::Smooth { from, to } => {
                from.is_finite() && to.is_finite()
            }
            Profile::Polynomial { coefficients } => {
                !coefficients.is_empty() && coefficients.iter().all(|c| c.is_finite())
            }
        };
        if !params_finite {
            return Err(Error::invalid(
                "schedule parameters must be finite (and non-empty)",
            ));
        }
        Ok(Self { profile, tau })
    }

    pub fn constant(value: T, tau: T) -> Result<Self> {
        Self::new(Profile::constant(value), tau)
    }

    pub fn linear(from: T, to: T, tau: T) -> Result<Self> {
        Self::new(Profile::linear(from, to), tau)
    }

    pub fn smooth(from: T, to: T, tau: T) -> Result<Self> {
        Self::new(Profile::smooth(from, to), tau)
    }

    pub fn polynomial(coefficients: Vec<T>, tau: T) -> Result<Self> {
        Self::new(Profile::polynomial(coefficients), tau)
    }

    pub fn tau(&self) -> T {
        self.tau
    }

    fn check_time(&self, t: T) -> Result<()> {
        if t >= T::zero() && t <= self.tau {
            Ok(())
        } else {
            Err(Error::TimeOutOfRange {
                t: t.to_f64().unwrap_or(f64::NAN),
                tau: self.tau.to_f64().unwrap_or(f64::NAN),
            })
        }
    }

    pub fn evaluate(&self, t: T) -> Result<T> {
        self.check_time(t)?;
        let s = t / self.tau;
        Ok(match &self.profile {
            Profile::Constant { value } => *value,
            Profile::Linear { from, to } => *from + (*to - *from) * s,
            Profile::Smooth { from, to } => {
                let x = (T::FRAC_PI_2() * s).sin();
                *from + (*to - *from) * x * x
            }
            Profile::Polynomial { coefficients } => coefficients
                .iter()
                .rev()
                .fold(T::zero(), |acc, &c| acc * s + c),
        })
    }

    pub fn derivative(&self, t: T) -> Result<T> {
        self.check_time(t)?;
        let s = t / self.tau;
        Ok(match &self.profile {
            Profile::Constant { .. } => T::zero(),
            Profile::Linear { from, to } => (*to - *from) / self.tau,
            Profile::Smooth { from, to } => {
                // d/dt sin²(πs/2) = (π/2τ)·sin(πs)
                (*to - *from) * T::FRAC_PI_2() / self.tau * (T::PI() * s).sin()
            }
            Profile::Polynomial { coefficients } => {
                let mut acc = T::zero();
                for (k, &c) in coefficients.iter().enumerate().skip(1).rev() {
                    acc = acc * s + c * T::lit(k as f64);
                }
                acc / self.tau
            }
        })
    }

    pub fn check_boundaries(&self, spec: &BoundarySpec<T>) -> bool {
        let tol = T::tolerance(BOUNDARY_TOL);
        let close = |t: T, want: T| {
            self.evaluate(t)
                .map(|v| (v - want).abs() <= tol)
                .unwrap_or(false)
        };
        close(T::zero(), spec.value_at_0) && close(self.tau, spec.value_at_tau)
    }

    /// Like [`Self::check_boundaries`], but names the failure.
    pub fn require_boundaries(&self, name: &str, spec: &BoundarySpec<T>) -> Result<()> {
        if self.check_boundaries(spec) {
            return Ok(());
        }
        let start = self.evaluate(T::zero())?;
        let end = self.evaluate(self.tau)?;
        Err(Error::BoundaryViolation(format!(
            "{name}: got ({start}, {end}) at (0, tau), expected ({}, {})",
            spec.value_at_0, spec.value_at_tau
        )))
    }
}

pub const BOUNDARY_TOL: f64 = 1e-12;

/// Required schedule values at `t = 0` and `t = τ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundarySpec<T: Real> {
    pub value_at_0: T,
    pub value_at_tau: T,
}

impl<T: Real> BoundarySpec<T> {
    pub fn new(value_at_0: T, value_at_tau: T) -> Self {
        Self {
            value_at_0,
            value_at_tau,
        }
    }
}
