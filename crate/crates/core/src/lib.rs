//! Hamiltonian inverse engineering for two-level systems.
//!
//! A unitary path `U(t)` is declared from a rotating frame and phase
//! schedules ([`synthesis`]); the Hamiltonian that realizes it,
//! `H = i U̇ U†`, is extracted numerically or from closed forms
//! ([`extraction`]); and the Schrödinger equation is integrated to confirm
//! the Hamiltonian really produces the path ([`dynamics`]). The
//! [`protocols`] module assembles these into Deutsch and Grover runners.
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`); the aliases at
//! the crate root fix the double-precision instantiation used by the CLI and
//! the acceptance tests. ħ = 1 throughout.

// NaN has to fail tolerance checks, hence `!(x <= tol)`.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod extraction;
pub mod format;
pub mod linalg;
pub mod protocols;
pub mod scalar;
pub mod schedule;
pub mod synthesis;

pub use error::{Error, Result};
pub use scalar::{Real, C};

pub type StateVector64 = linalg::StateVector<f64>;
pub type OperatorMatrix64 = linalg::OperatorMatrix<f64>;
pub type PauliCoefficients64 = linalg::PauliCoefficients<f64>;
pub type Schedule64 = schedule::Schedule<f64>;
pub type UnitaryPath64 = synthesis::UnitaryPath<f64>;
pub type DeutschReport64 = protocols::DeutschReport<f64>;
pub type GroverReport64 = protocols::GroverReport<f64>;

pub type StateVector32 = linalg::StateVector<f32>;
pub type OperatorMatrix32 = linalg::OperatorMatrix<f32>;
pub type Schedule32 = schedule::Schedule<f32>;
pub type UnitaryPath32 = synthesis::UnitaryPath<f32>;
