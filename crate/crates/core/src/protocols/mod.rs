//! End-to-end Deutsch and Grover runners.
//!
//! Each runner builds the unitary path, extracts its Hamiltonian by finite
//! differences, integrates the Schrödinger equation and reads out
//! projection probabilities analytically.

mod deutsch;
mod grover;

pub use deutsch::{
    deutsch_oracle_path, deutsch_run, hadamard_step, BooleanFunction, DeutschMode, DeutschReport,
    Verdict,
};
pub use grover::{
    epsilon_probability_check, grover_alpha, grover_full_run, grover_path, grover_reduced_run,
    grover_target_angle, EpsilonCheck, GroverInstance, GroverMode, GroverReport, ThetaMode,
    MAX_QUBITS,
};
