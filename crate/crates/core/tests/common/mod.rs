#![allow(dead_code)]

use std::f64::consts::PI;

use hiqe::dynamics::{FnHamiltonian, Hamiltonian};
use hiqe::extraction::closed_form_eq8;
use hiqe::linalg::{OperatorMatrix, StateVector};
use hiqe::schedule::{Profile, Schedule};
use hiqe::synthesis::{FrameParams, UnitaryPath};
use hiqe::{Result, C};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const TAU: f64 = 1.0;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random non-constant profile with values of order `scale`. When `from_zero`
/// the profile starts at 0.
pub fn random_profile(rng: &mut ChaCha8Rng, scale: f64, from_zero: bool) -> Profile<f64> {
    let start = if from_zero {
        0.0
    } else {
        rng.gen_range(-scale..scale)
    };
    let end = rng.gen_range(-scale..scale);
    match rng.gen_range(0..3) {
        0 => Profile::linear(start, end),
        1 => Profile::smooth(start, end),
        _ => {
            let c1 = rng.gen_range(-scale..scale);
            let c2 = rng.gen_range(-scale..scale) / 2.0;
            let c3 = rng.gen_range(-scale..scale) / 3.0;
            Profile::polynomial(vec![start, c1, c2, c3])
        }
    }
}

pub fn schedule(p: Profile<f64>) -> Schedule<f64> {
    p.over(TAU).unwrap()
}

/// Random path with all four schedules generic. `identity_at_zero` pins both
/// phases to 0 at `t = 0`.
pub fn random_path(rng: &mut ChaCha8Rng, identity_at_zero: bool) -> UnitaryPath<f64> {
    let theta = schedule(random_profile(rng, PI / 2.0, false));
    let omega = schedule(random_profile(rng, PI / 2.0, false));
    let phase = |rng: &mut ChaCha8Rng| {
        if identity_at_zero {
            schedule(random_profile(rng, PI, true))
        } else {
            schedule(random_profile(rng, PI, false))
        }
    };
    let p1 = phase(rng);
    let p2 = phase(rng);
    UnitaryPath::new(FrameParams::new(theta, omega).unwrap(), p1, p2).unwrap()
}

/// Ω ≡ 0, φ₁ ≡ 0, random θ and φ₂ = φ starting at 0.
pub fn random_real_path(rng: &mut ChaCha8Rng) -> UnitaryPath<f64> {
    let theta = schedule(random_profile(rng, PI / 2.0, false));
    let phi = schedule(random_profile(rng, PI, true));
    UnitaryPath::with_phase(FrameParams::real(theta).unwrap(), phi).unwrap()
}

pub fn random_state(rng: &mut ChaCha8Rng, dim: usize) -> StateVector<f64> {
    let amps = (0..dim)
        .map(|_| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    StateVector::normalized(amps).unwrap()
}

pub fn random_matrix(rng: &mut ChaCha8Rng, dim: usize) -> OperatorMatrix<f64> {
    let rows = (0..dim)
        .map(|_| {
            (0..dim)
                .map(|_| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect()
        })
        .collect();
    OperatorMatrix::from_rows(rows).unwrap()
}

/// Exact `i U̇ U†` for Ω ≡ 0, φ₁ ≡ 0: the traceless closed form plus
/// `−φ̇/2 𝟙` (from `det U = e^{iφ}`).
pub fn analytic_hamiltonian(path: &UnitaryPath<f64>) -> impl Hamiltonian<f64> + '_ {
    FnHamiltonian::new(2, move |t: f64| -> Result<OperatorMatrix<f64>> {
        let mut p = closed_form_eq8(&path.frame, &path.phase2, t)?;
        p.omega0 = -path.phase2.derivative(t)?;
        Ok(p.reconstruct())
    })
}

/// `‖ψ − e^{iγ}χ‖` with the global phase γ chosen optimally.
pub fn phase_aligned_distance(psi: &StateVector<f64>, chi: &StateVector<f64>) -> f64 {
    let overlap = chi.inner(psi).unwrap();
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        C::new(1.0, 0.0)
    };
    psi.amplitudes()
        .iter()
        .zip(chi.amplitudes())
        .map(|(a, b)| (a - b * phase).norm_sqr())
        .sum::<f64>()
        .sqrt()
}
