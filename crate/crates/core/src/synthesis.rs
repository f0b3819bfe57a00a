//! Unitary paths built spectrally from a rotating frame and two phase schedules:
//!
//! ```text
//! U(t) = e^{iφ₁(t)} |φ₁(t)⟩⟨φ₁(t)| + e^{iφ₂(t)} |φ₂(t)⟩⟨φ₂(t)|
//! |φ₁(t)⟩ =  cos(θ/2)|0⟩ + e^{iΩ} sin(θ/2)|1⟩
//! |φ₂(t)⟩ = −sin(θ/2)|0⟩ + e^{iΩ} cos(θ/2)|1⟩
//! ```
//!
//! `U(0) = 𝟙` holds exactly when both phases start at a multiple of 2π.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{OperatorMatrix, StateVector, TwoLevelSubspace};
use crate::scalar::{cis, re, Real, C};
use crate::schedule::{Profile, Schedule};

/// Polar angle θ(t) and azimuthal phase Ω(t) of the rotating frame.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameParams<T: Real> {
    pub theta: Schedule<T>,
    pub omega: Schedule<T>,
}

impl<T: Real> FrameParams<T> {
    pub fn new(theta: Schedule<T>, omega: Schedule<T>) -> Result<Self> {
        if theta.tau() != omega.tau() {
            return Err(Error::invalid(
                "frame schedules must share the same duration",
            ));
        }
        Ok(Self { theta, omega })
    }

    /// Frame with Ω ≡ 0.
    pub fn real(theta: Schedule<T>) -> Result<Self> {
        let tau = theta.tau();
        Self::new(theta, Schedule::constant(T::zero(), tau)?)
    }

    pub fn tau(&self) -> T {
        self.theta.tau()
    }

    pub fn states_at(&self, t: T) -> Result<(StateVector<T>, StateVector<T>)> {
        let [first, second] = self.coords_at(t)?;
        Ok((
            StateVector::from_raw(first.to_vec()),
            StateVector::from_raw(second.to_vec()),
        ))
    }

    pub(crate) fn coords_at(&self, t: T) -> Result<[[C<T>; 2]; 2]> {
        let theta = self.theta.evaluate(t)?;
        let omega = self.omega.evaluate(t)?;
        Ok(frame_coords(theta, omega))
    }
}

pub(crate) fn frame_coords<T: Real>(theta: T, omega: T) -> [[C<T>; 2]; 2] {
    let half = theta * T::lit(0.5);
    let (s, co) = half.sin_cos();
    let e = cis(omega);
    [[re(co), e * s], [re(-s), e * co]]
}

/// `U(t)` defined by a frame plus phases φ₁, φ₂, optionally embedded in a larger
/// space through an ordered orthonormal pair.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryPath<T: Real> {
    pub frame: FrameParams<T>,
    pub phase1: Schedule<T>,
    pub phase2: Schedule<T>,
    basis: Option<TwoLevelSubspace<T>>,
}

impl<T: Real> UnitaryPath<T> {
    pub fn new(frame: FrameParams<T>, phase1: Schedule<T>, phase2: Schedule<T>) -> Result<Self> {
        let tau = frame.tau();
        if phase1.tau() != tau || phase2.tau() != tau {
            return Err(Error::invalid(
                "path schedules must share the same duration",
            ));
        }
        Ok(Self {
            frame,
            phase1,
            phase2,
            basis: None,
        })
    }

    /// Common gauge φ₁ ≡ 0, φ₂ = φ.
    pub fn with_phase(frame: FrameParams<T>, phi: Schedule<T>) -> Result<Self> {
        let tau = frame.tau();
        Self::new(frame, Schedule::constant(T::zero(), tau)?, phi)
    }

    /// Embeds the two-level dynamics in `span{lower, upper}`; the ambient
    /// unitary acts as the identity on the orthogonal complement.
    pub fn embedded(mut self, basis: TwoLevelSubspace<T>) -> Self {
        self.basis = Some(basis);
        self
    }

    pub fn basis(&self) -> Option<&TwoLevelSubspace<T>> {
        self.basis.as_ref()
    }

    /// The same path without its embedding.
    pub fn reduced(&self) -> Self {
        Self {
            basis: None,
            ..self.clone()
        }
    }

    pub fn tau(&self) -> T {
        self.frame.tau()
    }

    pub fn dim(&self) -> usize {
        self.basis.as_ref().map_or(2, |b| b.dim())
    }

    /// 2×2 unitary of the two-level model, ignoring any embedding.
    pub fn reduced_unitary_at(&self, t: T) -> Result<OperatorMatrix<T>> {
        let frame = self.frame.coords_at(t)?;
        let phases = [cis(self.phase1.evaluate(t)?), cis(self.phase2.evaluate(t)?)];
        let mut u = OperatorMatrix::zeros(2);
        for (v, p) in frame.iter().zip(phases) {
            for i in 0..2 {
                for j in 0..2 {
                    u[(i, j)] = u[(i, j)] + p * v[i] * v[j].conj();
                }
            }
        }
        Ok(u)
    }

    /// `U(t)` in the ambient dimension.
    pub fn unitary_at(&self, t: T) -> Result<OperatorMatrix<T>> {
        let u = self.reduced_unitary_at(t)?;
        match &self.basis {
            None => Ok(u),
            Some(basis) => {
                // 𝟙 + V (u − 𝟙) V†
                let block = u.sub(&OperatorMatrix::identity(2))?;
                OperatorMatrix::identity(basis.dim()).add(&basis.embed(&block))
            }
        }
    }

    /// Samples `U(t)` on a uniform grid and reports unitarity and `U(0) = 𝟙`.
    ///
    /// For embedded paths the unitarity defect is that of the 2×2 block (the
    /// embedding basis is orthonormal by construction); the identity defect is
    /// measured on the ambient matrix.
    pub fn validate(&self, samples: usize) -> Result<PathReport<T>> {
        if samples < 2 {
            return Err(Error::invalid("validation needs at least 2 samples"));
        }
        let tau = self.tau();
        let mut max_unitarity_defect = T::zero();
        for k in 0..samples {
            let t = tau * T::lit(k as f64 / (samples - 1) as f64);
            let u = self.reduced_unitary_at(t)?;
            max_unitarity_defect = max_unitarity_defect.max(u.unitarity_defect());
        }
        let u0 = self.unitary_at(T::zero())?;
        let max_identity_defect = u0.max_abs_diff(&OperatorMatrix::identity(u0.dim()))?;
        Ok(PathReport {
            is_unitary: max_unitarity_defect <= T::tolerance(UNITARITY_TOL),
            identity_at_zero: max_identity_defect <= T::tolerance(IDENTITY_TOL),
            max_unitarity_defect,
            max_identity_defect,
        })
    }
}

pub const UNITARITY_TOL: f64 = 1e-12;
pub const IDENTITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathReport<T: Real> {
    pub is_unitary: bool,
    pub identity_at_zero: bool,
    pub max_unitarity_defect: T,
    pub max_identity_defect: T,
}

/// Closed-form `(α, β) = U|ψ₀⟩` for `|ψ₀⟩ = a|0⟩ + b|1⟩` in the gauge
/// φ₁ = 0, φ₂ = φ:
///
/// ```text
/// α = (a σ₊ − σ₋ α̃)/2,   β = (b σ₊ + σ₋ β̃)/2,   σ± = e^{iφ} ± 1
/// α̃ = a cos θ + b e^{−iΩ} sin θ
/// β̃ = b cos θ − a e^{iΩ} sin θ
/// ```
///
/// The exponent in α̃, β̃ is the frame phase Ω, which is what direct expansion
/// of the spectral form gives.
pub fn evolved_amplitudes<T: Real>(
    a: T,
    b: C<T>,
    theta: T,
    omega_angle: T,
    phi: T,
) -> Result<(C<T>, C<T>)> {
    let n2 = a * a + b.norm_sqr();
    if (n2 - T::one()).abs() > T::tolerance(1e-12) {
        return Err(Error::NotNormalized {
            norm_sqr: n2.to_f64().unwrap_or(f64::NAN),
        });
    }
    let a = re(a);
    let e_phi = cis(phi);
    let one = re(T::one());
    let sigma_plus = e_phi + one;
    let sigma_minus = e_phi - one;
    let (s, co) = theta.sin_cos();
    let e_omega = cis(omega_angle);
    let alpha_t = a * co + b * e_omega.conj() * s;
    let beta_t = b * co - a * e_omega * s;
    let half = re(T::lit(0.5));
    Ok((
        (a * sigma_plus - sigma_minus * alpha_t) * half,
        (b * sigma_plus + sigma_minus * beta_t) * half,
    ))
}

/// JSON form of a path; durations come from the run configuration.
///
/// `{"frame":{"theta":<profile>,"omega":<profile>},"phase1":<profile>,"phase2":<profile>}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSpec<T: Real> {
    pub frame: FrameSpec<T>,
    pub phase1: Profile<T>,
    pub phase2: Profile<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameSpec<T: Real> {
    pub theta: Profile<T>,
    pub omega: Profile<T>,
}

impl<T: Real> PathSpec<T> {
    pub fn build(&self, tau: T) -> Result<UnitaryPath<T>> {
        let frame = FrameParams::new(
            self.frame.theta.clone().over(tau)?,
            self.frame.omega.clone().over(tau)?,
        )?;
        UnitaryPath::new(
            frame,
            self.phase1.clone().over(tau)?,
            self.phase2.clone().over(tau)?,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hadamard, sigma_x};
    use crate::scalar::c;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    const TAU: f64 = 1.3;

    fn k(v: f64) -> Schedule<f64> {
        Schedule::constant(v, TAU).unwrap()
    }

    fn lin(a: f64, b: f64) -> Schedule<f64> {
        Schedule::linear(a, b, TAU).unwrap()
    }

    fn frame(theta: f64, omega: f64) -> FrameParams<f64> {
        FrameParams::new(k(theta), k(omega)).unwrap()
    }

    fn sv(a: [f64; 2]) -> StateVector<f64> {
        StateVector::from_real(&a).unwrap()
    }

    #[test]
    fn frame_state_examples() {
        let (p, q) = frame(0.0, 0.0).states_at(0.0).unwrap();
        assert_eq!((p, q), (sv([1.0, 0.0]), sv([0.0, 1.0])));

        let (p, q) = frame(PI, 0.0).states_at(0.4).unwrap();
        assert!(p.max_abs_diff(&sv([0.0, 1.0])).unwrap() < 1e-15);
        assert!(q.max_abs_diff(&sv([-1.0, 0.0])).unwrap() < 1e-15);

        let (p, q) = frame(PI / 2.0, 0.0).states_at(TAU).unwrap();
        let h = FRAC_1_SQRT_2;
        assert!(p.max_abs_diff(&sv([h, h])).unwrap() < 1e-15);
        assert!(q.max_abs_diff(&sv([-h, h])).unwrap() < 1e-15);

        assert!(frame(0.0, 0.0).states_at(TAU * 1.01).is_err());
    }

    #[test]
    fn identity_at_zero_for_zero_phases() {
        let f = FrameParams::new(lin(0.3, 2.0), lin(-1.0, 0.5)).unwrap();
        let path = UnitaryPath::new(f, lin(0.0, 1.0), lin(0.0, -2.0)).unwrap();
        let u0 = path.unitary_at(0.0).unwrap();
        assert!(u0.max_abs_diff(&OperatorMatrix::identity(2)).unwrap() < 1e-15);
    }

    #[test]
    fn hadamard_path_end_point() {
        let path = UnitaryPath::with_phase(frame(PI / 4.0, 0.0), lin(0.0, PI)).unwrap();
        let u = path.unitary_at(TAU).unwrap();
        // explicit P₁ − P₂ at θ = π/4
        let (p, q) = path.frame.states_at(TAU).unwrap();
        let explicit = OperatorMatrix::outer(&p, &p)
            .unwrap()
            .sub(&OperatorMatrix::outer(&q, &q).unwrap())
            .unwrap();
        assert!(u.max_abs_diff(&explicit).unwrap() < 1e-15);
        assert!(u.max_abs_diff(&hadamard()).unwrap() < 1e-15);
    }

    #[test]
    fn diagonal_oracle_end_point() {
        for (f0, f1) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            let path = UnitaryPath::new(
                frame(0.0, 0.0),
                lin(0.0, PI * f0 as f64),
                lin(0.0, PI * f1 as f64),
            )
            .unwrap();
            let sign = |f: i32| re(if f == 0 { 1.0 } else { -1.0 });
            let want = OperatorMatrix::diagonal(&[sign(f0), sign(f1)]);
            assert!(path.unitary_at(TAU).unwrap().max_abs_diff(&want).unwrap() < 1e-15);
        }
    }

    #[test]
    fn evolved_amplitude_examples() {
        let a = 0.6;
        let b = c(0.0, 0.8);
        let (x, y) = evolved_amplitudes(a, b, 1.1, 0.4, 0.0).unwrap();
        assert!((x - re(a)).norm() < 1e-15 && (y - b).norm() < 1e-15);

        let phi = 2.2;
        let (x, y) = evolved_amplitudes(a, b, 0.0, 0.0, phi).unwrap();
        assert!((x - re(a)).norm() < 1e-15);
        assert!((y - b * cis(phi)).norm() < 1e-15);

        // a=1, b=0, θ=π/2, Ω=0, φ=π against matrix application
        let (x, y) = evolved_amplitudes(1.0, re(0.0), PI / 2.0, 0.0, PI).unwrap();
        let path = UnitaryPath::with_phase(frame(PI / 2.0, 0.0), k(PI)).unwrap();
        let want = path
            .unitary_at(0.0)
            .unwrap()
            .apply(&sv([1.0, 0.0]))
            .unwrap();
        assert!((x - want[0]).norm() < 1e-15 && (y - want[1]).norm() < 1e-15);
        // U = P₁ − P₂ = σx at θ = π/2
        assert!((y - re(1.0)).norm() < 1e-15 && x.norm() < 1e-15);
        assert_eq!(
            sigma_x::<f64>().apply(&sv([1.0, 0.0])).unwrap(),
            sv([0.0, 1.0])
        );

        assert!(matches!(
            evolved_amplitudes(1.0, re(0.5), 0.0, 0.0, 0.0),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn validate_examples() {
        let had = UnitaryPath::with_phase(frame(PI / 4.0, 0.0), lin(0.0, PI)).unwrap();
        let r = had.validate(33).unwrap();
        assert!(r.is_unitary && r.identity_at_zero);
        assert!(r.max_unitarity_defect <= 1e-12);

        let literal = UnitaryPath::with_phase(frame(PI / 4.0, 0.0), k(PI)).unwrap();
        let r = literal.validate(8).unwrap();
        assert!(r.is_unitary && !r.identity_at_zero);
        // U(0) = [[cos θ, sin θ], [sin θ, −cos θ]]
        assert!((r.max_identity_defect - (1.0 + (PI / 4.0).cos())).abs() < 1e-12);

        assert!(had.validate(1).is_err());
    }

    #[test]
    fn embedding_acts_trivially_on_complement() {
        let n = 8;
        let m = 5;
        let marked = StateVector::basis(n, m).unwrap();
        let rest =
            StateVector::normalized((0..n).map(|k| re(if k == m { 0.0 } else { 1.0 })).collect())
                .unwrap();
        let basis = TwoLevelSubspace::new(rest.clone(), marked.clone()).unwrap();
        let path = UnitaryPath::with_phase(FrameParams::real(lin(0.0, 2.0)).unwrap(), lin(0.0, PI))
            .unwrap()
            .embedded(basis);
        let u = path.unitary_at(0.7).unwrap();
        assert_eq!(u.dim(), n);
        assert!(u.unitarity_defect() < 1e-13);
        // |0⟩ − |1⟩ is orthogonal to both |m⟩ and |m⊥⟩
        let mut amps = vec![re(0.0); n];
        amps[0] = re(FRAC_1_SQRT_2);
        amps[1] = re(-FRAC_1_SQRT_2);
        let v = StateVector::new(amps).unwrap();
        assert!(u.apply(&v).unwrap().max_abs_diff(&v).unwrap() < 1e-14);
        assert!(path.validate(4).unwrap().identity_at_zero);
    }

    #[test]
    fn path_spec_json() {
        let json = r#"{"frame":{"theta":{"kind":"constant","value":0.7853981633974483},
                       "omega":{"kind":"constant","value":0.0}},
                       "phase1":{"kind":"constant","value":0.0},
                       "phase2":{"kind":"linear","from":0.0,"to":3.141592653589793}}"#;
        let spec: PathSpec<f64> = serde_json::from_str(json).unwrap();
        let path = spec.build(TAU).unwrap();
        assert!(
            path.unitary_at(TAU)
                .unwrap()
                .max_abs_diff(&hadamard())
                .unwrap()
                < 1e-15
        );
    }
}
