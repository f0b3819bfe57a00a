//! Fixed-step integration of `i ψ̇ = H(t) ψ` (ħ = 1).
//!
//! Two schemes are provided. `ExpMidpoint` applies `exp(−i H(t + Δt/2) Δt)`
//! per step and is exactly unitary; `Rk4` is the classic fourth-order
//! Runge–Kutta scheme on `ψ̇ = −i H(t) ψ`.

use std::io::{self, Write};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::sig17;
use crate::linalg::{
    check_dim, evolution_operator, fidelity, OperatorMatrix, StateVector, TwoLevelSubspace,
};
use crate::scalar::{c, is_finite, Real, C};

/// Largest anti-Hermitian deviation tolerated in a Hamiltonian sample.
pub const SAMPLE_HERMITICITY_TOL: f64 = 1e-8;

/// A Hamiltonian evaluated at one instant.
#[derive(Debug, Clone)]
pub enum HamiltonianSample<T: Real> {
    Dense(OperatorMatrix<T>),
    /// `V·block·V†`: zero on the complement of the subspace.
    Embedded {
        block: OperatorMatrix<T>,
        subspace: Arc<TwoLevelSubspace<T>>,
    },
}

impl<T: Real> HamiltonianSample<T> {
    pub fn dim(&self) -> usize {
        match self {
            Self::Dense(m) => m.dim(),
            Self::Embedded { subspace, .. } => subspace.dim(),
        }
    }

    fn hermiticity_defect(&self) -> T {
        match self {
            Self::Dense(m) => m.hermiticity_defect(),
            Self::Embedded { block, .. } => block.hermiticity_defect(),
        }
    }

    fn is_finite(&self) -> bool {
        match self {
            Self::Dense(m) => m.is_finite(),
            Self::Embedded { block, .. } => block.is_finite(),
        }
    }

    fn apply(&self, psi: &[C<T>]) -> Vec<C<T>> {
        match self {
            Self::Dense(m) => m.apply_slice(psi),
            Self::Embedded { block, subspace } => {
                let coords = subspace.project(psi);
                let mapped = block.apply_slice(&coords);
                let mut out = vec![c(T::zero(), T::zero()); psi.len()];
                subspace.add_lifted(&mut out, [mapped[0], mapped[1]]);
                out
            }
        }
    }

    /// `exp(−i H dt)`.
    fn exp_step(&self, dt: T) -> StepOperator<T> {
        match self {
            Self::Dense(m) => StepOperator::Dense(evolution_operator(m, dt)),
            Self::Embedded { block, subspace } => StepOperator::Embedded {
                block: evolution_operator(block, dt),
                subspace: Arc::clone(subspace),
            },
        }
    }

    pub fn to_dense(&self) -> OperatorMatrix<T> {
        match self {
            Self::Dense(m) => m.clone(),
            Self::Embedded { block, subspace } => subspace.embed(block),
        }
    }
}

/// A time-dependent Hamiltonian on `[0, τ]`.
pub trait Hamiltonian<T: Real> {
    fn dim(&self) -> usize;
    fn sample(&self, t: T) -> Result<HamiltonianSample<T>>;
}

impl<T: Real, H: Hamiltonian<T> + ?Sized> Hamiltonian<T> for &H {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn sample(&self, t: T) -> Result<HamiltonianSample<T>> {
        (**self).sample(t)
    }
}

/// Dense Hamiltonian given by a closure.
pub struct FnHamiltonian<F> {
    dim: usize,
    f: F,
}

impl<F> FnHamiltonian<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<T: Real, F: Fn(T) -> Result<OperatorMatrix<T>>> Hamiltonian<T> for FnHamiltonian<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn sample(&self, t: T) -> Result<HamiltonianSample<T>> {
        let m = (self.f)(t)?;
        check_dim(self.dim, m.dim())?;
        Ok(HamiltonianSample::Dense(m))
    }
}

#[derive(Debug, Clone)]
pub struct ConstantHamiltonian<T: Real>(pub OperatorMatrix<T>);

impl<T: Real> Hamiltonian<T> for ConstantHamiltonian<T> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn sample(&self, _t: T) -> Result<HamiltonianSample<T>> {
        Ok(HamiltonianSample::Dense(self.0.clone()))
    }
}

/// Product of per-step exponentials.
#[derive(Debug, Clone)]
enum StepOperator<T: Real> {
    Identity(usize),
    Dense(OperatorMatrix<T>),
    /// `𝟙 + V(block − 𝟙)V†`: identity on the complement.
    Embedded {
        block: OperatorMatrix<T>,
        subspace: Arc<TwoLevelSubspace<T>>,
    },
}

impl<T: Real> StepOperator<T> {
    fn apply_in_place(&self, psi: &mut Vec<C<T>>) {
        match self {
            Self::Identity(_) => {}
            Self::Dense(m) => *psi = m.apply_slice(psi),
            Self::Embedded { block, subspace } => {
                let coords = subspace.project(psi);
                let mapped = block.apply_slice(&coords);
                subspace.add_lifted(psi, [mapped[0] - coords[0], mapped[1] - coords[1]]);
            }
        }
    }

    fn to_dense(&self) -> OperatorMatrix<T> {
        match self {
            Self::Identity(n) => OperatorMatrix::identity(*n),
            Self::Dense(m) => m.clone(),
            Self::Embedded { block, subspace } => {
                let shifted = block.sub(&OperatorMatrix::identity(2)).expect("2x2");
                OperatorMatrix::identity(subspace.dim())
                    .add(&subspace.embed(&shifted))
                    .expect("same dim")
            }
        }
    }

    /// `self · earlier`
    fn after(self, earlier: Self) -> Self {
        match (self, earlier) {
            (Self::Identity(_), e) => e,
            (s, Self::Identity(_)) => s,
            (
                Self::Embedded {
                    block: a,
                    subspace: sa,
                },
                Self::Embedded {
                    block: b,
                    subspace: sb,
                },
            ) if Arc::ptr_eq(&sa, &sb) || sa == sb => Self::Embedded {
                block: a.matmul(&b).expect("2x2"),
                subspace: sa,
            },
            (s, e) => Self::Dense(s.to_dense().matmul(&e.to_dense()).expect("same dim")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Rk4,
    #[default]
    ExpMidpoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub method: Method,
    pub steps: usize,
    /// Record every k-th step; the final state is always recorded.
    pub record_every: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            method: Method::ExpMidpoint,
            steps: 4096,
            record_every: 16,
        }
    }
}

impl IntegratorConfig {
    pub fn new(method: Method, steps: usize) -> Self {
        Self {
            method,
            steps,
            ..Self::default()
        }
    }

    pub fn with_record_every(self, record_every: usize) -> Self {
        Self {
            record_every,
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps < 16 {
            return Err(Error::invalid(format!(
                "steps must be >= 16, got {}",
                self.steps
            )));
        }
        if self.record_every == 0 {
            return Err(Error::invalid("record_every must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory<T: Real> {
    pub times: Vec<T>,
    pub states: Vec<StateVector<T>>,
    pub norms: Vec<T>,
}

impl<T: Real> Trajectory<T> {
    pub fn final_state(&self) -> &StateVector<T> {
        self.states
            .last()
            .expect("trajectory always records the final state")
    }

    /// Largest `|‖ψ‖ − 1|` over the recorded samples.
    pub fn max_norm_drift(&self) -> T {
        self.norms
            .iter()
            .map(|n| (*n - T::one()).abs())
            .fold(T::zero(), T::max)
    }

    fn push(&mut self, t: T, psi: &[C<T>]) {
        let state = StateVector::from_raw(psi.to_vec());
        self.norms.push(state.norm());
        self.times.push(t);
        self.states.push(state);
    }
}

fn grid<T: Real>(tau: T, k: usize, steps: usize) -> T {
    if k == steps {
        tau
    } else {
        tau * T::lit(k as f64 / steps as f64)
    }
}

fn checked_sample<T: Real, H: Hamiltonian<T>>(h: &H, t: T) -> Result<HamiltonianSample<T>> {
    let s = h.sample(t)?;
    if !s.is_finite() {
        return Err(Error::NonFinite(format!("Hamiltonian sample at t = {t}")));
    }
    let defect = s.hermiticity_defect();
    if defect > T::tolerance(SAMPLE_HERMITICITY_TOL) {
        return Err(Error::NotHermitian {
            deviation: defect.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(s)
}

fn check_run<T: Real, H: Hamiltonian<T>>(h: &H, tau: T, cfg: &IntegratorConfig) -> Result<()> {
    cfg.validate()?;
    if !(tau > T::zero()) || !tau.is_finite() {
        return Err(Error::invalid(format!(
            "duration must be positive, got {tau}"
        )));
    }
    if h.dim() < 2 {
        return Err(Error::invalid("Hamiltonian dimension must be at least 2"));
    }
    Ok(())
}

fn axpy<T: Real>(psi: &[C<T>], k: C<T>, d: &[C<T>]) -> Vec<C<T>> {
    psi.iter().zip(d).map(|(p, x)| p + x * k).collect()
}

/// Integrates from `psi0` over `[0, τ]`.
pub fn propagate<T: Real, H: Hamiltonian<T>>(
    h: &H,
    psi0: &StateVector<T>,
    tau: T,
    cfg: &IntegratorConfig,
) -> Result<Trajectory<T>> {
    check_run(h, tau, cfg)?;
    check_dim(h.dim(), psi0.dim())?;
    let n2 = psi0.norm_sqr();
    if (n2 - T::one()).abs() > T::tolerance(1e-12) {
        return Err(Error::NotNormalized {
            norm_sqr: n2.to_f64().unwrap_or(f64::NAN),
        });
    }

    let steps = cfg.steps;
    let dt = tau / T::lit(steps as f64);
    let half = T::lit(0.5);
    let minus_i = c(T::zero(), -T::one());

    let mut traj = Trajectory {
        times: Vec::new(),
        states: Vec::new(),
        norms: Vec::new(),
    };
    let mut psi = psi0.amplitudes().to_vec();
    traj.push(T::zero(), &psi);

    let mut h_start = match cfg.method {
        Method::Rk4 => Some(checked_sample(h, T::zero())?),
        Method::ExpMidpoint => None,
    };

    for k in 0..steps {
        let t0 = grid(tau, k, steps);
        let t1 = grid(tau, k + 1, steps);
        let t_mid = t0 + (t1 - t0) * half;
        match cfg.method {
            Method::ExpMidpoint => {
                checked_sample(h, t_mid)?
                    .exp_step(t1 - t0)
                    .apply_in_place(&mut psi);
            }
            Method::Rk4 => {
                let dt_c = c(dt, T::zero());
                let h0 = h_start.take().expect("carried from previous step");
                let hm = checked_sample(h, t_mid)?;
                let h1 = checked_sample(h, t1)?;
                let f = |hs: &HamiltonianSample<T>, v: &[C<T>]| -> Vec<C<T>> {
                    hs.apply(v).into_iter().map(|z| z * minus_i).collect()
                };
                let k1 = f(&h0, &psi);
                let k2 = f(&hm, &axpy(&psi, dt_c * half, &k1));
                let k3 = f(&hm, &axpy(&psi, dt_c * half, &k2));
                let k4 = f(&h1, &axpy(&psi, dt_c, &k3));
                let sixth = dt_c / T::lit(6.0);
                let two = T::lit(2.0);
                for (i, p) in psi.iter_mut().enumerate() {
                    *p = *p + (k1[i] + (k2[i] + k3[i]) * two + k4[i]) * sixth;
                }
                h_start = Some(h1);
            }
        }
        if !psi.iter().all(|z| is_finite(*z)) {
            return Err(Error::NonFinite(format!(
                "state after step {} (t = {t1})",
                k + 1
            )));
        }
        if (k + 1) % cfg.record_every == 0 || k + 1 == steps {
            traj.push(t1, &psi);
        }
    }
    Ok(traj)
}

/// Time-ordered product of the per-step propagators.
///
/// For `Rk4` the columns are obtained by integrating each basis vector.
pub fn propagator<T: Real, H: Hamiltonian<T>>(
    h: &H,
    tau: T,
    cfg: &IntegratorConfig,
) -> Result<OperatorMatrix<T>> {
    check_run(h, tau, cfg)?;
    let n = h.dim();
    match cfg.method {
        Method::ExpMidpoint => {
            let steps = cfg.steps;
            let half = T::lit(0.5);
            let mut acc = StepOperator::Identity(n);
            for k in 0..steps {
                let t0 = grid(tau, k, steps);
                let t1 = grid(tau, k + 1, steps);
                let step = checked_sample(h, t0 + (t1 - t0) * half)?.exp_step(t1 - t0);
                acc = step.after(acc);
            }
            let u = acc.to_dense();
            if !u.is_finite() {
                return Err(Error::NonFinite("propagator".into()));
            }
            Ok(u)
        }
        Method::Rk4 => {
            let run_cfg = IntegratorConfig {
                record_every: cfg.steps,
                ..*cfg
            };
            let mut u = OperatorMatrix::zeros(n);
            for j in 0..n {
                let e = StateVector::basis(n, j)?;
                let traj = propagate(h, &e, tau, &run_cfg)?;
                for (i, z) in traj.final_state().amplitudes().iter().enumerate() {
                    u[(i, j)] = *z;
                }
            }
            Ok(u)
        }
    }
}

/// `|⟨basis|ψ(t)⟩|²` for every recorded sample.
pub fn population<T: Real>(traj: &Trajectory<T>, basis_state: &StateVector<T>) -> Result<Vec<T>> {
    traj.states
        .iter()
        .map(|s| fidelity(basis_state, s))
        .collect()
}

/// Column layout for trajectory CSV output.
#[derive(Debug, Clone)]
pub enum TrajectoryColumns<T: Real> {
    /// `re_k, im_k` for every amplitude.
    Amplitudes,
    /// `p_<label>` for each named projector state.
    Populations(Vec<(String, StateVector<T>)>),
}

/// Writes `t, norm, …` rows, every number with 17 significant digits.
pub fn write_trajectory_csv<T: Real, W: Write>(
    mut w: W,
    traj: &Trajectory<T>,
    columns: &TrajectoryColumns<T>,
) -> io::Result<()> {
    let mut header = vec!["t".to_string(), "norm".to_string()];
    let dim = traj.states.first().map_or(0, |s| s.dim());
    match columns {
        TrajectoryColumns::Amplitudes => {
            for k in 0..dim {
                header.push(format!("re_{k}"));
                header.push(format!("im_{k}"));
            }
        }
        TrajectoryColumns::Populations(sel) => {
            header.extend(sel.iter().map(|(name, _)| format!("p_{name}")));
        }
    }
    writeln!(w, "{}", header.join(","))?;
    for ((t, n), s) in traj.times.iter().zip(&traj.norms).zip(&traj.states) {
        let mut row = vec![sig17(*t), sig17(*n)];
        match columns {
            TrajectoryColumns::Amplitudes => {
                for z in s.amplitudes() {
                    row.push(sig17(z.re));
                    row.push(sig17(z.im));
                }
            }
            TrajectoryColumns::Populations(sel) => {
                for (_, b) in sel {
                    let p = fidelity(b, s)
                        .map_err(|e| io::Error::new(io::ErrorKind::InvalidInput, e.to_string()))?;
                    row.push(sig17(p));
                }
            }
        }
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{fidelity, hadamard, pauli_decompose, sigma_x, sigma_y, sigma_z};
    use crate::scalar::re;
    use std::f64::consts::{PI, SQRT_2};

    fn cfg(method: Method, steps: usize) -> IntegratorConfig {
        IntegratorConfig::new(method, steps)
    }

    #[test]
    fn zero_hamiltonian_leaves_state() {
        let psi0 = StateVector::<f64>::plus();
        let h = ConstantHamiltonian(OperatorMatrix::zeros(2));
        for m in [Method::Rk4, Method::ExpMidpoint] {
            let traj = propagate(&h, &psi0, 1.0, &cfg(m, 64)).unwrap();
            assert!(traj.final_state().max_abs_diff(&psi0).unwrap() < 1e-15);
            let u = propagator(&h, 1.0, &cfg(m, 64)).unwrap();
            assert!(u.max_abs_diff(&OperatorMatrix::identity(2)).unwrap() < 1e-15);
        }
    }

    #[test]
    fn sigma_y_full_turn_is_minus_identity() {
        let tau = 1.0;
        let h = ConstantHamiltonian(sigma_y::<f64>().scale(re(PI / tau)));
        let traj = propagate(&h, &StateVector::plus(), tau, &IntegratorConfig::default()).unwrap();
        let fin = traj.final_state();
        assert!((fidelity(fin, &StateVector::plus()).unwrap() - 1.0).abs() < 1e-12);
        assert!(fidelity(fin, &StateVector::minus()).unwrap() < 1e-12);
        assert!(
            fin.max_abs_diff(&StateVector::plus().scale(re(-1.0)))
                .unwrap()
                < 1e-12
        );
    }

    #[test]
    fn hadamard_generator_maps_zero_to_plus() {
        let tau = 1.0;
        let phi_dot = PI / tau;
        let gen = sigma_x::<f64>()
            .add(&sigma_z())
            .unwrap()
            .scale(re(phi_dot / (2.0 * SQRT_2)));
        let h = ConstantHamiltonian(gen);
        let traj = propagate(
            &h,
            &StateVector::basis(2, 0).unwrap(),
            tau,
            &IntegratorConfig::default(),
        )
        .unwrap();
        let f = fidelity(traj.final_state(), &StateVector::plus()).unwrap();
        assert!(f >= 1.0 - 1e-10, "fidelity {f}");
        let p1 = population(&traj, &StateVector::basis(2, 1).unwrap()).unwrap();
        assert!((p1.last().unwrap() - 0.5).abs() < 1e-10);
        assert_eq!(p1[0], 0.0);
    }

    #[test]
    fn constant_hamiltonian_propagator_is_exact() {
        let h = sigma_x::<f64>()
            .scale(re(0.7))
            .add(&sigma_z().scale(re(-1.9)))
            .unwrap();
        let tau = 2.3;
        let u = propagator(
            &ConstantHamiltonian(h.clone()),
            tau,
            &cfg(Method::ExpMidpoint, 64),
        )
        .unwrap();
        let exact = evolution_operator(&h, tau);
        assert!(u.max_abs_diff(&exact).unwrap() < 1e-10);
    }

    #[test]
    fn records_endpoints_and_spacing() {
        let h = ConstantHamiltonian(sigma_x::<f64>());
        let c = IntegratorConfig::new(Method::ExpMidpoint, 100).with_record_every(30);
        let traj = propagate(&h, &StateVector::basis(2, 0).unwrap(), 1.5, &c).unwrap();
        assert_eq!(traj.times.len(), 5); // 0, 30, 60, 90, 100
        assert_eq!(traj.times[0], 0.0);
        assert_eq!(*traj.times.last().unwrap(), 1.5);
        assert!(traj.times.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn rejects_bad_inputs() {
        let mut bad = sigma_x::<f64>();
        bad[(0, 1)] = re(2.0);
        let h = ConstantHamiltonian(bad);
        let psi = StateVector::basis(2, 0).unwrap();
        assert!(matches!(
            propagate(&h, &psi, 1.0, &IntegratorConfig::default()),
            Err(Error::NotHermitian { .. })
        ));
        let h = ConstantHamiltonian(sigma_x::<f64>());
        assert!(propagate(&h, &psi, 1.0, &cfg(Method::Rk4, 8)).is_err());
        assert!(propagate(
            &h,
            &StateVector::basis(3, 0).unwrap(),
            1.0,
            &IntegratorConfig::default()
        )
        .is_err());
        let nan = FnHamiltonian::new(2, |_t: f64| {
            Ok(OperatorMatrix::diagonal(&[re(f64::NAN), re(0.0)]))
        });
        assert!(matches!(
            propagate(&nan, &psi, 1.0, &IntegratorConfig::default()),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn rk4_and_exp_midpoint_agree_on_driven_qubit() {
        let tau = 1.0;
        let h = FnHamiltonian::new(2, |t: f64| {
            sigma_x::<f64>()
                .scale(re(2.0 * (3.0 * t).cos()))
                .add(&sigma_z().scale(re(1.0 + t)))
        });
        let psi = StateVector::basis(2, 0).unwrap();
        let a = propagate(&h, &psi, tau, &cfg(Method::Rk4, 4096)).unwrap();
        let b = propagate(&h, &psi, tau, &cfg(Method::ExpMidpoint, 4096)).unwrap();
        assert!(a.final_state().max_abs_diff(b.final_state()).unwrap() < 1e-6);
        assert!(a.max_norm_drift() < 1e-8);
        assert!(b.max_norm_drift() < 1e-12);
    }

    #[test]
    fn embedded_steps_match_dense_steps() {
        let n = 4;
        let lower = StateVector::normalized(vec![re(1.0), re(1.0), re(1.0), re(0.0)]).unwrap();
        let upper = StateVector::basis(n, 3).unwrap();
        let sub = Arc::new(TwoLevelSubspace::new(lower, upper).unwrap());
        let block = hadamard::<f64>().scale(re(2.0));
        let embedded = {
            let sub = Arc::clone(&sub);
            let block = block.clone();
            move |_t: f64| HamiltonianSample::Embedded {
                block: block.clone(),
                subspace: Arc::clone(&sub),
            }
        };
        struct E<F>(F);
        impl<F: Fn(f64) -> HamiltonianSample<f64>> Hamiltonian<f64> for E<F> {
            fn dim(&self) -> usize {
                4
            }
            fn sample(&self, t: f64) -> Result<HamiltonianSample<f64>> {
                Ok((self.0)(t))
            }
        }
        let dense = ConstantHamiltonian(sub.embed(&block));
        let c = cfg(Method::ExpMidpoint, 32);
        let ue = propagator(&E(embedded), 0.9, &c).unwrap();
        let ud = propagator(&dense, 0.9, &c).unwrap();
        assert!(ue.max_abs_diff(&ud).unwrap() < 1e-12);
        let p = pauli_decompose(&block).unwrap();
        assert!((p.omega_x - 2.0 * SQRT_2).abs() < 1e-14);
    }

    #[test]
    fn csv_layout() {
        let h = ConstantHamiltonian(sigma_x::<f64>());
        let c = IntegratorConfig::new(Method::ExpMidpoint, 16).with_record_every(8);
        let traj = propagate(&h, &StateVector::basis(2, 0).unwrap(), 1.0, &c).unwrap();
        let mut buf = Vec::new();
        write_trajectory_csv(&mut buf, &traj, &TrajectoryColumns::Amplitudes).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "t,norm,re_0,im_0,re_1,im_1");
        assert_eq!(lines.count(), 3);
        let mut buf = Vec::new();
        let sel = vec![("one".to_string(), StateVector::basis(2, 1).unwrap())];
        write_trajectory_csv(&mut buf, &traj, &TrajectoryColumns::Populations(sel)).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(
            "t,norm,p_one\n0.0000000000000000e0,1.0000000000000000e0,0.0000000000000000e0\n"
        ));
    }
}
