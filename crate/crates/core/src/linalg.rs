//! Dense complex state vectors and operators.
//!
//! Everything here is small and allocation-light: the two-level model lives in
//! 2×2 matrices, and the largest register the protocols build is 2¹⁰ wide.

use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{c, cis, is_finite, re, Real, C};

/// Normalized (up to caller-declared exceptions) complex amplitude vector.
///
/// Constructors that validate enforce `Σ|aₖ|² = 1` and `dim ≥ 2`. The result
/// of [`OperatorMatrix::apply`] is deliberately left un-normalized so callers
/// can inspect norm drift.
#[derive(Clone, PartialEq)]
pub struct StateVector<T: Real> {
    amps: Vec<C<T>>,
}

impl<T: Real> StateVector<T> {
    /// Validating constructor: requires finite, normalized amplitudes.
    pub fn new(amps: Vec<C<T>>) -> Result<Self> {
        let v = Self::check_shape(amps)?;
        let n2 = v.norm_sqr();
        if (n2 - T::one()).abs() > T::tolerance(1e-12) {
            return Err(Error::NotNormalized {
                norm_sqr: n2.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(v)
    }

    /// Rescales arbitrary non-zero amplitudes to unit norm.
    pub fn normalized(amps: Vec<C<T>>) -> Result<Self> {
        let v = Self::check_shape(amps)?;
        v.renormalize()
    }

    fn check_shape(amps: Vec<C<T>>) -> Result<Self> {
        if amps.len() < 2 {
            return Err(Error::invalid(format!(
                "state dimension must be at least 2, got {}",
                amps.len()
            )));
        }
        if !amps.iter().all(|z| is_finite(*z)) {
            return Err(Error::NonFinite("state amplitude".into()));
        }
        Ok(Self { amps })
    }

    pub(crate) fn from_raw(amps: Vec<C<T>>) -> Self {
        Self { amps }
    }

    pub fn from_real(amps: &[T]) -> Result<Self> {
        Self::new(amps.iter().map(|&x| re(x)).collect())
    }

    /// Computational basis vector `|k⟩`.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::invalid(format!(
                "basis index {k} >= dimension {dim}"
            )));
        }
        let mut amps = vec![C::<T>::new(T::zero(), T::zero()); dim];
        amps[k] = re(T::one());
        Self::new(amps)
    }

    /// `(|0⟩ + |1⟩)/√2`
    pub fn plus() -> Self {
        let h = T::FRAC_1_SQRT_2();
        Self::from_raw(vec![re(h), re(h)])
    }

    /// `(|0⟩ − |1⟩)/√2`
    pub fn minus() -> Self {
        let h = T::FRAC_1_SQRT_2();
        Self::from_raw(vec![re(h), re(-h)])
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C<T>] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C<T>> {
        self.amps
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }

    pub fn renormalize(&self) -> Result<Self> {
        let n = self.norm();
        if !(n > T::zero()) || !n.is_finite() {
            return Err(Error::NonFinite(
                "cannot renormalize a zero or non-finite state".into(),
            ));
        }
        Ok(Self::from_raw(self.amps.iter().map(|z| z / n).collect()))
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &Self) -> Result<C<T>> {
        check_dim(self.dim(), other.dim())?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .fold(c(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b))
    }

    pub fn scale(&self, k: C<T>) -> Self {
        Self::from_raw(self.amps.iter().map(|z| z * k).collect())
    }

    /// Largest componentwise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        check_dim(self.dim(), other.dim())?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), T::max))
    }
}

/// Serialized as a list of `[re, im]` pairs.
impl<T: Real + Serialize> Serialize for StateVector<T> {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = serializer.serialize_seq(Some(self.amps.len()))?;
        for z in &self.amps {
            seq.serialize_element(&[z.re, z.im])?;
        }
        seq.end()
    }
}

/// Accepts `[re, im]` pairs and renormalizes.
impl<'de, T: Real + Deserialize<'de>> Deserialize<'de> for StateVector<T> {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let pairs = Vec::<[T; 2]>::deserialize(deserializer)?;
        Self::normalized(pairs.into_iter().map(|[a, b]| c(a, b)).collect())
            .map_err(serde::de::Error::custom)
    }
}

impl<T: Real> Index<usize> for StateVector<T> {
    type Output = C<T>;
    fn index(&self, i: usize) -> &C<T> {
        &self.amps[i]
    }
}

impl<T: Real> fmt::Debug for StateVector<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.amps.iter()).finish()
    }
}

/// Dense square complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct OperatorMatrix<T: Real> {
    dim: usize,
    data: Vec<C<T>>,
}

impl<T: Real> OperatorMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![c(T::zero(), T::zero()); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = re(T::one());
        }
        m
    }

    pub fn diagonal(entries: &[C<T>]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &z) in entries.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    /// Builds from rows; every row must have the same length as the row count.
    pub fn from_rows(rows: Vec<Vec<C<T>>>) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            check_dim(dim, row.len())?;
            if !row.iter().all(|z| is_finite(*z)) {
                return Err(Error::NonFinite("matrix entry".into()));
            }
            data.extend(row);
        }
        Ok(Self { dim, data })
    }

    pub(crate) fn from_2x2(m: [[C<T>; 2]; 2]) -> Self {
        Self {
            dim: 2,
            data: vec![m[0][0], m[0][1], m[1][0], m[1][1]],
        }
    }

    /// `|u⟩⟨v|`
    pub fn outer(u: &StateVector<T>, v: &StateVector<T>) -> Result<Self> {
        check_dim(u.dim(), v.dim())?;
        let dim = u.dim();
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = u[i] * v[j].conj();
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[C<T>] {
        &self.data
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim, other.dim)?;
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] = out.data[i * n + j] + a * other.data[k * n + j];
                }
            }
        }
        Ok(out)
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    /// Matrix-vector product. The result is not renormalized.
    pub fn apply(&self, v: &StateVector<T>) -> Result<StateVector<T>> {
        check_dim(self.dim, v.dim())?;
        Ok(StateVector::from_raw(self.apply_slice(v.amplitudes())))
    }

    pub(crate) fn apply_slice(&self, v: &[C<T>]) -> Vec<C<T>> {
        let n = self.dim;
        (0..n)
            .map(|i| {
                self.data[i * n..(i + 1) * n]
                    .iter()
                    .zip(v)
                    .fold(c(T::zero(), T::zero()), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim, other.dim)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim, other.dim)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(C<T>, C<T>) -> C<T>) -> Self {
        Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn scale(&self, k: C<T>) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * k).collect(),
        }
    }

    pub fn trace(&self) -> C<T> {
        (0..self.dim).fold(c(T::zero(), T::zero()), |acc, i| acc + self[(i, i)])
    }

    /// Max-entry norm of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        check_dim(self.dim, other.dim)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), T::max))
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    /// Max-entry deviation of `self` from `self†`.
    pub fn hermiticity_defect(&self) -> T {
        let n = self.dim;
        let mut worst = T::zero();
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// `(A + A†)/2`
    pub fn hermitian_part(&self) -> Self {
        let half = re(T::lit(0.5));
        self.zip_with(&self.dagger(), |a, b| (a + b) * half)
    }

    /// Max-entry deviation of `A A†` from the identity.
    pub fn unitarity_defect(&self) -> T {
        let prod = self.matmul(&self.dagger()).expect("square");
        prod.max_abs_diff(&Self::identity(self.dim))
            .expect("square")
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| is_finite(*z))
    }

    /// One-norm (max column sum), used to pick the squaring count.
    fn one_norm(&self) -> T {
        let n = self.dim;
        (0..n)
            .map(|j| (0..n).map(|i| self[(i, j)].norm()).sum::<T>())
            .fold(T::zero(), T::max)
    }
}

impl<T: Real> Index<(usize, usize)> for OperatorMatrix<T> {
    type Output = C<T>;
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        &self.data[i * self.dim + j]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for OperatorMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        &mut self.data[i * self.dim + j]
    }
}

impl<T: Real> fmt::Debug for OperatorMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<_> = self.data.chunks(self.dim.max(1)).collect();
        f.debug_list().entries(rows).finish()
    }
}

/// Ordered orthonormal pair spanning a two-level subspace of a larger space.
///
/// The first vector plays the role of `|0⟩` of the reduced model and the
/// second that of `|1⟩` (for Grover: `|m⊥⟩` then `|m⟩`).
#[derive(Debug, Clone, PartialEq)]
pub struct TwoLevelSubspace<T: Real> {
    lower: StateVector<T>,
    upper: StateVector<T>,
}

impl<T: Real> TwoLevelSubspace<T> {
    pub fn new(lower: StateVector<T>, upper: StateVector<T>) -> Result<Self> {
        check_dim(lower.dim(), upper.dim())?;
        let tol = T::tolerance(1e-12);
        let overlap = lower.inner(&upper)?.norm();
        if overlap > tol
            || (lower.norm_sqr() - T::one()).abs() > tol
            || (upper.norm_sqr() - T::one()).abs() > tol
        {
            return Err(Error::invalid("subspace basis vectors must be orthonormal"));
        }
        Ok(Self { lower, upper })
    }

    pub fn dim(&self) -> usize {
        self.lower.dim()
    }

    pub fn lower(&self) -> &StateVector<T> {
        &self.lower
    }

    pub fn upper(&self) -> &StateVector<T> {
        &self.upper
    }

    /// Coordinates `(⟨lower|ψ⟩, ⟨upper|ψ⟩)`.
    pub fn project(&self, psi: &[C<T>]) -> [C<T>; 2] {
        let dot = |b: &StateVector<T>| {
            b.amplitudes()
                .iter()
                .zip(psi)
                .fold(c(T::zero(), T::zero()), |acc, (x, y)| acc + x.conj() * y)
        };
        [dot(&self.lower), dot(&self.upper)]
    }

    /// Ambient vector `x₀·lower + x₁·upper`.
    pub fn lift(&self, coords: [C<T>; 2]) -> StateVector<T> {
        StateVector::from_raw(
            self.lower
                .amplitudes()
                .iter()
                .zip(self.upper.amplitudes())
                .map(|(l, u)| l * coords[0] + u * coords[1])
                .collect(),
        )
    }

    /// `ψ += x₀·lower + x₁·upper`, in place.
    pub(crate) fn add_lifted(&self, psi: &mut [C<T>], coords: [C<T>; 2]) {
        for ((p, l), u) in psi
            .iter_mut()
            .zip(self.lower.amplitudes())
            .zip(self.upper.amplitudes())
        {
            *p = *p + l * coords[0] + u * coords[1];
        }
    }

    /// Squared norm of the component of `psi` orthogonal to the subspace.
    pub fn leakage(&self, psi: &[C<T>]) -> T {
        let [a, b] = self.project(psi);
        let mut out = psi.to_vec();
        self.add_lifted(&mut out, [-a, -b]);
        out.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Dense ambient matrix of `V·block·V†`.
    pub fn embed(&self, block: &OperatorMatrix<T>) -> OperatorMatrix<T> {
        let n = self.dim();
        let cols = [self.lower.amplitudes(), self.upper.amplitudes()];
        let mut m = OperatorMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = c(T::zero(), T::zero());
                for (a, ca) in cols.iter().enumerate() {
                    for (b, cb) in cols.iter().enumerate() {
                        acc = acc + ca[i] * block[(a, b)] * cb[j].conj();
                    }
                }
                m[(i, j)] = acc;
            }
        }
        m
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

pub fn sigma_x<T: Real>() -> OperatorMatrix<T> {
    let (o, l) = (re(T::zero()), re(T::one()));
    OperatorMatrix::from_2x2([[o, l], [l, o]])
}

pub fn sigma_y<T: Real>() -> OperatorMatrix<T> {
    let o = re(T::zero());
    OperatorMatrix::from_2x2([[o, c(T::zero(), -T::one())], [c(T::zero(), T::one()), o]])
}

/// `σz|0⟩ = +|0⟩`
pub fn sigma_z<T: Real>() -> OperatorMatrix<T> {
    let o = re(T::zero());
    OperatorMatrix::from_2x2([[re(T::one()), o], [o, re(-T::one())]])
}

/// `(σx + σz)/√2`
pub fn hadamard<T: Real>() -> OperatorMatrix<T> {
    let h = T::FRAC_1_SQRT_2();
    OperatorMatrix::from_2x2([[re(h), re(h)], [re(h), re(-h)]])
}

/// Expansion of a 2×2 Hermitian operator over `{𝟙, σx, σy, σz}`:
/// `H = ω₀/2·𝟙 + ½(ωx σx + ωy σy + ωz σz)`.
///
/// All ω are angular frequencies (ħ = 1).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PauliCoefficients<T: Real> {
    pub omega0: T,
    pub omega_x: T,
    pub omega_y: T,
    pub omega_z: T,
}

impl<T: Real> PauliCoefficients<T> {
    pub fn new(omega0: T, omega_x: T, omega_y: T, omega_z: T) -> Self {
        Self {
            omega0,
            omega_x,
            omega_y,
            omega_z,
        }
    }

    pub fn traceless(omega_x: T, omega_y: T, omega_z: T) -> Self {
        Self::new(T::zero(), omega_x, omega_y, omega_z)
    }

    /// Same coefficients with the identity component dropped.
    pub fn without_identity(&self) -> Self {
        Self {
            omega0: T::zero(),
            ..*self
        }
    }

    pub fn reconstruct(&self) -> OperatorMatrix<T> {
        let half = T::lit(0.5);
        let d0 = half * (self.omega0 + self.omega_z);
        let d1 = half * (self.omega0 - self.omega_z);
        let lower = c(half * self.omega_x, half * self.omega_y);
        OperatorMatrix::from_2x2([[re(d0), lower.conj()], [lower, re(d1)]])
    }

    /// Largest componentwise difference over (ωx, ωy, ωz), ignoring ω₀.
    pub fn max_traceless_diff(&self, other: &Self) -> T {
        (self.omega_x - other.omega_x)
            .abs()
            .max((self.omega_y - other.omega_y).abs())
            .max((self.omega_z - other.omega_z).abs())
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.max_traceless_diff(other)
            .max((self.omega0 - other.omega0).abs())
    }
}

/// Tolerance on max-entry anti-Hermitian deviation accepted by [`pauli_decompose`].
pub const HERMITICITY_TOL: f64 = 1e-10;

/// Inverse of [`PauliCoefficients::reconstruct`]: `ω₀ = tr H`, `ωₖ = tr(σₖ H)`.
///
/// Inputs within [`HERMITICITY_TOL`] of Hermitian are symmetrized first.
pub fn pauli_decompose<T: Real>(h: &OperatorMatrix<T>) -> Result<PauliCoefficients<T>> {
    check_dim(2, h.dim())?;
    if !h.is_finite() {
        return Err(Error::NonFinite("Hamiltonian entry".into()));
    }
    let defect = h.hermiticity_defect();
    if defect > T::tolerance(HERMITICITY_TOL) {
        return Err(Error::NotHermitian {
            deviation: defect.to_f64().unwrap_or(f64::NAN),
        });
    }
    let h = h.hermitian_part();
    let (h00, h11, h10) = (h[(0, 0)].re, h[(1, 1)].re, h[(1, 0)]);
    let two = T::lit(2.0);
    Ok(PauliCoefficients::new(
        h00 + h11,
        two * h10.re,
        two * h10.im,
        h00 - h11,
    ))
}

/// `|⟨u|v⟩|²`, insensitive to global phase.
///
/// Both rays are taken at unit norm, so integrator drift of order 1e-13 in
/// `‖v‖` cannot push the result above 1.
pub fn fidelity<T: Real>(u: &StateVector<T>, v: &StateVector<T>) -> Result<T> {
    let f = u.inner(v)?.norm_sqr() / (u.norm_sqr() * v.norm_sqr());
    Ok(f.min(T::one()))
}

/// `exp(−i·H·dt)` for Hermitian `H`.
///
/// 2×2 uses the closed form `e^{−ia dt}(cos(|b|dt)𝟙 − i sin(|b|dt) b̂·σ)`;
/// larger operators use scaling and squaring on a Taylor series.
pub fn evolution_operator<T: Real>(h: &OperatorMatrix<T>, dt: T) -> OperatorMatrix<T> {
    if h.dim() == 2 {
        evolution_operator_2x2(h, dt)
    } else {
        expm(&h.scale(c(T::zero(), -dt)))
    }
}

fn evolution_operator_2x2<T: Real>(h: &OperatorMatrix<T>, dt: T) -> OperatorMatrix<T> {
    let half = T::lit(0.5);
    let a = half * (h[(0, 0)].re + h[(1, 1)].re);
    let bz = half * (h[(0, 0)].re - h[(1, 1)].re);
    let lower = (h[(1, 0)] + h[(0, 1)].conj()).scale(half);
    let (bx, by) = (lower.re, lower.im);
    let b = (bx * bx + by * by + bz * bz).sqrt();
    let x = b * dt;
    // sin(x)/b without dividing by a vanishing b
    let sinc_dt = if x.abs() > T::lit(1e-4) {
        x.sin() / b
    } else {
        let x2 = x * x;
        dt * (T::one() - x2 / T::lit(6.0) + x2 * x2 / T::lit(120.0))
    };
    let cs = re(x.cos());
    let mi = c(T::zero(), -sinc_dt);
    let phase = cis(-a * dt);
    OperatorMatrix::from_2x2([
        [phase * (cs + mi.scale(bz)), phase * mi * c(bx, -by)],
        [phase * mi * c(bx, by), phase * (cs - mi.scale(bz))],
    ])
}

/// General dense exponential by scaling and squaring.
pub fn expm<T: Real>(a: &OperatorMatrix<T>) -> OperatorMatrix<T> {
    let n = a.dim();
    let norm = a.one_norm();
    let mut squarings = 0u32;
    let mut scaled_norm = norm;
    while scaled_norm > T::lit(0.5) {
        scaled_norm *= T::lit(0.5);
        squarings += 1;
    }
    let b = a.scale(re(T::lit(0.5).powi(squarings as i32)));
    let mut sum = OperatorMatrix::identity(n);
    let mut term = OperatorMatrix::identity(n);
    for k in 1..=30 {
        term = term
            .matmul(&b)
            .expect("square")
            .scale(re(T::one() / T::lit(k as f64)));
        sum = sum.add(&term).expect("square");
        if term.max_abs() <= T::epsilon() * sum.max_abs() {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum.matmul(&sum).expect("square");
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    type M = OperatorMatrix<f64>;

    fn i() -> C<f64> {
        c(0.0, 1.0)
    }

    fn random_matrix(seed: u64, n: usize) -> M {
        // splitmix-style generator, enough for fixtures
        let mut s = seed;
        let mut next = || {
            s = s.wrapping_add(0x9E37_79B9_7F4A_7C15);
            let mut z = s;
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
            ((z ^ (z >> 31)) >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        };
        let rows = (0..n)
            .map(|_| (0..n).map(|_| c(next(), next())).collect())
            .collect();
        M::from_rows(rows).unwrap()
    }

    fn random_hermitian(seed: u64) -> M {
        random_matrix(seed, 2).hermitian_part()
    }

    #[test]
    fn pauli_algebra() {
        let id = M::identity(2);
        assert_eq!(sigma_x::<f64>().matmul(&sigma_x()).unwrap(), id);
        let xz = sigma_x::<f64>().matmul(&sigma_z()).unwrap();
        assert_abs_diff_eq!(xz.max_abs_diff(&sigma_y().scale(-i())).unwrap(), 0.0);
        let h = random_hermitian(3);
        assert_eq!(id.matmul(&h).unwrap(), h);
    }

    #[test]
    fn matmul_dimension_mismatch() {
        let err = M::identity(2).matmul(&M::identity(3)).unwrap_err();
        assert_eq!(
            err,
            Error::DimensionMismatch {
                expected: 2,
                found: 3
            }
        );
    }

    #[test]
    fn dagger_cases() {
        assert_eq!(sigma_y::<f64>().dagger(), sigma_y());
        let d = M::diagonal(&[re(1.0), cis(std::f64::consts::PI / 3.0)]);
        let expected = M::diagonal(&[re(1.0), cis(-std::f64::consts::PI / 3.0)]);
        assert!(d.dagger().max_abs_diff(&expected).unwrap() < 1e-16);
        let a = random_matrix(11, 3);
        assert_eq!(a.dagger().dagger(), a);
    }

    #[test]
    fn apply_cases() {
        let zero = StateVector::<f64>::basis(2, 0).unwrap();
        let one = StateVector::<f64>::basis(2, 1).unwrap();
        assert_eq!(sigma_x().apply(&zero).unwrap(), one);
        let plus = hadamard().apply(&zero).unwrap();
        assert!(plus.max_abs_diff(&StateVector::plus()).unwrap() < 1e-16);
        let minus = sigma_z::<f64>().apply(&StateVector::plus()).unwrap();
        assert!(minus.max_abs_diff(&StateVector::minus()).unwrap() < 1e-16);
        assert!(sigma_x::<f64>()
            .apply(&StateVector::basis(3, 0).unwrap())
            .is_err());
    }

    #[test]
    fn decompose_known_operators() {
        let y = pauli_decompose(&sigma_y::<f64>()).unwrap();
        assert_eq!(y, PauliCoefficients::new(0.0, 0.0, 2.0, 0.0));
        let xz = sigma_x::<f64>().add(&sigma_z()).unwrap().scale(re(0.5));
        let p = pauli_decompose(&xz).unwrap();
        assert_eq!(p, PauliCoefficients::new(0.0, 1.0, 0.0, 1.0));
    }

    #[test]
    fn decompose_round_trip() {
        for seed in 0..50 {
            let h = random_hermitian(seed);
            let back = pauli_decompose(&h).unwrap().reconstruct();
            assert!(back.max_abs_diff(&h).unwrap() < 1e-12);
        }
    }

    #[test]
    fn decompose_rejects_bad_inputs() {
        let mut h = sigma_x::<f64>();
        h[(0, 1)] = re(1.0 + 1e-6);
        assert!(matches!(
            pauli_decompose(&h),
            Err(Error::NotHermitian { .. })
        ));
        assert!(matches!(
            pauli_decompose(&M::identity(3)),
            Err(Error::DimensionMismatch { .. })
        ));
        // inside tolerance: symmetrized, accepted
        h[(0, 1)] = re(1.0 + 1e-12);
        let p = pauli_decompose(&h).unwrap();
        assert_abs_diff_eq!(p.omega_x, 2.0 + 1e-12, epsilon = 1e-15);
    }

    #[test]
    fn fidelity_cases() {
        let zero = StateVector::<f64>::basis(2, 0).unwrap();
        let one = StateVector::<f64>::basis(2, 1).unwrap();
        assert_eq!(fidelity(&zero, &zero).unwrap(), 1.0);
        assert_eq!(fidelity(&zero, &one).unwrap(), 0.0);
        for k in 0..8 {
            let g = 0.9 * k as f64;
            let rotated = StateVector::plus().scale(cis(g));
            assert_abs_diff_eq!(
                fidelity(&StateVector::plus(), &rotated).unwrap(),
                1.0,
                epsilon = 1e-15
            );
        }
        assert!(fidelity(&zero, &StateVector::basis(4, 0).unwrap()).is_err());
        // slightly long vector, as left by integrator drift
        let long = StateVector::plus().scale(re(1.0 + 1e-12));
        assert_eq!(fidelity(&StateVector::plus(), &long).unwrap(), 1.0);
    }

    #[test]
    fn state_constructors_validate() {
        assert!(StateVector::<f64>::from_real(&[1.0, 1.0]).is_err());
        assert!(StateVector::<f64>::from_real(&[1.0]).is_err());
        assert!(StateVector::<f64>::new(vec![c(f64::NAN, 0.0), re(0.0)]).is_err());
        let v = StateVector::<f64>::normalized(vec![re(3.0), c(0.0, 4.0)]).unwrap();
        assert_abs_diff_eq!(v.norm_sqr(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn closed_form_exponential_matches_series() {
        for seed in 0..20 {
            let h = random_hermitian(100 + seed).scale(re(3.0));
            let dt = 0.37;
            let closed = evolution_operator(&h, dt);
            let series = expm(&h.scale(c(0.0, -dt)));
            assert!(closed.max_abs_diff(&series).unwrap() < 1e-13);
            assert!(closed.unitarity_defect() < 1e-14);
        }
        // vanishing traceless part
        let h = M::identity(2).scale(re(2.0));
        let u = evolution_operator(&h, 0.5);
        assert!(u.max_abs_diff(&M::identity(2).scale(cis(-1.0))).unwrap() < 1e-16);
    }

    #[test]
    fn larger_exponential_is_unitary() {
        let h = random_matrix(7, 6).hermitian_part().scale(re(4.0));
        let u = evolution_operator(&h, 1.0);
        assert!(u.unitarity_defect() < 1e-12);
        let back = u.matmul(&evolution_operator(&h, -1.0)).unwrap();
        assert!(back.max_abs_diff(&M::identity(6)).unwrap() < 1e-12);
    }

    #[test]
    fn works_in_single_precision() {
        let h = sigma_x::<f32>().add(&sigma_z()).unwrap();
        let p = pauli_decompose(&h).unwrap();
        assert_eq!(p, PauliCoefficients::new(0.0f32, 2.0, 0.0, 2.0));
        let u = evolution_operator(&h, 0.3f32);
        assert!(u.unitarity_defect() < 1e-6);
    }
}
