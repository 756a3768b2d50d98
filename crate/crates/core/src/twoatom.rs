//! Two-probe-atom dynamics.
//!
//! Basis order is |gg⟩, |ge⟩, |eg⟩, |ee⟩ (first label = atom 1). σᵢ = |g⟩⟨e| on
//! atom i. The generator is
//!
//! ```text
//! ρ̇ = −i[Δ Σ σᵢ†σᵢ, ρ] + iΩ Σ [σᵢ + σᵢ†, ρ] − i Σ δᵢⱼ[σⱼ†σᵢ, ρ]
//!     − Σ (γᵢⱼ/2)(σⱼ†σᵢρ − 2σᵢρσⱼ† + ρσⱼ†σᵢ)
//! ```
//!
//! with the permutation-symmetric coefficients γ₁₁ = γ₂₂, γ₁₂ = γ₂₁ (same for δ).
//! Also here: the first-order-in-Ω steady state, single-atom Maxwell–Bloch
//! equations, quantum-regression spectra and the full source function.

use nalgebra::Matrix4;
use num_complex::Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg;
use crate::ode::{self, Control, OdeError, Tolerances};
use crate::scalar::{ComplexRate, Real};

pub type Mat4<T> = [[Complex<T>; 4]; 4];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("linewidth gamma11 must be > 0 (got {0})")]
    NonPositiveLinewidth(f64),
    #[error("invalid Lindblad generator: |gamma12| = {gamma12} exceeds gamma11 = {gamma11}")]
    InvalidGenerator { gamma11: f64, gamma12: f64 },
    #[error("non-finite parameter {0}")]
    NonFinite(&'static str),
    #[error("singular denominator in {0}")]
    Singular(&'static str),
    #[error("no stationary state reached by t = {t_max} (last |rhs| = {last_norm:e})")]
    NonStationary { t_max: f64, last_norm: f64 },
    #[error(transparent)]
    Integrator(#[from] OdeError),
}

fn zero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

fn one<T: Real>() -> Complex<T> {
    Complex::new(T::one(), T::zero())
}

fn im<T: Real>(x: T) -> Complex<T> {
    Complex::new(T::zero(), x)
}

fn re<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

fn mat_zero<T: Real>() -> Mat4<T> {
    [[zero(); 4]; 4]
}

fn mul<T: Real>(a: &Mat4<T>, b: &Mat4<T>) -> Mat4<T> {
    let mut out = mat_zero();
    for i in 0..4 {
        for k in 0..4 {
            if a[i][k] == zero() {
                continue;
            }
            for j in 0..4 {
                out[i][j] = out[i][j] + a[i][k] * b[k][j];
            }
        }
    }
    out
}

fn dagger<T: Real>(a: &Mat4<T>) -> Mat4<T> {
    let mut out = mat_zero();
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = a[j][i].conj();
        }
    }
    out
}

fn trace<T: Real>(a: &Mat4<T>) -> Complex<T> {
    a[0][0] + a[1][1] + a[2][2] + a[3][3]
}

fn unit<T: Real>(i: usize, j: usize) -> Mat4<T> {
    let mut m = mat_zero();
    m[i][j] = one();
    m
}

fn add<T: Real>(a: &Mat4<T>, b: &Mat4<T>) -> Mat4<T> {
    let mut out = *a;
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = out[i][j] + b[i][j];
        }
    }
    out
}

/// Lowering operators (σ₁, σ₂) in the |gg⟩, |ge⟩, |eg⟩, |ee⟩ basis.
pub fn lowering<T: Real>() -> [Mat4<T>; 2] {
    // σ₁: |eg⟩ → |gg⟩, |ee⟩ → |ge⟩. σ₂: |ge⟩ → |gg⟩, |ee⟩ → |eg⟩.
    [add(&unit(0, 2), &unit(1, 3)), add(&unit(0, 1), &unit(2, 3))]
}

/// σ_z on each atom: |e⟩⟨e| − |g⟩⟨g|.
fn sigma_z<T: Real>() -> [Mat4<T>; 2] {
    let d = |v: [f64; 4]| {
        let mut m = mat_zero();
        for (i, x) in v.iter().enumerate() {
            m[i][i] = re(T::lit(*x));
        }
        m
    };
    [d([-1.0, -1.0, 1.0, 1.0]), d([-1.0, 1.0, -1.0, 1.0])]
}

/// Two-atom density matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoAtomState<T> {
    pub rho: Mat4<T>,
}

/// Average single-atom coherence ρ_eg = (⟨σ₁⟩ + ⟨σ₂⟩)/2 and m_eg = (⟨σ₁σ_z2⟩ + ⟨σ_z1σ₂⟩)/2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherenceSolution<T> {
    pub rho_eg: ComplexRate<T>,
    pub m_eg: ComplexRate<T>,
}

impl<T: Real> TwoAtomState<T> {
    pub fn ground() -> Self {
        Self { rho: unit(0, 0) }
    }

    pub fn from_matrix(rho: Mat4<T>) -> Self {
        Self { rho }
    }

    pub fn trace(&self) -> Complex<T> {
        trace(&self.rho)
    }

    pub fn expect(&self, op: &Mat4<T>) -> Complex<T> {
        trace(&mul(op, &self.rho))
    }

    pub fn hermiticity_error(&self) -> T {
        let mut worst = T::zero();
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((self.rho[i][j] - self.rho[j][i].conj()).norm());
            }
        }
        worst
    }

    /// Smallest eigenvalue of the Hermitian part, computed in double precision.
    pub fn min_eigenvalue(&self) -> f64 {
        let m = Matrix4::from_fn(|i, j| {
            let h = (self.rho[i][j] + self.rho[j][i].conj()) / T::lit(2.0);
            Complex::new(h.re.as_f64(), h.im.as_f64())
        });
        m.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Checks Hermiticity and unit trace to `tol`, and positivity to `−psd_tol`.
    pub fn is_valid(&self, tol: f64, psd_tol: f64) -> bool {
        self.hermiticity_error().as_f64() < tol
            && (self.trace() - one()).norm().as_f64() < tol
            && self.min_eigenvalue() > -psd_tol
    }

    pub fn coherences(&self) -> CoherenceSolution<T> {
        let [s1, s2] = lowering::<T>();
        let [z1, z2] = sigma_z::<T>();
        let half = T::lit(0.5);
        CoherenceSolution {
            rho_eg: (self.expect(&s1) + self.expect(&s2)) * half,
            m_eg: (self.expect(&mul(&s1, &z2)) + self.expect(&mul(&z1, &s2))) * half,
        }
    }

    /// Mean excited population (⟨σ_ee1⟩ + ⟨σ_ee2⟩)/2.
    pub fn excited_population(&self) -> T {
        let [s1, s2] = lowering::<T>();
        let n1 = mul(&dagger(&s1), &s1);
        let n2 = mul(&dagger(&s2), &s2);
        ((self.expect(&n1) + self.expect(&n2)) * T::lit(0.5)).re
    }

    fn flatten(&self) -> Vec<Complex<T>> {
        self.rho.iter().flat_map(|r| r.iter().copied()).collect()
    }

    fn unflatten(v: &[Complex<T>]) -> Self {
        let mut rho = mat_zero();
        for i in 0..4 {
            for j in 0..4 {
                rho[i][j] = v[4 * i + j];
            }
        }
        Self { rho }
    }
}

/// Symmetric two-atom coefficients in units of γ₀.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoAtomParams<T> {
    pub detuning: T,
    pub rabi: T,
    pub gamma11: T,
    pub gamma12: T,
    pub delta11: T,
    pub delta12: T,
}

impl<T: Real> TwoAtomParams<T> {
    pub fn validate(&self) -> Result<(), DynamicsError> {
        for (name, v) in [
            ("detuning", self.detuning),
            ("rabi", self.rabi),
            ("gamma11", self.gamma11),
            ("gamma12", self.gamma12),
            ("delta11", self.delta11),
            ("delta12", self.delta12),
        ] {
            if !v.is_finite() {
                return Err(DynamicsError::NonFinite(name));
            }
        }
        if !(self.gamma11 > T::zero()) {
            return Err(DynamicsError::NonPositiveLinewidth(self.gamma11.as_f64()));
        }
        if self.gamma12.abs() > self.gamma11 {
            return Err(DynamicsError::InvalidGenerator {
                gamma11: self.gamma11.as_f64(),
                gamma12: self.gamma12.as_f64(),
            });
        }
        Ok(())
    }

    pub fn with_rabi(self, rabi: T) -> Self {
        Self { rabi, ..self }
    }

    /// Single atom with no partner: γ₁₂ = δ₁₂ = 0.
    pub fn single(detuning: T, rabi: T, gamma11: T, delta11: T) -> Self {
        Self { detuning, rabi, gamma11, gamma12: T::zero(), delta11, delta12: T::zero() }
    }
}

fn hamiltonian<T: Real>(p: &TwoAtomParams<T>) -> Mat4<T> {
    let s = lowering::<T>();
    let mut h = mat_zero();
    for i in 0..2 {
        let n = mul(&dagger(&s[i]), &s[i]);
        let x = add(&s[i], &dagger(&s[i]));
        for a in 0..4 {
            for b in 0..4 {
                h[a][b] = h[a][b] + n[a][b] * p.detuning - x[a][b] * p.rabi;
            }
        }
    }
    for i in 0..2 {
        for j in 0..2 {
            let d = if i == j { p.delta11 } else { p.delta12 };
            let op = mul(&dagger(&s[j]), &s[i]);
            for a in 0..4 {
                for b in 0..4 {
                    h[a][b] = h[a][b] + op[a][b] * d;
                }
            }
        }
    }
    h
}

struct Generator<T> {
    h: Mat4<T>,
    // (γ_ij, σ_i, σ_j†, σ_j†σ_i)
    jumps: Vec<(T, Mat4<T>, Mat4<T>, Mat4<T>)>,
}

impl<T: Real> Generator<T> {
    fn new(p: &TwoAtomParams<T>) -> Result<Self, DynamicsError> {
        p.validate()?;
        let s = lowering::<T>();
        let mut jumps = Vec::with_capacity(4);
        for i in 0..2 {
            for j in 0..2 {
                let g = if i == j { p.gamma11 } else { p.gamma12 };
                let sj_dag = dagger(&s[j]);
                let prod = mul(&sj_dag, &s[i]);
                jumps.push((g, s[i], sj_dag, prod));
            }
        }
        Ok(Self { h: hamiltonian(p), jumps })
    }

    fn apply(&self, rho: &Mat4<T>) -> Mat4<T> {
        let hr = mul(&self.h, rho);
        let rh = mul(rho, &self.h);
        let mut out = mat_zero();
        for a in 0..4 {
            for b in 0..4 {
                out[a][b] = im(-T::one()) * (hr[a][b] - rh[a][b]);
            }
        }
        let half = T::lit(0.5);
        let two = T::lit(2.0);
        for (g, si, sj_dag, prod) in &self.jumps {
            if *g == T::zero() {
                continue;
            }
            let left = mul(prod, rho);
            let right = mul(rho, prod);
            let sandwich = mul(&mul(si, rho), sj_dag);
            for a in 0..4 {
                for b in 0..4 {
                    out[a][b] = out[a][b] - (left[a][b] - sandwich[a][b] * two + right[a][b]) * (*g * half);
                }
            }
        }
        out
    }
}

/// dρ/dt of the two-atom master equation.
pub fn lindblad_rhs<T: Real>(state: &TwoAtomState<T>, p: &TwoAtomParams<T>) -> Result<Mat4<T>, DynamicsError> {
    Ok(Generator::new(p)?.apply(&state.rho))
}

fn max_abs<T: Real>(m: &Mat4<T>) -> T {
    m.iter().flat_map(|r| r.iter()).fold(T::zero(), |acc, z| acc.max(z.norm()))
}

#[derive(Debug, Clone, Copy)]
pub struct SteadyStateConfig<T> {
    pub rtol: T,
    pub atol: T,
    /// Stop once ‖dρ/dt‖∞ stays below this for `hold_time`.
    pub stop_norm: T,
    pub hold_time: T,
    pub t_max: T,
}

impl<T: Real> Default for SteadyStateConfig<T> {
    fn default() -> Self {
        Self {
            rtol: T::lit(1e-10),
            atol: T::lit(1e-13),
            stop_norm: T::lit(1e-12),
            hold_time: T::one(),
            t_max: T::lit(1e4),
        }
    }
}

/// Integrates the master equation from |gg⟩⟨gg| until it stops changing.
pub fn steady_state_ode<T: Real>(
    p: &TwoAtomParams<T>,
    cfg: &SteadyStateConfig<T>,
) -> Result<TwoAtomState<T>, DynamicsError> {
    let gen = Generator::new(p)?;
    let start = TwoAtomState::ground();
    if max_abs(&gen.apply(&start.rho)) < cfg.stop_norm {
        return Ok(start);
    }
    let rate = p.gamma11 + p.gamma12.abs() + p.detuning.abs() + p.delta11.abs() + p.delta12.abs() + p.rabi;
    let tol = Tolerances {
        rtol: cfg.rtol,
        atol: cfg.atol,
        h_init: T::lit(1e-3),
        h_max: T::lit(0.5) / rate.max(T::lit(1e-3)),
        max_steps: 50_000_000,
    };
    let mut below_since: Option<T> = None;
    let mut last_norm = T::infinity();
    let mut stationary = false;
    let (_, y) = ode::dopri5(
        |_, y, dy| {
            let out = gen.apply(&TwoAtomState::unflatten(y).rho);
            for i in 0..4 {
                for j in 0..4 {
                    dy[4 * i + j] = out[i][j];
                }
            }
        },
        T::zero(),
        &start.flatten(),
        cfg.t_max,
        &tol,
        |t, y| {
            last_norm = max_abs(&gen.apply(&TwoAtomState::unflatten(y).rho));
            if last_norm < cfg.stop_norm {
                let since = *below_since.get_or_insert(t);
                if t - since >= cfg.hold_time {
                    stationary = true;
                    return Control::Stop;
                }
            } else {
                below_since = None;
            }
            Control::Continue
        },
    )?;
    if !stationary {
        return Err(DynamicsError::NonStationary { t_max: cfg.t_max.as_f64(), last_norm: last_norm.as_f64() });
    }
    Ok(TwoAtomState::unflatten(&y))
}

/// First-order-in-Ω steady state: ρ_eg = Ω / (δ₁₁ + δ₁₂ + Δ − i(γ₁₁ + γ₁₂)/2), m_eg = −ρ_eg.
pub fn perturbative_steady_state<T: Real>(p: &TwoAtomParams<T>) -> Result<CoherenceSolution<T>, DynamicsError> {
    let denom = Complex::new(
        p.delta11 + p.delta12 + p.detuning,
        -(p.gamma11 + p.gamma12) / T::lit(2.0),
    );
    if denom == zero() {
        return Err(DynamicsError::Singular("perturbative steady state"));
    }
    let rho_eg = re(p.rabi) / denom;
    Ok(CoherenceSolution { rho_eg, m_eg: -rho_eg })
}

/// Residuals of the two first-order steady-state equations for (ρ_eg, m_eg).
pub fn residual_eq15<T: Real>(sol: &CoherenceSolution<T>, p: &TwoAtomParams<T>) -> (Complex<T>, Complex<T>) {
    let half = T::lit(0.5);
    let shift = p.delta11 + p.detuning;
    let first = -Complex::new(p.gamma11 * half, shift) * sol.rho_eg
        + Complex::new(p.gamma12 * half, p.delta12) * sol.m_eg
        + im(p.rabi);
    let second = -Complex::new(T::lit(1.5) * p.gamma11 + p.gamma12, shift) * sol.m_eg
        - Complex::new(p.gamma11 + p.gamma12 * half, -p.delta12) * sol.rho_eg
        - im(p.rabi);
    (first, second)
}

/// Single-atom Bloch vector (⟨σ_ee⟩, ⟨σ⟩, ⟨σ†⟩).
pub type BlochVector<T> = [Complex<T>; 3];

/// Time derivative of the single-atom Maxwell–Bloch equations (uses γ₁₁, δ₁₁, Δ, Ω only).
pub fn maxwell_bloch_rhs<T: Real>(v: &BlochVector<T>, p: &TwoAtomParams<T>) -> BlochVector<T> {
    let [see, s, sd] = *v;
    let half = T::lit(0.5);
    let shift = p.delta11 + p.detuning;
    let inversion = see * T::lit(2.0) - one();
    [
        -see * p.gamma11 - im(p.rabi) * (s - sd),
        -Complex::new(p.gamma11 * half, shift) * s - im(p.rabi) * inversion,
        -Complex::new(p.gamma11 * half, -shift) * sd + im(p.rabi) * inversion,
    ]
}

/// Coefficient matrix M of the homogeneous part of the Maxwell–Bloch / regression equations.
pub fn bloch_matrix<T: Real>(p: &TwoAtomParams<T>) -> [[Complex<T>; 3]; 3] {
    let half = T::lit(0.5);
    let shift = p.delta11 + p.detuning;
    let w = im(p.rabi);
    let two = T::lit(2.0);
    [
        [re(-p.gamma11), -w, w],
        [-w * two, -Complex::new(p.gamma11 * half, shift), zero()],
        [w * two, zero(), -Complex::new(p.gamma11 * half, -shift)],
    ]
}

/// Exact steady state of the Maxwell–Bloch equations at finite Ω.
pub fn maxwell_bloch_steady_state<T: Real>(p: &TwoAtomParams<T>) -> Result<BlochVector<T>, DynamicsError> {
    let m = bloch_matrix(p);
    let neg = |a: [[Complex<T>; 3]; 3]| a.map(|r| r.map(|z| -z));
    // M v + b = 0 with b = (0, iΩ, −iΩ).
    let b = [zero(), im(p.rabi), im(-p.rabi)];
    linalg::solve(neg(m), b).ok_or(DynamicsError::Singular("Maxwell-Bloch steady state"))
}

/// Initial data for the regression equations: y(τ = 0) and the equal-time ⟨σ(t)⟩
/// that enters the inhomogeneous term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QrtInitial<T> {
    pub y0: [Complex<T>; 3],
    pub sigma: Complex<T>,
}

impl<T: Real> QrtInitial<T> {
    /// (⟨σ_ee(t+τ)σ(t)⟩, ⟨σ(t+τ)σ(t)⟩, ⟨σ†(t+τ)σ(t)⟩) at τ = 0 is (0, 0, ⟨σ_ee⟩).
    pub fn forward(sigma_ee: T, sigma: Complex<T>) -> Self {
        Self { y0: [zero(), zero(), re(sigma_ee)], sigma }
    }

    /// Reversed ordering (⟨σ(t)σ_ee(t+τ)⟩, ⟨σ(t)σ(t+τ)⟩, ⟨σ(t)σ†(t+τ)⟩): (⟨σ⟩, 0, 1 − ⟨σ_ee⟩).
    pub fn reversed(sigma_ee: T, sigma: Complex<T>) -> Self {
        Self { y0: [sigma, zero(), re(T::one() - sigma_ee)], sigma }
    }

    /// Forward minus reversed: the commutator correlators. Homogeneous, so `sigma` drops out.
    pub fn commutator(sigma_ee: T, sigma: Complex<T>) -> Self {
        Self { y0: [-sigma, zero(), re(T::lit(2.0) * sigma_ee - T::one())], sigma: zero() }
    }

    /// Inhomogeneous forcing b = (0, iΩ⟨σ⟩, −iΩ⟨σ⟩).
    pub fn forcing(&self, rabi: T) -> [Complex<T>; 3] {
        [zero(), im(rabi) * self.sigma, im(-rabi) * self.sigma]
    }
}

/// Right-hand side of the regression equations dy/dτ = M y + b.
pub fn qrt_rhs<T: Real>(y: &[Complex<T>], p: &TwoAtomParams<T>, init: &QrtInitial<T>) -> [Complex<T>; 3] {
    let m = bloch_matrix(p);
    let b = init.forcing(p.rabi);
    let mut out = b;
    for i in 0..3 {
        for j in 0..3 {
            out[i] = out[i] + m[i][j] * y[j];
        }
    }
    out
}

/// Fourier transform ∫₀^∞ y(τ) e^{−iωτ} dτ of the regression correlators, i.e.
/// the Laplace transform at iω: (iω − M)⁻¹ (y₀ + b / iω).
pub fn qrt_spectrum<T: Real>(
    omega: T,
    p: &TwoAtomParams<T>,
    init: &QrtInitial<T>,
) -> Result<[Complex<T>; 3], DynamicsError> {
    let m = bloch_matrix(p);
    let iw = im(omega);
    let b = init.forcing(p.rabi);
    let forced = b.iter().any(|z| *z != zero());
    if forced && omega == T::zero() {
        return Err(DynamicsError::Singular("regression spectrum at omega = 0 with forcing"));
    }
    let mut a = m.map(|r| r.map(|z| -z));
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = row[i] + iw;
    }
    let mut rhs = init.y0;
    if forced {
        for i in 0..3 {
            rhs[i] = rhs[i] + b[i] / iw;
        }
    }
    linalg::solve(a, rhs).ok_or(DynamicsError::Singular("regression spectrum"))
}

/// Full finite-drive source function in the rescaled form u(ω) = iC·F(ω), where F is the
/// transform of ⟨[σ†(t+τ), σ(t)]⟩ in γ₀ units written in closed form.
pub fn source_function_full<T: Real>(
    omega: T,
    p: &TwoAtomParams<T>,
    cooperativity: T,
    sigma_ee: T,
    sigma: Complex<T>,
) -> Result<ComplexRate<T>, DynamicsError> {
    if cooperativity == T::zero() {
        return Ok(zero());
    }
    let g = p.gamma11;
    let half = T::lit(0.5);
    let two = T::lit(2.0);
    let shift = p.delta11 + p.detuning;
    let w2 = p.rabi * p.rabi;
    let gw = Complex::new(g, omega);
    let hw = Complex::new(g * half, omega);
    let numerator = (Complex::new(g * half, shift + omega) * gw + re(two * w2)) * (two * sigma_ee - T::one())
        + sigma * Complex::new(shift + omega, -g * half) * (two * p.rabi);
    let denominator = (re(shift * shift) + hw * hw) * gw + hw * (T::lit(4.0) * w2);
    if denominator == zero() {
        return Err(DynamicsError::Singular("source function"));
    }
    Ok(im(cooperativity) * numerator / denominator)
}

/// The same source function obtained by solving the regression equations for the commutator.
pub fn source_function_qrt<T: Real>(
    omega: T,
    p: &TwoAtomParams<T>,
    cooperativity: T,
    sigma_ee: T,
    sigma: Complex<T>,
) -> Result<ComplexRate<T>, DynamicsError> {
    let y = qrt_spectrum(omega, p, &QrtInitial::commutator(sigma_ee, sigma))?;
    Ok(im(cooperativity) * y[2])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(a: f64, b: f64) -> Complex<f64> {
        Complex::new(a, b)
    }

    fn params() -> TwoAtomParams<f64> {
        TwoAtomParams { detuning: 0.3, rabi: 0.2, gamma11: 1.2, gamma12: 0.4, delta11: 0.25, delta12: -0.15 }
    }

    #[test]
    fn ground_state_is_stationary_without_drive() {
        let p = params().with_rabi(0.0);
        let d = lindblad_rhs(&TwoAtomState::ground(), &p).unwrap();
        assert_eq!(max_abs(&d), 0.0);
    }

    #[test]
    fn doubly_excited_decays_at_twice_the_rate() {
        let p = TwoAtomParams { rabi: 0.0, gamma12: 0.0, ..params() };
        let d = lindblad_rhs(&TwoAtomState::from_matrix(unit(3, 3)), &p).unwrap();
        assert!((d[3][3] - c(-2.0 * p.gamma11, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn rhs_is_traceless_and_hermitian() {
        let p = params();
        let mut rho: Mat4<f64> = mat_zero();
        let vals = [0.4, 0.3, 0.2, 0.1];
        for i in 0..4 {
            rho[i][i] = c(vals[i], 0.0);
        }
        rho[0][2] = c(0.05, -0.02);
        rho[2][0] = rho[0][2].conj();
        rho[1][3] = c(-0.01, 0.03);
        rho[3][1] = rho[1][3].conj();
        let d = lindblad_rhs(&TwoAtomState::from_matrix(rho), &p).unwrap();
        assert!(trace(&d).norm() < 1e-15);
        let st = TwoAtomState::from_matrix(d);
        assert!(st.hermiticity_error() < 1e-15);
    }

    #[test]
    fn generator_rejects_non_psd_dissipation() {
        let p = TwoAtomParams { gamma12: 1.5, ..params() };
        assert!(matches!(
            lindblad_rhs(&TwoAtomState::ground(), &p),
            Err(DynamicsError::InvalidGenerator { .. })
        ));
        let p = TwoAtomParams { gamma11: 0.0, gamma12: 0.0, ..params() };
        assert!(lindblad_rhs(&TwoAtomState::ground(), &p).is_err());
    }

    #[test]
    fn undriven_steady_state_is_ground() {
        let st = steady_state_ode(&params().with_rabi(0.0), &SteadyStateConfig::default()).unwrap();
        assert_eq!(st, TwoAtomState::ground());
    }

    #[test]
    fn single_atom_lorentzian() {
        let p = TwoAtomParams::single(0.0, 1e-3, 1.0, 0.0);
        let st = steady_state_ode(&p, &SteadyStateConfig::default()).unwrap();
        let coh = st.coherences();
        // On resonance the saturated value is (2iΩ/γ) / (1 + 8Ω²/γ²).
        let exact = c(0.0, 2e-3 / (1.0 + 8e-6));
        assert!((coh.rho_eg - exact).norm() < 1e-11, "{:?}", coh);
        assert!(st.is_valid(1e-12, 1e-10));
    }

    #[test]
    fn perturbative_examples() {
        let p = TwoAtomParams { detuning: -0.1f64, rabi: 0.7, gamma11: 1.1, gamma12: 0.3, delta11: 0.2, delta12: -0.1 };
        let s = perturbative_steady_state(&p).unwrap();
        assert!(s.rho_eg.re.abs() < 1e-15);
        assert!((s.rho_eg - c(0.0, 2.0 * 0.7 / 1.4)).norm() < 1e-15);
        let p = TwoAtomParams { detuning: 1.0, rabi: 1.0, gamma11: 1.5, gamma12: 0.5, delta11: 0.0, delta12: 0.0 };
        let s = perturbative_steady_state(&p).unwrap();
        assert!((s.rho_eg - c(0.5, 0.5)).norm() < 1e-15);
        assert_eq!(s.m_eg, -s.rho_eg);
        let s = perturbative_steady_state(&p.with_rabi(0.0)).unwrap();
        assert_eq!(s.rho_eg, c(0.0, 0.0));
        let sing = TwoAtomParams { detuning: 0.0, rabi: 1.0, gamma11: 1.0, gamma12: -1.0, delta11: 0.0, delta12: 0.0 };
        assert!(perturbative_steady_state(&sing).is_err());
    }

    #[test]
    fn eq15_residuals() {
        let p = params();
        let s = perturbative_steady_state(&p).unwrap();
        let (a, b) = residual_eq15(&s, &p);
        assert!(a.norm() < 1e-13 && b.norm() < 1e-13);
        let zero_sol = CoherenceSolution { rho_eg: c(0.0, 0.0), m_eg: c(0.0, 0.0) };
        let (a, b) = residual_eq15(&zero_sol, &p.with_rabi(1.0));
        assert_eq!((a, b), (c(0.0, 1.0), c(0.0, -1.0)));
        let s2 = perturbative_steady_state(&p.with_rabi(0.4)).unwrap();
        assert!((s2.rho_eg - s.rho_eg * 2.0).norm() < 1e-15);
        let (a, b) = residual_eq15(&s2, &p.with_rabi(0.4));
        assert!(a.norm() < 1e-13 && b.norm() < 1e-13);
    }

    #[test]
    fn bloch_examples() {
        let p = params().with_rabi(0.0);
        let z = [c(0.0, 0.0); 3];
        assert_eq!(maxwell_bloch_rhs(&z, &p), z);
        let d = maxwell_bloch_rhs(&[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)], &p);
        assert!((d[0] - c(-p.gamma11, 0.0)).norm() < 1e-15);
        let p = params();
        let s = c(0.1, -0.2);
        let d = maxwell_bloch_rhs(&[c(0.3, 0.0), s, s.conj()], &p);
        assert!((d[2] - d[1].conj()).norm() < 1e-15);
        assert!(d[0].im.abs() < 1e-15);
        let ss = maxwell_bloch_steady_state(&p).unwrap();
        let r = maxwell_bloch_rhs(&ss, &p);
        assert!(r.iter().all(|z| z.norm() < 1e-14));
        assert!((ss[2] - ss[1].conj()).norm() < 1e-14);
    }

    #[test]
    fn qrt_trivial_cases() {
        let p = params().with_rabi(0.0);
        let y = qrt_spectrum(0.4, &p, &QrtInitial::forward(0.0, c(0.0, 0.0))).unwrap();
        assert!(y.iter().all(|z| z.norm() == 0.0));
        let p = params();
        let i1 = QrtInitial { y0: [c(0.1, 0.2), c(-0.3, 0.0), c(0.05, 0.05)], sigma: c(0.02, -0.01) };
        let i2 = QrtInitial { y0: i1.y0.map(|z| z * 2.0), sigma: i1.sigma * 2.0 };
        let a = qrt_spectrum(0.7, &p, &i1).unwrap();
        let b = qrt_spectrum(0.7, &p, &i2).unwrap();
        for k in 0..3 {
            assert!((b[k] - a[k] * 2.0).norm() < 1e-14);
        }
        assert!(qrt_spectrum(0.0, &p, &i1).is_err());
    }

    #[test]
    fn closed_form_source_matches_regression_route() {
        for &(w, see, s) in &[(0.37, 0.1, c(0.05, 0.2)), (-1.2, 0.0, c(0.0, 0.0)), (0.0, 0.3, c(-0.1, 0.1))] {
            let p = params();
            let a = source_function_full(w, &p, 1.3, see, s).unwrap();
            let b = source_function_qrt(w, &p, 1.3, see, s).unwrap();
            assert!((a - b).norm() < 1e-13 * a.norm().max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn source_reduces_to_weak_drive_form() {
        let p = TwoAtomParams { rabi: 0.0, ..params() };
        let u = source_function_full(p.delta11, &p, 2.0, 0.0, c(0.0, 0.0)).unwrap();
        let weak = crate::solver::weak_drive_source(2.0, p.gamma11, p.detuning).unwrap();
        assert!((u - weak).norm() < 1e-13);
        assert_eq!(source_function_full(0.3, &params(), 0.0, 0.2, c(0.1, 0.0)).unwrap(), c(0.0, 0.0));
    }
}
