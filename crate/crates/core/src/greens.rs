//! Free-space and medium-dressed Green's functions and the two-atom pair terms.
//!
//! All Green's functions are returned rescaled by ℘²/ħ² and divided by γ₀, so
//! that γ₁₂ = −2 Re D and δ₁₂ = Im D come out directly in units of γ₀. The free
//! wave number is k₀ = 2π in wavelength units.

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{expm1_complex, ComplexRate, Real};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GreensError {
    #[error("separation must be > 0 (got {0})")]
    NonPositiveSeparation(f64),
}

fn k0<T: Real>() -> T {
    T::lit(2.0) * T::PI()
}

fn check_r<T: Real>(r: T) -> Result<(), GreensError> {
    if r > T::zero() && r.is_finite() {
        Ok(())
    } else {
        Err(GreensError::NonPositiveSeparation(r.as_f64()))
    }
}

/// Scalar free-space function −(i / 2k₀r)·w²·exp(−i w k₀ r), with `w` = ω/ω₀.
pub fn free_space_scalar<T: Real>(r: T, w: T) -> Result<ComplexRate<T>, GreensError> {
    check_r(r)?;
    let kr = k0::<T>() * r;
    let phase = Complex::new(T::zero(), -w * kr).exp();
    Ok(Complex::new(T::zero(), -w * w / (T::lit(2.0) * kr)) * phase)
}

/// Dyadic free-space Green's function in the same rescaling as [`free_space_scalar`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreensTensor<T> {
    pub components: [[ComplexRate<T>; 3]; 3],
    pub separation: [T; 3],
    pub frequency_ratio: T,
}

impl<T: Real> GreensTensor<T> {
    pub fn trace(&self) -> ComplexRate<T> {
        self.components[0][0] + self.components[1][1] + self.components[2][2]
    }

    /// Random-polarization average, trace / 3.
    pub fn orientation_average(&self) -> ComplexRate<T> {
        self.trace() / T::lit(3.0)
    }
}

pub fn free_space_tensor<T: Real>(rvec: [T; 3], w: T) -> Result<GreensTensor<T>, GreensError> {
    let r = (rvec[0] * rvec[0] + rvec[1] * rvec[1] + rvec[2] * rvec[2]).sqrt();
    check_r(r)?;
    let k = k0::<T>() * w;
    let i = Complex::new(T::zero(), T::one());
    let one = Complex::new(T::one(), T::zero());
    let three = T::lit(3.0);
    let ikr = i * k / r;
    let r2 = r * r;
    // δ_αβ(k² − ik/r − 1/r²) + x̂_α x̂_β(−k² + 3ik/r + 3/r²)
    let diag = one * (k * k) - ikr - one / r2;
    let radial = -one * (k * k) + ikr * three + one * (three / r2);
    let k03 = k0::<T>().powi(3);
    let prefactor = Complex::new(T::zero(), -three / (T::lit(4.0) * k03 * r)) * Complex::new(T::zero(), -k * r).exp();
    let mut components = [[Complex::new(T::zero(), T::zero()); 3]; 3];
    for (a, row) in components.iter_mut().enumerate() {
        for (b, c) in row.iter_mut().enumerate() {
            let xx = rvec[a] * rvec[b] / r2;
            let delta = if a == b { diag } else { Complex::new(T::zero(), T::zero()) };
            *c = prefactor * (delta + radial * xx);
        }
    }
    Ok(GreensTensor { components, separation: rvec, frequency_ratio: w })
}

/// Dressed scalar function −(i / 2k₀r)·exp(−i k₀ s r) for effective wave number `s` (units of k₀).
pub fn dressed_scalar<T: Real>(r: T, s: ComplexRate<T>) -> Result<ComplexRate<T>, GreensError> {
    check_r(r)?;
    let kr = k0::<T>() * r;
    let phase = (Complex::new(T::zero(), -kr) * s).exp();
    Ok(Complex::new(T::zero(), -T::one() / (T::lit(2.0) * kr)) * phase)
}

/// Distance-resolved two-atom terms in units of γ₀.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairTerms<T> {
    pub r: T,
    pub gamma12: T,
    /// Bare collective shift; diverges as −1/(4πr) at short range.
    pub delta12: T,
    /// Shift with the free-space (s = 1) part subtracted; tends to δ'₁₁ as r → 0.
    pub delta12_renormalized: T,
}

/// γ₁₂ = sin(q′r)e^{q″r}/(k₀r), δ₁₂ = −cos(q′r)e^{q″r}/(2k₀r) with q₀ = k₀s.
pub fn pair_terms<T: Real>(r: T, s: ComplexRate<T>) -> Result<PairTerms<T>, GreensError> {
    check_r(r)?;
    let kr = k0::<T>() * r;
    let phase = kr * s.re;
    let envelope = (kr * s.im).exp();
    let sinc = if phase == T::zero() { T::one() } else { phase.sin() / phase };
    let gamma12 = s.re * sinc * envelope;
    let delta12 = -phase.cos() * envelope / (T::lit(2.0) * kr);
    Ok(PairTerms { r, gamma12, delta12, delta12_renormalized: renormalized_shift(kr, s) })
}

// −Re(e^{−ik₀sr} − e^{−ik₀r}) / (2k₀r), written so the two 1/r poles never cancel numerically.
fn renormalized_shift<T: Real>(kr: T, s: ComplexRate<T>) -> T {
    let one = Complex::new(T::one(), T::zero());
    let i = Complex::new(T::zero(), T::one());
    let diff = Complex::new(T::zero(), -kr).exp() * expm1_complex(-i * (s - one) * kr);
    -diff.re / (T::lit(2.0) * kr)
}

/// Pair terms with the free-space Green's function (s = 1).
pub fn free_space_pair_terms<T: Real>(r: T) -> Result<PairTerms<T>, GreensError> {
    pair_terms(r, Complex::new(T::one(), T::zero()))
}

/// Coincident-atom limit: (γ₁₁, δ'₁₁) = (Re s, −Im s / 2).
pub fn pair_terms_limit<T: Real>(s: ComplexRate<T>) -> (T, T) {
    (s.re, -s.im / T::lit(2.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn scalar_examples() {
        let v = free_space_scalar(0.5, 1.0).unwrap();
        assert!((v - c(0.0, 1.0 / (2.0 * PI))).norm() < 1e-15);
        let v = free_space_scalar(0.25, 1.0).unwrap();
        assert!((v.norm() - 1.0 / PI).abs() < 1e-15);
        assert!(free_space_scalar(1e6, 1.0).unwrap().norm() < 1e-7);
        assert!(free_space_scalar(0.0, 1.0).is_err());
        assert!(free_space_scalar(-1.0, 1.0).is_err());
    }

    #[test]
    fn tensor_axial_structure() {
        let t = free_space_tensor([0.0, 0.0, 0.7], 1.0).unwrap();
        assert!((t.components[0][0] - t.components[1][1]).norm() < 1e-15);
        for a in 0..3 {
            for b in 0..3 {
                assert!((t.components[a][b] - t.components[b][a]).norm() < 1e-15);
                if a != b {
                    assert_eq!(t.components[a][b], c(0.0, 0.0));
                }
            }
        }
        // zz = prefactor·(2/r²)(1 + ikr) ; xx = prefactor·(k² − ik/r − 1/r²).
        let (k, r) = (2.0 * PI, 0.7);
        let pref = c(0.0, -3.0 / (4.0 * (2.0 * PI).powi(3) * r)) * c(0.0, -k * r).exp();
        let zz = pref * (c(2.0 / (r * r), 0.0) + c(0.0, 2.0 * k / r));
        assert!((t.components[2][2] - zz).norm() < 1e-14);
        let far = free_space_tensor([0.0, 0.0, 100.0], 1.0).unwrap();
        assert_eq!(far.components[0][2], c(0.0, 0.0));
        assert!(free_space_tensor([0.0, 0.0, 0.0], 1.0).is_err());
    }

    #[test]
    fn tensor_average_matches_scalar() {
        for (v, w) in [([0.1f64, 0.2, -0.3], 1.0f64), ([3.0, -1.0, 0.5], 0.9), ([0.0, 0.02, 0.0], 1.1)] {
            let t = free_space_tensor(v, w).unwrap();
            let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            let s = free_space_scalar(r, w).unwrap();
            assert!((t.orientation_average() - s).norm() < 1e-12 * s.norm().max(1.0));
        }
    }

    #[test]
    fn dressed_reduces_to_free_space() {
        let a = dressed_scalar(0.3, c(1.0, 0.0)).unwrap();
        let b = free_space_scalar(0.3, 1.0).unwrap();
        assert!((a - b).norm() < 1e-16);
        let s = c(1.2720, -0.7862);
        let v = dressed_scalar(0.5, s).unwrap();
        assert!((v.norm() - (-0.7862 * PI).exp() / (2.0 * PI)).abs() < 1e-15);
        assert!(dressed_scalar(0.0, s).is_err());
    }

    #[test]
    fn pair_term_examples() {
        let p = free_space_pair_terms(0.5f64).unwrap();
        assert!(p.gamma12.abs() < 1e-15);
        assert!((p.delta12 - 1.0 / (2.0 * PI)).abs() < 1e-15);
        assert!(p.delta12_renormalized.abs() < 1e-15);
        let p = free_space_pair_terms(1e-6f64).unwrap();
        assert!((p.gamma12 - 1.0).abs() < 1e-9);
        let p = pair_terms(50.0, c(1.1, -0.3)).unwrap();
        assert!(p.gamma12.abs() < 1e-30);
        assert!(pair_terms(0.0, c(1.0, 0.0)).is_err());
    }

    #[test]
    fn closed_form_matches_direct_evaluation() {
        for &(r, s) in &[(0.13, c(1.3, -0.4)), (0.77, c(0.6, -0.05)), (2.5, c(1.9, -0.8)), (0.5, c(1.0, 0.0))] {
            let d = dressed_scalar(r, s).unwrap();
            let p = pair_terms(r, s).unwrap();
            assert!((p.gamma12 + 2.0 * d.re).abs() < 1e-13);
            assert!((p.delta12 - d.im).abs() < 1e-13);
            let d0 = dressed_scalar(r, c(1.0, 0.0)).unwrap();
            assert!((p.delta12_renormalized - (d.im - d0.im)).abs() < 1e-12);
        }
    }

    #[test]
    fn limit_examples() {
        assert_eq!(pair_terms_limit(c(1.0, 0.0)), (1.0, 0.0));
        let (g, d) = pair_terms_limit(c(1.2720, -0.7862));
        assert!((g - 1.2720).abs() < 1e-15 && (d - 0.3931).abs() < 1e-15);
        assert_eq!(pair_terms_limit(c(2.0, 0.0)), (2.0, 0.0));
    }

    #[test]
    fn renormalized_shift_reaches_single_atom_value() {
        let s = c(1.4, -0.5);
        let p = pair_terms(1e-12, s).unwrap();
        assert!((p.delta12_renormalized - 0.25).abs() < 1e-10);
        assert!((p.gamma12 - 1.4).abs() < 1e-10);
    }
}
