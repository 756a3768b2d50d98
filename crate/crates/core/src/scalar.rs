//! Scalar abstraction shared by the numerical modules.

use std::fmt::{Debug, Display, LowerExp};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar the physics is written against: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + LowerExp + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal. Every finite `f64` is representable (possibly rounded) in `Self`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Dimensionless complex rate (rates in units of the free-space linewidth).
pub type ComplexRate<T> = Complex<T>;

#[inline]
pub fn is_finite_complex<T: Real>(z: Complex<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// `exp(z) - 1` without cancellation for small `|z|`.
pub fn expm1_complex<T: Real>(z: Complex<T>) -> Complex<T> {
    let two = T::lit(2.0);
    let half_im = z.im / two;
    let s = half_im.sin();
    let re = z.re.exp_m1() * z.im.cos() - two * s * s;
    let im = z.re.exp() * z.im.sin();
    Complex::new(re, im)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expm1_matches_naive_for_moderate_arguments() {
        for &(a, b) in &[(0.3, -0.7), (-1.2, 2.5), (0.0, 0.0), (2.0, 0.1)] {
            let z = Complex::new(a, b);
            let naive = z.exp() - Complex::new(1.0, 0.0);
            let stable = expm1_complex::<f64>(z);
            assert!((naive - stable).norm() < 1e-14, "{z}");
        }
    }

    #[test]
    fn expm1_keeps_precision_near_zero() {
        let z = Complex::new(1e-12, -2e-12);
        let r = expm1_complex::<f64>(z);
        // e^a cos b − 1 ≈ a + (a² − b²)/2
        assert!((r.re - (1e-12 - 1.5e-24)).abs() < 1e-27);
        assert!((r.im - (-2e-12 - 2e-24)).abs() < 1e-27);
    }
}
