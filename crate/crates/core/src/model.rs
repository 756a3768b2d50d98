//! Units, physical-parameter conversions and the dimensionless model inputs.
//!
//! Rates are measured in units of the free-space linewidth γ₀ and lengths in
//! units of the transition wavelength λ, so the free-space wave number is 2π.
//! A positive detuning is a red-detuned probe and a positive shift is a red shift.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("number density must be >= 0 (got {0})")]
    NegativeDensity(f64),
    #[error("wavelength must be > 0 (got {0})")]
    NonPositiveWavelength(f64),
    #[error("cooperativity must be >= 0 (got {0})")]
    NegativeCooperativity(f64),
    #[error("rabi frequency must be >= 0 (got {0})")]
    NegativeRabi(f64),
    #[error("{0} must be finite")]
    NonFinite(&'static str),
}

/// Laboratory inputs: number density in 1/m³, wavelength in m, and optionally γ₀ in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalInput<T> {
    pub number_density: T,
    pub wavelength: T,
    pub natural_linewidth: Option<T>,
}

impl<T: Real> PhysicalInput<T> {
    pub fn new(number_density: T, wavelength: T) -> Result<Self, ModelError> {
        let input = Self { number_density, wavelength, natural_linewidth: None };
        input.validate()?;
        Ok(input)
    }

    pub fn with_linewidth(mut self, gamma0: T) -> Self {
        self.natural_linewidth = Some(gamma0);
        self
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !self.number_density.is_finite() {
            return Err(ModelError::NonFinite("number_density"));
        }
        if !self.wavelength.is_finite() {
            return Err(ModelError::NonFinite("wavelength"));
        }
        if self.number_density < T::zero() {
            return Err(ModelError::NegativeDensity(self.number_density.as_f64()));
        }
        if self.wavelength <= T::zero() {
            return Err(ModelError::NonPositiveWavelength(self.wavelength.as_f64()));
        }
        Ok(())
    }

    /// Converts a dimensionless rate back to rad/s, when γ₀ was supplied.
    pub fn to_physical_rate(&self, dimensionless: T) -> Option<T> {
        self.natural_linewidth.map(|g0| g0 * dimensionless)
    }
}

/// C = λ³𝒩 / 4π².
pub fn cooperativity<T: Real>(input: &PhysicalInput<T>) -> Result<T, ModelError> {
    input.validate()?;
    let l = input.wavelength;
    Ok(l * l * l * input.number_density / four_pi_squared())
}

/// Number density (1/m³) that produces cooperativity `c` at wavelength `wavelength`.
pub fn density_for_cooperativity<T: Real>(c: T, wavelength: T) -> Result<T, ModelError> {
    if c < T::zero() {
        return Err(ModelError::NegativeCooperativity(c.as_f64()));
    }
    if wavelength <= T::zero() {
        return Err(ModelError::NonPositiveWavelength(wavelength.as_f64()));
    }
    Ok(c * four_pi_squared() / (wavelength * wavelength * wavelength))
}

/// Mean number of atoms in one cubic wavelength, 4π²·C.
pub fn atoms_per_cubic_wavelength<T: Real>(c: T) -> T {
    four_pi_squared::<T>() * c
}

fn four_pi_squared<T: Real>() -> T {
    let pi = T::PI();
    T::lit(4.0) * pi * pi
}

/// Dimensionless model parameters (C, Δ₀/γ₀, Ω/γ₀).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams<T> {
    pub cooperativity: T,
    pub detuning: T,
    pub rabi: T,
}

impl<T: Real> ModelParams<T> {
    pub fn new(cooperativity: T, detuning: T, rabi: T) -> Result<Self, ModelError> {
        let p = Self { cooperativity, detuning, rabi };
        p.validate()?;
        Ok(p)
    }

    /// Parameters for the Ω → 0 limit used by the self-consistent relation.
    pub fn weak(cooperativity: T, detuning: T) -> Result<Self, ModelError> {
        Self::new(cooperativity, detuning, T::zero())
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        for (name, v) in [
            ("cooperativity", self.cooperativity),
            ("detuning", self.detuning),
            ("rabi", self.rabi),
        ] {
            if !v.is_finite() {
                return Err(ModelError::NonFinite(name));
            }
        }
        if self.cooperativity < T::zero() {
            return Err(ModelError::NegativeCooperativity(self.cooperativity.as_f64()));
        }
        if self.rabi < T::zero() {
            return Err(ModelError::NegativeRabi(self.rabi.as_f64()));
        }
        Ok(())
    }

    pub fn with_cooperativity(self, cooperativity: T) -> Self {
        Self { cooperativity, ..self }
    }

    pub fn with_detuning(self, detuning: T) -> Self {
        Self { detuning, ..self }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn rubidium_density_gives_unit_cooperativity() {
        // 8e13 cm^-3 = 8e19 m^-3 at 780 nm.
        let input = PhysicalInput::new(8e19f64, 780e-9).unwrap();
        let c = cooperativity(&input).unwrap();
        assert!((c - 1.0).abs() < 0.05, "C = {c}");
    }

    #[test]
    fn zero_density_is_zero_cooperativity() {
        let input = PhysicalInput::new(0.0, 1e-6).unwrap();
        assert_eq!(cooperativity(&input).unwrap(), 0.0);
    }

    #[test]
    fn inverse_density_gives_exactly_one() {
        let lambda = 2.0_f64;
        let n = 4.0 * PI * PI / lambda.powi(3);
        let c = cooperativity(&PhysicalInput::new(n, lambda).unwrap()).unwrap();
        assert!((c - 1.0).abs() < 1e-15);
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        assert_eq!(
            PhysicalInput::new(-1.0, 1e-6).unwrap_err(),
            ModelError::NegativeDensity(-1.0)
        );
        assert!(matches!(
            PhysicalInput::new(1.0, 0.0),
            Err(ModelError::NonPositiveWavelength(_))
        ));
        let bad = PhysicalInput { number_density: 1.0, wavelength: -2.0, natural_linewidth: None };
        assert!(cooperativity(&bad).is_err());
        assert!(ModelParams::new(-0.1, 0.0, 0.0).is_err());
        assert!(ModelParams::new(0.1, 0.0, -1.0).is_err());
        assert!(ModelParams::new(0.1, f64::NAN, 0.0).is_err());
    }

    #[test]
    fn atoms_per_cubic_wavelength_values() {
        assert!((atoms_per_cubic_wavelength(1.0_f64) - 39.478_417_604_357_43).abs() < 1e-12);
        assert_eq!(atoms_per_cubic_wavelength(0.0_f64), 0.0);
        assert!((atoms_per_cubic_wavelength(0.5_f64) - 2.0 * PI * PI).abs() < 1e-12);
        assert!((atoms_per_cubic_wavelength(1.0_f32) - 39.478_42).abs() < 1e-4);
    }

    #[test]
    fn conversions_are_pure() {
        let input = PhysicalInput::new(3.3e19f64, 5.89e-7).unwrap();
        let a = cooperativity(&input).unwrap();
        let b = cooperativity(&input).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn physical_rate_requires_linewidth() {
        let input = PhysicalInput::new(1e19, 7.8e-7).unwrap();
        assert_eq!(input.to_physical_rate(2.0), None);
        let input = input.with_linewidth(3.0e7);
        assert_eq!(input.to_physical_rate(2.0), Some(6.0e7));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn density_roundtrip(log_c in -6.0f64..3.0, lambda in 1e-7f64..1e-5) {
                let c = 10f64.powf(log_c);
                let n = density_for_cooperativity(c, lambda).unwrap();
                let back = cooperativity(&PhysicalInput::new(n, lambda).unwrap()).unwrap();
                prop_assert!(((back - c) / c).abs() < 1e-12);
            }
        }
    }
}
