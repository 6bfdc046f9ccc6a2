//! Ohmic spectral density and Bose-Einstein occupation.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_non_negative, ensure_positive, Error, Result};
use crate::units::PhysicalConstants;

/// High-frequency regulator of the spectral density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Cutoff {
    None,
    /// Multiplies the density by `exp(-ω/ω_c)`; ω_c in rad/s.
    Exponential(f64),
}

/// Oscillator bath with J(ω)/(ħω₀)² = C·ω/ω₀².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OhmicBath {
    coupling: f64,
    omega0: f64,
    cutoff: Cutoff,
}

impl OhmicBath {
    pub fn new(coupling: f64, omega0: f64, cutoff: Cutoff) -> Result<Self> {
        ensure_non_negative("C", coupling)?;
        ensure_positive("omega0", omega0)?;
        if let Cutoff::Exponential(wc) = cutoff {
            ensure_positive("omega_c", wc)?;
        }
        Ok(Self {
            coupling,
            omega0,
            cutoff,
        })
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn cutoff(&self) -> Cutoff {
        self.cutoff
    }

    pub fn cutoff_frequency(&self) -> Option<f64> {
        match self.cutoff {
            Cutoff::None => None,
            Cutoff::Exponential(wc) => Some(wc),
        }
    }

    /// j(ω) = J(ω)/(ħω₀)² = C·ω/ω₀², in seconds (ω₀·j is dimensionless).
    pub fn spectral_density(&self, omega: f64) -> Result<f64> {
        ensure_non_negative("omega", omega)?;
        Ok(self.spectral_density_unchecked(omega))
    }

    pub(crate) fn spectral_density_unchecked(&self, omega: f64) -> f64 {
        let linear = self.coupling * omega / (self.omega0 * self.omega0);
        match self.cutoff {
            Cutoff::None => linear,
            Cutoff::Exponential(wc) => linear * (-omega / wc).exp(),
        }
    }
}

/// 1/(eˣ − 1) for x > 0.
pub(crate) fn bose_factor(x: f64) -> f64 {
    1.0 / x.exp_m1()
}

/// coth(x/2) = 1 + 2/(eˣ − 1), for x > 0.
pub(crate) fn coth_half(x: f64) -> f64 {
    1.0 + 2.0 * bose_factor(x)
}

/// Thermal occupation n(ω) = 1/(exp(ħω/k_BT) − 1).
pub fn bose_occupation(omega: f64, temperature: f64, constants: &PhysicalConstants) -> Result<f64> {
    ensure_non_negative("omega", omega)?;
    ensure_non_negative("temperature", temperature)?;
    if temperature == 0.0 {
        return Ok(0.0);
    }
    if omega == 0.0 {
        return Err(Error::ZeroFrequencyDivergence);
    }
    let x = constants.hbar() * omega / (constants.k_b() * temperature);
    Ok(bose_factor(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn omega_for(x: f64, temperature: f64, k: &PhysicalConstants) -> f64 {
        x * k.k_b() * temperature / k.hbar()
    }

    #[test]
    fn spectral_density_examples() {
        // j carries units of 1/ω; the reference values hold at ω₀ = 1 rad/s
        let bath = OhmicBath::new(0.01, 1.0, Cutoff::None).unwrap();
        assert_relative_eq!(
            bath.spectral_density(1.0).unwrap(),
            0.01,
            max_relative = 1e-15
        );
        assert_eq!(bath.spectral_density(0.0).unwrap(), 0.0);
        assert_relative_eq!(
            bath.spectral_density(2.0).unwrap(),
            0.02,
            max_relative = 1e-15
        );
        let scaled = OhmicBath::new(0.01, 2.0e9, Cutoff::None).unwrap();
        assert_relative_eq!(
            2.0e9 * scaled.spectral_density(2.0e9).unwrap(),
            0.01,
            max_relative = 1e-15
        );
        assert!(bath.spectral_density(-1.0).is_err());
    }

    #[test]
    fn spectral_density_is_linear_without_cutoff() {
        let bath = OhmicBath::new(0.3, 1.0, Cutoff::None).unwrap();
        for w in [0.1, 1.0, 17.0, 1e6] {
            let ratio = bath.spectral_density(2.0 * w).unwrap() / bath.spectral_density(w).unwrap();
            assert_relative_eq!(ratio, 2.0, max_relative = 1e-15);
        }
    }

    #[test]
    fn exponential_cutoff_suppresses() {
        let bath = OhmicBath::new(1.0, 1.0, Cutoff::Exponential(10.0)).unwrap();
        assert_relative_eq!(
            bath.spectral_density(10.0).unwrap(),
            10.0 * (-1.0f64).exp(),
            max_relative = 1e-15
        );
    }

    #[test]
    fn bath_validation() {
        assert!(OhmicBath::new(-1.0, 1.0, Cutoff::None).is_err());
        assert!(OhmicBath::new(1.0, 0.0, Cutoff::None).is_err());
        assert!(OhmicBath::new(1.0, 1.0, Cutoff::Exponential(0.0)).is_err());
    }

    #[test]
    fn occupation_examples() {
        let k = PhysicalConstants::codata2018();
        let t = 4.2;
        assert_relative_eq!(
            bose_occupation(omega_for(1.0, t, &k), t, &k).unwrap(),
            0.58198,
            max_relative = 1e-5
        );
        assert_relative_eq!(
            bose_occupation(omega_for(2.0, t, &k), t, &k).unwrap(),
            0.15652,
            max_relative = 1e-4
        );
        assert_eq!(bose_occupation(1e12, 0.0, &k).unwrap(), 0.0);
        assert_eq!(
            bose_occupation(0.0, 1.0, &k),
            Err(Error::ZeroFrequencyDivergence)
        );
        assert!(bose_occupation(1.0, -1.0, &k).is_err());
    }

    #[test]
    fn occupation_high_temperature_expansion() {
        for i in 0..50 {
            let x = 1e-4 * 10f64.powf(i as f64 * 3.0 / 49.0);
            let n = bose_factor(x);
            assert!((n - 1.0 / x + 0.5).abs() <= x / 12.0 * 1.01, "x = {x}");
        }
    }

    #[test]
    fn one_plus_two_n_is_coth() {
        for i in 0..200 {
            let x = 1e-3 * (2e4f64).powf(i as f64 / 199.0);
            let coth = 1.0 / (x / 2.0).tanh();
            assert_relative_eq!(coth_half(x), coth, max_relative = 1e-12);
        }
    }

    #[test]
    fn occupation_monotonicity() {
        let k = PhysicalConstants::codata2018();
        let omegas: Vec<f64> = (1..40).map(|i| 1e10 * i as f64).collect();
        let temps: Vec<f64> = (1..40).map(|i| 0.1 * i as f64).collect();
        for &t in &temps {
            let ns: Vec<f64> = omegas
                .iter()
                .map(|&w| bose_occupation(w, t, &k).unwrap())
                .collect();
            assert!(ns.windows(2).all(|p| p[1] < p[0]));
        }
        for &w in &omegas {
            let ns: Vec<f64> = temps
                .iter()
                .map(|&t| bose_occupation(w, t, &k).unwrap())
                .collect();
            assert!(ns.windows(2).all(|p| p[1] > p[0]));
        }
    }
}
