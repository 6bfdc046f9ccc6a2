//! Physical constants, energy units and the SI / natural-unit boundary.
//!
//! Public operations take and return SI quantities. The natural-unit system
//! used by the kernel and matter modules sets ħ = c = k_B = 1 while keeping
//! the metre as the base length, so energies, temperatures, masses and
//! inverse times are all measured in m⁻¹.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_non_negative, ensure_positive, Error, Result};

/// Reduced Planck constant, J·s (CODATA 2018, exact: h/2π with h exact).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Speed of light in vacuum, m/s (SI exact).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Newtonian constant of gravitation, m³·kg⁻¹·s⁻² (CODATA 2018 recommended).
pub const NEWTON_G: f64 = 6.674_30e-11;
/// Boltzmann constant, J/K (SI exact).
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Electron volt, J (SI exact).
pub const ELECTRON_VOLT: f64 = 1.602_176_634e-19;
/// Avogadro constant, mol⁻¹ (SI exact).
pub const AVOGADRO: f64 = 6.022_140_76e23;

/// The set of constants every computation draws from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    hbar: f64,
    c: f64,
    g: f64,
    k_b: f64,
    ev: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::codata2018()
    }
}

impl PhysicalConstants {
    pub const fn codata2018() -> Self {
        Self {
            hbar: HBAR,
            c: SPEED_OF_LIGHT,
            g: NEWTON_G,
            k_b: BOLTZMANN,
            ev: ELECTRON_VOLT,
        }
    }

    /// Custom constants, e.g. ħ = c = G = 1. Every value must be finite and positive.
    pub fn new(hbar: f64, c: f64, g: f64, k_b: f64, ev: f64) -> Result<Self> {
        ensure_positive("hbar", hbar)?;
        ensure_positive("c", c)?;
        ensure_positive("G", g)?;
        ensure_positive("k_B", k_b)?;
        ensure_positive("eV", ev)?;
        Ok(Self {
            hbar,
            c,
            g,
            k_b,
            ev,
        })
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }
    pub fn c(&self) -> f64 {
        self.c
    }
    pub fn g(&self) -> f64 {
        self.g
    }
    pub fn k_b(&self) -> f64 {
        self.k_b
    }
    pub fn ev(&self) -> f64 {
        self.ev
    }

    /// √(ħc⁵/G).
    pub fn planck_energy(&self) -> f64 {
        (self.hbar * self.c.powi(5) / self.g).sqrt()
    }

    /// Planck length √(ħG/c³): the value of √G once ħ = c = 1 with lengths kept in metres.
    pub fn planck_length(&self) -> f64 {
        (self.hbar * self.g / self.c.powi(3)).sqrt()
    }

    /// Graviton coupling κ = √(32πG), with G in natural units (m²).
    pub fn kappa_natural(&self) -> f64 {
        (32.0 * PI).sqrt() * self.planck_length()
    }

    /// Express the same physical constants in rescaled base units, where
    /// the new units of length, mass and time are `length`, `mass`, `time`
    /// old units (kelvin unchanged).
    pub fn rescaled(&self, length: f64, mass: f64, time: f64) -> Result<Self> {
        ensure_positive("length", length)?;
        ensure_positive("mass", mass)?;
        ensure_positive("time", time)?;
        let energy = mass * length * length / (time * time);
        Self::new(
            self.hbar / (energy * time),
            self.c * time / length,
            self.g * mass * time * time / length.powi(3),
            self.k_b / energy,
            self.ev / energy,
        )
    }
}

/// Free function form of [`PhysicalConstants::planck_energy`], in J.
pub fn planck_energy(constants: &PhysicalConstants) -> f64 {
    constants.planck_energy()
}

/// k_B·T/ħ in s⁻¹.
pub fn thermal_rate_scale(temperature: f64, constants: &PhysicalConstants) -> Result<f64> {
    ensure_non_negative("temperature", temperature)?;
    Ok(constants.k_b * temperature / constants.hbar)
}

/// Energy units accepted at the SI boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EnergyUnit {
    Joule,
    ElectronVolt,
    GigaElectronVolt,
    /// Rest energy of a mass given in kilograms.
    KilogramC2,
    /// A count of atoms, each contributing 1 eV.
    AtomCount,
}

impl EnergyUnit {
    pub const ALL: [EnergyUnit; 5] = [
        EnergyUnit::Joule,
        EnergyUnit::ElectronVolt,
        EnergyUnit::GigaElectronVolt,
        EnergyUnit::KilogramC2,
        EnergyUnit::AtomCount,
    ];

    /// Joules per unit.
    pub fn in_joules(self, constants: &PhysicalConstants) -> f64 {
        match self {
            EnergyUnit::Joule => 1.0,
            EnergyUnit::ElectronVolt | EnergyUnit::AtomCount => constants.ev,
            EnergyUnit::GigaElectronVolt => constants.ev * 1e9,
            EnergyUnit::KilogramC2 => constants.c * constants.c,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            EnergyUnit::Joule => "J",
            EnergyUnit::ElectronVolt => "eV",
            EnergyUnit::GigaElectronVolt => "GeV",
            EnergyUnit::KilogramC2 => "kg",
            EnergyUnit::AtomCount => "atoms",
        }
    }
}

impl fmt::Display for EnergyUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for EnergyUnit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "J" | "j" => Ok(EnergyUnit::Joule),
            "eV" | "ev" => Ok(EnergyUnit::ElectronVolt),
            "GeV" | "gev" => Ok(EnergyUnit::GigaElectronVolt),
            "kg" | "kgc2" | "kg*c^2" => Ok(EnergyUnit::KilogramC2),
            "atoms" | "atom" => Ok(EnergyUnit::AtomCount),
            other => Err(Error::UnknownUnit(other.to_string())),
        }
    }
}

/// Convert `x` between energy units using definitional factors.
pub fn convert_energy(
    x: f64,
    from: EnergyUnit,
    to: EnergyUnit,
    constants: &PhysicalConstants,
) -> f64 {
    if from == to {
        return x;
    }
    x * from.in_joules(constants) / to.in_joules(constants)
}

/// Parse an energy written as a number followed by a unit suffix, e.g.
/// `1eV`, `2.5e-3 J`, `6.02214076e23atoms`. Returns joules.
pub fn parse_energy(text: &str, constants: &PhysicalConstants) -> Result<f64> {
    let trimmed = text.trim();
    let split = trimmed
        .char_indices()
        .find(|&(i, ch)| {
            // an exponent marker followed by a digit or sign still belongs to the number
            let exponent = (ch == 'e' || ch == 'E')
                && trimmed[i + 1..]
                    .chars()
                    .next()
                    .is_some_and(|n| n.is_ascii_digit() || n == '-' || n == '+');
            !(ch.is_ascii_digit() || ch == '.' || ch == '-' || ch == '+' || exponent)
        })
        .map(|(i, _)| i)
        .unwrap_or(trimmed.len());
    let (number, unit) = trimmed.split_at(split);
    let unit = unit.trim();
    if unit.is_empty() {
        return Err(Error::UnknownUnit(String::new()));
    }
    let unit: EnergyUnit = unit.parse()?;
    let value: f64 = number.trim().parse().map_err(|_| Error::InvalidParameter {
        name: "energy",
        reason: format!("cannot parse number `{number}` in `{trimmed}`"),
    })?;
    Ok(convert_energy(value, unit, EnergyUnit::Joule, constants))
}

/// Which unit system a frontend reports results in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnitMode {
    #[default]
    Si,
    Natural,
}

impl FromStr for UnitMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "si" => Ok(UnitMode::Si),
            "natural" => Ok(UnitMode::Natural),
            other => Err(Error::InvalidParameter {
                name: "unit_mode",
                reason: format!("expected `si` or `natural`, got `{other}`"),
            }),
        }
    }
}

/// Conversions between SI and ħ = c = k_B = 1 units with metres kept as the length unit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NaturalUnits {
    constants: PhysicalConstants,
}

impl NaturalUnits {
    pub fn new(constants: PhysicalConstants) -> Self {
        Self { constants }
    }

    pub fn constants(&self) -> &PhysicalConstants {
        &self.constants
    }

    fn hbar_c(&self) -> f64 {
        self.constants.hbar * self.constants.c
    }

    pub fn energy_to_natural(&self, joules: f64) -> f64 {
        joules / self.hbar_c()
    }
    pub fn energy_to_si(&self, inverse_metres: f64) -> f64 {
        inverse_metres * self.hbar_c()
    }

    pub fn temperature_to_natural(&self, kelvin: f64) -> f64 {
        self.constants.k_b * kelvin / self.hbar_c()
    }
    pub fn temperature_to_si(&self, inverse_metres: f64) -> f64 {
        inverse_metres * self.hbar_c() / self.constants.k_b
    }

    pub fn time_to_natural(&self, seconds: f64) -> f64 {
        seconds * self.constants.c
    }
    pub fn time_to_si(&self, metres: f64) -> f64 {
        metres / self.constants.c
    }

    pub fn rate_to_natural(&self, per_second: f64) -> f64 {
        per_second / self.constants.c
    }
    pub fn rate_to_si(&self, inverse_metres: f64) -> f64 {
        inverse_metres * self.constants.c
    }

    pub fn mass_to_natural(&self, kilograms: f64) -> f64 {
        kilograms * self.constants.c / self.constants.hbar
    }
    pub fn mass_to_si(&self, inverse_metres: f64) -> f64 {
        inverse_metres * self.constants.hbar / self.constants.c
    }
}

impl Default for NaturalUnits {
    fn default() -> Self {
        Self::new(PhysicalConstants::codata2018())
    }
}
