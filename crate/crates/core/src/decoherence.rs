//! Gravitational decoherence rates Γ = (k_BT/ħ)(ΔE/E_P)², from an energy
//! gap directly or from a superposition of two matter balls, plus the
//! preset scenarios for a thermal graviton background at 1 K.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, ensure_non_negative, ensure_positive, invalid, Error, Result};
use crate::kernels::KernelParams;
use crate::matter::BallSuperposition;
use crate::parallel::{self, Execution};
use crate::units::{planck_energy, thermal_rate_scale, NaturalUnits, PhysicalConstants};

/// k_BT·t ≥ 10ħ at t = 1/Γ counts as high temperature.
pub const HIGH_TEMPERATURE_MARGIN: f64 = 10.0;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidityFlags {
    /// k_BT/(ħΓ) ≥ 10; `None` when Γ = 0.
    pub high_t_ok: Option<bool>,
    /// 1/Γ ≥ markov time; `None` without a markov time.
    pub markov_ok: Option<bool>,
    /// R·m ≥ 100 for every ball involved; `None` without balls.
    pub compton_ok: Option<bool>,
}

/// Optional context used to fill the validity flags.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RateContext {
    pub markov_time_s: Option<f64>,
    pub compton_ok: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateResult {
    pub rate_per_s: f64,
    #[serde(rename = "delta_E_J")]
    pub delta_e_j: f64,
    #[serde(rename = "T_K")]
    pub t_k: f64,
    /// 1/Γ; serialised as null when Γ = 0.
    pub coherence_time_s: Option<f64>,
    pub markov_time_s: Option<f64>,
    pub flags: ValidityFlags,
}

impl RateResult {
    /// 1/Γ, infinite when Γ = 0.
    pub fn coherence_time(&self) -> f64 {
        self.coherence_time_s.unwrap_or(f64::INFINITY)
    }
}

fn build_result(
    rate: f64,
    delta_e_j: f64,
    temperature: f64,
    context: RateContext,
    constants: &PhysicalConstants,
) -> RateResult {
    let coherence_time_s = (rate > 0.0).then(|| 1.0 / rate);
    let thermal = constants.k_b() * temperature / constants.hbar();
    let high_t_ok = coherence_time_s.map(|tau| thermal * tau >= HIGH_TEMPERATURE_MARGIN);
    let markov_ok = context
        .markov_time_s
        .map(|mt| coherence_time_s.is_none_or(|tau| tau >= mt));
    RateResult {
        rate_per_s: rate,
        delta_e_j,
        t_k: temperature,
        coherence_time_s,
        markov_time_s: context.markov_time_s,
        flags: ValidityFlags {
            high_t_ok,
            markov_ok,
            compton_ok: context.compton_ok,
        },
    }
}

/// Γ = (k_BT/ħ)(ΔE/E_P)² in s⁻¹ for ΔE in joules and T in kelvin.
pub fn decoherence_rate(
    delta_e_j: f64,
    temperature: f64,
    constants: &PhysicalConstants,
) -> Result<RateResult> {
    decoherence_rate_with(delta_e_j, temperature, constants, RateContext::default())
}

pub fn decoherence_rate_with(
    delta_e_j: f64,
    temperature: f64,
    constants: &PhysicalConstants,
    context: RateContext,
) -> Result<RateResult> {
    let rate = dimensional_estimate(delta_e_j, temperature, constants)?;
    Ok(build_result(
        rate,
        delta_e_j,
        temperature,
        context,
        constants,
    ))
}

/// The order-of-magnitude estimate (k_BT/ħ)(ΔE/E_P)²; its numerical factor is exactly 1.
pub fn dimensional_estimate(
    delta_e_j: f64,
    temperature: f64,
    constants: &PhysicalConstants,
) -> Result<f64> {
    ensure_finite("delta_E", delta_e_j)?;
    ensure_non_negative("T", temperature)?;
    let ratio = delta_e_j / planck_energy(constants);
    Ok(thermal_rate_scale(temperature, constants)? * ratio * ratio)
}

/// Γ from the ball energies through the long-time noise prefactor,
/// (κ/4)²·T/(2π)·(E_a − E_b)² in natural units, converted to s⁻¹.
/// Only `params.kappa()` is used; the temperature is `temperature` (K).
pub fn rate_from_balls(
    sup: &BallSuperposition,
    temperature: f64,
    params: &KernelParams,
    constants: &PhysicalConstants,
) -> Result<RateResult> {
    ensure_positive("T", temperature)?;
    let units = NaturalUnits::new(*constants);
    let t_natural = units.temperature_to_natural(temperature);
    let prefactor = params
        .with_temperature(t_natural)?
        .high_temperature_noise_prefactor();
    let delta_e = sup.energy_difference();
    let rate = units.rate_to_si(prefactor * delta_e * delta_e);
    let context = RateContext {
        markov_time_s: Some(sup.markov_time(constants)),
        compton_ok: Some(sup.compton_ok()),
    };
    Ok(build_result(
        rate,
        units.energy_to_si(delta_e),
        temperature,
        context,
        constants,
    ))
}

/// `rate_from_balls` with κ = √(32πG) from `constants`.
pub fn rate_from_balls_physical(
    sup: &BallSuperposition,
    temperature: f64,
    constants: &PhysicalConstants,
) -> Result<RateResult> {
    let params = KernelParams::from_constants(constants, temperature, 1.0)?;
    rate_from_balls(sup, temperature, &params, constants)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Scenario {
    pub name: &'static str,
    /// ΔE in eV: one electronvolt per atom, all atoms jointly excited.
    pub delta_e_ev: f64,
    pub delta_e_description: &'static str,
    pub temperature_k: f64,
    /// Order of magnitude quoted for the rate, s⁻¹.
    pub paper_order: f64,
}

pub const SCENARIOS: [Scenario; 3] = [
    Scenario {
        name: "atom_1eV",
        delta_e_ev: 1.0,
        delta_e_description: "1 eV",
        temperature_k: 1.0,
        paper_order: 1e-45,
    },
    Scenario {
        name: "gram_avogadro",
        delta_e_ev: 6.022_140_76e23,
        delta_e_description: "N_A x 1 eV",
        temperature_k: 1.0,
        paper_order: 1e2,
    },
    Scenario {
        name: "kilogram",
        delta_e_ev: 6.022_140_76e26,
        delta_e_description: "1000 N_A x 1 eV",
        temperature_k: 1.0,
        paper_order: 1e8,
    },
];

pub fn find_scenario(name: &str) -> Result<&'static Scenario> {
    SCENARIOS
        .iter()
        .find(|s| s.name == name)
        .ok_or_else(|| Error::UnknownScenario(name.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScenarioResult {
    pub name: &'static str,
    pub delta_e_description: &'static str,
    pub paper_order: f64,
    /// |log₁₀Γ − log₁₀(paper order)| ≤ 1.
    pub within_order: bool,
    #[serde(flatten)]
    pub result: RateResult,
}

pub fn evaluate_scenario(s: &Scenario, constants: &PhysicalConstants) -> Result<ScenarioResult> {
    let result = decoherence_rate(s.delta_e_ev * constants.ev(), s.temperature_k, constants)?;
    let within_order =
        result.rate_per_s > 0.0 && (result.rate_per_s.log10() - s.paper_order.log10()).abs() <= 1.0;
    Ok(ScenarioResult {
        name: s.name,
        delta_e_description: s.delta_e_description,
        paper_order: s.paper_order,
        within_order,
        result,
    })
}

pub fn scenario(name: &str, constants: &PhysicalConstants) -> Result<ScenarioResult> {
    evaluate_scenario(find_scenario(name)?, constants)
}

/// Every preset, in table order.
pub fn all_scenarios(
    constants: &PhysicalConstants,
    exec: Execution,
) -> Result<Vec<ScenarioResult>> {
    parallel::map(&SCENARIOS, exec, |s| evaluate_scenario(s, constants))
        .into_iter()
        .collect()
}

/// `name` may also be `all`.
pub fn scenarios_named(name: &str, constants: &PhysicalConstants) -> Result<Vec<ScenarioResult>> {
    if name == "all" {
        all_scenarios(constants, Execution::default())
    } else if name.is_empty() {
        Err(invalid("name", "empty scenario name"))
    } else {
        Ok(vec![scenario(name, constants)?])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matter::GaussianBall;
    use approx::assert_relative_eq;

    fn k() -> PhysicalConstants {
        PhysicalConstants::codata2018()
    }

    #[test]
    fn reference_values() {
        let c = k();
        let r = decoherence_rate(c.ev(), 1.0, &c).unwrap();
        assert_relative_eq!(r.rate_per_s, 8.7832e-46, max_relative = 1e-4);
        assert_relative_eq!(r.coherence_time() * r.rate_per_s, 1.0, max_relative = 1e-15);
        let gram = decoherence_rate(6.022_140_76e23 * c.ev(), 1.0, &c).unwrap();
        assert_relative_eq!(gram.rate_per_s, 318.534, max_relative = 1e-4);
        let planck = dimensional_estimate(planck_energy(&c), 1.0, &c).unwrap();
        assert_relative_eq!(planck, 1.309_203_4e11, max_relative = 1e-6);
    }

    #[test]
    fn zero_cases_and_errors() {
        let c = k();
        let z = decoherence_rate(0.0, 5.0, &c).unwrap();
        assert_eq!(z.rate_per_s, 0.0);
        assert_eq!(z.coherence_time(), f64::INFINITY);
        assert_eq!(z.coherence_time_s, None);
        assert_eq!(decoherence_rate(1e-19, 0.0, &c).unwrap().rate_per_s, 0.0);
        assert!(decoherence_rate(1e-19, -1.0, &c).is_err());
        assert!(matches!(
            scenario("proton", &c),
            Err(Error::UnknownScenario(_))
        ));
    }

    #[test]
    fn exact_scaling() {
        let c = k();
        let base = dimensional_estimate(3e-10, 2.0, &c).unwrap();
        assert_eq!(dimensional_estimate(6e-10, 2.0, &c).unwrap() / base, 4.0);
        assert_eq!(dimensional_estimate(3e-10, 4.0, &c).unwrap() / base, 2.0);
    }

    #[test]
    fn scenarios() {
        let c = k();
        let all = all_scenarios(&c, Execution::Parallel).unwrap();
        let expected = [8.7832e-46, 318.534, 3.18534e8];
        for (row, want) in all.iter().zip(expected) {
            assert_relative_eq!(row.result.rate_per_s, want, max_relative = 1e-4);
            assert!(row.within_order);
        }
        assert_eq!(all, all_scenarios(&c, Execution::Sequential).unwrap());
        assert_eq!(scenarios_named("kilogram", &c).unwrap().len(), 1);
    }

    #[test]
    fn balls_reproduce_closed_form() {
        let c = k();
        let a = GaussianBall::new(1e-3, [0.0; 3], 1e-6, 1e15).unwrap();
        let b = GaussianBall::new(2e-3, [1e-3, 0.0, 0.0], 1e-6, 1e15).unwrap();
        let sup = BallSuperposition::new(a, b).unwrap();
        let from_balls = rate_from_balls_physical(&sup, 1.0, &c).unwrap();
        let closed = decoherence_rate(from_balls.delta_e_j, 1.0, &c).unwrap();
        assert_relative_eq!(
            from_balls.rate_per_s,
            closed.rate_per_s,
            max_relative = 1e-12
        );
        assert_eq!(from_balls.flags.compton_ok, Some(true));
        assert!(from_balls.flags.markov_ok.is_some());
    }

    #[test]
    fn json_shape() {
        let c = k();
        let r = decoherence_rate_with(
            c.ev(),
            1.0,
            &c,
            RateContext {
                markov_time_s: Some(1e-9),
                compton_ok: None,
            },
        )
        .unwrap();
        let v: serde_json::Value = serde_json::to_value(r).unwrap();
        for key in [
            "rate_per_s",
            "delta_E_J",
            "T_K",
            "coherence_time_s",
            "markov_time_s",
            "flags",
        ] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["flags"]["markov_ok"], serde_json::Value::Bool(true));
        let back: RateResult = serde_json::from_value(v).unwrap();
        assert_eq!(back, r);
        let zero = serde_json::to_string(&decoherence_rate(0.0, 1.0, &c).unwrap()).unwrap();
        assert!(zero.contains("\"coherence_time_s\":null"));
    }
}
