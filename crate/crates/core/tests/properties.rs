use gravidec::bath::{Cutoff, OhmicBath};
use gravidec::decoherence::{dimensional_estimate, rate_from_balls_physical};
use gravidec::dephasing::{analytic_propagate, DephasingRun, FockDensityMatrix};
use gravidec::kernels::{dissipation_kernel, noise_kernel, KernelParams};
use gravidec::matter::{BallSuperposition, GaussianBall};
use gravidec::units::PhysicalConstants;
use num_complex::Complex64;
use proptest::prelude::*;

fn constants() -> PhysicalConstants {
    PhysicalConstants::codata2018()
}

fn run(coupling: f64, temperature: f64) -> DephasingRun {
    let bath = OhmicBath::new(coupling, 2e9, Cutoff::None).unwrap();
    DephasingRun::new(bath, temperature, vec![0.0]).unwrap()
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rate_linear_in_temperature_quadratic_in_gap(de in 1e-30f64..1e10, t in 1e-3f64..1e4) {
        let k = constants();
        let base = dimensional_estimate(de, t, &k).unwrap();
        prop_assert_eq!(dimensional_estimate(de, 2.0 * t, &k).unwrap(), 2.0 * base);
        prop_assert_eq!(dimensional_estimate(2.0 * de, t, &k).unwrap(), 4.0 * base);
    }

    #[test]
    fn coherence_decay_quadratic_in_level_difference(
        c in 1e-6f64..1e-2,
        temp in 1.0f64..100.0,
        t in 1e-15f64..1e-12,
    ) {
        let rho0 = FockDensityMatrix::maximally_mixed(8);
        let pure = FockDensityMatrix::from_pure(8, &(0..=8).map(|n| (n, Complex64::new(1.0, 0.0))).collect::<Vec<_>>()).unwrap();
        let r = run(c, temp);
        let rho = analytic_propagate(&pure, &r, t).unwrap();
        let log_decay = |dn: usize| (rho.get(0, dn).norm() / pure.get(0, dn).norm()).ln();
        let unit = log_decay(1);
        for dn in 2..=8 {
            prop_assert!(close(log_decay(dn), unit * (dn * dn) as f64, 1e-9));
        }
        let mixed = analytic_propagate(&rho0, &r, t).unwrap();
        prop_assert_eq!(mixed.populations(), rho0.populations());
    }

    #[test]
    fn analytic_propagation_is_a_semigroup(
        c in 1e-6f64..1e-2,
        temp in 1.0f64..100.0,
        t1 in 0.0f64..1e-12,
        t2 in 0.0f64..1e-12,
    ) {
        let amps = [(0, Complex64::new(0.6, 0.1)), (1, Complex64::new(-0.3, 0.5)), (3, Complex64::new(0.2, -0.4))];
        let rho0 = FockDensityMatrix::from_pure(4, &amps).unwrap();
        let r = run(c, temp);
        let stepwise = analytic_propagate(&analytic_propagate(&rho0, &r, t1).unwrap(), &r, t2).unwrap();
        let direct = analytic_propagate(&rho0, &r, t1 + t2).unwrap();
        for n in 0..5 {
            for m in 0..5 {
                prop_assert!((stepwise.get(n, m) - direct.get(n, m)).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn kernel_time_parities(
        r in 0.01f64..5.0,
        t in -5.0f64..5.0,
        temperature in 0.0f64..3.0,
        eps in 1e-3f64..0.5,
    ) {
        let p = KernelParams::natural(4.0, temperature, eps).unwrap();
        prop_assert_eq!(noise_kernel(r, t, &p).unwrap().value, noise_kernel(r, -t, &p).unwrap().value);
        prop_assert_eq!(dissipation_kernel(r, t, &p).unwrap().value, -dissipation_kernel(r, -t, &p).unwrap().value);
    }

    #[test]
    fn rest_energy_scaling_laws(phi0 in 1e-3f64..10.0, radius in 1e-3f64..10.0, mass in 1e-2f64..1e3) {
        let ball = GaussianBall::new(phi0, [0.0; 3], radius, mass).unwrap();
        let bigger = GaussianBall::new(phi0, [0.0; 3], 2.0 * radius, mass).unwrap();
        let brighter = GaussianBall::new(2.0 * phi0, [0.0; 3], radius, mass).unwrap();
        prop_assert_eq!(bigger.rest_energy(), 8.0 * ball.rest_energy());
        prop_assert_eq!(brighter.rest_energy(), 4.0 * ball.rest_energy());
    }

    #[test]
    fn rate_from_balls_depends_only_on_energies(
        phi0 in 1e-4f64..1e-2,
        radius in 1e-7f64..1e-5,
        shift in prop::array::uniform3(-1.0f64..1.0),
    ) {
        let k = constants();
        let m = 1e15;
        let a = GaussianBall::new(phi0, [0.0; 3], radius, m).unwrap();
        let b = GaussianBall::new(2.0 * phi0, [1e-3, 0.0, 0.0], radius, m).unwrap();
        let base = rate_from_balls_physical(&BallSuperposition::new(a, b).unwrap(), 1.0, &k).unwrap();
        let moved = BallSuperposition::new(a.translated(shift).unwrap(), b).unwrap();
        let moved_rate = rate_from_balls_physical(&moved, 1.0, &k).unwrap();
        prop_assert!(close(moved_rate.rate_per_s, base.rate_per_s, 1e-12));
        // different (φ₀, R) with φ₀²R³ held fixed
        let s = 1.5f64;
        let a2 = GaussianBall::new(phi0 / s.powf(1.5), [0.0; 3], radius * s, m).unwrap();
        let b2 = GaussianBall::new(2.0 * phi0 / s.powf(1.5), [0.0; 3], radius * s, m).unwrap();
        let other = rate_from_balls_physical(&BallSuperposition::new(a2, b2).unwrap(), 1.0, &k).unwrap();
        prop_assert!(close(other.rate_per_s, base.rate_per_s, 1e-12));
    }
}
