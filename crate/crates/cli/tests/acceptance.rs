//! One PASS/FAIL line per acceptance criterion; exits non-zero if any fails.

use std::f64::consts::PI;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use gravidec::bath::{Cutoff, OhmicBath};
use gravidec::decoherence::{
    decoherence_rate, dimensional_estimate, rate_from_balls, rate_from_balls_physical,
};
use gravidec::dephasing::{
    analytic_propagate, fit_decay_rate, numeric_propagate, DephasingRun, FockDensityMatrix,
};
use gravidec::kernels::{
    dissipation_kernel, dissipation_kernel_quadrature, noise_kernel, noise_kernel_quadrature,
    time_integrated_noise, KernelParams,
};
use gravidec::matter::{BallSuperposition, GaussianBall};
use gravidec::quad::{integrate, Tolerance};
use gravidec::units::PhysicalConstants;
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::Value;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_time(elapsed: Duration, limit_s: f64) -> Result<(), String> {
    check(elapsed.as_secs_f64() < limit_s, || {
        format!("runtime {:.3} s exceeds {limit_s} s", elapsed.as_secs_f64())
    })
}

fn rel(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_gravidec"))
        .args(["scenario", "--name", "all", "--output", "json"])
        .env_remove("GRAVIDEC_CONFIG")
        .output()
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    check(out.status.success(), || {
        format!("exit status {:?}", out.status.code())
    })?;
    let rows: Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let rows = rows.as_array().ok_or("expected a JSON array")?;
    let expected = [
        ("atom_1eV", 8.78e-46),
        ("gram_avogadro", 3.19e2),
        ("kilogram", 3.19e8),
    ];
    check(rows.len() == expected.len(), || {
        format!("{} rows", rows.len())
    })?;
    let mut summary = Vec::new();
    for (row, (name, want)) in rows.iter().zip(expected) {
        let rate = row["rate_per_s"].as_f64().ok_or("missing rate_per_s")?;
        check(row["name"] == name, || {
            format!("row {} out of order", row["name"])
        })?;
        check(rel(rate, want) <= 5e-3, || {
            format!("{name}: {rate:e} vs {want:e}")
        })?;
        check(row["within_order"] == Value::Bool(true), || {
            format!("{name} not within one decade")
        })?;
        summary.push(format!("{name} {rate:.3e}"));
    }
    within_time(elapsed, 1.0)?;
    Ok(format!(
        "{} s^-1 in {:.3} s",
        summary.join(", "),
        elapsed.as_secs_f64()
    ))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let k = PhysicalConstants::codata2018();
    let mut rng = StdRng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let m = 10f64.powf(rng.gen_range(6.0..16.0));
        let radius = 10f64.powf(rng.gen_range(-7.0..-3.0));
        let phi_a = 10f64.powf(rng.gen_range(-4.0..4.0));
        let phi_b = phi_a * rng.gen_range(1.1..5.0);
        let centre = [
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ];
        let temperature = 10f64.powf(rng.gen_range(-2.0..3.0));
        let a = GaussianBall::new(phi_a, [0.0; 3], radius, m).map_err(|e| e.to_string())?;
        let b = GaussianBall::new(phi_b, centre, radius * rng.gen_range(0.5..2.0), m)
            .map_err(|e| e.to_string())?;
        let sup = BallSuperposition::new(a, b).map_err(|e| e.to_string())?;
        let params = KernelParams::from_constants(&k, 1.0, 1e-6).map_err(|e| e.to_string())?;
        let functional =
            rate_from_balls(&sup, temperature, &params, &k).map_err(|e| e.to_string())?;
        let closed =
            decoherence_rate(functional.delta_e_j, temperature, &k).map_err(|e| e.to_string())?;
        check(functional.rate_per_s > 0.0, || {
            "zero rate for distinct energies".into()
        })?;
        let r = rel(functional.rate_per_s, closed.rate_per_s);
        check(r <= 1e-12, || format!("relative difference {r:e}"))?;
        worst = worst.max(r);
    }
    let elapsed = start.elapsed();
    within_time(elapsed, 1.0)?;
    Ok(format!(
        "10 random pairs, worst relative difference {worst:.1e} in {:.3} s",
        elapsed.as_secs_f64()
    ))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let k = PhysicalConstants::codata2018();
    let temperature = 1e12 * k.hbar() / k.k_b();
    let (coupling, omega0, t_max) = (1e-3, 1e9, 1e-9);
    let grid = DephasingRun::uniform_grid(t_max, 200);
    let e = |e: gravidec::Error| e.to_string();
    let analytic_run = DephasingRun::new(
        OhmicBath::new(coupling, omega0, Cutoff::None).map_err(e)?,
        temperature,
        grid.clone(),
    )
    .map_err(e)?;
    let numeric_run = DephasingRun::new(
        OhmicBath::new(coupling, omega0, Cutoff::Exponential(1e14)).map_err(e)?,
        temperature,
        grid.clone(),
    )
    .map_err(e)?;
    let amp = Complex64::new(1.0, 0.0);
    let rho0 = FockDensityMatrix::from_pure(4, &[(0, amp), (2, amp)]).map_err(e)?;
    let evolution = numeric_propagate(&rho0, &numeric_run).map_err(e)?;

    let numeric_moduli: Vec<f64> = evolution.element(0, 2).iter().map(|c| c.norm()).collect();
    let analytic_moduli = grid
        .iter()
        .map(|&t| analytic_propagate(&rho0, &analytic_run, t).map(|s| s.get(0, 2).norm()))
        .collect::<Result<Vec<_>, _>>()
        .map_err(e)?;
    let numeric_rate = fit_decay_rate(&grid, &numeric_moduli).map_err(e)?;
    let analytic_rate = fit_decay_rate(&grid, &analytic_moduli).map_err(e)?;
    let markov = analytic_run.markov_rate(2);
    let gap = rel(numeric_rate, markov);
    check(gap <= 0.02, || {
        format!("numeric rate {numeric_rate:e} vs analytic {markov:e}")
    })?;
    check(rel(analytic_rate, markov) <= 1e-9, || {
        format!("analytic fit {analytic_rate:e}")
    })?;

    let populations = rho0.populations();
    let mut drift: f64 = 0.0;
    let mut trace_err: f64 = 0.0;
    let mut herm: f64 = 0.0;
    for state in &evolution.states {
        for (p, p0) in state.populations().iter().zip(&populations) {
            drift = drift.max((p - p0).abs());
        }
        trace_err = trace_err.max((state.trace() - Complex64::new(1.0, 0.0)).norm());
        herm = herm.max(state.hermiticity_error());
    }
    check(drift <= 1e-10, || format!("population drift {drift:e}"))?;
    check(trace_err <= 1e-10, || format!("trace error {trace_err:e}"))?;
    check(herm <= 1e-10, || format!("hermiticity error {herm:e}"))?;
    let elapsed = start.elapsed();
    within_time(elapsed, 30.0)?;
    Ok(format!(
        "rate numeric {numeric_rate:.4e} vs analytic {markov:.4e} s^-1 ({:.2}%), population drift {drift:.1e}, trace {trace_err:.1e}, hermiticity {herm:.1e}, {:.3} s",
        100.0 * gap,
        elapsed.as_secs_f64()
    ))
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let temperature = 2.0 * PI;
    let mut values = Vec::new();
    for r in [0.05, 0.1, 0.2] {
        let eps = 1e-3 * r;
        let p = KernelParams::natural(4.0, temperature, eps).map_err(|e| e.to_string())?;
        for factor in [100.0, 1000.0] {
            let t_max = factor * f64::max(r, 1.0 / temperature);
            let v = time_integrated_noise(r, t_max, &p).map_err(|e| e.to_string())?;
            check((v.value.value - 1.0).abs() < 0.01, || {
                format!("r={r}, t_max={t_max}: {}", v.value.value)
            })?;
            values.push(v.value.value);
        }
    }
    let spread = values.iter().cloned().fold(f64::MIN, f64::max)
        - values.iter().cloned().fold(f64::MAX, f64::min);
    check(spread < 0.01, || format!("r dependence {spread:e}"))?;
    let elapsed = start.elapsed();
    within_time(elapsed, 60.0)?;
    Ok(format!(
        "values {:.5}..{:.5} for r in [0.05, 0.2], t_max up to 1000 max(r, 1/T), {:.3} s",
        values.iter().cloned().fold(f64::MAX, f64::min),
        values.iter().cloned().fold(f64::MIN, f64::max),
        elapsed.as_secs_f64()
    ))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(5);
    let agree = |a: f64, ea: f64, b: f64, eb: f64, tol: f64| {
        (a - b).abs() <= (ea + eb).max(tol * a.abs().max(1.0))
    };
    for _ in 0..20 {
        let r = rng.gen_range(0.2..3.0);
        let t = rng.gen_range(-3.0..3.0);
        let temperature = rng.gen_range(0.1..3.0);
        let eps = rng.gen_range(0.02..0.2);
        let p = KernelParams::natural(4.0, temperature, eps).map_err(|e| e.to_string())?;
        let n = noise_kernel(r, t, &p).map_err(|e| e.to_string())?;
        let nq = noise_kernel_quadrature(r, t, &p).map_err(|e| e.to_string())?;
        check(
            agree(n.value, n.err_estimate, nq.value, nq.err_estimate, p.tol()),
            || {
                format!(
                    "N({r}, {t}; T={temperature}, eps={eps}): {} vs {}",
                    n.value, nq.value
                )
            },
        )?;
        let d = dissipation_kernel(r, t, &p).map_err(|e| e.to_string())?;
        let dq = dissipation_kernel_quadrature(r, t, &p).map_err(|e| e.to_string())?;
        check(
            agree(d.value, d.err_estimate, dq.value, dq.err_estimate, p.tol()),
            || format!("D({r}, {t}; eps={eps}): {} vs {}", d.value, dq.value),
        )?;
    }
    let elapsed = start.elapsed();
    within_time(elapsed, 60.0)?;
    Ok(format!(
        "20 random (r, t, T, eps) tuples, N and D, {:.3} s",
        elapsed.as_secs_f64()
    ))
}

fn nested_energy(ball: &GaussianBall) -> Result<f64, String> {
    let c = ball.r0();
    let half = 10.0 * ball.radius();
    let tol = Tolerance::new(0.0, 1e-13);
    let f = |x: f64| {
        let fy = |y: f64| {
            let fz = |z: f64| ball.energy_density([x, y, z]);
            integrate(&fz, c[2] - half, c[2] + half, tol).map_or(f64::NAN, |q| q.value)
        };
        integrate(&fy, c[1] - half, c[1] + half, tol).map_or(f64::NAN, |q| q.value)
    };
    integrate(&f, c[0] - half, c[0] + half, tol)
        .map(|q| q.value)
        .map_err(|e| e.to_string())
}

fn criterion_6() -> Outcome {
    let ball = |phi0: f64, radius: f64, m: f64| {
        GaussianBall::new(phi0, [0.0; 3], radius, m).map_err(|e| e.to_string())
    };
    let unit = ball(1.0, 1.0, 1.0)?;
    let mut worst: f64 = 0.0;
    for b in [unit, ball(1.0, 2.0, 1.0)?, ball(3.0, 1.0, 1.0)?] {
        let q = nested_energy(&b)?;
        let r = rel(q, b.rest_energy());
        check(r <= 1e-10, || {
            format!("{} vs quadrature {q}", b.rest_energy())
        })?;
        worst = worst.max(r);
    }
    check((unit.rest_energy() - 2.7842).abs() < 5e-5, || {
        format!("{}", unit.rest_energy())
    })?;
    let mut rng = StdRng::seed_from_u64(6);
    for _ in 0..100 {
        let b = ball(
            rng.gen_range(1e-3..10.0),
            rng.gen_range(1e-3..10.0),
            rng.gen_range(1e-2..1e3),
        )?;
        let e = b.rest_energy();
        let bigger = ball(b.phi0(), 2.0 * b.radius(), b.mass())?.rest_energy();
        let brighter = ball(2.0 * b.phi0(), b.radius(), b.mass())?.rest_energy();
        check(bigger == 8.0 * e, || {
            format!("R^3 scaling: {bigger} vs {}", 8.0 * e)
        })?;
        check(brighter == 4.0 * e, || {
            format!("phi0^2 scaling: {brighter} vs {}", 4.0 * e)
        })?;
    }
    Ok(format!(
        "E(1,1,1) = {:.6}, worst quadrature gap {worst:.1e}, R^3 and phi0^2 scaling exact on 100 samples",
        unit.rest_energy()
    ))
}

fn criterion_7() -> Outcome {
    let k = PhysicalConstants::codata2018();
    let mut rng = StdRng::seed_from_u64(7);
    let mut separations = Vec::new();
    for _ in 0..5 {
        let a = GaussianBall::new(1e3, [0.0; 3], 1e-6, 1e12).map_err(|e| e.to_string())?;
        let shift = [
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ];
        let sup = BallSuperposition::new(a, a.translated(shift).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        check(sup.separation() > 0.0, || "coincident centres".into())?;
        let rate = rate_from_balls_physical(&sup, 1.0, &k).map_err(|e| e.to_string())?;
        check(rate.rate_per_s == 0.0, || {
            format!(
                "rate {:e} at separation {}",
                rate.rate_per_s,
                sup.separation()
            )
        })?;
        separations.push(format!("{:.3}", sup.separation()));
    }
    Ok(format!(
        "rate exactly 0 at separations [{}] m",
        separations.join(", ")
    ))
}

fn criterion_8() -> Outcome {
    let k = PhysicalConstants::codata2018();
    let mut rng = StdRng::seed_from_u64(8);
    let e = |e: gravidec::Error| e.to_string();
    let samples = 200;
    for _ in 0..samples {
        // linear in T, quadratic in delta E
        let de = 10f64.powf(rng.gen_range(-30.0..10.0));
        let t = 10f64.powf(rng.gen_range(-3.0..4.0));
        let base = dimensional_estimate(de, t, &k).map_err(e)?;
        check(
            dimensional_estimate(de, 2.0 * t, &k).map_err(e)? == 2.0 * base,
            || format!("T linearity at {de:e}, {t}"),
        )?;
        check(
            dimensional_estimate(2.0 * de, t, &k).map_err(e)? == 4.0 * base,
            || format!("dE quadratic at {de:e}, {t}"),
        )?;

        // dephasing exponent: linear in C, T, t and quadratic in n - ntilde
        let c = rng.gen_range(1e-6..1e-2);
        let temp = rng.gen_range(1.0..100.0);
        let dn = rng.gen_range(1..5i64);
        let tt = rng.gen_range(0.0..1e-12);
        let run = |c: f64, temp: f64| {
            DephasingRun::new(
                OhmicBath::new(c, 2e9, Cutoff::None).unwrap(),
                temp,
                vec![0.0],
            )
            .unwrap()
        };
        let exponent = |r: &DephasingRun, dn: i64, t: f64| r.markov_rate(dn) * t;
        let x = exponent(&run(c, temp), dn, tt);
        check(exponent(&run(2.0 * c, temp), dn, tt) == 2.0 * x, || {
            "C linearity".into()
        })?;
        check(exponent(&run(c, 2.0 * temp), dn, tt) == 2.0 * x, || {
            "T linearity".into()
        })?;
        check(exponent(&run(c, temp), dn, 2.0 * tt) == 2.0 * x, || {
            "t linearity".into()
        })?;
        check(exponent(&run(c, temp), 2 * dn, tt) == 4.0 * x, || {
            "(n - ntilde) quadratic".into()
        })?;

        // semigroup of the analytic propagation and exact population conservation
        let amps = [
            (0, Complex64::new(0.6, 0.1)),
            (1, Complex64::new(-0.3, 0.5)),
            (3, Complex64::new(0.2, -0.4)),
        ];
        let rho0 = FockDensityMatrix::from_pure(4, &amps).map_err(e)?;
        let r = run(c, temp);
        let (t1, t2) = (rng.gen_range(0.0..1e-12), rng.gen_range(0.0..1e-12));
        let stepwise = analytic_propagate(&analytic_propagate(&rho0, &r, t1).map_err(e)?, &r, t2)
            .map_err(e)?;
        let direct = analytic_propagate(&rho0, &r, t1 + t2).map_err(e)?;
        for n in 0..5 {
            for m in 0..5 {
                let gap = (stepwise.get(n, m) - direct.get(n, m)).norm();
                check(gap <= 1e-12, || {
                    format!("semigroup gap {gap:e} at ({n}, {m})")
                })?;
            }
        }
        check(direct.populations() == rho0.populations(), || {
            "populations changed".into()
        })?;

        // kernel time parities
        let (rr, kt) = (rng.gen_range(0.01..5.0), rng.gen_range(-5.0..5.0));
        let p = KernelParams::natural(4.0, rng.gen_range(0.0..3.0), rng.gen_range(1e-3..0.5))
            .map_err(e)?;
        check(
            noise_kernel(rr, kt, &p).map_err(e)?.value
                == noise_kernel(rr, -kt, &p).map_err(e)?.value,
            || format!("N parity at ({rr}, {kt})"),
        )?;
        check(
            dissipation_kernel(rr, kt, &p).map_err(e)?.value
                == -dissipation_kernel(rr, -kt, &p).map_err(e)?.value,
            || format!("D parity at ({rr}, {kt})"),
        )?;
    }
    Ok(format!(
        "{samples} random samples: T and dE scaling, dephasing exponent scaling, semigroup (1e-12), N even and D odd in t"
    ))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("scenario reproduction", criterion_1),
        ("ball-rate identity", criterion_2),
        ("dephasing oracle", criterion_3),
        ("kernel high-temperature limit", criterion_4),
        ("kernel oracle equivalence", criterion_5),
        ("matter-state energy", criterion_6),
        ("null decoherence", criterion_7),
        ("property suite", criterion_8),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail}", i + 1),
            Err(why) => {
                failures += 1;
                println!("FAIL criterion {}: {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failures} failed",
        criteria.len() - failures
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
