//! Dormand-Prince 5(4) integrator with adaptive step control, for complex
//! state vectors.

use num_complex::Complex64;

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;

// fifth-order weights (also the last stage row, FSAL)
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;

// fifth minus fourth order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-14,
            max_steps: 1_000_000,
        }
    }
}

/// Adaptive integrator state carried between output times.
pub struct DormandPrince<F> {
    rhs: F,
    control: StepControl,
    step: Option<f64>,
    pub steps_taken: usize,
    pub steps_rejected: usize,
}

impl<F> DormandPrince<F>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]) -> Result<()>,
{
    pub fn new(rhs: F, control: StepControl) -> Self {
        Self {
            rhs,
            control,
            step: None,
            steps_taken: 0,
            steps_rejected: 0,
        }
    }

    /// Advance `y` from `t0` to exactly `t1`.
    pub fn advance(&mut self, y: &mut [Complex64], t0: f64, t1: f64) -> Result<()> {
        if t1 == t0 {
            return Ok(());
        }
        let n = y.len();
        let zero = Complex64::new(0.0, 0.0);
        let mut k = vec![vec![zero; n]; 7];
        let mut stage = vec![zero; n];
        let mut y_new = vec![zero; n];
        let mut t = t0;
        let span = t1 - t0;
        let mut h = self.step.unwrap_or(span * 1e-3).min(span);
        (self.rhs)(t, y, &mut k[0])?;
        while t < t1 {
            if self.steps_taken + self.steps_rejected >= self.control.max_steps {
                return Err(Error::StepSizeUnderflow { t, step: h });
            }
            let last = t + h >= t1;
            if last {
                h = t1 - t;
            }
            if h <= 4.0 * f64::EPSILON * t.abs().max(span.abs()) {
                if last {
                    break;
                }
                return Err(Error::StepSizeUnderflow { t, step: h });
            }
            let combine = |stage: &mut [Complex64], k: &[Vec<Complex64>], coeffs: &[f64]| {
                for i in 0..n {
                    let mut acc = y[i];
                    for (j, &c) in coeffs.iter().enumerate() {
                        if c != 0.0 {
                            acc += k[j][i] * (h * c);
                        }
                    }
                    stage[i] = acc;
                }
            };
            combine(&mut stage, &k, &[A21]);
            (self.rhs)(t + C2 * h, &stage, &mut k[1])?;
            combine(&mut stage, &k, &[A31, A32]);
            (self.rhs)(t + C3 * h, &stage, &mut k[2])?;
            combine(&mut stage, &k, &[A41, A42, A43]);
            (self.rhs)(t + C4 * h, &stage, &mut k[3])?;
            combine(&mut stage, &k, &[A51, A52, A53, A54]);
            (self.rhs)(t + C5 * h, &stage, &mut k[4])?;
            combine(&mut stage, &k, &[A61, A62, A63, A64, A65]);
            (self.rhs)(t + h, &stage, &mut k[5])?;
            combine(&mut y_new, &k, &[B1, 0.0, B3, B4, B5, B6]);
            let t_new = if last { t1 } else { t + h };
            (self.rhs)(t_new, &y_new, &mut k[6])?;

            let mut err_norm: f64 = 0.0;
            for i in 0..n {
                let e = (k[0][i] * E1
                    + k[2][i] * E3
                    + k[3][i] * E4
                    + k[4][i] * E5
                    + k[5][i] * E6
                    + k[6][i] * E7)
                    * h;
                let scale =
                    self.control.atol + self.control.rtol * y[i].norm().max(y_new[i].norm());
                err_norm = err_norm.max(e.norm() / scale);
            }

            if err_norm <= 1.0 {
                t = t_new;
                y.copy_from_slice(&y_new);
                k.swap(0, 6);
                self.steps_taken += 1;
                let factor = if err_norm == 0.0 {
                    5.0
                } else {
                    (0.9 * err_norm.powf(-0.2)).clamp(0.2, 5.0)
                };
                if !last {
                    h *= factor;
                    self.step = Some(h);
                } else if self.step.is_none() {
                    self.step = Some(h * factor);
                }
            } else {
                self.steps_rejected += 1;
                h *= (0.9 * err_norm.powf(-0.2)).clamp(0.1, 0.9);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_complex_rotation_with_decay() {
        // y' = (-0.3 + 2i) y
        let lambda = Complex64::new(-0.3, 2.0);
        let mut solver = DormandPrince::new(
            |_t, y: &[Complex64], dy: &mut [Complex64]| {
                dy[0] = lambda * y[0];
                Ok(())
            },
            StepControl::default(),
        );
        let mut y = vec![Complex64::new(1.0, 0.0)];
        let mut t = 0.0;
        for t_next in [0.5, 1.0, 3.0, 7.5] {
            solver.advance(&mut y, t, t_next).unwrap();
            t = t_next;
            let exact = (lambda * t).exp();
            assert!((y[0] - exact).norm() < 1e-9, "{t}: {} vs {exact}", y[0]);
        }
    }

    #[test]
    fn time_dependent_coefficient() {
        // y' = -2t y  =>  y = exp(-t²)
        let mut solver = DormandPrince::new(
            |t, y: &[Complex64], dy: &mut [Complex64]| {
                dy[0] = y[0] * (-2.0 * t);
                Ok(())
            },
            StepControl::default(),
        );
        let mut y = vec![Complex64::new(1.0, 0.0)];
        solver.advance(&mut y, 0.0, 2.0).unwrap();
        assert!((y[0].re - (-4.0f64).exp()).abs() < 1e-11);
    }

    #[test]
    fn step_budget_exhaustion_is_reported() {
        let mut solver = DormandPrince::new(
            |_t, y: &[Complex64], dy: &mut [Complex64]| {
                dy[0] = y[0] * 1e3;
                Ok(())
            },
            StepControl {
                max_steps: 3,
                ..StepControl::default()
            },
        );
        let mut y = vec![Complex64::new(1.0, 0.0)];
        assert!(matches!(
            solver.advance(&mut y, 0.0, 1.0),
            Err(Error::StepSizeUnderflow { .. })
        ));
    }
}
