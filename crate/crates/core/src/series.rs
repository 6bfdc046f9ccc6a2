//! Summation of slowly decaying thermal series Σ_{n≥1} g(n).
//!
//! Thermal factors are expanded as 1/(eˣ − 1) = Σ_{n≥1} e^{−nx}; each term
//! then has a closed form whose magnitude falls off algebraically in n. The
//! sum is truncated at M and the remainder replaced by the midpoint
//! Euler-Maclaurin estimate
//!
//! Σ_{n>M} g(n) ≈ ∫_{M+½}^∞ g(n) dn + g'(M+½)/24,
//!
//! with g' taken from the central difference g(M+1) − g(M). The neglected
//! terms are O(g'''), which is what the error bound tracks.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSum {
    pub value: f64,
    pub error: f64,
    pub terms: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    /// Absolute tolerance on the truncation error (rounding is reported
    /// in the error estimate but does not gate termination).
    pub tol: f64,
    /// Minimum number of explicit terms before the tail estimate is trusted.
    pub min_terms: usize,
    /// Hard cap on explicit terms.
    pub max_terms: usize,
}

/// Sum `term(n)` for n = 1, 2, … using `tail(x) = ∫_x^∞ term(n) dn` for the remainder.
pub fn sum_with_tail<G, T>(term: G, tail: T, control: SeriesControl) -> Result<SeriesSum>
where
    G: Fn(f64) -> f64,
    T: Fn(f64) -> f64,
{
    let min_terms = control.min_terms.max(2);
    // window holds g(n-1), g(n), g(n+1), g(n+2)
    let mut window = [0.0, term(1.0), term(2.0), term(3.0)];
    let mut acc = 0.0;
    let mut abs_sum: f64 = 0.0;
    let mut n = 1usize;
    loop {
        acc += window[1];
        abs_sum += window[1].abs();
        let third_difference = window[3] - 3.0 * window[2] + 3.0 * window[1] - window[0];
        let bound = if n >= 2 {
            third_difference.abs() / 10.0
        } else {
            f64::INFINITY
        };
        let rounding = 2.0 * f64::EPSILON * abs_sum;
        let x = n as f64 + 0.5;
        let remainder = || tail(x) + (window[2] - window[1]) / 24.0;
        if n >= min_terms && bound <= control.tol {
            return Ok(SeriesSum {
                value: acc + remainder(),
                error: bound + rounding,
                terms: n,
            });
        }
        if n >= control.max_terms {
            return Err(Error::SeriesNotConverged {
                terms: n,
                partial: acc + remainder(),
                bound,
            });
        }
        n += 1;
        window = [window[1], window[2], window[3], term((n + 2) as f64)];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn basel_sum() {
        let s = sum_with_tail(
            |n| 1.0 / (n * n),
            |x| 1.0 / x,
            SeriesControl {
                tol: 1e-13,
                min_terms: 4,
                max_terms: 1_000_000,
            },
        )
        .unwrap();
        assert!((s.value - PI * PI / 6.0).abs() < 1e-12, "{}", s.value);
        assert!(s.terms < 1000, "{}", s.terms);
    }

    #[test]
    fn lorentzian_sum_with_features() {
        // Σ_{n≥1} a/(n² + a²) = (π coth(πa) − 1/a)/2
        let a = 37.0;
        let s = sum_with_tail(
            |n| a / (n * n + a * a),
            |x| (a / x).atan(),
            SeriesControl {
                tol: 1e-13,
                min_terms: 2 * a as usize,
                max_terms: 1_000_000,
            },
        )
        .unwrap();
        let exact = 0.5 * (PI / (PI * a).tanh() - 1.0 / a);
        assert!((s.value - exact).abs() < 1e-12, "{} vs {exact}", s.value);
    }

    #[test]
    fn cap_reports_partial_sum() {
        let err = sum_with_tail(
            |n| 1.0 / (n * n),
            |x| 1.0 / x,
            SeriesControl {
                tol: 1e-30,
                min_terms: 1,
                max_terms: 10,
            },
        )
        .unwrap_err();
        match err {
            Error::SeriesNotConverged {
                terms,
                partial,
                bound,
            } => {
                assert_eq!(terms, 10);
                assert!((partial - PI * PI / 6.0).abs() < 1e-4);
                assert!(bound > 0.0);
            }
            other => panic!("{other:?}"),
        }
    }
}
