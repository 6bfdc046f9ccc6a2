//! Number formatting shared by the CSV and table writers.

/// 17 significant digits, enough to round-trip any f64.
pub fn machine(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

/// 4 significant digits for human-readable tables.
pub fn table(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.3e}")
    } else {
        machine(x)
    }
}
