//! Locale-independent float formatting with 12 significant digits, so that
//! emitted CSV and JSON files are stable and diffable.

pub const SIGNIFICANT_DIGITS: usize = 12;

/// Rounds to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .expect("formatted float parses")
}

/// Shortest decimal text of `x` rounded to 12 significant digits.
pub fn fmt_float(x: f64) -> String {
    let r = round_sig(x);
    if r == 0.0 {
        return "0".to_string();
    }
    if !r.is_finite() {
        return format!("{r}");
    }
    let mag = r.abs();
    if (1e-6..1e15).contains(&mag) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}
