/// Magnitudes below this are floating-point residue and print as zero.
pub const ZERO_SNAP: f64 = 1e-12;

/// Rounds to 12 significant digits and prints the shortest decimal that
/// round-trips the rounded value, switching to exponent form for very
/// small or large magnitudes. Negative zero prints as `0`.
pub fn format_number(x: f64) -> String {
    let r = tidy(x);
    if r == 0.0 {
        return "0".to_string();
    }
    if r.abs() < 1e-4 || r.abs() >= 1e15 {
        format!("{r:e}")
    } else {
        format!("{r}")
    }
}

/// [`round_sig`] with residue below [`ZERO_SNAP`] flushed to zero.
pub fn tidy(x: f64) -> f64 {
    if x.abs() < ZERO_SNAP {
        0.0
    } else {
        round_sig(x)
    }
}

pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    let s = format!("{x:.11e}");
    s.parse().expect("formatted float parses")
}
