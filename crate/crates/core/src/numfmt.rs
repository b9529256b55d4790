//! Decimal formatting for floats that must survive a text round trip.

/// Shortest decimal string that parses back to exactly `x`.
///
/// Rust's `Display`/`LowerExp` for `f64` already emit the shortest
/// round-trip digits; this only picks plain or exponent notation so that
/// tiny and huge magnitudes stay compact.
pub fn format_f64(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}
