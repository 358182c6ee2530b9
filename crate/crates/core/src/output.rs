//! Text formatting shared by the CLI writers.

/// Shortest decimal that parses back to the same `f64`.
///
/// Plain notation for magnitudes in `[1e-5, 1e16)`, scientific otherwise, so
/// that tiny probabilities do not expand into hundreds of zeros.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let a = x.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}
