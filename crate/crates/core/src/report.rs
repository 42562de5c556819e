//! Serialization helpers shared by the report types.

use serde::Serializer;

/// Writes finite values as numbers and `±∞`/NaN as the strings `"inf"`,
/// `"-inf"` and `"nan"`, which plain JSON cannot carry.
pub fn serialize_extended<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else if v.is_nan() {
        s.serialize_str("nan")
    } else if *v > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

/// [`serialize_extended`] for optional values.
pub fn serialize_extended_opt<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(x) => serialize_extended(x, s),
        None => s.serialize_none(),
    }
}
