use serde::Serializer;

/// JSON has no infinity; non-finite values are written as `null`.
pub(crate) fn finite_or_null<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else {
        s.serialize_none()
    }
}

pub(crate) fn opt_finite_or_null<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) if v.is_finite() => s.serialize_f64(*v),
        _ => s.serialize_none(),
    }
}

/// Shortest representation that round-trips through `f64` parsing;
/// infinities are written as `inf`.
pub fn fmt_machine(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{:.16e}", x)
    }
}

/// Six significant digits for human-facing summaries.
pub fn fmt_human(x: f64) -> String {
    if x.is_infinite() {
        return "infinite".into();
    }
    if x == 0.0 || x.is_nan() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor();
    if !(-3.0..6.0).contains(&mag) {
        return format!("{:.5e}", x);
    }
    let decimals = (5.0 - mag).max(0.0) as usize;
    format!("{:.*}", decimals, x)
}
