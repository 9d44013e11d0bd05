//! Small helpers for the spec mini-languages.

use num_complex::Complex64;

/// Replaces the typographic minus sign so that specs copied from documents
/// parse the same as plain ASCII ones.
pub(crate) fn normalize(s: &str) -> String {
    s.trim().replace('\u{2212}', "-")
}

pub(crate) fn real(s: &str) -> Option<f64> {
    let v: f64 = s.trim().parse().ok()?;
    v.is_finite().then_some(v)
}

/// Parses `a`, `bi`, `a+bi`, `a-bi` (also `i`, `-i`).
pub fn complex(s: &str) -> Option<Complex64> {
    let s = normalize(s);
    let s = s.as_str();
    if s.is_empty() {
        return None;
    }
    let Some(body) = s.strip_suffix('i') else {
        return real(s).map(|re| Complex64::new(re, 0.0));
    };
    // split at the last sign that is not the leading one and not an exponent sign
    let bytes = body.as_bytes();
    let mut split = None;
    for i in (1..bytes.len()).rev() {
        if (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E') {
            split = Some(i);
            break;
        }
    }
    let imag = |t: &str| -> Option<f64> {
        match t {
            "" | "+" => Some(1.0),
            "-" => Some(-1.0),
            _ => real(t),
        }
    };
    match split {
        Some(i) => Some(Complex64::new(real(&body[..i])?, imag(&body[i..])?)),
        None => Some(Complex64::new(0.0, imag(body)?)),
    }
}

/// Splits `k=v,k=v` into pairs, keeping parenthesised groups intact.
pub(crate) fn key_values(s: &str) -> Option<Vec<(String, String)>> {
    let mut out = Vec::new();
    for part in s.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (k, v) = part.split_once('=')?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Some(out)
}
