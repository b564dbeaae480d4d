//! Deterministic text formatting shared by the emitters.
//!
//! All emitted artifacts (SVG, scene and layout JSON) must be byte-stable
//! across runs and platforms, so numeric output is pinned to fixed six-decimal
//! notation here instead of relying on shortest-roundtrip float printing.

use alloc::string::String;

/// Formats a coordinate in fixed six-decimal notation, never exponent form.
///
/// Values within rounding distance of zero are normalised to `0.000000` so
/// that `-1e-12` and `-0.0` cannot leak a spurious sign into golden files.
pub fn fixed6(value: f64) -> String {
    let v = if value.abs() < 5e-7 { 0.0 } else { value };
    alloc::format!("{v:.6}")
}

/// Escapes a string for inclusion in a JSON string literal.
pub fn json_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                out.push_str(&alloc::format!("\\u{:04x}", c as u32));
            }
            c => out.push(c),
        }
    }
    out
}

/// Escapes text for an XML attribute or text node.
pub fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            c => out.push(c),
        }
    }
    out
}
