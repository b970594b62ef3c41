//! Frame and set labels used in captions and as text-embedding inputs.
//!
//! | kind      | token      | rounding                 |
//! |-----------|------------|--------------------------|
//! | ColorTemp | `6302K`    | integer, half up         |
//! | Shutter   | `0.35`     | 2 decimals, half up      |
//! | Focal     | `48mm`     | integer, half up         |
//! | Bokeh     | `12.5`     | 1 decimal, half up       |
//!
//! Rounding works on the shortest decimal representation of the value, so
//! `0.345` becomes `0.35` even though the nearest double is slightly below.

use crate::setting::{SettingKind, SettingSet};

pub fn format_label(kind: SettingKind, value: f64) -> String {
    match kind {
        SettingKind::ColorTemp => format!("{}K", round_half_up(value, 0)),
        SettingKind::Shutter => round_half_up(value, 2),
        SettingKind::Focal => format!("{}mm", round_half_up(value, 0)),
        SettingKind::Bokeh => round_half_up(value, 1),
    }
}

/// `"<v1; v2; ...; vF>"` in sampled order.
pub fn format_set_label(set: &SettingSet) -> String {
    format_values_label(set.kind(), set.values())
}

pub fn format_values_label(kind: SettingKind, values: &[f64]) -> String {
    let tokens: Vec<String> = values.iter().map(|&v| format_label(kind, v)).collect();
    format!("<{}>", tokens.join("; "))
}

/// Decimal round-half-up of a non-negative finite value to `places` digits.
fn round_half_up(value: f64, places: usize) -> String {
    debug_assert!(value.is_finite() && value >= 0.0);
    let repr = format!("{value}");
    let (int, frac) = repr.split_once('.').unwrap_or((&repr, ""));
    let mut digits: Vec<u8> = int.bytes().map(|b| b - b'0').collect();
    let frac: Vec<u8> = frac.bytes().map(|b| b - b'0').collect();
    digits.extend((0..places).map(|k| frac.get(k).copied().unwrap_or(0)));
    if frac.get(places).is_some_and(|&d| d >= 5) {
        let mut k = digits.len();
        loop {
            if k == 0 {
                digits.insert(0, 1);
                break;
            }
            k -= 1;
            if digits[k] == 9 {
                digits[k] = 0;
            } else {
                digits[k] += 1;
                break;
            }
        }
    }
    let text: String = digits.iter().map(|d| char::from(b'0' + d)).collect();
    let split = text.len() - places;
    let int_part = text[..split].trim_start_matches('0');
    let int_part = if int_part.is_empty() { "0" } else { int_part };
    if places == 0 {
        int_part.to_string()
    } else {
        format!("{int_part}.{}", &text[split..])
    }
}
