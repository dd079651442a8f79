//! Canonical serialization: sorted object keys, floats rounded to 9
//! significant digits and printed in their shortest round-trip form.

use serde::Serialize;
use serde_json::Value;

use crate::error::Result;

pub const SIGNIFICANT_DIGITS: usize = 9;

/// Round to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_significant(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .expect("formatted float parses")
}

/// Canonical text form of a number, used in CSV output.
pub fn canonical_number(x: f64) -> String {
    format!("{}", round_significant(x))
}

fn canonicalize(v: &mut Value) {
    match v {
        Value::Number(n) => {
            if let Some(f) = n.as_f64().filter(|_| n.is_f64()) {
                if let Some(m) = serde_json::Number::from_f64(round_significant(f)) {
                    *n = m;
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(canonicalize),
        Value::Object(map) => map.values_mut().for_each(canonicalize),
        _ => {}
    }
}

/// Pretty-printed canonical JSON with a trailing newline.
pub fn to_canonical_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut v = serde_json::to_value(value)?;
    canonicalize(&mut v);
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(round_significant(76.53201793502329), 76.5320179);
        assert_eq!(round_significant(0.1 + 0.2), 0.3);
        assert_eq!(canonical_number(15150.0), "15150");
        assert_eq!(canonical_number(-0.0), "0");
    }

    #[test]
    fn keys_sorted_and_idempotent() {
        let v = serde_json::json!({"b": 1.0 / 3.0, "a": [2.0, 1e-20]});
        let s = to_canonical_json(&v).unwrap();
        assert!(s.find("\"a\"").unwrap() < s.find("\"b\"").unwrap());
        let again: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(to_canonical_json(&again).unwrap(), s);
    }
}
