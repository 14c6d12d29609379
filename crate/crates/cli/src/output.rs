//! JSON envelopes with flag echo, optional timestamp and 12-digit floats.

use std::time::SystemTime;

use serde::Serialize;
use serde_json::{json, Value};

pub const SIGNIFICANT_DIGITS: usize = 12;

/// Round to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .unwrap_or(x)
}

/// Round every float in `v`.
pub fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or(f64::NAN);
            *v = Value::from(round_sig(x));
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

fn to_value(x: &impl Serialize) -> Value {
    serde_json::to_value(x).expect("command output always serializes")
}

pub fn envelope(
    command: &str,
    flags: &impl Serialize,
    result: &impl Serialize,
    timestamp: bool,
) -> String {
    let mut doc = json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
    });
    if timestamp {
        doc["timestamp"] =
            Value::String(humantime::format_rfc3339_seconds(SystemTime::now()).to_string());
    }
    doc["flags"] = to_value(flags);
    doc["result"] = to_value(result);
    round_floats(&mut doc);
    serde_json::to_string_pretty(&doc).expect("JSON values always serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(round_sig(2.324093963197513), 2.32409396320);
        assert_eq!(round_sig(-1.124093963197513e-7), -1.12409396320e-7);
        assert_eq!(round_sig(0.0), 0.0);
        assert_eq!(round_sig(1.0), 1.0);
        assert!(round_sig(f64::INFINITY).is_infinite());
    }

    #[test]
    fn envelope_layout() {
        let text = envelope("demo", &json!({"seed": 3}), &json!({"x": 0.1 + 0.2}), false);
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["command"], "demo");
        assert_eq!(v["flags"]["seed"], 3);
        assert_eq!(v["result"]["x"], 0.3);
        assert!(v.get("timestamp").is_none());
        let stamped = envelope("demo", &json!({}), &json!({}), true);
        let v: Value = serde_json::from_str(&stamped).unwrap();
        assert!(v["timestamp"].as_str().unwrap().ends_with('Z'));
    }
}
