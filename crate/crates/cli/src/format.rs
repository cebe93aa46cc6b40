//! Number formatting shared by every output. Floats are printed with 12
//! significant digits so that repeated runs are byte-identical and diffable.

use serde::Serialize;
use serde_json::Value;

pub const SIG_DIGITS: usize = 12;

/// `-5.00249960807e-1` style; `0` for zero, `nan`/`inf` spelled out.
pub fn num(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.is_finite() {
        format!("{:.*e}", SIG_DIGITS - 1, v)
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

pub fn opt_int(v: Option<i32>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Round to [`SIG_DIGITS`] significant digits.
pub fn round_sig(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    format!("{:.*e}", SIG_DIGITS - 1, v).parse().unwrap_or(v)
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let r = round_sig(n.as_f64().unwrap_or(f64::NAN));
            *v = serde_json::Number::from_f64(r).map_or(Value::Null, Value::Number);
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Pretty JSON with every float rounded to 12 significant digits. Non-finite
/// numbers become `null`.
pub fn json<T: Serialize>(value: &T) -> String {
    let mut v = serde_json::to_value(value).expect("report types serialize");
    round_value(&mut v);
    let mut s = serde_json::to_string_pretty(&v).expect("values serialize");
    s.push('\n');
    s
}

/// Half-integer from a doubled value: `3/2`, `-1/2`, `2`.
pub fn rational(two: i32) -> String {
    superspin::HalfInt(two).to_string()
}

pub fn csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_significant_digits() {
        assert_eq!(num(-0.5), "-5.00000000000e-1");
        assert_eq!(num(1.0 / 3.0), "3.33333333333e-1");
        assert_eq!(num(0.0), "0");
        assert_eq!(round_sig(1.0 / 3.0), 0.333333333333);
    }

    #[test]
    fn json_rounds_nested_floats() {
        let out = json(&serde_json::json!({"a": [1.0 / 3.0, 2], "b": {"c": f64::NAN}}));
        assert!(out.contains("0.333333333333"));
        assert!(!out.contains("0.3333333333333"));
        assert!(out.contains("null"));
    }

    #[test]
    fn csv_layout() {
        let s = csv(&["a", "b"], &[vec!["1".into(), "x;y".into()]]);
        assert_eq!(s, "a,b\n1,x;y\n");
    }

    #[test]
    fn rationals() {
        assert_eq!(rational(3), "3/2");
        assert_eq!(rational(-1), "-1/2");
        assert_eq!(rational(4), "2");
    }
}
