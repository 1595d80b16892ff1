//! Number and list formatting shared by the reports.

use serde_json::Value;

/// Nine decimals, with negative zero printed as zero.
pub fn fixed(v: f64) -> String {
    let s = format!("{v:.9}");
    match s.strip_prefix('-') {
        Some(rest) if rest.bytes().all(|b| b == b'0' || b == b'.') => rest.to_string(),
        _ => s,
    }
}

pub fn fixed_list(v: &[f64]) -> String {
    let items: Vec<String> = v.iter().map(|&x| fixed(x)).collect();
    format!("[{}]", items.join(", "))
}

/// Shortest decimal string that parses back to the same `f64`.
pub fn exact(v: f64) -> Value {
    let v = if v == 0.0 { 0.0 } else { v };
    Value::String(format!("{v:?}"))
}

pub fn exact_list(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|&x| exact(x)).collect())
}

/// A tuple such as `(0, 2)` or `(exercise, wait)`.
pub fn tuple<T: std::fmt::Display>(items: impl IntoIterator<Item = T>) -> String {
    let items: Vec<String> = items.into_iter().map(|x| x.to_string()).collect();
    format!("({})", items.join(", "))
}

pub fn decision(d: u8) -> &'static str {
    if d == 0 {
        "exercise"
    } else {
        "wait"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_places() {
        assert_eq!(fixed(8.0 / 3.0), "2.666666667");
        assert_eq!(fixed(-1e-12), "0.000000000");
        assert_eq!(fixed(-0.0), "0.000000000");
        assert_eq!(fixed(-0.5), "-0.500000000");
        assert_eq!(fixed_list(&[0.0, 5.0]), "[0.000000000, 5.000000000]");
    }

    #[test]
    fn exact_round_trips() {
        for v in [8.0 / 3.0, 0.1, -1e-300, 1e21, 5.0] {
            let Value::String(s) = exact(v) else {
                unreachable!()
            };
            assert_eq!(s.parse::<f64>().unwrap(), v);
        }
        assert_eq!(exact(-0.0), Value::String("0.0".into()));
        assert_eq!(exact(1e-9), Value::String("1e-9".into()));
    }

    #[test]
    fn tuples() {
        assert_eq!(tuple([0, 2]), "(0, 2)");
        assert_eq!(tuple([decision(0), decision(1)]), "(exercise, wait)");
    }
}
