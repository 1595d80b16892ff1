use serde::Deserialize;

/// A real number in a game file: a TOML integer or float, or a string such
/// as `"1/3"` or `"-2.5"`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Number {
    pub fn value(&self) -> Result<f64, String> {
        let v = match self {
            Number::Int(i) => *i as f64,
            Number::Float(f) => *f,
            Number::Text(s) => parse_text(s)?,
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(format!("{self} is not a finite number"))
        }
    }
}

impl std::fmt::Display for Number {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Number::Int(i) => write!(f, "{i}"),
            Number::Float(x) => write!(f, "{x}"),
            Number::Text(s) => write!(f, "\"{s}\""),
        }
    }
}

fn parse_text(s: &str) -> Result<f64, String> {
    let bad = || format!("cannot read \"{s}\" as a number");
    match s.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num.trim().parse().map_err(|_| bad())?;
            let den: f64 = den.trim().parse().map_err(|_| bad())?;
            if den == 0.0 {
                return Err(format!("\"{s}\" divides by zero"));
            }
            Ok(num / den)
        }
        None => s.trim().parse().map_err(|_| bad()),
    }
}
