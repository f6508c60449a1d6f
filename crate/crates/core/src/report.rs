//! Flat key-value reports and fixed-significance number formatting.

use std::fmt::Write as _;

/// How numbers are rendered in reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Precision {
    /// Six significant digits.
    #[default]
    Significant6,
    /// Shortest representation that round-trips to the same `f64`.
    Full,
}

/// Formats `v` with six significant digits, `%g`-style.
pub fn fmt_sig6(v: f64) -> String {
    fmt_sig(v, 6)
}

pub fn fmt_sig(v: f64, digits: usize) -> String {
    if v.is_nan() {
        return "NaN".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    // Round first so the exponent reflects the rounded value (9.999995 -> 10).
    let sci = format!("{:.*e}", digits - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if exp < -5 || exp >= digits as i32 {
        let m = trim_zeros(mantissa);
        return format!("{m}e{exp}");
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{v:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn fmt_num(v: f64, precision: Precision) -> String {
    match precision {
        Precision::Significant6 => fmt_sig6(v),
        Precision::Full => format!("{v:?}"),
    }
}

#[derive(Debug, Clone)]
enum Value {
    Num(f64),
    Int(i64),
    Text(String),
}

/// Ordered list of `key=value` lines.
#[derive(Debug, Clone, Default)]
pub struct KvReport {
    entries: Vec<(String, Value)>,
}

impl KvReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num(&mut self, key: impl Into<String>, v: f64) -> &mut Self {
        self.entries.push((key.into(), Value::Num(v)));
        self
    }

    pub fn int(&mut self, key: impl Into<String>, v: i64) -> &mut Self {
        self.entries.push((key.into(), Value::Int(v)));
        self
    }

    pub fn text(&mut self, key: impl Into<String>, v: impl Into<String>) -> &mut Self {
        self.entries.push((key.into(), Value::Text(v.into())));
        self
    }

    pub fn extend(&mut self, other: &KvReport) -> &mut Self {
        self.entries.extend(other.entries.iter().cloned());
        self
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Raw numeric lookup, for tests and downstream tooling.
    pub fn get_num(&self, key: &str) -> Option<f64> {
        self.entries.iter().find_map(|(k, v)| match v {
            Value::Num(x) if k == key => Some(*x),
            Value::Int(x) if k == key => Some(*x as f64),
            _ => None,
        })
    }

    pub fn get_text(&self, key: &str) -> Option<&str> {
        self.entries.iter().find_map(|(k, v)| match v {
            Value::Text(s) if k == key => Some(s.as_str()),
            _ => None,
        })
    }

    pub fn render(&self, precision: Precision) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            let rendered = match v {
                Value::Num(x) => fmt_num(*x, precision),
                Value::Int(i) => i.to_string(),
                Value::Text(s) => s.clone(),
            };
            let _ = writeln!(out, "{k}={rendered}");
        }
        out
    }
}
