//! Deterministic number formatting and record writers.

use lensfix_core::Complex;

const SIG_DIGITS: usize = 10;

/// `v` rounded to 10 significant digits. Plain decimal notation for
/// exponents in `-5..10`, scientific otherwise. Negative zero prints as `0`.
pub fn num(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIG_DIGITS - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..10).contains(&exp) {
        return format!("{mantissa}e{exp}");
    }
    let (sign, digits) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m.replace('.', "")),
        None => ("", mantissa.replace('.', "")),
    };
    let body = if exp >= 0 {
        let split = exp as usize + 1;
        format!("{}.{}", &digits[..split], &digits[split..])
    } else {
        format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
    };
    let body = body.strip_suffix('.').unwrap_or(&body).to_string();
    format!("{sign}{body}")
}

/// One JSON object with fields in insertion order.
pub struct JsonRecord {
    parts: Vec<String>,
}

impl JsonRecord {
    pub fn new() -> Self {
        JsonRecord { parts: Vec::new() }
    }

    fn key(&mut self, k: &str, value: String) -> &mut Self {
        self.parts.push(format!("{}:{value}", quote(k)));
        self
    }

    pub fn str(&mut self, k: &str, v: &str) -> &mut Self {
        self.key(k, quote(v))
    }

    pub fn num(&mut self, k: &str, v: f64) -> &mut Self {
        // Non-finite values have no JSON number form.
        let s = if v.is_finite() { num(v) } else { "null".into() };
        self.key(k, s)
    }

    pub fn opt_num(&mut self, k: &str, v: Option<f64>) -> &mut Self {
        match v {
            Some(v) => self.num(k, v),
            None => self.key(k, "null".into()),
        }
    }

    pub fn int(&mut self, k: &str, v: usize) -> &mut Self {
        self.key(k, v.to_string())
    }

    pub fn bool(&mut self, k: &str, v: bool) -> &mut Self {
        self.key(k, v.to_string())
    }

    pub fn line(&self) -> String {
        format!("{{{}}}\n", self.parts.join(","))
    }
}

fn quote(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

pub fn complex_pair(z: Complex) -> String {
    format!("{},{}", num(z.re), num(z.im))
}
