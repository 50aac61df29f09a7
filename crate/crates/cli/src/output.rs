use sswalk::BigComplex;

/// Fixed-format float with `digits` significant digits.
pub fn fmt_f64(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    format!("{:.*e}", digits.max(1) - 1, x)
}

pub fn fmt_complex(z: &BigComplex, digits: usize) -> String {
    let c = z.to_c64();
    let sign = if c.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{}{}i", fmt_f64(c.re, digits), sign, fmt_f64(c.im.abs(), digits))
}

/// One named output file.
pub struct Artifact {
    pub name: String,
    pub content: String,
}

impl Artifact {
    pub fn new(name: impl Into<String>, content: impl Into<String>) -> Self {
        Self { name: name.into(), content: content.into() }
    }
}

pub struct Outcome {
    pub artifacts: Vec<Artifact>,
    pub exit_code: i32,
    /// Diagnostics for standard error.
    pub messages: Vec<String>,
}

impl Outcome {
    pub fn ok(artifacts: Vec<Artifact>) -> Self {
        Self { artifacts, exit_code: 0, messages: Vec::new() }
    }
}

pub fn json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}
