//! Extended-precision complex numbers on top of MPFR floats.
//!
//! Only the operations the evaluation code needs are provided. Every result
//! is rounded to the precision of the left operand.

use std::fmt;

use num_complex::Complex64;
use rug::float::Constant;
use rug::{Float, Rational};

/// Default working precision in bits.
pub const DEFAULT_PRECISION: u32 = 128;

#[derive(Clone, PartialEq)]
pub struct BigComplex {
    pub re: Float,
    pub im: Float,
}

impl fmt::Debug for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}i)", self.re.to_f64(), self.im.to_f64())
    }
}

impl BigComplex {
    pub fn new(re: Float, im: Float) -> Self {
        Self { re, im }
    }

    pub fn zero(prec: u32) -> Self {
        Self::new(Float::new(prec), Float::new(prec))
    }

    pub fn one(prec: u32) -> Self {
        Self::from_f64(prec, 1.0, 0.0)
    }

    pub fn from_f64(prec: u32, re: f64, im: f64) -> Self {
        Self::new(Float::with_val(prec, re), Float::with_val(prec, im))
    }

    pub fn from_rational(prec: u32, re: &Rational) -> Self {
        Self::new(Float::with_val(prec, re), Float::new(prec))
    }

    pub fn from_rationals(prec: u32, re: &Rational, im: &Rational) -> Self {
        Self::new(Float::with_val(prec, re), Float::with_val(prec, im))
    }

    pub fn from_real(re: Float) -> Self {
        let prec = re.prec();
        Self::new(re, Float::new(prec))
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    /// Same value rounded to `prec` bits.
    pub fn with_prec(&self, prec: u32) -> Self {
        Self::new(Float::with_val(prec, &self.re), Float::with_val(prec, &self.im))
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn add(&self, o: &Self) -> Self {
        let p = self.prec();
        Self::new(
            Float::with_val(p, &self.re + &o.re),
            Float::with_val(p, &self.im + &o.im),
        )
    }

    pub fn sub(&self, o: &Self) -> Self {
        let p = self.prec();
        Self::new(
            Float::with_val(p, &self.re - &o.re),
            Float::with_val(p, &self.im - &o.im),
        )
    }

    pub fn add_rational(&self, q: &Rational) -> Self {
        let p = self.prec();
        Self::new(Float::with_val(p, &self.re + q), self.im.clone())
    }

    /// `q - self` for a rational `q`.
    pub fn rsub_rational(&self, q: &Rational) -> Self {
        let p = self.prec();
        Self::new(Float::with_val(p, q - &self.re), Float::with_val(p, -&self.im))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let p = self.prec();
        let rr = Float::with_val(p + 8, &self.re * &o.re);
        let ii = Float::with_val(p + 8, &self.im * &o.im);
        let ri = Float::with_val(p + 8, &self.re * &o.im);
        let ir = Float::with_val(p + 8, &self.im * &o.re);
        Self::new(Float::with_val(p, rr - ii), Float::with_val(p, ri + ir))
    }

    pub fn scale(&self, s: &Float) -> Self {
        let p = self.prec();
        Self::new(Float::with_val(p, &self.re * s), Float::with_val(p, &self.im * s))
    }

    pub fn scale_rational(&self, s: &Rational) -> Self {
        let p = self.prec();
        Self::new(Float::with_val(p, &self.re * s), Float::with_val(p, &self.im * s))
    }

    pub fn norm_sqr(&self) -> Float {
        let p = self.prec();
        let a = Float::with_val(p, self.re.square_ref());
        let b = Float::with_val(p, self.im.square_ref());
        a + b
    }

    pub fn abs(&self) -> Float {
        let p = self.prec();
        Float::with_val(p, self.re.hypot_ref(&self.im))
    }

    pub fn abs_f64(&self) -> f64 {
        self.re.to_f64().hypot(self.im.to_f64())
    }

    pub fn arg(&self) -> Float {
        let p = self.prec();
        Float::with_val(p, self.im.atan2_ref(&self.re))
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), Float::with_val(self.prec(), -&self.im))
    }

    pub fn neg(&self) -> Self {
        let p = self.prec();
        Self::new(Float::with_val(p, -&self.re), Float::with_val(p, -&self.im))
    }

    pub fn recip(&self) -> Self {
        let p = self.prec();
        let n = self.norm_sqr();
        Self::new(
            Float::with_val(p, &self.re / &n),
            Float::with_val(p, -Float::with_val(p, &self.im / &n)),
        )
    }

    pub fn div(&self, o: &Self) -> Self {
        self.mul(&o.recip())
    }

    /// Principal logarithm, `arg` in `(-pi, pi]`.
    pub fn ln(&self) -> Self {
        let p = self.prec();
        let r = self.abs();
        Self::new(Float::with_val(p, r.ln_ref()), self.arg())
    }

    pub fn exp(&self) -> Self {
        let p = self.prec();
        let m = Float::with_val(p, self.re.exp_ref());
        let (s, c) = self.im.clone().sin_cos(Float::new(p));
        Self::new(Float::with_val(p, &m * &c), Float::with_val(p, &m * &s))
    }

    /// Principal power `self^e` for a real exponent.
    pub fn powf(&self, e: &Float) -> Self {
        self.ln().scale(e).exp()
    }

    pub fn sqrt(&self) -> Self {
        let half = Float::with_val(self.prec(), 0.5);
        self.powf(&half)
    }
}

pub fn pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi)
}

/// `e^{i theta}` at `prec` bits.
pub fn unit(prec: u32, theta: &Float) -> BigComplex {
    let (s, c) = theta.clone().sin_cos(Float::new(prec));
    BigComplex::new(c, s)
}

/// Parse a complex literal: `a`, `a+bi`, `a-bi`, `bi`. Components may be
/// decimals or fractions `p/q`.
pub fn parse_complex(text: &str, prec: u32) -> Option<BigComplex> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return None;
    }
    let parse_real = |t: &str| -> Option<Float> {
        if t.is_empty() {
            return None;
        }
        if let Ok(q) = t.parse::<Rational>() {
            return Some(Float::with_val(prec, &q));
        }
        Float::parse(t).ok().map(|v| Float::with_val(prec, v))
    };
    if let Some(body) = s.strip_suffix('i') {
        // split at the last sign that is not the leading one nor an exponent sign
        let bytes = body.as_bytes();
        let mut split = None;
        for k in (1..bytes.len()).rev() {
            if (bytes[k] == b'+' || bytes[k] == b'-') && bytes[k - 1] != b'e' && bytes[k - 1] != b'E' {
                split = Some(k);
                break;
            }
        }
        let (re_s, im_s) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("0", body),
        };
        let im_s = match im_s {
            "" | "+" => "1",
            "-" => "-1",
            other => other,
        };
        let im_s = im_s.strip_prefix('+').unwrap_or(im_s);
        Some(BigComplex::new(parse_real(re_s)?, parse_real(im_s)?))
    } else {
        Some(BigComplex::from_real(parse_real(&s)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_exp_roundtrip() {
        let z = BigComplex::from_f64(200, 0.3, -1.7);
        let w = z.ln().exp();
        assert!(w.sub(&z).abs_f64() < 1e-55);
    }

    #[test]
    fn principal_sqrt_of_negative() {
        let z = BigComplex::from_f64(128, -4.0, 0.0);
        let s = z.sqrt().to_c64();
        assert!((s.re).abs() < 1e-30 && (s.im - 2.0).abs() < 1e-30);
    }

    #[test]
    fn parses_literals() {
        let z = parse_complex("1/2-3i", 64).unwrap().to_c64();
        assert_eq!((z.re, z.im), (0.5, -3.0));
        let z = parse_complex("0.25", 64).unwrap().to_c64();
        assert_eq!((z.re, z.im), (0.25, 0.0));
        let z = parse_complex("-i", 64).unwrap().to_c64();
        assert_eq!((z.re, z.im), (0.0, -1.0));
    }
}
