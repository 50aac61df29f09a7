use std::fmt;
use std::str::FromStr;

use rug::{Integer, Rational};

use super::polynomial::Polynomial;
use crate::error::{Error, Result};
use crate::extended::BigComplex;

/// Guard bits added on top of the caller's precision during evaluation.
pub const GUARD_BITS: u32 = 32;

/// Reduced quotient of two polynomials over Q.
///
/// Canonical form: numerator and denominator are coprime, and the lowest
/// nonzero coefficient of the denominator is 1. The zero function has
/// denominator 1. Two canonical functions are equal iff their coefficients are.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

/// A point of the extended rational line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExtRational {
    Finite(Rational),
    Infinity,
}

impl RationalFunction {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalize(num, den))
    }

    pub fn from_polynomial(p: Polynomial) -> Self {
        Self { num: p, den: Polynomial::one() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_polynomial(Polynomial::constant(c))
    }

    pub fn zero() -> Self {
        Self::from_polynomial(Polynomial::zero())
    }

    pub fn one() -> Self {
        Self::constant(Rational::from(1))
    }

    pub fn z() -> Self {
        Self::from_polynomial(Polynomial::z())
    }

    /// Build from integer coefficient lists (lowest degree first).
    pub fn from_ints(num: &[i64], den: &[i64]) -> Result<Self> {
        Self::new(Polynomial::from_ints(num), Polynomial::from_ints(den))
    }

    fn normalize(num: Polynomial, den: Polynomial) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let g = num.gcd(&den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.exact_div(&g).expect("gcd divides"), den.exact_div(&g).expect("gcd divides"))
        };
        let low = den.coeffs()[den.valuation().unwrap()].clone();
        let inv = Rational::from(low.recip_ref());
        Self { num: num.scale(&inv), den: den.scale(&inv) }
    }

    pub fn numer(&self) -> &Polynomial {
        &self.num
    }

    pub fn denom(&self) -> &Polynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.num.degree().unwrap_or(0) == 0 && self.den.degree() == Some(0)
    }

    /// Order of vanishing at 0 (`None` for the zero function; negative for a pole).
    pub fn order_at_zero(&self) -> Option<i64> {
        let n = self.num.valuation()? as i64;
        Some(n - self.den.valuation().unwrap() as i64)
    }

    /// Degree as a rational map: `max(deg num, deg den)`.
    pub fn map_degree(&self) -> usize {
        self.num.degree().unwrap_or(0).max(self.den.degree().unwrap_or(0))
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.den == o.den {
            return Self::normalize(&self.num + &o.num, self.den.clone());
        }
        Self::normalize(&(&self.num * &o.den) + &(&o.num * &self.den), &self.den * &o.den)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        Self { num: -&self.num, den: self.den.clone() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::normalize(&self.num * &o.num, &self.den * &o.den)
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        if o.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalize(&self.num * &o.den, &self.den * &o.num))
    }

    pub fn recip(&self) -> Result<Self> {
        Self::one().div(self)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::normalize(self.num.scale(c), self.den.clone())
    }

    pub fn add_const(&self, c: &Rational) -> Self {
        self.add(&Self::constant(c.clone()))
    }

    pub fn pow(&self, k: u32) -> Self {
        Self::normalize(self.num.pow(k), self.den.pow(k))
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        let m = self.map_degree();
        let r = &inner.num;
        let s = &inner.den;
        // powers of r and s up to m
        let mut rp = vec![Polynomial::one()];
        let mut sp = vec![Polynomial::one()];
        for k in 1..=m {
            rp.push(&rp[k - 1] * r);
            sp.push(&sp[k - 1] * s);
        }
        let homog = |p: &Polynomial| {
            let mut acc = Polynomial::zero();
            for (i, c) in p.coeffs().iter().enumerate() {
                if *c != 0 {
                    acc = &acc + &(&rp[i] * &sp[m - i]).scale(c);
                }
            }
            acc
        };
        let num = homog(&self.num);
        let den = homog(&self.den);
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalize(num, den))
    }

    /// n-fold self-composition; `iterate(0)` is the identity.
    pub fn iterate(&self, n: usize) -> Result<Self> {
        let mut acc = Self::z();
        for _ in 0..n {
            acc = self.compose(&acc)?;
        }
        Ok(acc)
    }

    /// `self(-z)`.
    pub fn reflect(&self) -> Self {
        Self::normalize(self.num.reflect(), self.den.reflect())
    }

    pub fn is_even(&self) -> bool {
        self.num.is_even() && self.den.is_even()
    }

    pub fn is_odd(&self) -> bool {
        (self.num.is_odd() && self.den.is_even()) || (self.num.is_even() && self.den.is_odd())
    }

    pub fn derivative(&self) -> Self {
        let num = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        Self::normalize(num, &self.den * &self.den)
    }

    /// Exact value at a rational point; `None` at a pole.
    pub fn eval(&self, z: &Rational) -> Option<Rational> {
        let d = self.den.eval(z);
        if d == 0 {
            return None;
        }
        Some(self.num.eval(z) / d )
    }

    /// Exact value on the projective line.
    pub fn eval_ext(&self, z: &ExtRational) -> ExtRational {
        match z {
            ExtRational::Finite(q) => match self.eval(q) {
                Some(v) => ExtRational::Finite(v),
                None => ExtRational::Infinity,
            },
            ExtRational::Infinity => {
                let dn = self.num.degree().unwrap_or(0);
                let dd = self.den.degree().unwrap_or(0);
                if self.num.is_zero() || dn < dd {
                    ExtRational::Finite(Rational::new())
                } else if dn > dd {
                    ExtRational::Infinity
                } else {
                    ExtRational::Finite(Rational::from(
                        self.num.leading().unwrap() / self.den.leading().unwrap(),
                    ))
                }
            }
        }
    }

    /// First `order + 1` Taylor coefficients at 0.
    pub fn series(&self, order: usize) -> Result<Vec<Rational>> {
        let d0 = self.den.coeff(0);
        if d0 == 0 {
            return Err(Error::Pole("rational function has a pole at the origin".into()));
        }
        // canonical form makes d0 = 1 whenever it is nonzero
        let den = self.den.coeffs();
        let mut out: Vec<Rational> = Vec::with_capacity(order + 1);
        for n in 0..=order {
            let mut c = self.num.coeff(n);
            for (j, dj) in den.iter().enumerate().skip(1).take(n) {
                if *dj != 0 {
                    c -= Rational::from(dj * &out[n - j]);
                }
            }
            if d0 != 1 {
                c /= &d0;
            }
            out.push(c);
        }
        Ok(out)
    }

    /// Value at `z` with relative error about `2^-(prec)`: Horner is run at
    /// `prec + GUARD_BITS` bits and the result rounded to `prec` bits.
    ///
    /// Fails with a pole error when the denominator cancels below the
    /// working precision.
    pub fn eval_complex(&self, z: &BigComplex, prec: u32) -> Result<BigComplex> {
        let wp = prec + GUARD_BITS;
        let zw = z.with_prec(wp);
        let n = self.num.eval_complex(&zw, wp);
        let d = self.den.eval_complex(&zw, wp);
        let scale = self.den.abs_eval_f64(zw.abs_f64());
        let dabs = d.abs_f64();
        let threshold = scale * (-(prec as f64)).exp2();
        if !(dabs > threshold) {
            return Err(Error::Pole(format!("denominator vanishes near z = {:?}", z.to_c64())));
        }
        Ok(n.div(&d).with_prec(prec))
    }

    /// Double-precision evaluation; `None` near a pole.
    pub fn eval_c64(&self, z: num_complex::Complex64) -> Option<num_complex::Complex64> {
        let horner = |p: &Polynomial| {
            let mut acc = num_complex::Complex64::new(0.0, 0.0);
            for c in p.coeffs().iter().rev() {
                acc = acc * z + c.to_f64();
            }
            acc
        };
        let d = horner(&self.den);
        if d.norm() == 0.0 {
            return None;
        }
        Some(horner(&self.num) / d)
    }

    /// Integer-normalized `(numerator, denominator)` coefficient vectors:
    /// coprime integers with positive lowest denominator coefficient.
    pub fn integer_coefficients(&self) -> (Vec<Integer>, Vec<Integer>) {
        let mut lcm = Integer::from(1);
        for c in self.num.coeffs().iter().chain(self.den.coeffs()) {
            lcm.lcm_mut(c.denom());
        }
        let to_int = |p: &Polynomial| -> Vec<Integer> {
            p.coeffs()
                .iter()
                .map(|c| c.numer() * Integer::from(&lcm / c.denom()) )
                .collect()
        };
        let mut n = to_int(&self.num);
        let mut d = to_int(&self.den);
        let mut g = Integer::new();
        for c in n.iter().chain(d.iter()) {
            g.gcd_mut(c);
        }
        if g > 1 {
            for c in n.iter_mut().chain(d.iter_mut()) {
                c.div_exact_mut(&g);
            }
        }
        (n, d)
    }
}

impl fmt::Display for ExtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRational::Finite(q) => write!(f, "{q}"),
            ExtRational::Infinity => write!(f, "inf"),
        }
    }
}

/// Chebyshev polynomial of the first kind, `T_n`.
pub fn chebyshev_t(n: usize) -> Polynomial {
    let mut prev = Polynomial::one();
    if n == 0 {
        return prev;
    }
    let mut cur = Polynomial::z();
    let two_z = Polynomial::from_ints(&[0, 2]);
    for _ in 1..n {
        let next = &(&two_z * &cur) - &prev;
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

fn write_poly(f: &mut fmt::Formatter<'_>, coeffs: &[Integer]) -> fmt::Result {
    let mut first = true;
    for (k, c) in coeffs.iter().enumerate() {
        if *c == 0 {
            continue;
        }
        let neg = *c < 0;
        let mag = Integer::from(c.abs_ref());
        if first {
            if neg {
                write!(f, "-")?;
            }
        } else {
            write!(f, " {} ", if neg { '-' } else { '+' })?;
        }
        first = false;
        match k {
            0 => write!(f, "{mag}")?,
            _ => {
                if mag != 1 {
                    write!(f, "{mag}*")?;
                }
                if k == 1 {
                    write!(f, "z")?;
                } else {
                    write!(f, "z^{k}")?;
                }
            }
        }
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

/// `((c0 + c1*z + ...)/(d0 + d1*z + ...))` with integer coefficients;
/// zero terms are omitted.
impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (n, d) = self.integer_coefficients();
        write!(f, "((")?;
        write_poly(f, &n)?;
        write!(f, ")/(")?;
        write_poly(f, &d)?;
        write!(f, "))")
    }
}

fn parse_poly(text: &str) -> Result<Polynomial> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    // split into signed terms
    let mut terms = Vec::new();
    let mut cur = String::new();
    for (i, ch) in s.chars().enumerate() {
        if (ch == '+' || ch == '-') && i > 0 && !cur.ends_with('^') {
            terms.push(std::mem::take(&mut cur));
        }
        cur.push(ch);
    }
    terms.push(cur);
    let mut acc = Polynomial::zero();
    for t in terms {
        let (sign, body) = match t.as_bytes().first() {
            Some(b'-') => (-1, &t[1..]),
            Some(b'+') => (1, &t[1..]),
            _ => (1, &t[..]),
        };
        if body.is_empty() {
            return Err(Error::Parse(format!("dangling sign in '{text}'")));
        }
        let (coef_s, pow) = match body.find('z') {
            None => (body, 0usize),
            Some(p) => {
                let coef = body[..p].trim_end_matches('*');
                let rest = &body[p + 1..];
                let pow = if rest.is_empty() {
                    1
                } else {
                    rest.strip_prefix('^')
                        .and_then(|e| e.parse::<usize>().ok())
                        .ok_or_else(|| Error::Parse(format!("bad exponent in term '{t}'")))?
                };
                (coef, pow)
            }
        };
        let coef_s = coef_s.trim_start_matches('(').trim_end_matches(')');
        let coef = if coef_s.is_empty() {
            Rational::from(1)
        } else {
            coef_s
                .parse::<Rational>()
                .map_err(|_| Error::Parse(format!("bad coefficient '{coef_s}'")))?
        };
        acc = &acc + &Polynomial::monomial(coef * sign, pow);
    }
    Ok(acc)
}

impl FromStr for RationalFunction {
    type Err = Error;

    /// Accepts the display grammar, a bare polynomial, or `(p)/(q)`.
    fn from_str(text: &str) -> Result<Self> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let inner = if s.starts_with("((") && s.ends_with("))") { &s[1..s.len() - 1] } else { &s[..] };
        match inner.find(")/(") {
            Some(pos) if inner.starts_with('(') && inner.ends_with(')') => {
                let num = parse_poly(&inner[1..pos])?;
                let den = parse_poly(&inner[pos + 3..inner.len() - 1])?;
                RationalFunction::new(num, den).map_err(|_| Error::Parse("zero denominator".into()))
            }
            _ => Ok(RationalFunction::from_polynomial(parse_poly(inner.trim_start_matches('(').trim_end_matches(')'))?)),
        }
    }
}

impl serde::Serialize for RationalFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for RationalFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rf(num: &[i64], den: &[i64]) -> RationalFunction {
        RationalFunction::from_ints(num, den).unwrap()
    }

    fn q(a: i64, b: i64) -> Rational {
        Rational::from((a, b))
    }

    #[test]
    fn canonical_denominator_lowest_coefficient_is_one() {
        let r = rf(&[0, 0, 1], &[2, 0, -1]);
        assert_eq!(r.denom().coeff(0), 1);
        assert_eq!(r.numer().coeff(2), q(1, 2));
    }

    #[test]
    fn reduces_common_factors() {
        // (z^2 - 1)/(z - 1) = z + 1
        let r = rf(&[-1, 0, 1], &[-1, 1]);
        assert_eq!(r, rf(&[1, 1], &[1]));
    }

    #[test]
    fn add_one_to_line_transition() {
        let d = rf(&[0, 0, 1], &[2, 0, -1]);
        let sum = d.add(&RationalFunction::one());
        assert_eq!(sum, rf(&[2], &[2, 0, -1]));
        // cross-check by evaluation at five rational points
        for (a, b) in [(1, 3), (-2, 5), (7, 4), (3, 11), (-9, 7)] {
            let z = q(a, b);
            let lhs = sum.eval(&z).unwrap();
            let rhs = d.eval(&z).unwrap() + 1;
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn compose_reciprocal_is_identity() {
        let inv = rf(&[1], &[0, 1]);
        assert_eq!(inv.compose(&inv).unwrap(), RationalFunction::z());
    }

    #[test]
    fn multiply_by_zero() {
        let p = rf(&[1, 2, 3], &[1, -1]);
        assert!(p.mul(&RationalFunction::zero()).is_zero());
    }

    #[test]
    fn division_by_zero_errors() {
        assert_eq!(RationalFunction::one().div(&RationalFunction::zero()), Err(Error::DivisionByZero));
    }

    #[test]
    fn derivatives_at_one() {
        let d2 = rf(&[0, 0, 1], &[2, 0, -1]);
        assert_eq!(d2.derivative().eval(&q(1, 1)).unwrap(), 4);
        let flake3 = rf(&[0, 0, 1], &[6, -6, 1]);
        assert_eq!(flake3.derivative().eval(&q(1, 1)).unwrap(), 6);
        assert!(RationalFunction::constant(q(5, 3)).derivative().is_zero());
    }

    #[test]
    fn series_expansions() {
        let s = rf(&[0, 0, 1], &[2, 0, -1]).series(6).unwrap();
        let want = [q(0, 1), q(0, 1), q(1, 2), q(0, 1), q(1, 4), q(0, 1), q(1, 8)];
        assert_eq!(s, want);
        assert_eq!(rf(&[1], &[1, -1]).series(3).unwrap(), vec![q(1, 1); 4]);
        let s = rf(&[0, 0, 1], &[4, -3]).series(4).unwrap();
        assert_eq!(s, vec![q(0, 1), q(0, 1), q(1, 4), q(3, 16), q(9, 64)]);
        assert!(rf(&[1], &[0, 1]).series(3).is_err());
    }

    #[test]
    fn complex_evaluation() {
        let prec = 128;
        let d2 = rf(&[0, 0, 1], &[2, 0, -1]);
        let v = d2.eval_complex(&BigComplex::from_rational(prec, &q(1, 2)), prec).unwrap();
        assert!((v.to_c64().re - 1.0 / 7.0).abs() < 1e-30);
        let flake3 = rf(&[0, 0, 1], &[6, -6, 1]);
        let v = flake3.eval_complex(&BigComplex::from_f64(prec, 2.0, 0.0), prec).unwrap();
        assert!((v.to_c64().re + 2.0).abs() < 1e-30);
        let inv = rf(&[1], &[0, 1]);
        assert!(matches!(inv.eval_complex(&BigComplex::zero(prec), prec), Err(Error::Pole(_))));
    }

    #[test]
    fn display_and_parse() {
        let d = rf(&[0, 0, 1], &[2, 0, -1]);
        assert_eq!(d.to_string(), "((z^2)/(2 - z^2))");
        assert_eq!(d.to_string().parse::<RationalFunction>().unwrap(), d);
        let r: RationalFunction = "((3*z - 1/2*z^3)/(1 + z))".parse().unwrap();
        assert_eq!(r.to_string(), "((6*z - z^3)/(2 + 2*z))");
    }

    #[test]
    fn value_at_infinity() {
        let flake3 = rf(&[0, 0, 1], &[6, -6, 1]);
        assert_eq!(flake3.eval_ext(&ExtRational::Infinity), ExtRational::Finite(q(1, 1)));
        let inv = rf(&[1], &[0, 1]);
        assert_eq!(inv.eval_ext(&ExtRational::Finite(q(0, 1))), ExtRational::Infinity);
    }
}
