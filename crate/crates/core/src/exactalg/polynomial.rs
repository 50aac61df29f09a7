use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rug::ops::Pow;
use rug::{Integer, Rational};

use crate::extended::BigComplex;

/// Univariate polynomial with arbitrary-precision rational coefficients,
/// stored lowest degree first. The highest stored coefficient is nonzero;
/// the zero polynomial has no coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    coeffs: Vec<Rational>,
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial[")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

impl Polynomial {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::from(1))
    }

    /// The monomial `z`.
    pub fn z() -> Self {
        Self::monomial(Rational::from(1), 1)
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_coeffs(vec![c])
    }

    pub fn monomial(c: Rational, k: usize) -> Self {
        let mut coeffs = vec![Rational::new(); k + 1];
        coeffs[k] = c;
        Self::from_coeffs(coeffs)
    }

    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| *c == 0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| Rational::from(c)).collect())
    }

    pub fn from_integers(coeffs: &[Integer]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|c| Rational::from(c.clone())).collect())
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Coefficient of `z^k` (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == 1
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    /// Index of the lowest nonzero coefficient (the order of vanishing at 0).
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| *c != 0)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if *c == 0 {
            return Self::zero();
        }
        Self {
            coeffs: self.coeffs.iter().map(|a| Rational::from(a * c)).collect(),
        }
    }

    pub fn eval(&self, z: &Rational) -> Rational {
        let mut acc = Rational::new();
        for c in self.coeffs.iter().rev() {
            acc *= z;
            acc += c;
        }
        acc
    }

    /// Horner evaluation at an extended-precision complex point, at `prec` bits.
    pub fn eval_complex(&self, z: &BigComplex, prec: u32) -> BigComplex {
        let mut acc = BigComplex::zero(prec);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(z);
            acc = acc.add_rational(c);
        }
        acc
    }

    /// Sum of `|c_k| |z|^k`, the scale against which cancellation in
    /// [`Polynomial::eval_complex`] is judged.
    pub fn abs_eval_f64(&self, r: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * r + c.to_f64().abs();
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        Self::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| Rational::from(c * Integer::from(k)))
                .collect(),
        )
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut result = Self::one();
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// `self(inner(z))`.
    pub fn compose(&self, inner: &Polynomial) -> Self {
        let mut acc = Self::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * inner) + &Self::constant(c.clone());
        }
        acc
    }

    /// `self(-z)`.
    pub fn reflect(&self) -> Self {
        Self::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| if k % 2 == 1 { Rational::from(-c) } else { c.clone() })
                .collect(),
        )
    }

    /// Euclidean division over Q. Panics if `divisor` is zero.
    pub fn div_rem(&self, divisor: &Polynomial) -> (Polynomial, Polynomial) {
        let dd = divisor.degree().expect("division by zero polynomial");
        let lead = divisor.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        let Some(nd) = self.degree() else {
            return (Self::zero(), Self::zero());
        };
        if nd < dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![Rational::new(); nd - dd + 1];
        for k in (0..=nd - dd).rev() {
            let c = Rational::from(&rem[k + dd] / &lead);
            if c != 0 {
                for (j, dc) in divisor.coeffs.iter().enumerate() {
                    rem[k + j] -= Rational::from(&c * dc);
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Self::from_coeffs(quot), Self::from_coeffs(rem))
    }

    /// Division that must leave no remainder; `None` otherwise.
    pub fn exact_div(&self, divisor: &Polynomial) -> Option<Polynomial> {
        let (q, r) = self.div_rem(divisor);
        r.is_zero().then_some(q)
    }

    /// Monic version (zero stays zero).
    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Self::zero(),
            Some(l) => self.scale(&Rational::from(l.recip_ref())),
        }
    }

    /// `(content, primitive)` with `self = content * primitive`, the primitive
    /// part having coprime integer coefficients and positive leading coefficient.
    pub fn primitive_split(&self) -> (Rational, Vec<Integer>) {
        if self.is_zero() {
            return (Rational::new(), Vec::new());
        }
        let mut lcm = Integer::from(1);
        for c in &self.coeffs {
            lcm.lcm_mut(c.denom());
        }
        let ints: Vec<Integer> = self
            .coeffs
            .iter()
            .map(|c| c.numer() * Integer::from(&lcm / c.denom()) )
            .collect();
        let mut g = Integer::new();
        for c in &ints {
            g.gcd_mut(c);
        }
        if ints.last().unwrap().cmp0() == Ordering::Less {
            g = -g;
        }
        let prim: Vec<Integer> = ints.iter().map(|c| Integer::from(c.div_exact_ref(&g))).collect();
        (Rational::from((g, lcm)), prim)
    }

    /// Monic greatest common divisor, via the subresultant remainder sequence
    /// on the primitive integer parts.
    pub fn gcd(&self, other: &Polynomial) -> Polynomial {
        if self.is_zero() {
            return other.monic();
        }
        if other.is_zero() {
            return self.monic();
        }
        let (_, a) = self.primitive_split();
        let (_, b) = other.primitive_split();
        let g = subresultant_gcd(a, b);
        Polynomial::from_integers(&g).monic()
    }

    /// Square-free part (monic).
    pub fn squarefree(&self) -> Polynomial {
        if self.degree().unwrap_or(0) == 0 {
            return self.monic();
        }
        let g = self.gcd(&self.derivative());
        self.exact_div(&g).expect("gcd divides").monic()
    }

    /// Even function: all odd coefficients vanish.
    pub fn is_even(&self) -> bool {
        self.coeffs.iter().skip(1).step_by(2).all(|c| *c == 0)
    }

    pub fn is_odd(&self) -> bool {
        self.coeffs.iter().step_by(2).all(|c| *c == 0)
    }
}

fn int_degree(p: &[Integer]) -> usize {
    p.len() - 1
}

fn int_trim(mut p: Vec<Integer>) -> Vec<Integer> {
    while p.last().is_some_and(|c| *c == 0) {
        p.pop();
    }
    p
}

fn int_primitive(p: Vec<Integer>) -> Vec<Integer> {
    let mut g = Integer::new();
    for c in &p {
        g.gcd_mut(c);
    }
    if g == 0 || g == 1 {
        return p;
    }
    p.into_iter().map(|c| c.div_exact(&g)).collect()
}

/// Pseudo-remainder: `lc(b)^(deg a - deg b + 1) * a mod b`, over Z.
fn pseudo_rem(a: &[Integer], b: &[Integer]) -> Vec<Integer> {
    let db = int_degree(b);
    let lb = b.last().unwrap();
    let mut r: Vec<Integer> = a.to_vec();
    let mut steps = int_degree(a) as i64 - db as i64 + 1;
    while r.len() > db && !r.is_empty() {
        let dr = r.len() - 1;
        let lr = r.last().unwrap().clone();
        for c in r.iter_mut() {
            *c *= lb;
        }
        let shift = dr - db;
        for (j, bc) in b.iter().enumerate() {
            r[shift + j] -= Integer::from(&lr * bc);
        }
        r = int_trim(r);
        steps -= 1;
    }
    if steps > 0 {
        let f = Integer::from(lb.pow(steps as u32));
        for c in r.iter_mut() {
            *c *= &f;
        }
    }
    r
}

/// Subresultant PRS gcd of two nonzero integer polynomials (up to content).
fn subresultant_gcd(a: Vec<Integer>, b: Vec<Integer>) -> Vec<Integer> {
    let (mut a, mut b) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let mut g = Integer::from(1);
    let mut h = Integer::from(1);
    loop {
        if b.len() == 1 {
            return vec![Integer::from(1)];
        }
        let delta = (int_degree(&a) - int_degree(&b)) as u32;
        let r = pseudo_rem(&a, &b);
        if r.is_empty() {
            return int_primitive(b);
        }
        if r.len() == 1 {
            return vec![Integer::from(1)];
        }
        let denom = &g * Integer::from((&h).pow(delta)) ;
        a = b;
        b = r.into_iter().map(|c| c.div_exact(&denom)).collect();
        g = a.last().unwrap().clone();
        // h <- g^delta / h^(delta-1)
        if delta == 0 {
            // h unchanged
        } else {
            let num = Integer::from((&g).pow(delta));
            let den = Integer::from((&h).pow(delta - 1));
            h = num.div_exact(&den);
        }
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            let mut c = self.coeffs.get(k).cloned().unwrap_or_default();
            if let Some(r) = rhs.coeffs.get(k) {
                c += r;
            }
            out.push(c);
        }
        Polynomial::from_coeffs(out)
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            coeffs: self.coeffs.iter().map(|c| Rational::from(-c)).collect(),
        }
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![Rational::new(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == 0 {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += Rational::from(a * b);
            }
        }
        Polynomial::from_coeffs(out)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Rational number raised to a signed power; helper shared by callers that
/// build test points.
pub fn rational_pow(q: &Rational, k: i32) -> Rational {
    Rational::from(q.pow(k))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> Polynomial {
        Polynomial::from_ints(c)
    }

    #[test]
    fn trims_and_degrees() {
        assert_eq!(p(&[1, 2, 0, 0]).degree(), Some(1));
        assert!(p(&[0, 0]).is_zero());
        assert_eq!(p(&[0, 0, 3]).valuation(), Some(2));
    }

    #[test]
    fn div_rem_reconstructs() {
        let a = p(&[-1, 0, 0, 1]);
        let b = p(&[-1, 1]);
        let (q, r) = a.div_rem(&b);
        assert_eq!(q, p(&[1, 1, 1]));
        assert!(r.is_zero());
    }

    #[test]
    fn gcd_of_shared_factor() {
        // (z-1)(z+2) and (z-1)(3z+5)
        let a = &p(&[-1, 1]) * &p(&[2, 1]);
        let b = &p(&[-1, 1]) * &p(&[5, 3]);
        assert_eq!(a.gcd(&b), p(&[-1, 1]));
        assert_eq!(p(&[1, 1]).gcd(&p(&[2, 1])), Polynomial::one());
    }

    #[test]
    fn gcd_high_degree() {
        let f = &p(&[3, -1, 2]) * &p(&[1, 0, 0, 5]);
        let a = &f * &p(&[7, 1, 1, 1, 1]);
        let b = &f * &p(&[-2, 0, 9]);
        assert_eq!(a.gcd(&b), f.monic());
    }

    #[test]
    fn squarefree_removes_repeats() {
        let a = &p(&[-1, 1]).pow(3) * &p(&[2, 1]);
        assert_eq!(a.squarefree(), (&p(&[-1, 1]) * &p(&[2, 1])).monic());
    }

    #[test]
    fn parity() {
        assert!(p(&[2, 0, -1]).is_even());
        assert!(p(&[0, 1, 0, 4]).is_odd());
        assert!(!p(&[1, 1]).is_even());
    }
}
