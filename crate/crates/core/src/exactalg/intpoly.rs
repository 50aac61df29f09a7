//! Dense polynomials over Z, used where elimination stays inside the ring.

use rug::{Integer, Rational};

use super::polynomial::Polynomial;

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct IntPoly(Vec<Integer>);

impl IntPoly {
    pub fn zero() -> Self {
        IntPoly(Vec::new())
    }

    pub fn from_coeffs(mut c: Vec<Integer>) -> Self {
        while c.last().is_some_and(|x| *x == 0) {
            c.pop();
        }
        IntPoly(c)
    }

    pub fn constant(c: i64) -> Self {
        Self::from_coeffs(vec![Integer::from(c)])
    }

    /// `c * z^k`.
    pub fn monomial(c: i64, k: usize) -> Self {
        let mut v = vec![Integer::new(); k + 1];
        v[k] = Integer::from(c);
        Self::from_coeffs(v)
    }

    pub fn coeffs(&self) -> &[Integer] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        let mut v = Vec::with_capacity(n);
        for k in 0..n {
            let mut c = self.0.get(k).cloned().unwrap_or_default();
            if let Some(x) = o.0.get(k) {
                c += x;
            }
            v.push(c);
        }
        Self::from_coeffs(v)
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        let mut v = Vec::with_capacity(n);
        for k in 0..n {
            let mut c = self.0.get(k).cloned().unwrap_or_default();
            if let Some(x) = o.0.get(k) {
                c -= x;
            }
            v.push(c);
        }
        Self::from_coeffs(v)
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut v = vec![Integer::new(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if *a == 0 {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                if *b != 0 {
                    v[i + j] += Integer::from(a * b);
                }
            }
        }
        Self::from_coeffs(v)
    }

    /// `self / o` when the quotient is exact in Z[z], else `None`.
    pub fn exact_div(&self, o: &Self) -> Option<Self> {
        let dd = o.degree()?;
        if self.is_zero() {
            return Some(Self::zero());
        }
        let dn = self.degree().unwrap();
        if dn < dd {
            return None;
        }
        let lead = &o.0[dd];
        let mut rem = self.0.clone();
        let mut q = vec![Integer::new(); dn - dd + 1];
        for k in (0..=dn - dd).rev() {
            let c = &rem[k + dd];
            if *c == 0 {
                continue;
            }
            if !c.is_divisible(lead) {
                return None;
            }
            let t = Integer::from(c.div_exact_ref(lead));
            for (j, b) in o.0.iter().enumerate() {
                rem[k + j] -= Integer::from(&t * b);
            }
            q[k] = t;
        }
        if rem.iter().any(|c| *c != 0) {
            return None;
        }
        Some(Self::from_coeffs(q))
    }

    pub fn to_polynomial(&self) -> Polynomial {
        Polynomial::from_coeffs(self.0.iter().map(|c| Rational::from(c.clone())).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ip(c: &[i64]) -> IntPoly {
        IntPoly::from_coeffs(c.iter().map(|&x| Integer::from(x)).collect())
    }

    #[test]
    fn exact_division() {
        let a = ip(&[2, 0, -1]);
        let b = ip(&[1, 3, -2]);
        assert_eq!(a.mul(&b).exact_div(&b), Some(a.clone()));
        assert_eq!(ip(&[1, 1]).exact_div(&ip(&[0, 2])), None);
        assert_eq!(ip(&[3, 1]).sub(&ip(&[3, 1])), IntPoly::zero());
    }
}
