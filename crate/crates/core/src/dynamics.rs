//! Iteration of the transition function: fixed points, the local inverse
//! branch at 1, and the interval/Cantor classification of the real Julia set.

use rayon::prelude::*;
use rug::{Integer, Rational};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactalg::{chebyshev_t, ExtRational, Polynomial, RationalFunction};
use crate::extended::BigComplex;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FixedPointReport {
    pub order_at_zero: i64,
    #[serde(serialize_with = "crate::serde_util::rational")]
    pub derivative_at_zero: Rational,
    #[serde(serialize_with = "crate::serde_util::rational")]
    pub tau: Rational,
}

/// Check `d(0) = 0`, `d'(0) = 0`, `ord_0 d >= 2`, `d(1) = 1`, `d'(1) = tau > 1`.
pub fn fixed_point_report(d: &RationalFunction) -> Result<FixedPointReport> {
    let zero = Rational::new();
    let one = Rational::from(1);
    let dd = d.derivative();
    let fail = |m: String| Err(Error::TheoremViolation(m));
    if d.eval(&zero) != Some(zero.clone()) {
        return fail("0 is not a fixed point of d".into());
    }
    let d0 = dd.eval(&zero).unwrap_or_default();
    if d0 != 0 {
        return fail(format!("d'(0) = {d0}, 0 is not super-attracting"));
    }
    let ord = d.order_at_zero().unwrap_or(0);
    if ord < 2 {
        return fail(format!("ord_0 d = {ord} < 2"));
    }
    if d.eval(&one) != Some(one.clone()) {
        return fail("1 is not a fixed point of d".into());
    }
    let tau = dd.eval(&one).ok_or_else(|| Error::Pole("d' has a pole at 1".into()))?;
    if tau <= 1 {
        return fail(format!("d'(1) = {tau} is not repelling"));
    }
    Ok(FixedPointReport { order_at_zero: ord, derivative_at_zero: d0, tau })
}

/// Precomputed data for evaluating the branch of `d^{-1}` fixing 1.
#[derive(Clone, Debug)]
pub struct LocalInverse {
    d: RationalFunction,
    dd: RationalFunction,
    inv_tau: Rational,
}

impl LocalInverse {
    pub fn new(d: &RationalFunction) -> Result<Self> {
        let tau = fixed_point_report(d)?.tau;
        Ok(Self { d: d.clone(), dd: d.derivative(), inv_tau: Rational::from(tau.recip_ref()) })
    }

    /// Newton's method on `d(w) = z` from the linearized seed
    /// `1 + (z - 1)/tau`, validated by the residual and by the contraction
    /// `|w - 1| < |z - 1|`.
    pub fn eval(&self, z: &BigComplex, prec: u32) -> Result<BigComplex> {
        let wp = prec + 16;
        let z = z.with_prec(wp);
        let one = Rational::from(1);
        let dz = z.add_rational(&Rational::from(-1));
        let dz_abs = dz.abs_f64();
        if dz_abs == 0.0 {
            return Ok(BigComplex::one(prec));
        }
        let mut w = dz.scale_rational(&self.inv_tau).add_rational(&one);
        let tol = (-(prec as f64)).exp2();
        // absolute accuracy relative to |z|, since d(w) - z cancels near 1
        let scale = z.abs_f64().max(1.0);
        if dz_abs <= tol * scale {
            return Ok(w.with_prec(prec));
        }
        let mut converged = false;
        for _ in 0..200 {
            let f = self.d.eval_complex(&w, wp)?.sub(&z);
            let fp = self.dd.eval_complex(&w, wp)?;
            let step = f.div(&fp);
            w = w.sub(&step);
            if step.abs_f64() <= tol * scale {
                converged = true;
                break;
            }
        }
        let residual = self.d.eval_complex(&w, wp)?.sub(&z).abs_f64();
        let dw = w.add_rational(&Rational::from(-1)).abs_f64();
        if !converged || residual > 4.0 * tol * scale || !(dw < dz_abs) {
            return Err(Error::NonConvergence(format!(
                "local inverse at z = {:?}: residual {residual:e}, |w-1| = {dw:e}, |z-1| = {dz_abs:e}",
                z.to_c64()
            )));
        }
        Ok(w.with_prec(prec))
    }
}

pub fn local_inverse_near_one(d: &RationalFunction, z: &BigComplex, prec: u32) -> Result<BigComplex> {
    LocalInverse::new(d)?.eval(z, prec)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum JuliaKind {
    Interval,
    Cantor,
    Unknown,
}

/// Certificate for a Cantor verdict: `z0 > 1` lies below a backward iterate
/// of 1 and `|d^n(z0)| < 1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    #[serde(serialize_with = "crate::serde_util::rational")]
    pub z0: Rational,
    pub n: usize,
    #[serde(serialize_with = "crate::serde_util::rational")]
    pub value: Rational,
    /// `d^k(z0)` for `k = 0..=n`.
    #[serde(serialize_with = "crate::serde_util::ext_rationals")]
    pub orbit: Vec<ExtRational>,
    /// Index into the preimage chain of the backward iterate used.
    pub below: usize,
}

/// A real solution `w > 1` of `d^level(w) = 1`, isolated in `(lower, upper)`
/// or exactly at infinity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BackwardIterate {
    pub level: usize,
    pub infinite: bool,
    #[serde(serialize_with = "crate::serde_util::rational")]
    pub lower: Rational,
    #[serde(serialize_with = "crate::serde_util::rational")]
    pub upper: Rational,
    pub approx: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JuliaVerdict {
    pub kind: JuliaKind,
    pub witness: Option<Witness>,
    pub preimage_chain: Vec<BackwardIterate>,
    pub notes: Vec<String>,
}

/// Bit cap on numerators and denominators during exact forward iteration.
const ORBIT_BIT_CAP: u32 = 1 << 16;
const ORBIT_MAX_STEPS: usize = 16;

/// Whether `d(z) * T_n(1/z) = 1` identically for `n = ord_0 d`.
pub fn is_chebyshev_conjugate(d: &RationalFunction) -> bool {
    let Some(n) = d.order_at_zero() else { return false };
    if n < 1 {
        return false;
    }
    let n = n as usize;
    // T_n(1/z) = z^{-n} * sum_k t_k z^{n-k}
    let t = chebyshev_t(n);
    let mut rev = vec![Rational::new(); n + 1];
    for (k, c) in t.coeffs().iter().enumerate() {
        rev[n - k] = c.clone();
    }
    let t_inv = RationalFunction::new(Polynomial::from_coeffs(rev), Polynomial::monomial(Rational::from(1), n))
        .expect("nonzero");
    d.mul(&t_inv) == RationalFunction::one()
}

fn sign_at(p: &Polynomial, x: &Rational) -> i32 {
    let v = p.eval(x);
    v.cmp0() as i32
}

fn sign_at_infinity(p: &Polynomial) -> i32 {
    p.leading().map_or(0, |c| c.cmp0() as i32)
}

/// Sturm sequence of a squarefree polynomial.
fn sturm_chain(p: &Polynomial) -> Vec<Polynomial> {
    let mut chain = vec![p.clone(), p.derivative()];
    loop {
        let n = chain.len();
        if chain[n - 1].is_zero() {
            chain.pop();
            break;
        }
        let (_, r) = chain[n - 2].div_rem(&chain[n - 1]);
        if r.is_zero() {
            break;
        }
        // scale by a positive constant to keep coefficients small
        let (content, _) = r.primitive_split();
        let c = Rational::from(content.abs_ref());
        chain.push(-&r.scale(&Rational::from(c.recip_ref())));
    }
    chain
}

fn variations(signs: impl Iterator<Item = i32>) -> usize {
    let mut last = 0;
    let mut count = 0;
    for s in signs {
        if s == 0 {
            continue;
        }
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

fn roots_in(chain: &[Polynomial], lo: &Rational, hi: Option<&Rational>) -> usize {
    let a = variations(chain.iter().map(|p| sign_at(p, lo)));
    let b = match hi {
        Some(h) => variations(chain.iter().map(|p| sign_at(p, h))),
        None => variations(chain.iter().map(sign_at_infinity)),
    };
    a.saturating_sub(b)
}

/// Isolate the real roots of `p` in `(lo, inf)` into disjoint open intervals
/// of width below `2^-bits`. Roots exactly at a bisection point are returned
/// as degenerate intervals.
pub fn isolate_real_roots(p: &Polynomial, lo: &Rational, bits: u32) -> Vec<(Rational, Rational)> {
    if p.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let sq = p.squarefree();
    let chain = sturm_chain(&sq);
    // Cauchy bound on root magnitudes
    let lead = Rational::from(sq.leading().unwrap().abs_ref());
    let mut bound = Rational::from(1);
    for c in sq.coeffs() {
        let r = Rational::from(c.abs_ref()) / &lead;
        if r > bound {
            bound = r.clone();
        }
    }
    let hi = Rational::from(&bound + 1) + Rational::from(lo.abs_ref());
    let width = Rational::from((Integer::from(1), Integer::from(1) << bits));
    let mut out = Vec::new();
    let mut stack = vec![(lo.clone(), hi)];
    while let Some((a, b)) = stack.pop() {
        let n = roots_in(&chain, &a, Some(&b));
        if n == 0 {
            continue;
        }
        if n == 1 && Rational::from(&b - &a) < width {
            out.push((a, b));
            continue;
        }
        let m = Rational::from(&a + &b) / 2u32;
        if sq.eval(&m) == 0 {
            out.push((m.clone(), m.clone()));
            // shift the split off the root so that it is not counted twice
            let eps = Rational::from(&b - &a) / 1024u32;
            stack.push((Rational::from(&m + &eps), b));
            stack.push((a, Rational::from(&m - &eps)));
            continue;
        }
        stack.push((m.clone(), b));
        stack.push((a, m));
    }
    out.sort_by(|x, y| x.0.cmp(&y.0));
    out
}

/// Exact forward orbit on the extended line, stopped at `|value| < 1`, after
/// `max_steps`, or when the numbers exceed the bit cap.
pub fn forward_orbit(d: &RationalFunction, z0: &ExtRational, max_steps: usize) -> Vec<ExtRational> {
    let mut orbit = vec![z0.clone()];
    let mut cur = z0.clone();
    for _ in 0..max_steps {
        if let ExtRational::Finite(q) = &cur {
            if orbit.len() > 1 && Rational::from(q.abs_ref()) < 1 {
                break;
            }
            if q.numer().significant_bits() + q.denom().significant_bits() > ORBIT_BIT_CAP {
                break;
            }
        }
        cur = d.eval_ext(&cur);
        orbit.push(cur.clone());
    }
    orbit
}

fn inside_unit(x: &ExtRational) -> Option<Rational> {
    match x {
        ExtRational::Finite(q) if Rational::from(q.abs_ref()) < 1 => Some(q.clone()),
        _ => None,
    }
}

/// Rationals `p/q` in `(1, b)` in order of height `max(p, q)`, then
/// denominator; at most `count` of them.
fn probes_below(b: &BackwardIterate, count: usize) -> Vec<Rational> {
    let mut out = Vec::new();
    let mut h: u64 = 2;
    while out.len() < count && h < 1 << 20 {
        for q in 1..h {
            if Integer::from(h).gcd(&Integer::from(q)) != 1 {
                continue;
            }
            let x = Rational::from((h, q));
            let below = b.infinite || x <= b.lower;
            if below {
                out.push(x);
                if out.len() == count {
                    break;
                }
            }
        }
        h += 1;
    }
    out
}

/// Backward iterates of 1 at exactly `level`, i.e. real solutions `w > 1`
/// of `d^level(w) = 1`, plus infinity when it is one.
fn backward_iterates(iterate: &RationalFunction, level: usize) -> Vec<BackwardIterate> {
    let p = iterate.numer() - iterate.denom();
    let mut out: Vec<BackwardIterate> = isolate_real_roots(&p, &Rational::from(1), 64)
        .into_iter()
        // the open interval starts at 1 but 1 itself may be an endpoint
        .filter(|(lo, hi)| *hi > 1 && !(lo == hi && *lo == 1))
        .map(|(lower, upper)| {
            let approx = (lower.to_f64() + upper.to_f64()) / 2.0;
            BackwardIterate { level, infinite: false, lower, upper, approx }
        })
        .collect();
    if iterate.eval_ext(&ExtRational::Infinity) == ExtRational::Finite(Rational::from(1)) {
        out.push(BackwardIterate {
            level,
            infinite: true,
            lower: Rational::new(),
            upper: Rational::new(),
            approx: f64::INFINITY,
        });
    }
    out
}

/// Classify the Julia set of `d` with the backward-iterate escape criterion.
pub fn julia_classify(d: &RationalFunction, search_depth: usize) -> Result<JuliaVerdict> {
    julia_classify_with(d, search_depth, 64)
}

pub fn julia_classify_with(d: &RationalFunction, search_depth: usize, probes: usize) -> Result<JuliaVerdict> {
    fixed_point_report(d)?;
    let mut notes = Vec::new();
    if is_chebyshev_conjugate(d) {
        notes.push("d(z) T_n(1/z) = 1 identically: conjugate to a Chebyshev polynomial, J = [1, -1]".into());
        return Ok(JuliaVerdict { kind: JuliaKind::Interval, witness: None, preimage_chain: Vec::new(), notes });
    }
    let mut chain: Vec<BackwardIterate> = Vec::new();
    let mut iterate = d.clone();
    for level in 1..=search_depth.max(1) {
        if level > 1 {
            iterate = d.compose(&iterate)?;
        }
        let found = backward_iterates(&iterate, level);
        let start = chain.len();
        for b in found {
            // keep iterates new at this level
            let dup = chain.iter().any(|c| c.infinite == b.infinite && (b.infinite || (c.lower <= b.upper && b.lower <= c.upper)));
            if !dup {
                chain.push(b);
            }
        }
        // probes for every iterate found at this level, in parallel; the
        // least witness in probe order wins regardless of completion order
        let candidates: Vec<(usize, Rational)> = (start..chain.len())
            .flat_map(|i| probes_below(&chain[i], probes).into_iter().map(move |z| (i, z)))
            .collect();
        let results: Vec<Option<Witness>> = candidates
            .par_iter()
            .map(|(i, z0)| {
                let orbit = forward_orbit(d, &ExtRational::Finite(z0.clone()), ORBIT_MAX_STEPS);
                let hit = orbit.iter().enumerate().skip(1).find_map(|(n, x)| inside_unit(x).map(|v| (n, v)));
                hit.map(|(n, value)| Witness { z0: z0.clone(), n, value, orbit: orbit[..=n].to_vec(), below: *i })
            })
            .collect();
        let best = results.into_iter().flatten().min_by(|a, b| {
            let key = |w: &Witness| (w.z0.denom().clone().max(w.z0.numer().clone()), w.z0.denom().clone(), w.n);
            key(a).cmp(&key(b))
        });
        if let Some(w) = best {
            notes.push(format!("witness found at backward level {level}"));
            let verdict = JuliaVerdict { kind: JuliaKind::Cantor, witness: Some(w), preimage_chain: chain, notes };
            verify_witness(d, &verdict)?;
            return Ok(verdict);
        }
    }
    notes.push(format!(
        "no escaping probe below {} backward iterates up to depth {search_depth}; the criterion is only sufficient",
        chain.len()
    ));
    Ok(JuliaVerdict { kind: JuliaKind::Unknown, witness: None, preimage_chain: chain, notes })
}

/// Re-check a Cantor certificate in exact arithmetic.
pub fn verify_witness(d: &RationalFunction, v: &JuliaVerdict) -> Result<()> {
    let Some(w) = &v.witness else {
        return Ok(());
    };
    let b = v
        .preimage_chain
        .get(w.below)
        .ok_or_else(|| Error::Internal("witness refers to a missing backward iterate".into()))?;
    let below = b.infinite || w.z0 <= b.lower;
    let mut x = ExtRational::Finite(w.z0.clone());
    for _ in 0..w.n {
        x = d.eval_ext(&x);
    }
    let ok = w.z0 > 1 && below && x == ExtRational::Finite(w.value.clone()) && Rational::from(w.value.abs_ref()) < 1;
    // the iterate bracket must contain a root of d^level - 1
    let mut it = d.clone();
    for _ in 1..b.level {
        it = d.compose(&it)?;
    }
    let bracket_ok = b.infinite && it.eval_ext(&ExtRational::Infinity) == ExtRational::Finite(Rational::from(1))
        || !b.infinite && {
            let p = it.numer() - it.denom();
            b.lower == b.upper && p.eval(&b.lower) == 0
                || roots_in(&sturm_chain(&p.squarefree()), &b.lower, Some(&b.upper)) == 1
        };
    if ok && bracket_ok {
        Ok(())
    } else {
        Err(Error::Internal(format!("Cantor witness z0 = {} fails exact re-verification", w.z0)))
    }
}
