//! The Green function at the origin: exact coefficients from the functional
//! equation `G(z) = f(z) G(d(z))`, evaluation by the infinite product, and
//! the singular decomposition near `z = 1`.

use rayon::prelude::*;
use rug::{Float, Rational};
use serde::Serialize;

use crate::dynamics::LocalInverse;
use crate::error::{Error, Result};
use crate::exactalg::RationalFunction;
use crate::extended::{pi, unit, BigComplex};
use crate::walkfn::{q_function, ScalingParams, WalkFunctions};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoefficientMode {
    Exact,
    /// Cauchy integral on a circle inside the unit disk, evaluated with the
    /// product formula at the given precision.
    Float(u32),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Coefficients {
    #[serde(serialize_with = "crate::serde_util::rationals")]
    Exact(Vec<Rational>),
    Float { values: Vec<f64>, error_bound: f64, precision: u32 },
}

/// Return probabilities `p^(n)(o,o)` for `n = 0..=N`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GreenSeries {
    pub coefficients: Coefficients,
    pub bipartite: bool,
}

impl GreenSeries {
    pub fn len(&self) -> usize {
        match &self.coefficients {
            Coefficients::Exact(c) => c.len(),
            Coefficients::Float { values, .. } => values.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn exact(&self) -> Option<&[Rational]> {
        match &self.coefficients {
            Coefficients::Exact(c) => Some(c),
            Coefficients::Float { .. } => None,
        }
    }

    pub fn get_f64(&self, n: usize) -> f64 {
        match &self.coefficients {
            Coefficients::Exact(c) => c[n].to_f64(),
            Coefficients::Float { values, .. } => values[n],
        }
    }

    pub fn values_f64(&self) -> Vec<f64> {
        (0..self.len()).map(|n| self.get_f64(n)).collect()
    }

    pub fn error_bound(&self) -> f64 {
        match &self.coefficients {
            Coefficients::Exact(_) => 0.0,
            Coefficients::Float { error_bound, .. } => *error_bound,
        }
    }
}

/// Truncated product of two series, keeping orders `< len`.
fn mul_trunc(a: &[Rational], b: &[Rational], len: usize) -> Vec<Rational> {
    (0..len)
        .into_par_iter()
        .map(|n| {
            let mut c = Rational::new();
            for (i, x) in a.iter().enumerate().take(n + 1) {
                if *x == 0 {
                    continue;
                }
                if let Some(y) = b.get(n - i) {
                    if *y != 0 {
                        c += Rational::from(x * y);
                    }
                }
            }
            c
        })
        .collect()
}

/// Exact coefficients by the recursion on `G = f * (G o d)`.
///
/// With `s = ord_0 d`, knowing `g_0..g_{L-1}` determines `G(d(z))` modulo
/// `z^{sL}`, so each stage multiplies the known prefix length by `s`.
pub fn green_coefficients_exact(wf: &WalkFunctions, n_max: usize) -> Result<Vec<Rational>> {
    let s = wf.d.order_at_zero().unwrap_or(0);
    if s < 2 {
        return Err(Error::TheoremViolation(format!("ord_0 d = {s}, need at least 2")));
    }
    let s = s as usize;
    let len = n_max + 1;
    let dser = wf.d.series(n_max)?;
    let fser = wf.f.series(n_max)?;
    let mut g = vec![Rational::from(1)];
    while g.len() < len {
        let target = (g.len() * s).min(len);
        // Horner: sum_k g_k D^k mod z^target
        let mut acc = vec![g[g.len() - 1].clone()];
        for gk in g.iter().rev().skip(1) {
            acc = mul_trunc(&acc, &dser, target);
            acc[0] += gk;
        }
        let next = mul_trunc(&fser, &acc, target);
        if next[..g.len()] != g[..] {
            return Err(Error::Internal("coefficient recursion is not self-consistent".into()));
        }
        g = next;
    }
    g.truncate(len);
    Ok(g)
}

pub fn green_coefficients(wf: &WalkFunctions, n_max: usize, mode: CoefficientMode) -> Result<GreenSeries> {
    let coefficients = match mode {
        CoefficientMode::Exact => Coefficients::Exact(green_coefficients_exact(wf, n_max)?),
        CoefficientMode::Float(prec) => {
            let (values, error_bound) = green_coefficients_cauchy(wf, n_max, prec)?;
            Coefficients::Float { values, error_bound, precision: prec }
        }
    };
    Ok(GreenSeries { coefficients, bipartite: wf.bipartite })
}

/// In-place radix-2 FFT, `sign = -1` for the forward transform.
fn fft(a: &mut [BigComplex], sign: i32, prec: u32) {
    let n = a.len();
    assert!(n.is_power_of_two());
    let mut j = 0;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            a.swap(i, j);
        }
    }
    let two_pi = Float::with_val(prec, pi(prec) * 2u32);
    let twiddles: Vec<BigComplex> = (0..n / 2)
        .into_par_iter()
        .map(|k| {
            let th = Float::with_val(prec, &two_pi * (sign as i64 * k as i64)) / n as u64;
            unit(prec, &th)
        })
        .collect();
    let mut len = 2;
    while len <= n {
        let stride = n / len;
        a.par_chunks_mut(len).for_each(|chunk| {
            let half = len / 2;
            for k in 0..half {
                let t = chunk[k + half].mul(&twiddles[k * stride]);
                let u = chunk[k].clone();
                chunk[k] = u.add(&t);
                chunk[k + half] = u.sub(&t);
            }
        });
        len <<= 1;
    }
}

/// Coefficients `p_n = r^{-n} (1/M) sum_j G(r e^{2 pi i j/M}) e^{-2 pi i jn/M}`.
///
/// Since `0 <= p_n <= 1` the aliasing error is at most `r^M / (1 - r^M)`;
/// `r` balances it against the rounding error amplified by `r^{-N}`.
pub fn green_coefficients_cauchy(wf: &WalkFunctions, n_max: usize, prec: u32) -> Result<(Vec<f64>, f64)> {
    let wp = prec + 32;
    let nn = (n_max + 1) as f64;
    let m = (2 * (n_max + 1)).next_power_of_two().max(8);
    let ratio = m as f64 / nn;
    let c = (prec as f64) * std::f64::consts::LN_2 / (ratio + 1.0);
    let log_r = -c / nn;
    let r = Float::with_val(wp, log_r).exp();
    let two_pi = Float::with_val(wp, pi(wp) * 2u32);
    // conjugate symmetry: evaluate on the closed upper half circle
    let upper: Vec<Result<(BigComplex, f64)>> = (0..=m / 2)
        .into_par_iter()
        .map(|j| {
            let th = Float::with_val(wp, &two_pi * j as u64) / m as u64;
            let z = unit(wp, &th).scale(&r);
            green_product(wf, &z, wp)
        })
        .collect();
    let mut vals = Vec::with_capacity(m);
    let mut gmax = 0.0f64;
    for v in upper {
        let (g, _) = v?;
        gmax = gmax.max(g.abs_f64());
        vals.push(g);
    }
    for j in m / 2 + 1..m {
        vals.push(vals[m - j].conj());
    }
    fft(&mut vals, -1, wp);
    let inv_m = Float::with_val(wp, m as f64).recip();
    let mut out = Vec::with_capacity(n_max + 1);
    for (n, v) in vals.iter().take(n_max + 1).enumerate() {
        let scale = Float::with_val(wp, -log_r * n as f64).exp() * &inv_m;
        out.push(Float::with_val(wp, &v.re * &scale).to_f64());
    }
    let alias = (log_r * m as f64).exp() / (1.0 - (log_r * m as f64).exp());
    let rounding = gmax * (-(prec as f64)).exp2() * (m as f64).log2() * (-log_r * n_max as f64).exp();
    let bound = alias + rounding + f64::EPSILON;
    if !(bound < 1e-3) {
        return Err(Error::PrecisionExhausted(format!(
            "Cauchy coefficients up to N = {n_max} carry error bound {bound:e} at {prec} bits"
        )));
    }
    Ok((out, bound))
}

const PRODUCT_STEP_CAP: usize = 512;

/// `G(z) = prod_k f(d^k(z))` with the tail cut once `|f(w) - 1| < 2^-prec`.
/// Returns the value and an error estimate.
pub fn green_product(wf: &WalkFunctions, z: &BigComplex, prec: u32) -> Result<(BigComplex, f64)> {
    let wp = prec + 16;
    let mut w = z.with_prec(wp);
    let mut acc = BigComplex::one(wp);
    let tol = (-(prec as f64)).exp2();
    let mut entered = w.abs_f64() < 0.5;
    for step in 0..PRODUCT_STEP_CAP {
        let fw = wf.f.eval_complex(&w, wp).map_err(|_| {
            Error::Pole(format!("orbit of z = {:?} meets a pole of f at step {step}", z.to_c64()))
        })?;
        let dev = fw.add_rational(&Rational::from(-1)).abs_f64();
        acc = acc.mul(&fw);
        if entered && dev < tol {
            let err = (step as f64 + 2.0) * tol * acc.abs_f64();
            return Ok((acc.with_prec(prec), err));
        }
        w = wf.d.eval_complex(&w, wp).map_err(|_| {
            Error::Pole(format!("orbit of z = {:?} meets a pole of d at step {step}", z.to_c64()))
        })?;
        if !w.is_finite() {
            break;
        }
        entered |= w.abs_f64() < 0.5;
    }
    Err(Error::OrbitEscape(format!(
        "orbit of z = {:?} does not settle into the basin of 0 within {PRODUCT_STEP_CAP} steps",
        z.to_c64()
    )))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingularDecomposition {
    pub alpha: f64,
    pub q: RationalFunction,
    /// Largest tested `|z - 1|` on which the local inverse validated.
    pub h_minus_radius: f64,
    pub precision: u32,
}

/// Build the decomposition data and check `q(1) = tau` and
/// `f(1) q(1)^alpha = 1` in log space.
pub fn singular_decomposition(wf: &WalkFunctions, sp: &ScalingParams, prec: u32) -> Result<SingularDecomposition> {
    let q = q_function(&wf.d)?;
    let one = Rational::from(1);
    if q.eval(&one).as_ref() != Some(&sp.tau) {
        return Err(Error::TheoremViolation("q(1) differs from tau".into()));
    }
    let f1 = wf.f.eval(&one).ok_or_else(|| Error::Pole("f has a pole at 1".into()))?;
    let alpha = sp.alpha_float(prec + 16);
    let lhs = Float::with_val(prec + 16, &f1).ln() + alpha * Float::with_val(prec + 16, &sp.tau).ln();
    if lhs.to_f64().abs() > (8.0 - prec as f64).exp2() {
        return Err(Error::TheoremViolation(format!("log(f(1) q(1)^alpha) = {lhs:e}, expected 0")));
    }
    let inv = LocalInverse::new(&wf.d)?;
    let mut radius = 0.0;
    for k in 1..=40 {
        let r = (-(k as f64)).exp2();
        let ok = (0..16).all(|j| {
            let th = std::f64::consts::PI * (2.0 * j as f64 + 1.0) / 16.0;
            let z = BigComplex::from_f64(64, 1.0 + r * th.cos(), r * th.sin());
            inv.eval(&z, 64).is_ok()
        });
        if ok {
            radius = r;
            break;
        }
    }
    Ok(SingularDecomposition { alpha: sp.alpha, q, h_minus_radius: radius, precision: prec })
}

/// Samples `omega(-t) ~ H(1 - tau^{-t})` over one period `t in [T, T+1)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OmegaSamples {
    pub t: Vec<f64>,
    pub values: Vec<[f64; 2]>,
    /// High-precision real parts, retained for the Fourier step.
    #[serde(skip)]
    pub values_big: Vec<BigComplex>,
    /// Estimated distance of each sample from the periodic limit, from the
    /// difference to the sample one period further in.
    pub sample_error: f64,
    pub shift: u32,
    pub precision: u32,
}

/// `H^-(z) = prod_{n >= 1} f(w_n) q(w_n)^alpha`, `w_n = d^{-n}(z)`, with the
/// tail past `|w_n - 1| < 2^{-prec/2}` replaced by
/// `exp(c (w_n - 1) / (tau - 1))`, `c = f'(1)/rho + alpha q'(1)/tau`.
pub fn h_minus(wf: &WalkFunctions, sp: &ScalingParams, inv: &LocalInverse, z: &BigComplex, prec: u32) -> Result<BigComplex> {
    let wp = prec + 16;
    let q = q_function(&wf.d)?;
    let alpha = sp.alpha_float(wp);
    let one = Rational::from(1);
    let fp1 = wf.f.derivative().eval(&one).ok_or_else(|| Error::Pole("f' has a pole at 1".into()))?;
    let qp1 = q.derivative().eval(&one).ok_or_else(|| Error::Pole("q' has a pole at 1".into()))?;
    let c = Float::with_val(wp, &Rational::from(&fp1 / &sp.rho)) + Float::with_val(wp, &Rational::from(&qp1 / &sp.tau)) * &alpha;
    let eps = (-(prec as f64) / 2.0).exp2();
    let mut w = z.with_prec(wp);
    let mut log_acc = BigComplex::zero(wp);
    for _ in 0..100_000 {
        w = inv.eval(&w, wp)?;
        let fw = wf.f.eval_complex(&w, wp)?;
        let qw = q.eval_complex(&w, wp)?;
        log_acc = log_acc.add(&fw.ln()).add(&qw.ln().scale(&alpha));
        let dw = w.add_rational(&Rational::from(-1));
        if dw.abs_f64() < eps {
            let tau_m1 = Rational::from(&sp.tau - 1u32);
            let tail = dw.scale(&c).scale_rational(&Rational::from(tau_m1.recip_ref()));
            return Ok(log_acc.add(&tail).exp().with_prec(prec));
        }
    }
    Err(Error::NonConvergence("backward orbit does not approach 1".into()))
}

/// `H(z) = H^-(z) G(z) (1 - z)^{-alpha}`, principal branch.
pub fn h_function(wf: &WalkFunctions, sp: &ScalingParams, inv: &LocalInverse, z: &BigComplex, prec: u32) -> Result<BigComplex> {
    let wp = prec + 16;
    let hm = h_minus(wf, sp, inv, z, wp)?;
    let (g, _) = green_product(wf, z, wp)?;
    let neg_alpha = Float::with_val(wp, -sp.alpha_float(wp));
    let sing = z.with_prec(wp).rsub_rational(&Rational::from(1)).powf(&neg_alpha);
    Ok(hm.mul(&g).mul(&sing).with_prec(prec))
}

/// Evaluate `omega(-t) ~ H(z_t)` at `t_j = T + j/M` and estimate the sample
/// error from the same grid one period deeper.
pub fn h_and_omega(wf: &WalkFunctions, sp: &ScalingParams, m: usize, shift: u32, prec: u32) -> Result<OmegaSamples> {
    if sp.beta != 1 {
        return Err(Error::UnboundedGeometry(sp.beta as u64));
    }
    if m == 0 {
        return Err(Error::InsufficientSamples("no grid points requested".into()));
    }
    let wp = prec + 16;
    let inv = LocalInverse::new(&wf.d)?;
    let ln_tau = Float::with_val(wp, &sp.tau).ln();
    let eval_at = |t: &Rational| -> Result<BigComplex> {
        let e = Float::with_val(wp, -Float::with_val(wp, t) * &ln_tau).exp();
        let z = BigComplex::from_real(Float::with_val(wp, 1 - e));
        h_function(wf, sp, &inv, &z, wp)
    };
    let grid: Vec<Rational> = (0..m).map(|j| Rational::from((j as u64, m as u64)) + shift).collect();
    let results: Vec<Result<(BigComplex, BigComplex)>> = grid
        .par_iter()
        .map(|t| {
            let a = eval_at(t)?;
            let b = eval_at(&Rational::from(t + 1u32))?;
            Ok((a, b))
        })
        .collect();
    let mut values_big = Vec::with_capacity(m);
    let mut diff = 0.0f64;
    for r in results {
        let (a, b) = r?;
        diff = diff.max(a.sub(&b).abs_f64());
        values_big.push(b.with_prec(prec));
    }
    let tau = sp.tau.to_f64();
    let sample_error = diff / (tau - 1.0) + (-(prec as f64) / 2.0).exp2();
    Ok(OmegaSamples {
        t: grid.iter().map(|t| t.to_f64() + 1.0).collect(),
        values: values_big.iter().map(|v| [v.re.to_f64(), v.im.to_f64()]).collect(),
        values_big,
        sample_error,
        shift: shift + 1,
        precision: prec,
    })
}
