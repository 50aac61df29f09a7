//! Fourier data of the periodic factors and the fit of return probabilities
//! against the oscillating power law.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::blowup::{bfs, BlowupGraph};
use crate::error::{Error, Result};
use crate::greens::{GreenSeries, OmegaSamples};
use crate::walkfn::ScalingParams;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Relative accuracy of [`complex_gamma`] on the half plane `Re z >= 1/2`.
pub const GAMMA_RELATIVE_ERROR: f64 = 1e-13;

/// Complex gamma function: Lanczos approximation for `Re z >= 1/2`,
/// reflection below. Accuracy is that of double precision regardless of
/// `_prec`.
pub fn complex_gamma(z: Complex64, _prec: u32) -> Result<Complex64> {
    if z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0 {
        return Err(Error::Pole(format!("gamma has a pole at {}", z.re)));
    }
    Ok(gamma_inner(z))
}

fn gamma_inner(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        let s = (z * PI).sin();
        return Complex64::new(PI, 0.0) / (s * gamma_inner(Complex64::new(1.0, 0.0) - z));
    }
    let z = z - 1.0;
    let mut x = Complex64::new(LANCZOS[0], 0.0);
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        x += *c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powc(z + 0.5) * (-t).exp() * x
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FourierCoefficient {
    pub k: i64,
    pub re: f64,
    pub im: f64,
}

impl FourierCoefficient {
    fn new(k: i64, c: Complex64) -> Self {
        Self { k, re: c.re, im: c.im }
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn abs(&self) -> f64 {
        self.value().norm()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OmegaFourier {
    /// `k = -K..=K` in order.
    pub coefficients: Vec<FourierCoefficient>,
    pub aliasing_bound: f64,
    /// Double-precision rounding in the transform.
    pub rounding: f64,
    pub sample_error: f64,
    /// `A` and `b` of the envelope `|omega_hat(k)| <= A e^{-2 pi |k| b}`.
    pub envelope: f64,
    pub decay_rate: f64,
    /// Largest conjugate-symmetry defect before averaging.
    pub symmetry_defect: f64,
}

impl OmegaFourier {
    pub fn k_max(&self) -> i64 {
        (self.coefficients.len() as i64 - 1) / 2
    }

    pub fn get(&self, k: i64) -> Complex64 {
        let kk = self.k_max();
        if k.abs() > kk {
            return Complex64::new(0.0, 0.0);
        }
        self.coefficients[(k + kk) as usize].value()
    }

    /// Error bound for each coefficient.
    pub fn error(&self) -> f64 {
        self.sample_error + self.aliasing_bound + self.rounding
    }

    /// Largest `k` whose coefficient exceeds ten times its error bound.
    pub fn significant_k(&self) -> i64 {
        (0..=self.k_max()).rev().find(|&k| self.get(k).norm() > 10.0 * self.error()).unwrap_or(0)
    }
}

/// `omega_hat(k) = (1/M) sum_j H_j e^{-2 pi i k x_j}` with `x_j = -t_j`,
/// symmetrized so that `omega_hat(-k) = conj(omega_hat(k))`.
pub fn fourier_omega(samples: &OmegaSamples, k_max: usize, strip_half_width: f64) -> Result<OmegaFourier> {
    let m = samples.values.len();
    if m < 4 * k_max.max(1) {
        return Err(Error::InsufficientSamples(format!("{m} samples for K = {k_max}, need at least {}", 4 * k_max.max(1))));
    }
    let kk = k_max as i64;
    let raw: Vec<Complex64> = (-kk..=kk)
        .map(|k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (t, h) in samples.t.iter().zip(&samples.values) {
                let x = -t;
                acc += Complex64::new(h[0], h[1]) * Complex64::from_polar(1.0, -2.0 * PI * k as f64 * x);
            }
            acc / m as f64
        })
        .collect();
    let hmax = samples.values.iter().map(|h| h[0].hypot(h[1])).fold(0.0, f64::max);
    let rounding = 8.0 * f64::EPSILON * hmax * (m as f64).sqrt();
    let mut defect = 0.0f64;
    let coefficients: Vec<FourierCoefficient> = (-kk..=kk)
        .map(|k| {
            let a = raw[(k + kk) as usize];
            let b = raw[(-k + kk) as usize].conj();
            defect = defect.max((a - b).norm());
            FourierCoefficient::new(k, (a + b) / 2.0)
        })
        .collect();
    // decay envelope A e^{-2 pi |k| b} fitted to coefficients above the noise
    let b = 0.9 * strip_half_width;
    let noise = 10.0 * (samples.sample_error + rounding);
    let mut amp = coefficients[kk as usize].abs() + noise;
    for c in &coefficients {
        if c.k > 0 && c.abs() > noise {
            amp = amp.max(c.abs() * (2.0 * PI * c.k as f64 * b).exp());
        }
    }
    let mm = m as f64;
    let aliasing_bound = 2.0 * amp * (-2.0 * PI * (mm - kk as f64) * b).exp() / (1.0 - (-2.0 * PI * mm * b).exp());
    Ok(OmegaFourier {
        coefficients,
        aliasing_bound,
        rounding,
        sample_error: samples.sample_error,
        envelope: amp,
        decay_rate: b,
        symmetry_defect: defect,
    })
}

/// `1 - (ln mu - 2 k pi i) / ln tau`, the Gamma argument for `sigma_hat(k)`.
///
/// Transferring `omega_hat(k) (1-z)^{alpha + 2 pi i k / ln tau}` gives
/// `n^{-d_s/2} e^{-2 pi i k log_tau n} / Gamma(1 - d_s/2 - 2 pi i k / ln tau)`,
/// so with `omega(x) = sum omega_hat(k) e^{2 pi i k x}` the coefficient of
/// `e^{2 pi i k t}` in `sigma` carries `+2 pi i k / ln tau`.
pub fn transfer_argument(sp: &ScalingParams, k: i64) -> Complex64 {
    let lt = sp.ln_tau();
    Complex64::new(1.0 - (sp.mu as f64).ln() / lt, 2.0 * PI * k as f64 / lt)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SigmaFourier {
    pub coefficients: Vec<FourierCoefficient>,
    /// Bound on `sum_{|k| > K} |sigma_hat(k)|` from the decay envelope.
    pub tail_bound: f64,
    /// Error of the kept coefficients propagated through `1/Gamma`.
    pub propagated_error: f64,
}

impl SigmaFourier {
    pub fn k_max(&self) -> i64 {
        (self.coefficients.len() as i64 - 1) / 2
    }

    pub fn get(&self, k: i64) -> Complex64 {
        let kk = self.k_max();
        if k.abs() > kk {
            return Complex64::new(0.0, 0.0);
        }
        self.coefficients[(k + kk) as usize].value()
    }

    /// Truncated Fourier sum `sum_k sigma_hat(k) e^{2 pi i k t}`.
    pub fn eval(&self, t: f64) -> Complex64 {
        self.coefficients
            .iter()
            .map(|c| c.value() * Complex64::from_polar(1.0, 2.0 * PI * c.k as f64 * t))
            .sum()
    }
}

/// `ln(1 / |Gamma(x + iy)|)` upper bound from Stirling, `|y| >= 1`.
fn log_inv_gamma_bound(x: f64, y: f64) -> f64 {
    let y = y.abs();
    PI * y / 2.0 + (0.5 - x) * y.ln() - 0.5 * (2.0 * PI).ln() + 0.1
}

/// `sigma_hat(k) = omega_hat(-k) / Gamma(transfer_argument(k))`.
///
/// Coefficients are kept up to the largest significant `omega_hat(k)`; the
/// division by Gamma amplifies the error of the rest exponentially, so they
/// enter through the envelope bound instead.
pub fn sigma_from_omega(omega: &OmegaFourier, sp: &ScalingParams) -> Result<SigmaFourier> {
    let kk = omega.significant_k();
    let mut coefficients = Vec::with_capacity(2 * kk as usize + 1);
    let mut propagated = 0.0;
    for k in -kk..=kk {
        let g = complex_gamma(transfer_argument(sp, k), 64)?;
        coefficients.push(FourierCoefficient::new(k, omega.get(-k) / g));
        propagated += omega.error() / g.norm();
    }
    let x = 1.0 - sp.d_s / 2.0;
    let mut tail = 0.0;
    for k in kk + 1..kk + 400 {
        let y = 2.0 * PI * k as f64 / sp.ln_tau();
        let log_term = omega.envelope.ln() - 2.0 * PI * k as f64 * omega.decay_rate + log_inv_gamma_bound(x, y);
        tail += 2.0 * log_term.exp();
    }
    Ok(SigmaFourier { coefficients, tail_bound: tail, propagated_error: propagated })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErrorBudget {
    pub sample: f64,
    pub aliasing: f64,
    pub fourier_tail: f64,
    pub gamma: f64,
}

impl ErrorBudget {
    pub fn total(&self) -> f64 {
        self.sample + self.aliasing + self.fourier_tail + self.gamma
    }

}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AsymptoticProfile {
    pub omega_hat: Vec<FourierCoefficient>,
    pub sigma_hat: Vec<FourierCoefficient>,
    pub d_s: f64,
    #[serde(serialize_with = "crate::serde_util::rational")]
    pub tau: rug::Rational,
    pub mu: usize,
    pub strip_half_width: f64,
    pub bipartite: bool,
    pub sample_error: f64,
    /// Error bound of each `omega_hat(k)`.
    pub omega_hat_error: f64,
    /// Error budget of `sigma(t)`.
    pub budget: ErrorBudget,
    #[serde(skip)]
    pub sigma: SigmaFourier,
}

impl AsymptoticProfile {
    pub fn from_samples(samples: &OmegaSamples, sp: &ScalingParams, k_max: usize, bipartite: bool) -> Result<Self> {
        if sp.beta != 1 {
            return Err(Error::UnboundedGeometry(sp.beta as u64));
        }
        let omega = fourier_omega(samples, k_max, sp.strip_half_width())?;
        let sigma = sigma_from_omega(&omega, sp)?;
        let sigma_abs: f64 = sigma.coefficients.iter().map(|c| c.abs()).sum();
        let share = |e: f64| sigma.propagated_error * e / omega.error();
        let budget = ErrorBudget {
            sample: share(omega.sample_error + omega.rounding),
            aliasing: share(omega.aliasing_bound),
            fourier_tail: sigma.tail_bound,
            gamma: GAMMA_RELATIVE_ERROR * sigma_abs,
        };
        Ok(Self {
            omega_hat: omega.coefficients.clone(),
            sigma_hat: sigma.coefficients.clone(),
            d_s: sp.d_s,
            tau: sp.tau.clone(),
            mu: sp.mu,
            strip_half_width: sp.strip_half_width(),
            bipartite,
            sample_error: samples.sample_error,
            omega_hat_error: omega.error(),
            budget,
            sigma,
        })
    }

    /// Real part of `sigma(t)`; the imaginary part is checked against the
    /// error budget.
    pub fn sigma_at(&self, t: f64) -> Result<f64> {
        let v = self.sigma.eval(t);
        if v.im.abs() > self.budget.total() + 1e-12 * v.re.abs() {
            return Err(Error::TheoremViolation(format!("sigma({t}) has imaginary part {:e}", v.im)));
        }
        Ok(v.re)
    }

    pub fn omega_hat_at(&self, k: i64) -> Complex64 {
        let kk = (self.omega_hat.len() as i64 - 1) / 2;
        if k.abs() > kk {
            return Complex64::new(0.0, 0.0);
        }
        self.omega_hat[(k + kk) as usize].value()
    }

    /// Largest imaginary part of `sigma` on an `n`-point grid of `[0, 1)`.
    pub fn max_sigma_imaginary(&self, n: usize) -> f64 {
        (0..n).map(|j| self.sigma.eval(j as f64 / n as f64).im.abs()).fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualRow {
    pub n: usize,
    pub p_n: f64,
    pub fitted: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualWindow {
    pub lo: usize,
    pub hi: usize,
    pub max_abs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitReport {
    pub rows: Vec<ResidualRow>,
    pub windows: Vec<ResidualWindow>,
    /// Least-squares slope of `log max|r_n|` against `log n` over windows.
    pub exponent: Option<f64>,
}

/// Residuals `r_n = p_n n^{d_s/2} - sigma(log n / log tau)`, or in the
/// bipartite case `p_{2n} (2n)^{d_s/2} / 2 - sigma(log 2n / log tau)`,
/// for step counts `n` in `[n_lo, n_hi]`.
pub fn asymptotic_fit(gs: &GreenSeries, profile: &AsymptoticProfile, n_lo: usize, n_hi: usize) -> Result<FitReport> {
    fit_with_factor(gs, profile, n_lo, n_hi, if gs.bipartite { 2.0 } else { 1.0 })
}

/// As [`asymptotic_fit`] with an explicit normalizing factor; used for the
/// negative control that drops the bipartite factor 2.
pub fn fit_with_factor(gs: &GreenSeries, profile: &AsymptoticProfile, n_lo: usize, n_hi: usize, factor: f64) -> Result<FitReport> {
    let n_hi = n_hi.min(gs.len().saturating_sub(1));
    let ln_tau = profile.tau.to_f64().ln();
    let step = if gs.bipartite { 2 } else { 1 };
    let mut rows = Vec::new();
    let mut n = n_lo.max(1);
    if gs.bipartite && n % 2 == 1 {
        n += 1;
    }
    while n <= n_hi {
        let nf = n as f64;
        let sigma = profile.sigma_at(nf.ln() / ln_tau)?;
        let p = gs.get_f64(n);
        let fitted = factor * nf.powf(-profile.d_s / 2.0) * sigma;
        let residual = p * nf.powf(profile.d_s / 2.0) / factor - sigma;
        rows.push(ResidualRow { n, p_n: p, fitted, residual });
        n += step;
    }
    let mut windows: Vec<ResidualWindow> = Vec::new();
    for r in &rows {
        let lo = 1usize << (usize::BITS - 1 - r.n.leading_zeros());
        match windows.last_mut() {
            Some(w) if w.lo == lo => w.max_abs = w.max_abs.max(r.residual.abs()),
            _ => windows.push(ResidualWindow { lo, hi: 2 * lo - 1, max_abs: r.residual.abs() }),
        }
    }
    let pts: Vec<(f64, f64)> = windows
        .iter()
        .filter(|w| w.max_abs > 0.0)
        .map(|w| (((w.lo as f64) * (w.hi as f64)).sqrt().ln(), w.max_abs.ln()))
        .collect();
    let exponent = if pts.len() >= 2 {
        let k = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        Some(sxy / sxx)
    } else {
        None
    };
    Ok(FitReport { rows, windows, exponent })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioRow {
    pub n: usize,
    /// `p^(n)(x,y) / p^(n-r)(o,o)`.
    pub raw: f64,
    /// `raw * deg(o) / deg(y)`, whose limit is 1.
    pub normalized: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioReport {
    pub x: usize,
    pub y: usize,
    pub distance: usize,
    pub parity: usize,
    pub bipartite: bool,
    pub degree_ratio: f64,
    pub rows: Vec<RatioRow>,
    /// `(lo, hi, max |normalized - 1|)` over dyadic windows of `n`.
    pub windows: Vec<(usize, usize, f64)>,
}

impl RatioReport {
    pub fn last(&self) -> Option<&RatioRow> {
        self.rows.last()
    }
}

fn step_distribution(adj: &[Vec<usize>], v: &[f64]) -> Vec<f64> {
    (0..adj.len())
        .into_par_iter()
        .map(|w| adj[w].iter().map(|&u| v[u] / adj[u].len() as f64).sum())
        .collect()
}

/// `p^(n)(s,t)` for `n = 0..=N` from two walkers, from `s` and from `t`,
/// advanced alternately so that only four vectors are held.
fn paired_sequence(adj: &[Vec<usize>], s: usize, t: usize, n_max: usize) -> Vec<f64> {
    let nv = adj.len();
    let mut u = vec![0.0; nv];
    u[s] = 1.0;
    let mut v = vec![0.0; nv];
    v[t] = 1.0;
    let deg_t = adj[t].len() as f64;
    let inner = |u: &[f64], v: &[f64]| -> f64 {
        u.par_iter().zip(v.par_iter()).enumerate().map(|(w, (p, q))| p * q * deg_t / adj[w].len() as f64).sum()
    };
    let mut out = vec![inner(&u, &v)];
    for n in 1..=n_max {
        // p^(a+b)(s,t) with a = ceil(n/2) steps from s and b = floor(n/2) from t
        if n % 2 == 1 {
            u = step_distribution(adj, &u);
        } else {
            v = step_distribution(adj, &v);
        }
        out.push(inner(&u, &v));
    }
    out
}

/// Largest `N` for which [`ratio_limit_check`] is valid on `b`.
pub fn ratio_limit_horizon(b: &BlowupGraph, radius: usize, x: usize, y: usize) -> usize {
    let o = b.origin().unwrap_or(0);
    let dist = b.distances_from(o);
    let far = dist[x].max(dist[y]);
    2 * radius.saturating_sub(far)
}

/// `p^(n)(x,y)` against `p^(n)(o,o)` for `n <= N`, by splitting each walk in
/// the middle: `p^(a+b)(x,y) = sum_w p^(a)(x,w) p^(b)(y,w) deg(y)/deg(w)`.
///
/// The walks of length `ceil(N/2)` from `x`, `y` and `o` must stay inside
/// the safe ball of radius `radius` around the origin.
pub fn ratio_limit_check(b: &BlowupGraph, radius: usize, x: usize, y: usize, n_max: usize) -> Result<RatioReport> {
    Ok(ratio_limit_checks(b, radius, &[(x, y)], n_max)?.pop().unwrap())
}

/// [`ratio_limit_check`] for several pairs sharing one origin sequence.
pub fn ratio_limit_checks(b: &BlowupGraph, radius: usize, pairs: &[(usize, usize)], n_max: usize) -> Result<Vec<RatioReport>> {
    let o = b.origin().ok_or(Error::NoOrigin)?;
    let nv = b.vertex_count();
    for &(x, y) in pairs {
        if x >= nv || y >= nv {
            return Err(Error::IndexOutOfRange(format!("vertex {} of {nv}", x.max(y))));
        }
        let h = ratio_limit_horizon(b, radius, x, y);
        if n_max > h {
            return Err(Error::Truncation(format!("N = {n_max} exceeds the valid horizon {h} of the blow-up")));
        }
    }
    let adj = b.adjacency();
    let bip = {
        let d0 = bfs(adj, 0);
        b.edges().iter().all(|&(u, v)| d0[u] % 2 != d0[v] % 2)
    };
    let den = paired_sequence(adj, o, o, n_max);
    let deg_o = b.degree(o) as f64;
    let mut out = Vec::with_capacity(pairs.len());
    for &(x, y) in pairs {
        let dxy = bfs(adj, x)[y];
        let r = if bip { dxy % 2 } else { 0 };
        let num = paired_sequence(adj, x, y, n_max);
        let deg_y = b.degree(y) as f64;
        let mut rows = Vec::new();
        for n in 1..=n_max {
            if bip && n % 2 != r {
                continue;
            }
            if den[n - r] == 0.0 {
                continue;
            }
            let raw = num[n] / den[n - r];
            rows.push(RatioRow { n, raw, normalized: raw * deg_o / deg_y });
        }
        let mut windows: Vec<(usize, usize, f64)> = Vec::new();
        for row in &rows {
            let lo = 1usize << (usize::BITS - 1 - row.n.leading_zeros());
            let dev = (row.normalized - 1.0).abs();
            match windows.last_mut() {
                Some(w) if w.0 == lo => w.2 = w.2.max(dev),
                _ => windows.push((lo, 2 * lo - 1, dev)),
            }
        }
        out.push(RatioReport { x, y, distance: dxy, parity: r, bipartite: bip, degree_ratio: deg_y / deg_o, rows, windows });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_classical_values() {
        let g = complex_gamma(Complex64::new(0.5, 0.0), 64).unwrap();
        assert!((g.re - PI.sqrt()).abs() < 1e-14 && g.im.abs() < 1e-15);
        let g = complex_gamma(Complex64::new(1.0, 0.0), 64).unwrap();
        assert!((g.re - 1.0).abs() < 1e-14);
        assert!(complex_gamma(Complex64::new(-2.0, 0.0), 64).is_err());
        let g = complex_gamma(Complex64::new(-0.5, 0.0), 64).unwrap();
        assert!((g.re + 2.0 * PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn constant_samples_have_only_mean() {
        let m = 32;
        let s = OmegaSamples {
            t: (0..m).map(|j| 12.0 + j as f64 / m as f64).collect(),
            values: vec![[0.3, 0.0]; m],
            values_big: Vec::new(),
            sample_error: 1e-14,
            shift: 12,
            precision: 64,
        };
        let f = fourier_omega(&s, 8, 1.0).unwrap();
        assert!((f.get(0).re - 0.3).abs() < 1e-14);
        for k in 1..=8 {
            assert!(f.get(k).norm() < 1e-14 && f.get(-k).norm() < 1e-14);
        }
        assert!(fourier_omega(&s, 9, 1.0).is_err());
    }
}
