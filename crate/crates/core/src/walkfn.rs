//! Absorbed-walk resolvents on a cell graph and the functions derived from
//! them: the transition function `d`, the return function `f`, the first
//! return functions `u` and `u_hat`, and the scaling constants.
//!
//! All linear algebra is exact. The systems are solved on the non-absorbed
//! vertices `U` with the symmetric matrix `K = D_U - z A_UU`, which has
//! integer polynomial entries, by fraction-free (Bareiss) elimination.

use rayon::prelude::*;
use rug::{Float, Rational};
use serde::Serialize;

use crate::cellgraph::{invariant_measure, CellGraph};
use crate::error::{Error, Result};
use crate::exactalg::{IntPoly, Polynomial, RationalFunction};

/// Solve `K y = b` over Q(z) for a square matrix of integer polynomials.
///
/// Bareiss elimination (no pivoting needed when every leading principal minor
/// is a nonzero polynomial, which holds for `K` since `K(0)` is a positive
/// diagonal) followed by fraction-free back substitution of `det * y`.
pub fn bareiss_solve(mut a: Vec<Vec<IntPoly>>, mut b: Vec<IntPoly>) -> Result<Vec<RationalFunction>> {
    let n = a.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut prev = IntPoly::constant(1);
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return Err(Error::Internal("singular resolvent system".into()));
            };
            a.swap(k, p);
            b.swap(k, p);
        }
        let (head, tail) = a.split_at_mut(k + 1);
        let pivot_row = &head[k];
        let pivot = &pivot_row[k];
        let bk = b[k].clone();
        tail.par_iter_mut().zip(b[k + 1..].par_iter_mut()).for_each(|(row, bi)| {
            let factor = row[k].clone();
            for j in k + 1..n {
                let t = pivot.mul(&row[j]).sub(&factor.mul(&pivot_row[j]));
                row[j] = t.exact_div(&prev).expect("Bareiss quotient is exact");
            }
            let t = pivot.mul(bi).sub(&factor.mul(&bk));
            *bi = t.exact_div(&prev).expect("Bareiss quotient is exact");
            row[k] = IntPoly::zero();
        });
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    if det.is_zero() {
        return Err(Error::Internal("singular resolvent system".into()));
    }
    // numerators N_i = det * y_i are polynomials; divisions below are exact
    let mut num = vec![IntPoly::zero(); n];
    for i in (0..n).rev() {
        let mut acc = det.mul(&b[i]);
        for j in i + 1..n {
            if !a[i][j].is_zero() {
                acc = acc.sub(&a[i][j].mul(&num[j]));
            }
        }
        num[i] = acc
            .exact_div(&a[i][i])
            .ok_or_else(|| Error::Internal("inexact back substitution".into()))?;
    }
    let den = det.to_polynomial();
    num.into_par_iter().map(|p| RationalFunction::new(p.to_polynomial(), den.clone())).collect()
}

/// Matrix `D_U - z A_UU` on the vertices not in `absorbing`, with the index
/// map from vertex id to row.
fn reduced_system(cell: &CellGraph, absorbing: &[usize]) -> (Vec<usize>, Vec<Option<usize>>, Vec<Vec<IntPoly>>) {
    let n = cell.vertex_count();
    let free: Vec<usize> = (0..n).filter(|v| !absorbing.contains(v)).collect();
    let mut pos = vec![None; n];
    for (i, &v) in free.iter().enumerate() {
        pos[v] = Some(i);
    }
    let mut k = vec![vec![IntPoly::zero(); free.len()]; free.len()];
    for (i, &v) in free.iter().enumerate() {
        k[i][i] = IntPoly::constant(cell.degree(v) as i64);
        for &w in cell.neighbors(v) {
            if let Some(j) = pos[w] {
                k[i][j] = IntPoly::monomial(-1, 1);
            }
        }
    }
    (free, pos, k)
}

/// Row `v` of `(I - z Q_B)^{-1}` with `B` the boundary minus `v`; rows of
/// absorbed vertices of `Q_B` are zero. Indexed by vertex id.
pub fn absorbed_resolvent_row(cell: &CellGraph, v: usize) -> Result<Vec<RationalFunction>> {
    if !cell.is_boundary(v) {
        return Err(Error::IndexOutOfRange(format!("vertex {v} is not a boundary vertex")));
    }
    let absorbing: Vec<usize> = cell.boundary().iter().copied().filter(|&b| b != v).collect();
    resolvent_row(cell, &absorbing, v)
}

/// Row `v` of the resolvent for an arbitrary absorbing set not containing `v`.
///
/// With `x^T (I - zQ) = e_v^T` and `y = D^{-1} x` on the free vertices, the
/// free part solves `K y = e_v`; absorbed entries are `x_w = z * sum y_u`
/// over free neighbours `u` of `w`.
pub fn resolvent_row(cell: &CellGraph, absorbing: &[usize], v: usize) -> Result<Vec<RationalFunction>> {
    let (free, pos, k) = reduced_system(cell, absorbing);
    let row = pos[v].ok_or_else(|| Error::IndexOutOfRange(format!("vertex {v} is absorbing")))?;
    let mut rhs = vec![IntPoly::zero(); free.len()];
    rhs[row] = IntPoly::constant(1);
    let y = bareiss_solve(k, rhs)?;
    let z = RationalFunction::z();
    let mut out = Vec::with_capacity(cell.vertex_count());
    for x in 0..cell.vertex_count() {
        let entry = match pos[x] {
            Some(i) => y[i].scale(&Rational::from(cell.degree(x) as u64)),
            None => {
                let mut acc = RationalFunction::zero();
                for &u in cell.neighbors(x) {
                    if let Some(i) = pos[u] {
                        acc = acc.add(&y[i]);
                    }
                }
                acc.mul(&z)
            }
        };
        out.push(entry);
    }
    Ok(out)
}

/// Column `target` of the resolvent for the absorbing set `absorbing`, which
/// must contain `target`: entry `x` is the generating function of first
/// arrival at `target` from `x` before any other absorbing vertex.
pub fn resolvent_column(cell: &CellGraph, absorbing: &[usize], target: usize) -> Result<Vec<RationalFunction>> {
    if !absorbing.contains(&target) {
        return Err(Error::IndexOutOfRange(format!("vertex {target} is not absorbing")));
    }
    let (free, pos, k) = reduced_system(cell, absorbing);
    let rhs: Vec<IntPoly> = free
        .iter()
        .map(|&y| if cell.has_edge(y, target) { IntPoly::monomial(1, 1) } else { IntPoly::zero() })
        .collect();
    let x = bareiss_solve(k, rhs)?;
    Ok((0..cell.vertex_count())
        .map(|v| match pos[v] {
            Some(i) => x[i].clone(),
            None if v == target => RationalFunction::one(),
            None => RationalFunction::zero(),
        })
        .collect())
}

/// Generating function of the first return to `v` when the walk is killed on
/// `absorbing` (which must contain `v`).
fn first_return(cell: &CellGraph, absorbing: &[usize], v: usize) -> Result<RationalFunction> {
    let col = resolvent_column(cell, absorbing, v)?;
    let mut acc = RationalFunction::zero();
    for &w in cell.neighbors(v) {
        acc = acc.add(&col[w]);
    }
    Ok(acc.mul(&RationalFunction::z()).scale(&Rational::from((1, cell.degree(v) as u64))))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WalkFunctions {
    pub d: RationalFunction,
    pub f: RationalFunction,
    pub u: RationalFunction,
    pub u_hat: RationalFunction,
    /// Whether the cell graph (hence the blow-up) is bipartite.
    pub bipartite: bool,
}

impl WalkFunctions {
    /// Whether odd-step return probabilities vanish: `f` even and `d` of
    /// definite parity.
    pub fn green_is_even(&self) -> bool {
        self.f.is_even() && (self.d.is_even() || self.d.is_odd())
    }
}

/// Closed form of the unrestricted first return function from `u`, `d`, `f`.
pub fn u_hat_closed_form(theta: usize, d: &RationalFunction, f: &RationalFunction, u: &RationalFunction) -> Result<RationalFunction> {
    let t = theta as u64;
    let ratio = Rational::from((t - 2, t - 1));
    let inner = RationalFunction::one().sub(&d.scale(&ratio));
    let den = f.scale(&Rational::from(t - 1)).mul(&inner);
    Ok(u.add(&d.mul(d).div(&den)?))
}

fn vertex_functions(cell: &CellGraph, v: usize) -> Result<(RationalFunction, RationalFunction, Vec<RationalFunction>)> {
    let row = absorbed_resolvent_row(cell, v)?;
    let mut d = RationalFunction::zero();
    for &w in cell.boundary() {
        if w != v {
            d = d.add(&row[w]);
        }
    }
    Ok((d, row[v].clone(), row))
}

/// Compute `d`, `f`, `u`, `u_hat` and cross-check them.
///
/// Every boundary vertex yields the same `d` and `f`; each off-`v` boundary
/// entry of the resolvent row equals `d/(theta-1)`; `f = 1/(1-u)` with `u`
/// computed directly; `u_hat` agrees with its closed form.
pub fn transition_return_functions(cell: &CellGraph) -> Result<WalkFunctions> {
    let theta = cell.theta();
    let per_vertex: Vec<_> = cell
        .boundary()
        .par_iter()
        .map(|&v| vertex_functions(cell, v))
        .collect::<Result<Vec<_>>>()?;
    let v = cell.boundary()[0];
    let (d, f, _) = per_vertex[0].clone();
    let share = d.scale(&Rational::from((1, theta as u64 - 1)));
    for (i, (dv, fv, row)) in per_vertex.iter().enumerate() {
        let b = cell.boundary()[i];
        if *dv != d || *fv != f {
            return Err(Error::Symmetry(format!(
                "boundary vertex {b} gives d = {dv}, f = {fv}; vertex {v} gives d = {d}, f = {f}"
            )));
        }
        for &w in cell.boundary() {
            if w != b && row[w] != share {
                return Err(Error::Symmetry(format!(
                    "resolvent entry ({b}, {w}) = {} differs from d/(theta-1) = {share}",
                    row[w]
                )));
            }
        }
    }
    let u = RationalFunction::one().sub(&f.recip()?);
    let u_direct = first_return(cell, cell.boundary(), v)?;
    if u != u_direct {
        return Err(Error::TheoremViolation(format!("f = 1/(1-u) fails: 1 - 1/f = {u}, direct u = {u_direct}")));
    }
    let u_hat = u_hat_closed_form(theta, &d, &f, &u)?;
    let u_hat_direct = first_return(cell, &[v], v)?;
    if u_hat != u_hat_direct {
        return Err(Error::TheoremViolation(format!(
            "first-return identity fails: closed form {u_hat}, direct {u_hat_direct}"
        )));
    }
    let wf = WalkFunctions { d, f, u, u_hat, bipartite: crate::cellgraph::is_bipartite(cell).bipartite };
    check_walk_functions(&wf)?;
    Ok(wf)
}

/// `d(0)=0`, `d(1)=1`, `f(0)=1`, `ord_0 d >= 2`.
pub fn check_walk_functions(wf: &WalkFunctions) -> Result<()> {
    let zero = Rational::new();
    let one = Rational::from(1);
    let fail = |m: String| Err(Error::TheoremViolation(m));
    if wf.d.eval(&zero) != Some(zero.clone()) {
        return fail(format!("d(0) != 0 for d = {}", wf.d));
    }
    if wf.d.eval(&one) != Some(one.clone()) {
        return fail(format!("d(1) = {:?}, expected 1", wf.d.eval(&one)));
    }
    if wf.f.eval(&zero) != Some(one.clone()) {
        return fail(format!("f(0) = {:?}, expected 1", wf.f.eval(&zero)));
    }
    if wf.d.order_at_zero().unwrap_or(0) < 2 {
        return fail(format!("d vanishes to order < 2 at 0: {}", wf.d));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingParams {
    pub theta: usize,
    pub mu: usize,
    pub beta: usize,
    #[serde(serialize_with = "crate::serde_util::rational")]
    pub tau: Rational,
    #[serde(serialize_with = "crate::serde_util::rational")]
    pub rho: Rational,
    pub d_s: f64,
    pub alpha: f64,
}

impl ScalingParams {
    /// `d_s = 2 ln(mu) / ln(tau)` at `prec` bits.
    pub fn d_s_float(&self, prec: u32) -> Float {
        let lm = Float::with_val(prec, self.mu).ln();
        let lt = Float::with_val(prec, &self.tau).ln();
        Float::with_val(prec, 2 * lm / lt)
    }

    pub fn alpha_float(&self, prec: u32) -> Float {
        self.d_s_float(prec) / 2u32 - 1u32
    }

    pub fn ln_tau(&self) -> f64 {
        self.tau.to_f64().ln()
    }

    /// Half-width `pi / ln(tau)` of the strip where the periodic functions are
    /// holomorphic.
    pub fn strip_half_width(&self) -> f64 {
        std::f64::consts::PI / self.ln_tau()
    }
}

/// One checked identity, with both sides as printed rationals.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub lhs: String,
    pub rhs: String,
    pub holds: bool,
}

fn identity(name: &str, lhs: &Rational, rhs: &Rational) -> IdentityCheck {
    IdentityCheck { name: name.into(), lhs: lhs.to_string(), rhs: rhs.to_string(), holds: lhs == rhs }
}

/// Exact checks of the scaling identities for a cell and its functions.
pub fn scaling_identities(cell: &CellGraph, wf: &WalkFunctions) -> Result<(ScalingParams, Vec<IdentityCheck>)> {
    let one = Rational::from(1);
    let v = cell.boundary()[0];
    let beta = cell.beta(v);
    if cell.boundary().iter().any(|&b| cell.beta(b) != beta) {
        return Err(Error::Axiom("boundary vertices have different branching numbers".into()));
    }
    let (mu, theta) = (cell.mu(), cell.theta());
    let tau = wf.d.derivative().eval(&one).ok_or_else(|| Error::Pole("d' has a pole at 1".into()))?;
    let f1 = wf.f.eval(&one).ok_or_else(|| Error::Pole("f has a pole at 1".into()))?;
    let rho = Rational::from(&tau / mu as u64);
    let uh1 = wf.u_hat.derivative().eval(&one).ok_or_else(|| Error::Pole("u_hat' has a pole at 1".into()))?;
    let m = invariant_measure(cell)?;
    let mut checks = vec![
        identity("f(1) = beta*rho", &f1, &Rational::from(&rho * beta as u64)),
        identity("tau = mu*rho", &tau, &Rational::from(&rho * mu as u64)),
        identity("u_hat'(1) = mu*theta/beta", &uh1, &Rational::from(((mu * theta) as u64, beta as u64))),
        identity("u_hat'(1) * m(v) = 1", &Rational::from(&uh1 * &m[v]), &one),
    ];
    let lhs = Rational::from(&tau * beta as u64);
    checks.push(IdentityCheck {
        name: "tau*beta > mu".into(),
        lhs: lhs.to_string(),
        rhs: mu.to_string(),
        holds: lhs > mu as u64,
    });
    checks.push(IdentityCheck { name: "tau > 1".into(), lhs: tau.to_string(), rhs: "1".into(), holds: tau > 1 });
    let d_s = 2.0 * (mu as f64).ln() / tau.to_f64().ln();
    if beta == 1 {
        checks.push(IdentityCheck {
            name: "0 < d_s < 2".into(),
            lhs: format!("{d_s}"),
            rhs: "(0, 2)".into(),
            holds: d_s > 0.0 && d_s < 2.0,
        });
    }
    let sp = ScalingParams { theta, mu, beta, tau, rho, d_s, alpha: d_s / 2.0 - 1.0 };
    Ok((sp, checks))
}

/// Scaling constants, failing with a theorem violation if any identity fails.
pub fn scaling_parameters(cell: &CellGraph, wf: &WalkFunctions) -> Result<ScalingParams> {
    let (sp, checks) = scaling_identities(cell, wf)?;
    if let Some(c) = checks.iter().find(|c| !c.holds) {
        return Err(Error::TheoremViolation(format!("{}: lhs = {}, rhs = {}", c.name, c.lhs, c.rhs)));
    }
    Ok(sp)
}

/// `q(z) = (1 - d(z)) / (1 - z)`, a rational function since `d(1) = 1`.
pub fn q_function(d: &RationalFunction) -> Result<RationalFunction> {
    let one_minus = |r: &RationalFunction| RationalFunction::one().sub(r);
    one_minus(d).div(&one_minus(&RationalFunction::z()))
}

/// Transition function of the line of length `n` in closed form:
/// `z^n / sum_k C(n,2k) (1-z^2)^k`.
pub fn line_transition_closed_form(n: usize) -> RationalFunction {
    let one_minus_sq = Polynomial::from_ints(&[1, 0, -1]);
    let mut den = Polynomial::zero();
    let mut binom = rug::Integer::from(1);
    for k in 0..=n {
        if k % 2 == 0 {
            den = &den + &one_minus_sq.pow((k / 2) as u32).scale(&Rational::from(binom.clone()));
        }
        binom = binom * (n - k) as u64 / (k + 1) as u64;
    }
    RationalFunction::new(Polynomial::monomial(Rational::from(1), n), den).expect("nonzero denominator")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn q(a: i64, b: i64) -> Rational {
        Rational::from((a, b))
    }

    #[test]
    fn two_edge_line_row() {
        let g = fixtures::line(2).unwrap();
        let row = absorbed_resolvent_row(&g, 0).unwrap();
        assert_eq!(row[0], RationalFunction::from_ints(&[2], &[2, 0, -1]).unwrap());
        assert_eq!(row[2], RationalFunction::from_ints(&[0, 0, 1], &[2, 0, -1]).unwrap());
        for (x, e) in row.iter().enumerate() {
            let want = if x == 0 { q(1, 1) } else { q(0, 1) };
            assert_eq!(e.eval(&q(0, 1)).unwrap(), want);
        }
    }

    #[test]
    fn flake_row_is_symmetric() {
        let g = fixtures::flake(3).unwrap();
        let b = g.boundary().to_vec();
        let row = absorbed_resolvent_row(&g, b[0]).unwrap();
        assert_eq!(row[b[1]], row[b[2]]);
    }

    #[test]
    fn closed_forms() {
        for n in 2..=5 {
            let wf = transition_return_functions(&fixtures::line(n).unwrap()).unwrap();
            assert_eq!(wf.d, line_transition_closed_form(n));
        }
        for n in 2..=5i64 {
            let wf = transition_return_functions(&fixtures::flake(n as usize).unwrap()).unwrap();
            let want = RationalFunction::from_ints(&[0, 0, 1], &[n * (n - 1), -2 * n * (n - 2), n * n - 3 * n + 1]).unwrap();
            assert_eq!(wf.d, want);
        }
        let g = fixtures::sierpinski(2, 2).unwrap();
        let wf = transition_return_functions(&g).unwrap();
        assert_eq!(wf.d, RationalFunction::from_ints(&[0, 0, 1], &[4, -3]).unwrap());
        assert_eq!(wf.f.eval(&q(1, 1)).unwrap(), q(5, 3));
    }

    #[test]
    fn flake_parameters() {
        let g = fixtures::flake(4).unwrap();
        let wf = transition_return_functions(&g).unwrap();
        let sp = scaling_parameters(&g, &wf).unwrap();
        assert_eq!((sp.theta, sp.mu, sp.beta), (4, 4, 1));
        assert_eq!(sp.tau, 8);
        assert_eq!(sp.rho, 2);
    }

    #[test]
    fn sierpinski_3d_scale_4() {
        let g = fixtures::sierpinski(3, 4).unwrap();
        let wf = transition_return_functions(&g).unwrap();
        let want = RationalFunction::from_ints(
            &[0, 0, 0, 0, -486, 9, 23, 2],
            &[-104976, 227448, -156168, 31212, 2958, -887, -41, 2],
        )
        .unwrap();
        assert_eq!(wf.d, want);
        let sp = scaling_parameters(&g, &wf).unwrap();
        assert_eq!(sp.tau, q(4415, 113));
        assert_eq!(sp.rho, q(883, 452));
    }

    #[test]
    fn q_at_one_is_tau() {
        let wf = transition_return_functions(&fixtures::flake(3).unwrap()).unwrap();
        assert_eq!(q_function(&wf.d).unwrap().eval(&q(1, 1)).unwrap(), 6);
    }
}
