//! Brute-force ground truth: matrix powers, seeded Monte Carlo and the
//! geodesic product bound.
//!
//! Monte Carlo uses ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with
//! `seed_from_u64(seed)`; trials are split into [`MC_SHARDS`] fixed shards
//! and shard `s` draws from stream `s` of that key. Neighbour choice is
//! `random_range(0..deg)`. Shard results are integer counts merged in shard
//! order, so the output depends only on `(seed, trials)`.

use std::collections::{BTreeMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rug::Rational;
use serde::Serialize;

use crate::cellgraph::CellGraph;
use crate::error::{Error, Result};

/// A finite nearest-neighbour chain. Row `x` lists `(y, q(x,y))`; absorbing
/// rows are empty.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteChain {
    rows: Vec<Vec<(usize, Rational)>>,
    absorbing: Vec<bool>,
    /// Reversible measure, when one was established.
    measure: Option<Vec<Rational>>,
}

impl FiniteChain {
    /// Simple random walk on an adjacency list, with absorbing vertices.
    pub fn simple(adjacency: &[Vec<usize>], absorbing: &[usize]) -> Self {
        let n = adjacency.len();
        let mut abs = vec![false; n];
        for &a in absorbing {
            abs[a] = true;
        }
        let rows = adjacency
            .iter()
            .enumerate()
            .map(|(x, nb)| {
                if abs[x] || nb.is_empty() {
                    return Vec::new();
                }
                let p = Rational::from((1, nb.len() as u64));
                nb.iter().map(|&y| (y, p.clone())).collect()
            })
            .collect();
        let measure = absorbing.is_empty().then(|| adjacency.iter().map(|nb| Rational::from(nb.len() as u64)).collect());
        Self { rows, absorbing: abs, measure }
    }

    /// Simple random walk on a cell graph absorbed at `absorbing`.
    pub fn from_cell(cell: &CellGraph, absorbing: &[usize]) -> Self {
        let adj: Vec<Vec<usize>> = (0..cell.vertex_count()).map(|v| cell.neighbors(v).to_vec()).collect();
        Self::simple(&adj, absorbing)
    }

    /// Chain with `q(x,y)` proportional to the supplied positive directed
    /// weights (`x == y` gives a holding weight). Rejected unless detailed
    /// balance `m(x) q(x,y) = m(y) q(y,x)` holds for some positive `m`.
    pub fn weighted(n: usize, weights: &[(usize, usize, Rational)]) -> Result<Self> {
        let mut raw: Vec<BTreeMap<usize, Rational>> = vec![BTreeMap::new(); n];
        for (x, y, w) in weights {
            if *x >= n || *y >= n {
                return Err(Error::IndexOutOfRange(format!("edge ({x}, {y}) with {n} vertices")));
            }
            if *w <= 0 {
                return Err(Error::Structure(format!("weight {w} on ({x}, {y}) is not positive")));
            }
            *raw[*x].entry(*y).or_default() += w;
        }
        let rows: Vec<Vec<(usize, Rational)>> = raw
            .iter()
            .map(|r| {
                let total: Rational = r.values().fold(Rational::new(), |a, b| a + b);
                r.iter().map(|(&y, w)| (y, Rational::from(w / &total))).collect()
            })
            .collect();
        let mut chain = Self { rows, absorbing: vec![false; n], measure: None };
        chain.measure = Some(chain.reversible_measure().ok_or_else(|| {
            Error::Structure("weights violate detailed balance: the chain is not reversible".into())
        })?);
        Ok(chain)
    }

    /// Symmetric conductances `c(x,y) = c(y,x)` plus optional holding
    /// weights; always reversible with `m(x) = sum_y c(x,y)`.
    pub fn conductances(n: usize, edges: &[(usize, usize, Rational)], holding: &[(usize, Rational)]) -> Result<Self> {
        let mut w = Vec::new();
        for (x, y, c) in edges {
            w.push((*x, *y, c.clone()));
            w.push((*y, *x, c.clone()));
        }
        for (x, c) in holding {
            w.push((*x, *x, c.clone()));
        }
        Self::weighted(n, &w)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row(&self, x: usize) -> &[(usize, Rational)] {
        &self.rows[x]
    }

    pub fn is_absorbing(&self, x: usize) -> bool {
        self.absorbing[x]
    }

    pub fn measure(&self) -> Option<&[Rational]> {
        self.measure.as_deref()
    }

    pub fn q(&self, x: usize, y: usize) -> Rational {
        self.rows[x].iter().find(|(z, _)| *z == y).map(|(_, p)| p.clone()).unwrap_or_default()
    }

    /// Rows sum to 1, absorbing rows to 0.
    pub fn check_stochastic(&self) -> bool {
        self.rows.iter().zip(&self.absorbing).all(|(r, &a)| {
            let s: Rational = r.iter().fold(Rational::new(), |acc, (_, p)| acc + p);
            if a || r.is_empty() {
                s == 0
            } else {
                s == 1
            }
        })
    }

    /// A measure with `m(x) q(x,y) = m(y) q(y,x)` for all pairs, if any.
    pub fn reversible_measure(&self) -> Option<Vec<Rational>> {
        let n = self.len();
        let mut m: Vec<Option<Rational>> = vec![None; n];
        for s in 0..n {
            if m[s].is_some() {
                continue;
            }
            m[s] = Some(Rational::from(1));
            let mut queue = VecDeque::from([s]);
            while let Some(x) = queue.pop_front() {
                let mx = m[x].clone().unwrap();
                for (y, qxy) in &self.rows[x] {
                    if *y == x {
                        continue;
                    }
                    let qyx = self.q(*y, x);
                    if qyx == 0 {
                        return None;
                    }
                    let my = Rational::from(&mx * qxy) / qyx;
                    match &m[*y] {
                        Some(v) if *v != my => return None,
                        Some(_) => {}
                        None => {
                            m[*y] = Some(my);
                            queue.push_back(*y);
                        }
                    }
                }
            }
        }
        Some(m.into_iter().map(|v| v.unwrap()).collect())
    }

    fn predecessors(&self) -> Vec<Vec<(usize, f64)>> {
        let mut pred = vec![Vec::new(); self.len()];
        for (x, r) in self.rows.iter().enumerate() {
            for (y, p) in r {
                pred[*y].push((x, p.to_f64()));
            }
        }
        pred
    }

    fn predecessors_exact(&self) -> Vec<Vec<(usize, Rational)>> {
        let mut pred = vec![Vec::new(); self.len()];
        for (x, r) in self.rows.iter().enumerate() {
            for (y, p) in r {
                pred[*y].push((x, p.clone()));
            }
        }
        pred
    }

    /// Graph distances from `s` along positive transitions.
    pub fn distances_from(&self, s: usize) -> Vec<Option<usize>> {
        let mut d = vec![None; self.len()];
        d[s] = Some(0);
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            let dx = d[x].unwrap();
            for (y, _) in &self.rows[x] {
                if d[*y].is_none() {
                    d[*y] = Some(dx + 1);
                    queue.push_back(*y);
                }
            }
        }
        d
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PowerMode {
    Exact,
    Float,
}

/// Rows `p^(k)(x, .)` for `k = 0..=n`.
#[derive(Clone, Debug, PartialEq)]
pub enum PowerTable {
    Exact(Vec<Vec<Rational>>),
    Float(Vec<Vec<f64>>),
}

impl PowerTable {
    pub fn steps(&self) -> usize {
        match self {
            PowerTable::Exact(r) => r.len() - 1,
            PowerTable::Float(r) => r.len() - 1,
        }
    }

    pub fn get_f64(&self, k: usize, y: usize) -> f64 {
        match self {
            PowerTable::Exact(r) => r[k][y].to_f64(),
            PowerTable::Float(r) => r[k][y],
        }
    }

    pub fn exact(&self, k: usize, y: usize) -> Option<&Rational> {
        match self {
            PowerTable::Exact(r) => Some(&r[k][y]),
            PowerTable::Float(_) => None,
        }
    }
}

/// Cap on stored table entries `(n + 1) * |V|`.
pub const POWER_TABLE_CAP: usize = 50_000_000;

fn exact_step(pred: &[Vec<(usize, Rational)>], v: &[Rational]) -> Vec<Rational> {
    pred.par_iter()
        .map(|ps| {
            let mut acc = Rational::new();
            for (x, p) in ps {
                if v[*x] != 0 {
                    acc += Rational::from(&v[*x] * p);
                }
            }
            acc
        })
        .collect()
}

fn float_step(pred: &[Vec<(usize, f64)>], v: &[f64]) -> Vec<f64> {
    pred.par_iter().map(|ps| ps.iter().map(|(x, p)| v[*x] * p).sum()).collect()
}

pub fn matrix_power_probabilities(chain: &FiniteChain, x: usize, n: usize, mode: PowerMode) -> Result<PowerTable> {
    let nv = chain.len();
    if x >= nv {
        return Err(Error::IndexOutOfRange(format!("vertex {x} of {nv}")));
    }
    let entries = (n + 1).saturating_mul(nv);
    if entries > POWER_TABLE_CAP {
        return Err(Error::MemoryCap(format!("{entries} table entries exceed the cap of {POWER_TABLE_CAP}")));
    }
    Ok(match mode {
        PowerMode::Exact => {
            let pred = chain.predecessors_exact();
            let mut v = vec![Rational::new(); nv];
            v[x] = Rational::from(1);
            let mut rows = vec![v];
            for _ in 0..n {
                let next = exact_step(&pred, rows.last().unwrap());
                rows.push(next);
            }
            PowerTable::Exact(rows)
        }
        PowerMode::Float => {
            let pred = chain.predecessors();
            let mut v = vec![0.0; nv];
            v[x] = 1.0;
            let mut rows = vec![v];
            for _ in 0..n {
                let next = float_step(&pred, rows.last().unwrap());
                rows.push(next);
            }
            PowerTable::Float(rows)
        }
    })
}

/// `p^(k)(x, y)` for `k = 0..=n` in exact arithmetic, storing one row at a time.
pub fn exact_transition_sequence(chain: &FiniteChain, x: usize, y: usize, n: usize) -> Result<Vec<Rational>> {
    let nv = chain.len();
    if x >= nv || y >= nv {
        return Err(Error::IndexOutOfRange(format!("vertex {} of {nv}", x.max(y))));
    }
    let pred = chain.predecessors_exact();
    let mut v = vec![Rational::new(); nv];
    v[x] = Rational::from(1);
    let mut out = vec![v[y].clone()];
    for _ in 0..n {
        v = exact_step(&pred, &v);
        out.push(v[y].clone());
    }
    Ok(out)
}

pub const MC_SHARDS: u64 = 64;

/// Empirical first-hit statistics of the walk from `v` absorbed at the other
/// boundary vertices.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HitStatistics {
    pub trials: u64,
    pub seed: u64,
    /// `hit_counts[n]` = number of trials absorbed at step `n`.
    pub hit_counts: Vec<u64>,
    /// `visit_counts[j]` = number of trials with `j` visits to `v`, the start
    /// included.
    pub visit_counts: Vec<u64>,
    pub mean_hit_time: f64,
    pub mean_hit_time_se: f64,
    pub mean_visits: f64,
    pub mean_visits_se: f64,
}

impl HitStatistics {
    pub fn hit_pmf(&self, n: usize) -> f64 {
        self.hit_counts.get(n).copied().unwrap_or(0) as f64 / self.trials as f64
    }

    /// Binomial standard error of `hit_pmf(n)`.
    pub fn hit_pmf_se(&self, n: usize) -> f64 {
        let p = self.hit_pmf(n);
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }

    pub fn visit_pmf(&self, j: usize) -> f64 {
        self.visit_counts.get(j).copied().unwrap_or(0) as f64 / self.trials as f64
    }
}

#[derive(Default)]
struct ShardTally {
    hits: BTreeMap<u64, u64>,
    visits: BTreeMap<u64, u64>,
    sum_t: u128,
    sum_t2: u128,
    sum_v: u128,
    sum_v2: u128,
}

pub fn monte_carlo_first_hit(cell: &CellGraph, v: usize, trials: u64, seed: u64) -> Result<HitStatistics> {
    if !cell.is_boundary(v) {
        return Err(Error::Structure(format!("vertex {v} is not a boundary vertex")));
    }
    if trials == 0 {
        return Err(Error::InsufficientSamples("at least one trial is needed".into()));
    }
    let targets: Vec<bool> = (0..cell.vertex_count()).map(|x| x != v && cell.is_boundary(x)).collect();
    let tallies: Vec<ShardTally> = (0..MC_SHARDS)
        .into_par_iter()
        .map(|s| {
            let lo = trials * s / MC_SHARDS;
            let hi = trials * (s + 1) / MC_SHARDS;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(s);
            let mut t = ShardTally::default();
            for _ in lo..hi {
                let (mut x, mut steps, mut visits) = (v, 0u64, 1u64);
                while !targets[x] {
                    let nb = cell.neighbors(x);
                    x = nb[rng.random_range(0..nb.len())];
                    steps += 1;
                    if x == v {
                        visits += 1;
                    }
                }
                *t.hits.entry(steps).or_default() += 1;
                *t.visits.entry(visits).or_default() += 1;
                t.sum_t += steps as u128;
                t.sum_t2 += (steps as u128) * (steps as u128);
                t.sum_v += visits as u128;
                t.sum_v2 += (visits as u128) * (visits as u128);
            }
            t
        })
        .collect();
    let mut total = ShardTally::default();
    for t in tallies {
        for (k, c) in t.hits {
            *total.hits.entry(k).or_default() += c;
        }
        for (k, c) in t.visits {
            *total.visits.entry(k).or_default() += c;
        }
        total.sum_t += t.sum_t;
        total.sum_t2 += t.sum_t2;
        total.sum_v += t.sum_v;
        total.sum_v2 += t.sum_v2;
    }
    let dense = |m: &BTreeMap<u64, u64>| {
        let len = m.keys().next_back().map_or(0, |&k| k as usize + 1);
        let mut out = vec![0u64; len];
        for (&k, &c) in m {
            out[k as usize] = c;
        }
        out
    };
    let nf = trials as f64;
    let moments = |s: u128, s2: u128| {
        let mean = s as f64 / nf;
        let var = (s2 as f64 / nf - mean * mean).max(0.0) * nf / (nf - 1.0).max(1.0);
        (mean, (var / nf).sqrt())
    };
    let (mt, mt_se) = moments(total.sum_t, total.sum_t2);
    let (mv, mv_se) = moments(total.sum_v, total.sum_v2);
    Ok(HitStatistics {
        trials,
        seed,
        hit_counts: dense(&total.hits),
        visit_counts: dense(&total.visits),
        mean_hit_time: mt,
        mean_hit_time_se: mt_se,
        mean_visits: mv,
        mean_visits_se: mv_se,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeodesicCheck {
    pub x: usize,
    pub y: usize,
    pub n: usize,
    #[serde(serialize_with = "crate::serde_util::rational")]
    pub lhs: Rational,
    #[serde(serialize_with = "crate::serde_util::rational")]
    pub bound: Rational,
    pub equality: bool,
    pub holds: bool,
}

/// `q^(n)(x,y) q^(n)(y,x)` against `4^{1-n}` at `n = d(x,y)`.
pub fn geodesic_bound_check(chain: &FiniteChain, x: usize, y: usize) -> Result<GeodesicCheck> {
    if chain.measure().is_none() && chain.reversible_measure().is_none() {
        return Err(Error::Structure("chain is not reversible".into()));
    }
    if x == y {
        return Err(Error::Structure("vertices must differ".into()));
    }
    let n = chain.distances_from(x)[y].ok_or_else(|| Error::Structure(format!("{y} is unreachable from {x}")))?;
    let a = exact_transition_sequence(chain, x, y, n)?.pop().unwrap();
    let b = exact_transition_sequence(chain, y, x, n)?.pop().unwrap();
    let lhs = a * b;
    let bound = Rational::from((1, 1u64 << (2 * (n - 1))));
    let holds = lhs <= bound;
    let equality = lhs == bound;
    Ok(GeodesicCheck { x, y, n, lhs, bound, equality, holds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn q(a: u64, b: u64) -> Rational {
        Rational::from((a, b))
    }

    #[test]
    fn line_powers() {
        let cell = fixtures::line(2).unwrap();
        let chain = FiniteChain::from_cell(&cell, &[2]);
        assert!(chain.check_stochastic());
        let t = matrix_power_probabilities(&chain, 0, 4, PowerMode::Exact).unwrap();
        assert_eq!(t.exact(0, 0), Some(&Rational::from(1)));
        assert_eq!(t.exact(0, 1), Some(&Rational::new()));
        assert_eq!(t.exact(2, 0), Some(&q(1, 2)));
        let f = matrix_power_probabilities(&chain, 0, 4, PowerMode::Float).unwrap();
        assert_eq!(f.get_f64(2, 0), 0.5);
    }

    #[test]
    fn geodesic_examples() {
        let line = fixtures::line(2).unwrap();
        let c = geodesic_bound_check(&FiniteChain::from_cell(&line, &[]), 0, 2).unwrap();
        assert_eq!((c.n, c.lhs.clone(), c.equality), (2, q(1, 4), true));
        let flake = fixtures::flake(3).unwrap();
        let b = flake.boundary().to_vec();
        let c = geodesic_bound_check(&FiniteChain::from_cell(&flake, &[]), b[0], b[1]).unwrap();
        assert_eq!((c.n, c.lhs.clone(), c.equality, c.holds), (2, q(1, 144), false, true));
        let c = geodesic_bound_check(&FiniteChain::from_cell(&flake, &[]), 0, b[0]).unwrap();
        assert_eq!((c.n, c.bound.clone()), (1, q(1, 1)));
    }

    #[test]
    fn detailed_balance_rejected() {
        // a directed 3-cycle bias is not reversible
        let w = [
            (0, 1, q(2, 1)),
            (1, 2, q(2, 1)),
            (2, 0, q(2, 1)),
            (1, 0, q(1, 1)),
            (2, 1, q(1, 1)),
            (0, 2, q(1, 1)),
        ];
        assert!(FiniteChain::weighted(3, &w).is_err());
        let ok = FiniteChain::conductances(3, &[(0, 1, q(3, 1)), (1, 2, q(1, 2))], &[(0, q(1, 1))]).unwrap();
        assert!(ok.check_stochastic());
        assert!(ok.reversible_measure().is_some());
    }

    #[test]
    fn monte_carlo_is_seeded() {
        let cell = fixtures::line(2).unwrap();
        let a = monte_carlo_first_hit(&cell, 0, 10_000, 7).unwrap();
        let b = monte_carlo_first_hit(&cell, 0, 10_000, 7).unwrap();
        assert_eq!(a, b);
        assert!((a.hit_pmf(2) - 0.5).abs() < 4.0 * a.hit_pmf_se(2));
        assert_eq!(a.hit_counts.iter().skip(1).step_by(2).sum::<u64>(), 0);
    }
}
