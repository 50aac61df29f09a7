//! Built-in cell graphs: lines, flakes, simplex Sierpinski cells, failing
//! counterexamples, and random symmetric cells for property tests.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cellgraph::CellGraph;
use crate::error::{Error, Result};

/// Path `0 - 1 - ... - n` with boundary `{0, n}`.
pub fn line(n: usize) -> Result<CellGraph> {
    if n < 2 {
        return Err(Error::Structure("line cell needs n >= 2".into()));
    }
    let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, i + 1)).collect();
    CellGraph::new(n + 1, &edges, &[0, n], None)
}

/// `n` copies of the complete graph `K_n` sharing the centre vertex 0; the
/// boundary holds one further vertex from each copy.
pub fn flake(n: usize) -> Result<CellGraph> {
    if n < 2 {
        return Err(Error::Structure("flake cell needs n >= 2".into()));
    }
    let mut edges = Vec::new();
    let mut boundary = Vec::new();
    let mut next = 1;
    for _ in 0..n {
        let copy: Vec<usize> = std::iter::once(0).chain(next..next + n - 1).collect();
        next += n - 1;
        boundary.push(copy[1]);
        for (i, &a) in copy.iter().enumerate() {
            for &b in &copy[i + 1..] {
                edges.push((a, b));
            }
        }
    }
    CellGraph::new(next, &edges, &boundary, None)
}

/// `dim`-dimensional, `scale`-scaled simplex Sierpinski cell.
///
/// Small simplices are indexed by `c >= 0` in `Z^(dim+1)` with `|c| = scale-1`;
/// the simplex `c` spans the lattice points `c + e_i`. The boundary is the set
/// of corners `scale * e_i`, listed in coordinate order.
pub fn sierpinski(dim: usize, scale: usize) -> Result<CellGraph> {
    if dim < 1 || scale < 2 {
        return Err(Error::Structure("sierpinski cell needs dim >= 1 and scale >= 2".into()));
    }
    let k = dim + 1;
    let cells = compositions(scale - 1, k);
    let mut ids: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    let mut cliques = Vec::new();
    for c in &cells {
        let mut clique = Vec::new();
        for i in 0..k {
            let mut p = c.clone();
            p[i] += 1;
            let len = ids.len();
            clique.push(*ids.entry(p).or_insert(len));
        }
        cliques.push(clique);
    }
    let mut edges = Vec::new();
    for c in &cliques {
        for (i, &a) in c.iter().enumerate() {
            for &b in &c[i + 1..] {
                edges.push((a, b));
            }
        }
    }
    let boundary: Vec<usize> = (0..k)
        .map(|i| {
            let mut p = vec![0; k];
            p[i] = scale;
            ids[&p]
        })
        .collect();
    CellGraph::new(ids.len(), &edges, &boundary, Some(cliques))
}

/// All vectors of `parts` nonnegative integers summing to `total`, in
/// lexicographic order.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// A named cell that violates at least one axiom, with the code of the
/// expected failure.
pub struct Counterexample {
    pub name: &'static str,
    pub text: &'static str,
    pub failure: &'static str,
}

pub const COUNTEREXAMPLES: &[Counterexample] = &[
    Counterexample {
        name: "adjacent-boundary",
        text: "vertices 2\nedge 0 1\nboundary 0 1\n",
        failure: "boundary-adjacent",
    },
    Counterexample {
        name: "split-interior",
        text: "vertices 4\nedge 0 1\nedge 1 2\nedge 2 3\nboundary 0 2\n",
        failure: "interior-connected",
    },
    Counterexample {
        name: "asymmetric",
        text: "vertices 4\nedge 0 1\nedge 1 2\nedge 1 3\nedge 3 2\nboundary 0 2\n",
        failure: "double-transitivity",
    },
    Counterexample {
        name: "no-triangle-cover",
        // a star: no edge lies in a triangle
        text: "vertices 4\nedge 0 1\nedge 0 2\nedge 0 3\nboundary 1 2 3\n",
        failure: "clique",
    },
    Counterexample {
        name: "disconnected",
        text: "vertices 6\nedge 0 1\nedge 1 2\nedge 3 4\nedge 4 5\nboundary 0 2\n",
        failure: "connected",
    },
];

pub fn counterexample(name: &str) -> Option<&'static Counterexample> {
    COUNTEREXAMPLES.iter().find(|c| c.name == name)
}

/// Random doubly transitive cell. `theta = 2` gives a mirror-symmetric graph
/// (possibly with branching number above 1); `theta >= 3` glues `theta`
/// copies of a random clique cactus at a hub vertex or a central clique.
pub fn random_symmetric_cell(seed: u64, theta: usize, max_vertices: usize) -> Result<CellGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if theta == 2 {
        random_mirror_cell(&mut rng, max_vertices)
    } else if theta >= 3 {
        random_cactus_cell(&mut rng, theta, max_vertices)
    } else {
        Err(Error::Structure("theta must be at least 2".into()))
    }
}

fn random_mirror_cell(rng: &mut ChaCha8Rng, max_vertices: usize) -> Result<CellGraph> {
    // vertices: 0 = b0, 1 = b1, then half A, mirror A', middle M
    let budget = max_vertices.max(5);
    let m = rng.random_range(1..=2usize.min(budget - 3));
    let a = rng.random_range(0..=((budget - 2 - m) / 2).min(3));
    let half: Vec<usize> = (2..2 + a).collect();
    let middle: Vec<usize> = (2 + 2 * a..2 + 2 * a + m).collect();
    let mirror = |v: usize| -> usize {
        match v {
            0 => 1,
            1 => 0,
            v if v >= 2 && v < 2 + a => v + a,
            v if v >= 2 + a && v < 2 + 2 * a => v - a,
            v => v,
        }
    };
    let side: Vec<usize> = half.iter().chain(middle.iter()).copied().collect();
    let mut edges = Vec::new();
    // random spanning tree on A + M, then boundary attachments, then extras
    let mut order = side.clone();
    order.shuffle(rng);
    for i in 1..order.len() {
        let j = rng.random_range(0..i);
        edges.push((order[i], order[j]));
    }
    let attach = 1 + usize::from(side.len() > 1 && rng.random_bool(0.3));
    let mut targets = side.clone();
    targets.shuffle(rng);
    for &t in targets.iter().take(attach) {
        edges.push((0, t));
    }
    for _ in 0..rng.random_range(0..=2) {
        let x = side[rng.random_range(0..side.len())];
        let y = side[rng.random_range(0..side.len())];
        if x != y {
            edges.push((x, y));
        }
    }
    let mut all = BTreeMap::new();
    for (x, y) in edges {
        for (p, q) in [(x, y), (mirror(x), mirror(y))] {
            all.insert((p.min(q), p.max(q)), ());
        }
    }
    let edges: Vec<(usize, usize)> = all.into_keys().collect();
    CellGraph::new(2 + 2 * a + m, &edges, &[0, 1], None)
}

fn random_cactus_cell(rng: &mut ChaCha8Rng, theta: usize, max_vertices: usize) -> Result<CellGraph> {
    let central = rng.random_bool(0.4);
    // arm: a tree of theta-cliques grown from its attachment vertex 0
    let arm_cliques_cap = ((max_vertices / theta).saturating_sub(1) / (theta - 1)).clamp(1, 3);
    let arm_cliques = rng.random_range(1..=arm_cliques_cap);
    let mut arm_n = 1;
    let mut arm = Vec::new();
    for _ in 0..arm_cliques {
        let at = rng.random_range(0..arm_n);
        let clique: Vec<usize> = std::iter::once(at).chain(arm_n..arm_n + theta - 1).collect();
        arm_n += theta - 1;
        arm.push(clique);
    }
    // boundary vertex: one of the vertices added by the last clique
    let last = arm.last().unwrap();
    let b_local = last[1..][rng.random_range(0..theta - 1)];
    let mut cliques = Vec::new();
    let mut boundary = Vec::new();
    let mut next = if central { theta } else { 1 };
    if central {
        cliques.push((0..theta).collect::<Vec<_>>());
    }
    for copy in 0..theta {
        let hub = if central { copy } else { 0 };
        let base = next;
        next += arm_n - 1;
        let map = |v: usize| if v == 0 { hub } else { base + v - 1 };
        for c in &arm {
            cliques.push(c.iter().map(|&v| map(v)).collect());
        }
        boundary.push(map(b_local));
    }
    let mut edges = Vec::new();
    for c in &cliques {
        for (i, &x) in c.iter().enumerate() {
            for &y in &c[i + 1..] {
                edges.push((x, y));
            }
        }
    }
    CellGraph::new(next, &edges, &boundary, Some(cliques))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cellgraph::verify_symmetry;

    #[test]
    fn flake_shape() {
        let g = flake(3).unwrap();
        assert_eq!((g.vertex_count(), g.theta(), g.mu()), (7, 3, 3));
    }

    #[test]
    fn sierpinski_counts() {
        let g = sierpinski(2, 2).unwrap();
        assert_eq!((g.vertex_count(), g.edges().len(), g.mu()), (6, 9, 3));
        let g = sierpinski(3, 4).unwrap();
        assert_eq!((g.theta(), g.mu()), (4, 20));
        assert!(verify_symmetry(&g).unwrap().passed);
    }

    #[test]
    fn counterexamples_fail_with_their_code() {
        for c in COUNTEREXAMPLES {
            let doc = crate::cellgraph::parse_cell_document(c.text).unwrap();
            let edges: Vec<(usize, usize)> = doc.edges.iter().map(|e| (e[0], e[1])).collect();
            let g = CellGraph::relaxed(doc.vertices, &edges, &doc.boundary).unwrap();
            let r = verify_symmetry(&g).unwrap();
            assert!(!r.passed, "{}", c.name);
            assert!(r.failures.iter().any(|(code, _)| code == c.failure), "{}: {:?}", c.name, r.failures);
        }
    }

    #[test]
    fn random_cells_are_symmetric() {
        for seed in 0..40 {
            let theta = 2 + (seed as usize % 3);
            let g = random_symmetric_cell(seed, theta, 14).unwrap();
            let r = verify_symmetry(&g).unwrap();
            assert!(r.passed, "seed {seed}: {:?}", r.failures);
        }
    }
}
