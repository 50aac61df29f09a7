//! Finite cell graphs: the seed of the blow-up construction.
//!
//! A cell graph is a connected graph with an ordered boundary `B` of size
//! `theta >= 2` whose edge set splits into `mu` edge-disjoint complete graphs
//! on `theta` vertices. Structural checks run at construction; the symmetry
//! axiom (double transitivity of the automorphism group on `B`) is decided
//! separately by [`verify_symmetry`].

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use rug::Rational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default vertex cap for the exhaustive automorphism search.
pub const SYMMETRY_SEARCH_CAP: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellGraph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    boundary: Vec<usize>,
    cliques: Vec<Vec<usize>>,
    adjacency: Vec<Vec<usize>>,
    issues: Vec<(String, String)>,
}

/// Serialized mirror of the cell format.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellDocument {
    pub vertices: usize,
    pub edges: Vec<[usize; 2]>,
    pub boundary: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cliques: Option<Vec<Vec<usize>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AxiomReport {
    pub passed: bool,
    pub theta: usize,
    pub mu: usize,
    pub beta_map: BTreeMap<usize, usize>,
    pub beta: Option<usize>,
    pub doubly_transitive: bool,
    pub bipartite: bool,
    pub failures: Vec<(String, String)>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Bipartition {
    pub bipartite: bool,
    /// Colour classes when bipartite; the class containing vertex 0 comes first.
    pub classes: Option<[Vec<usize>; 2]>,
}

fn structure(msg: impl Into<String>) -> Error {
    Error::Structure(msg.into())
}

impl CellGraph {
    /// Validated construction. Cliques are computed when `cliques` is `None`.
    pub fn new(
        vertex_count: usize,
        edges: &[(usize, usize)],
        boundary: &[usize],
        cliques: Option<Vec<Vec<usize>>>,
    ) -> Result<Self> {
        let g = Self::build(vertex_count, edges, boundary, cliques)?;
        if let Some((_, msg)) = g.issues.first() {
            return Err(structure(msg.clone()));
        }
        Ok(g)
    }

    /// Construction that records structural problems instead of failing, so
    /// that invalid cells can still be inspected and reported on. Only a
    /// malformed edge list (ids out of range, loops, repeated edges) is fatal.
    pub fn relaxed(vertex_count: usize, edges: &[(usize, usize)], boundary: &[usize]) -> Result<Self> {
        Self::build(vertex_count, edges, boundary, None)
    }

    fn build(
        vertex_count: usize,
        raw_edges: &[(usize, usize)],
        boundary: &[usize],
        cliques: Option<Vec<Vec<usize>>>,
    ) -> Result<Self> {
        if vertex_count == 0 {
            return Err(structure("cell graph has no vertices"));
        }
        let mut set = BTreeSet::new();
        for &(a, b) in raw_edges {
            if a >= vertex_count || b >= vertex_count {
                return Err(structure(format!("edge {a}-{b} references a vertex >= {vertex_count}")));
            }
            if a == b {
                return Err(structure(format!("loop at vertex {a}")));
            }
            if !set.insert((a.min(b), a.max(b))) {
                return Err(structure(format!("repeated edge {a}-{b}")));
            }
        }
        let edges: Vec<(usize, usize)> = set.into_iter().collect();
        let mut adjacency = vec![Vec::new(); vertex_count];
        for &(a, b) in &edges {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for row in adjacency.iter_mut() {
            row.sort_unstable();
        }
        let mut seen = BTreeSet::new();
        for &b in boundary {
            if b >= vertex_count {
                return Err(structure(format!("boundary vertex {b} out of range")));
            }
            if !seen.insert(b) {
                return Err(structure(format!("boundary vertex {b} listed twice")));
            }
        }
        let mut g = CellGraph {
            vertex_count,
            edges,
            boundary: boundary.to_vec(),
            cliques: Vec::new(),
            adjacency,
            issues: Vec::new(),
        };
        g.check_structure();
        let theta = g.boundary.len();
        match cliques {
            Some(cl) => {
                let cl: Vec<Vec<usize>> = cl
                    .into_iter()
                    .map(|mut c| {
                        c.sort_unstable();
                        c
                    })
                    .collect();
                if let Err(e) = g.check_cliques(&cl) {
                    g.issue("clique", e);
                }
                g.cliques = cl;
            }
            None if theta >= 2 => match g.decompose() {
                Some(cl) => g.cliques = cl,
                None => g.issue("clique", format!("no decomposition into edge-disjoint {theta}-cliques")),
            },
            None => {}
        }
        g.cliques.sort();
        if !g.cliques.is_empty() && 2 * g.edges.len() != g.cliques.len() * theta * (theta - 1) {
            g.issue("edge-count", "2|E| differs from mu*theta*(theta-1)".to_string());
        }
        Ok(g)
    }

    fn issue(&mut self, code: &str, msg: String) {
        self.issues.push((code.to_string(), msg));
    }

    fn check_structure(&mut self) {
        let theta = self.boundary.len();
        if theta < 2 {
            self.issue("boundary-size", format!("boundary has {theta} vertices, need at least 2"));
        }
        if self.component_count(|_| true) != 1 {
            self.issue("connected", "graph is not connected".to_string());
        }
        let mut adjacent = Vec::new();
        for (i, &a) in self.boundary.iter().enumerate() {
            for &b in &self.boundary[i + 1..] {
                if self.has_edge(a, b) {
                    adjacent.push(format!("boundary vertices {a} and {b} are adjacent"));
                }
            }
        }
        for msg in adjacent {
            self.issue("boundary-adjacent", msg);
        }
        let inner: BTreeSet<usize> =
            (0..self.vertex_count).filter(|v| !self.boundary.contains(v)).collect();
        if inner.is_empty() {
            self.issue("interior", "cell has no interior vertices".to_string());
        } else if self.component_count(|v| inner.contains(&v)) != 1 {
            self.issue("interior-connected", "vertices outside the boundary are not connected".to_string());
        }
    }

    /// Number of connected components of the subgraph induced by `keep`.
    fn component_count(&self, keep: impl Fn(usize) -> bool) -> usize {
        let mut seen = vec![false; self.vertex_count];
        let mut count = 0;
        for s in 0..self.vertex_count {
            if seen[s] || !keep(s) {
                continue;
            }
            count += 1;
            seen[s] = true;
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                for &w in &self.adjacency[v] {
                    if !seen[w] && keep(w) {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        count
    }

    fn check_cliques(&self, cliques: &[Vec<usize>]) -> std::result::Result<(), String> {
        let theta = self.boundary.len();
        let mut covered = BTreeMap::new();
        for (ci, c) in cliques.iter().enumerate() {
            if c.len() != theta {
                return Err(format!("clique {ci} has {} vertices, expected {theta}", c.len()));
            }
            for (i, &a) in c.iter().enumerate() {
                if a >= self.vertex_count {
                    return Err(format!("clique {ci} references vertex {a}"));
                }
                for &b in &c[i + 1..] {
                    if a == b {
                        return Err(format!("clique {ci} repeats vertex {a}"));
                    }
                    if !self.has_edge(a, b) {
                        return Err(format!("clique {ci} is not complete: {a}-{b} missing"));
                    }
                    if let Some(prev) = covered.insert((a.min(b), a.max(b)), ci) {
                        return Err(format!("edge {a}-{b} lies in cliques {prev} and {ci}"));
                    }
                }
            }
        }
        if covered.len() != self.edges.len() {
            return Err("cliques do not cover every edge".to_string());
        }
        Ok(())
    }

    /// Backtracking search for an edge partition into `theta`-cliques, taking
    /// the lexicographically least uncovered edge at each step.
    fn decompose(&self) -> Option<Vec<Vec<usize>>> {
        let theta = self.boundary.len();
        if self.edges.is_empty() || !(2 * self.edges.len()).is_multiple_of(theta * (theta - 1)) {
            return None;
        }
        let index: BTreeMap<(usize, usize), usize> =
            self.edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let mut used = vec![false; self.edges.len()];
        let mut out = Vec::new();
        if self.decompose_rec(theta, &index, &mut used, &mut out) {
            Some(out)
        } else {
            None
        }
    }

    fn decompose_rec(
        &self,
        theta: usize,
        index: &BTreeMap<(usize, usize), usize>,
        used: &mut [bool],
        out: &mut Vec<Vec<usize>>,
    ) -> bool {
        let Some(first) = used.iter().position(|u| !u) else {
            return true;
        };
        let (a, b) = self.edges[first];
        let free = |x: usize, y: usize, used: &[bool]| {
            index.get(&(x.min(y), x.max(y))).is_some_and(|&i| !used[i])
        };
        let cands: Vec<usize> = self.adjacency[a]
            .iter()
            .copied()
            .filter(|&c| c != b && free(a, c, used) && free(b, c, used))
            .collect();
        let mut chosen = vec![a, b];
        self.extend_clique(theta, index, used, out, &cands, 0, &mut chosen)
    }

    #[allow(clippy::too_many_arguments)]
    fn extend_clique(
        &self,
        theta: usize,
        index: &BTreeMap<(usize, usize), usize>,
        used: &mut [bool],
        out: &mut Vec<Vec<usize>>,
        cands: &[usize],
        from: usize,
        chosen: &mut Vec<usize>,
    ) -> bool {
        if chosen.len() == theta {
            let mut ids = Vec::new();
            for (i, &x) in chosen.iter().enumerate() {
                for &y in &chosen[i + 1..] {
                    ids.push(index[&(x.min(y), x.max(y))]);
                }
            }
            for &i in &ids {
                used[i] = true;
            }
            let mut c = chosen.clone();
            c.sort_unstable();
            out.push(c);
            if self.decompose_rec(theta, index, used, out) {
                return true;
            }
            out.pop();
            for &i in &ids {
                used[i] = false;
            }
            return false;
        }
        for k in from..cands.len() {
            let c = cands[k];
            let ok = chosen[2..].iter().all(|&x| {
                index.get(&(x.min(c), x.max(c))).is_some_and(|&i| !used[i])
            });
            if ok {
                chosen.push(c);
                if self.extend_clique(theta, index, used, out, cands, k + 1, chosen) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn boundary(&self) -> &[usize] {
        &self.boundary
    }

    pub fn cliques(&self) -> &[Vec<usize>] {
        &self.cliques
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].binary_search(&b).is_ok()
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.boundary.contains(&v)
    }

    pub fn theta(&self) -> usize {
        self.boundary.len()
    }

    pub fn mu(&self) -> usize {
        self.cliques.len()
    }

    /// Structural problems found by a relaxed construction.
    pub fn issues(&self) -> &[(String, String)] {
        &self.issues
    }

    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }

    /// Branching number: how many cliques contain `v`.
    pub fn beta(&self, v: usize) -> usize {
        self.cliques.iter().filter(|c| c.binary_search(&v).is_ok()).count()
    }

    pub fn beta_map(&self) -> BTreeMap<usize, usize> {
        (0..self.vertex_count).map(|v| (v, self.beta(v))).collect()
    }

    /// Breadth-first distances from `s` (`usize::MAX` if unreachable).
    pub fn distances_from(&self, s: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.vertex_count];
        dist[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &w in &self.adjacency[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn distance_matrix(&self) -> Vec<Vec<usize>> {
        (0..self.vertex_count).map(|s| self.distances_from(s)).collect()
    }

    pub fn to_document(&self) -> CellDocument {
        CellDocument {
            vertices: self.vertex_count,
            edges: self.edges.iter().map(|&(a, b)| [a, b]).collect(),
            boundary: self.boundary.clone(),
            cliques: Some(self.cliques.clone()),
        }
    }

    /// Cell-format text, including the clique decomposition.
    pub fn to_cell_format(&self) -> String {
        let mut s = String::new();
        writeln!(s, "vertices {}", self.vertex_count).unwrap();
        for &(a, b) in &self.edges {
            writeln!(s, "edge {a} {b}").unwrap();
        }
        write!(s, "boundary").unwrap();
        for b in &self.boundary {
            write!(s, " {b}").unwrap();
        }
        s.push('\n');
        for c in &self.cliques {
            write!(s, "clique").unwrap();
            for v in c {
                write!(s, " {v}").unwrap();
            }
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("serializable")
    }
}

fn parse_ids(line: usize, parts: &[&str]) -> Result<Vec<usize>> {
    parts
        .iter()
        .map(|t| t.parse::<usize>().map_err(|_| Error::Parse(format!("line {line}: bad vertex id '{t}'"))))
        .collect()
}

/// Parse a cell-format document or its JSON mirror (detected by a leading `{`).
pub fn parse_cell_document(text: &str) -> Result<CellDocument> {
    if text.trim_start().starts_with('{') {
        return serde_json::from_str(text).map_err(|e| Error::Parse(format!("cell JSON: {e}")));
    }
    let mut vertices = None;
    let mut edges = Vec::new();
    let mut boundary = None;
    let mut cliques = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let no = no + 1;
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        match parts[0] {
            "vertices" => {
                if parts.len() != 2 || vertices.is_some() {
                    return Err(Error::Parse(format!("line {no}: expected a single 'vertices N'")));
                }
                vertices = Some(parse_ids(no, &parts[1..])?[0]);
            }
            "edge" => {
                if parts.len() != 3 {
                    return Err(Error::Parse(format!("line {no}: expected 'edge a b'")));
                }
                let ids = parse_ids(no, &parts[1..])?;
                edges.push([ids[0], ids[1]]);
            }
            "boundary" => {
                if boundary.is_some() {
                    return Err(Error::Parse(format!("line {no}: duplicate boundary line")));
                }
                boundary = Some(parse_ids(no, &parts[1..])?);
            }
            "clique" => cliques.push(parse_ids(no, &parts[1..])?),
            other => return Err(Error::Parse(format!("line {no}: unknown keyword '{other}'"))),
        }
    }
    Ok(CellDocument {
        vertices: vertices.ok_or_else(|| Error::Parse("missing 'vertices' line".into()))?,
        edges,
        boundary: boundary.ok_or_else(|| Error::Parse("missing 'boundary' line".into()))?,
        cliques: if cliques.is_empty() { None } else { Some(cliques) },
    })
}

impl CellDocument {
    pub fn into_cell(self) -> Result<CellGraph> {
        let edges: Vec<(usize, usize)> = self.edges.iter().map(|e| (e[0], e[1])).collect();
        CellGraph::new(self.vertices, &edges, &self.boundary, self.cliques)
    }
}

pub fn load_cell_graph(text: &str) -> Result<CellGraph> {
    parse_cell_document(text)?.into_cell()
}

/// Backtracking search for an automorphism extending the partial map `fixed`
/// and preserving the graph distance between every pair of vertices.
fn find_automorphism(
    cell: &CellGraph,
    dist: &[Vec<usize>],
    profile: &[Vec<usize>],
    fixed: &[(usize, usize)],
) -> Option<Vec<usize>> {
    let n = cell.vertex_count;
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    for &(a, b) in fixed {
        if map[a] != usize::MAX || used[b] {
            return None;
        }
        map[a] = b;
        used[b] = true;
    }
    for &(a, b) in fixed {
        for &(c, d) in fixed {
            if dist[a][c] != dist[b][d] {
                return None;
            }
        }
    }
    // order the remaining vertices by distance from the first fixed one
    let root = fixed[0].0;
    let mut order: Vec<usize> = (0..n).filter(|&v| map[v] == usize::MAX).collect();
    order.sort_by_key(|&v| (dist[root][v], v));
    fn rec(
        k: usize,
        order: &[usize],
        map: &mut [usize],
        used: &mut [bool],
        cell: &CellGraph,
        dist: &[Vec<usize>],
        profile: &[Vec<usize>],
    ) -> bool {
        if k == order.len() {
            return true;
        }
        let v = order[k];
        for img in 0..map.len() {
            if used[img] || profile[img] != profile[v] || cell.is_boundary(img) != cell.is_boundary(v) {
                continue;
            }
            let consistent = (0..map.len()).all(|w| map[w] == usize::MAX || dist[v][w] == dist[img][map[w]]);
            if !consistent {
                continue;
            }
            map[v] = img;
            used[img] = true;
            if rec(k + 1, order, map, used, cell, dist, profile) {
                return true;
            }
            map[v] = usize::MAX;
            used[img] = false;
        }
        false
    }
    if rec(0, &order, &mut map, &mut used, cell, dist, profile) {
        Some(map)
    } else {
        None
    }
}

/// Decide the symmetry axiom and collect the structural report.
pub fn verify_symmetry(cell: &CellGraph) -> Result<AxiomReport> {
    verify_symmetry_capped(cell, SYMMETRY_SEARCH_CAP)
}

pub fn verify_symmetry_capped(cell: &CellGraph, cap: usize) -> Result<AxiomReport> {
    if cell.vertex_count > cap {
        return Err(Error::Size { vertices: cell.vertex_count, cap });
    }
    let mut failures = cell.issues.clone();
    let dist = cell.distance_matrix();
    // invariant per vertex: degree, then sorted distance multiset, then sorted
    // distances to the boundary
    let profile: Vec<Vec<usize>> = (0..cell.vertex_count)
        .map(|v| {
            let mut all = dist[v].clone();
            all.sort_unstable();
            let mut bd: Vec<usize> = cell.boundary.iter().map(|&b| dist[v][b]).collect();
            bd.sort_unstable();
            let mut p = vec![cell.degree(v)];
            p.extend(all);
            p.push(usize::MAX);
            p.extend(bd);
            p
        })
        .collect();
    let b = &cell.boundary;
    let connected = dist.iter().all(|row| row.iter().all(|&d| d != usize::MAX));
    let mut doubly_transitive = b.len() >= 2 && connected;
    if doubly_transitive {
        'outer: for &x in b {
            for &y in b {
                if x == y {
                    continue;
                }
                if find_automorphism(cell, &dist, &profile, &[(b[0], x), (b[1], y)]).is_none() {
                    failures.push((
                        "double-transitivity".to_string(),
                        format!("no automorphism maps ({}, {}) to ({x}, {y})", b[0], b[1]),
                    ));
                    doubly_transitive = false;
                    break 'outer;
                }
            }
        }
    } else if b.len() >= 2 {
        failures.push(("double-transitivity".into(), "search skipped on a disconnected graph".into()));
    }
    let beta_map = cell.beta_map();
    let betas: BTreeSet<usize> = b.iter().map(|v| beta_map[v]).collect();
    let beta = if betas.len() == 1 { betas.first().copied() } else { None };
    if betas.len() > 1 {
        failures.push(("beta".into(), format!("boundary branching numbers differ: {betas:?}")));
    }
    let bip = is_bipartite(cell);
    if bip.bipartite && cell.theta() != 2 {
        failures.push(("bipartite".into(), "bipartite cell with theta != 2".into()));
    }
    let notes = vec![
        "the global symmetry axiom quantifies over all cells of the infinite graph and is vacuous for a single cell; only double transitivity and the blow-up preconditions are checked".to_string(),
    ];
    Ok(AxiomReport {
        passed: failures.is_empty() && doubly_transitive,
        theta: cell.theta(),
        mu: cell.mu(),
        beta_map,
        beta,
        doubly_transitive,
        bipartite: bip.bipartite,
        failures,
        notes,
    })
}

/// Stationary measure `m(x) = beta(x)/(mu*theta)` of the simple walk on the
/// cell, checked exactly against `mP = m` and normalization.
pub fn invariant_measure(cell: &CellGraph) -> Result<Vec<Rational>> {
    let total = Rational::from((cell.mu() * cell.theta()) as u64);
    if total == 0 {
        return Err(Error::Structure("cell has no clique decomposition".into()));
    }
    let m: Vec<Rational> =
        (0..cell.vertex_count).map(|v| Rational::from(cell.beta(v) as u64) / total.clone()).collect();
    let sum: Rational = m.iter().sum();
    if sum != 1 {
        return Err(Error::Internal(format!("invariant measure sums to {sum}")));
    }
    for y in 0..cell.vertex_count {
        let mut acc = Rational::new();
        for &x in cell.neighbors(y) {
            acc += Rational::from(&m[x] / cell.degree(x) as u64);
        }
        if acc != m[y] {
            return Err(Error::Internal(format!("(mP)({y}) = {acc} but m({y}) = {}", m[y])));
        }
    }
    Ok(m)
}

pub fn is_bipartite(cell: &CellGraph) -> Bipartition {
    let n = cell.vertex_count;
    let mut colour = vec![u8::MAX; n];
    for s in 0..n {
        if colour[s] != u8::MAX {
            continue;
        }
        colour[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &w in cell.neighbors(v) {
                if colour[w] == u8::MAX {
                    colour[w] = colour[v] ^ 1;
                    queue.push_back(w);
                } else if colour[w] == colour[v] {
                    return Bipartition { bipartite: false, classes: None };
                }
            }
        }
    }
    let class = |c: u8| (0..n).filter(|&v| colour[v] == c).collect::<Vec<_>>();
    Bipartition { bipartite: true, classes: Some([class(0), class(1)]) }
}
