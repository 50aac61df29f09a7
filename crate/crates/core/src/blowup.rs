//! Finite approximations `Y_1 ⊂ Y_2 ⊂ ... ⊂ Y_n` of the self-similar graph
//! generated by a cell graph.
//!
//! `Y_0` is the base clique `K^i`, `Y_1` the cell graph itself. Going from
//! `Y_k` to `Y_{k+1}`, every vertex of `Y_k` outside `Y_{k-1}` receives a fresh
//! image under `psi`, and every clique of `Y_k` that is not already a clique of
//! `Y_{k-1}` is replaced by a fresh copy of the cell whose boundary is glued
//! onto the `psi`-image of the clique. Vertex ids are handed out in
//! construction order, so the ids of `Y_k` form a prefix of those of
//! `Y_{k+1}`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::cellgraph::CellGraph;
use crate::error::{Error, Result};

/// A copy of the cell graph inside the blow-up.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellCopy {
    /// Level `k` of the first `Y_k` containing this copy.
    pub level: usize,
    /// Graph id of every cell-graph vertex.
    pub map: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlowupGraph {
    levels: usize,
    base_clique_index: usize,
    theta: usize,
    cell_cliques: Vec<Vec<usize>>,
    cells: Vec<CellCopy>,
    /// `layer_sizes[k-1] = |V Y_k|`.
    layer_sizes: Vec<usize>,
    adjacency: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    psi: Vec<Option<usize>>,
    level_sets: Vec<Vec<usize>>,
    origin: Option<usize>,
    base_vertices: Vec<usize>,
    cell_boundary: Vec<usize>,
}

/// Smallest 1-based clique index whose clique meets the boundary in exactly
/// one vertex, so that the blow-up has an origin vertex.
pub fn origin_clique(cell: &CellGraph) -> Option<usize> {
    cell.cliques()
        .iter()
        .position(|c| c.iter().filter(|v| cell.is_boundary(**v)).count() == 1)
        .map(|i| i + 1)
}

/// Build `Y_levels` from `cell` with base clique `K^base_clique` (1-based).
pub fn blow_up(cell: &CellGraph, base_clique: usize, levels: usize) -> Result<BlowupGraph> {
    let mu = cell.mu();
    if base_clique == 0 || base_clique > mu {
        return Err(Error::IndexOutOfRange(format!("base clique {base_clique} not in 1..={mu}")));
    }
    if levels == 0 {
        return Err(Error::IndexOutOfRange("levels must be at least 1".into()));
    }
    let n0 = cell.vertex_count();
    let base = cell.cliques()[base_clique - 1].clone();
    let boundary = cell.boundary();
    let mut psi: Vec<Option<usize>> = vec![None; n0];
    // psi_1: sorted base clique onto sorted boundary, fixing the shared vertex
    let shared: Vec<usize> = base.iter().copied().filter(|v| cell.is_boundary(*v)).collect();
    let origin = if shared.len() == 1 { Some(shared[0]) } else { None };
    let mut targets: Vec<usize> = boundary.to_vec();
    targets.sort_unstable();
    if let Some(o) = origin {
        psi[o] = Some(o);
        targets.retain(|&t| t != o);
    }
    let mut free_targets = targets.into_iter();
    for &v in &base {
        if psi[v].is_none() {
            psi[v] = free_targets.next();
        }
    }
    let mut g = BlowupGraph {
        levels: 1,
        base_clique_index: base_clique,
        theta: cell.theta(),
        cell_cliques: cell.cliques().to_vec(),
        cells: vec![CellCopy { level: 1, map: (0..n0).collect() }],
        layer_sizes: vec![n0],
        adjacency: vec![Vec::new(); n0],
        edges: Vec::new(),
        psi,
        level_sets: vec![{
            let mut b = boundary.to_vec();
            b.sort_unstable();
            b
        }],
        origin,
        base_vertices: base.clone(),
        cell_boundary: boundary.to_vec(),
    };
    for &(a, b) in cell.edges() {
        g.add_edge(a, b);
    }
    for _ in 1..levels {
        g.grow(cell);
    }
    g.finish();
    Ok(g)
}

impl BlowupGraph {
    fn add_edge(&mut self, a: usize, b: usize) {
        self.adjacency[a].push(b);
        self.adjacency[b].push(a);
        self.edges.push((a.min(b), a.max(b)));
    }

    fn fresh(&mut self) -> usize {
        self.adjacency.push(Vec::new());
        self.psi.push(None);
        self.adjacency.len() - 1
    }

    fn in_previous_layer(&self, x: usize) -> bool {
        if self.levels == 1 {
            self.base_vertices.contains(&x)
        } else {
            x < self.layer_sizes[self.levels - 2]
        }
    }

    /// Cliques of `Y_levels` that are not cliques of `Y_{levels-1}`, as
    /// (cell index, clique index).
    fn newest_cliques(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (ci, c) in self.cells.iter().enumerate() {
            if c.level != self.levels {
                continue;
            }
            for j in 0..self.cell_cliques.len() {
                if ci == 0 && j + 1 == self.base_clique_index {
                    continue;
                }
                out.push((ci, j));
            }
        }
        out
    }

    fn grow(&mut self, cell: &CellGraph) {
        let n = self.levels;
        let current = self.layer_sizes[n - 1];
        for x in 0..current {
            if !self.in_previous_layer(x) && self.psi[x].is_none() {
                let id = self.fresh();
                self.psi[x] = Some(id);
            }
        }
        for (ci, j) in self.newest_cliques() {
            let mut target: Vec<usize> = self.cell_cliques[j]
                .iter()
                .map(|&v| self.psi[self.cells[ci].map[v]].expect("psi defined on Y_n"))
                .collect();
            target.sort_unstable();
            let mut map = vec![usize::MAX; cell.vertex_count()];
            for (k, &b) in cell.boundary().iter().enumerate() {
                map[b] = target[k];
            }
            for slot in map.iter_mut() {
                if *slot == usize::MAX {
                    *slot = self.fresh();
                }
            }
            for &(a, b) in cell.edges() {
                self.add_edge(map[a], map[b]);
            }
            self.cells.push(CellCopy { level: n + 1, map });
        }
        let mut f: Vec<usize> = (0..current).filter_map(|x| self.psi[x]).collect();
        f.sort_unstable();
        self.level_sets.push(f);
        self.layer_sizes.push(self.adjacency.len());
        self.levels += 1;
    }

    fn finish(&mut self) {
        for row in self.adjacency.iter_mut() {
            row.sort_unstable();
        }
        self.edges.sort_unstable();
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn base_clique_index(&self) -> usize {
        self.base_clique_index
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adjacency
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn origin(&self) -> Option<usize> {
        self.origin
    }

    pub fn cells(&self) -> &[CellCopy] {
        &self.cells
    }

    /// `|V Y_k|` for `k = 1..=levels`.
    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    /// `F_1 ⊂ ... ⊂ F_levels`, each sorted.
    pub fn level_sets(&self) -> &[Vec<usize>] {
        &self.level_sets
    }

    /// `psi(x)` for `x` in `Y_{levels-1}` (in the base clique when `levels = 1`).
    pub fn psi(&self, x: usize) -> Option<usize> {
        self.psi.get(x).copied().flatten()
    }

    pub fn psi_pairs(&self) -> Vec<(usize, usize)> {
        (0..self.vertex_count()).filter_map(|x| self.psi(x).map(|y| (x, y))).collect()
    }

    /// Vertex sets of all cliques with their birth level (0 for the base clique).
    pub fn cliques(&self) -> Vec<(usize, Vec<usize>)> {
        let mut out = Vec::new();
        for (ci, c) in self.cells.iter().enumerate() {
            for (j, cl) in self.cell_cliques.iter().enumerate() {
                let born = if ci == 0 && j + 1 == self.base_clique_index { 0 } else { c.level };
                out.push((born, cl.iter().map(|&v| c.map[v]).collect()));
            }
        }
        out
    }

    /// Boundary of `Y_levels` viewed as a cell graph: `psi^(levels-1)(B)`.
    pub fn outer_boundary(&self) -> Vec<usize> {
        let mut b = self.cell_boundary.clone();
        for _ in 1..self.levels {
            b = b.iter().map(|&v| self.psi(v).expect("psi defined")).collect();
        }
        b
    }

    pub fn distances_from(&self, s: usize) -> Vec<usize> {
        bfs(&self.adjacency, s)
    }

    /// Vertices of `Y_levels` whose degree grows at the next level: images
    /// under `psi` of old vertices lying in the newest cliques.
    pub fn growing_vertices(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for (ci, j) in self.newest_cliques() {
            for &v in &self.cell_cliques[j] {
                if let Some(y) = self.psi(self.cells[ci].map[v]) {
                    if y < self.vertex_count() {
                        out.insert(y);
                    }
                }
            }
        }
        out
    }

    /// Adjacency of `k` copies glued at the origin (`k = 1` is the graph itself).
    pub fn glue_at_origin(&self, k: usize) -> Result<(Vec<Vec<usize>>, usize)> {
        let o = self.origin.ok_or(Error::NoOrigin)?;
        let n = self.vertex_count();
        let id = |copy: usize, v: usize| -> usize {
            if v == o {
                o
            } else {
                copy * n + v
            }
        };
        let mut adj = vec![Vec::new(); k.max(1) * n];
        for copy in 0..k.max(1) {
            for v in 0..n {
                for &w in &self.adjacency[v] {
                    adj[id(copy, v)].push(id(copy, w));
                }
            }
        }
        for row in adj.iter_mut() {
            row.sort_unstable();
            row.dedup();
        }
        Ok((adj, o))
    }
}

pub(crate) fn bfs(adjacency: &[Vec<usize>], s: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; adjacency.len()];
    dist[s] = 0;
    let mut queue = VecDeque::from([s]);
    while let Some(v) = queue.pop_front() {
        for &w in &adjacency[v] {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Radius `r` such that walks of length at most `r` from the origin have the
/// same law in `b` as in the infinite graph.
pub fn safe_ball_radius(b: &BlowupGraph, _cell: &CellGraph) -> Result<usize> {
    let o = b.origin.ok_or(Error::NoOrigin)?;
    let dist = b.distances_from(o);
    let nearest = b.growing_vertices().iter().map(|&v| dist[v]).min();
    Ok(match nearest {
        Some(d) => d.saturating_sub(1),
        None => usize::MAX,
    })
}

/// Check that `psi` maps `Y_k` isomorphically onto the reduced graph of
/// `Y_{k+1}` with respect to `F_{k+1}`. Requires `k < levels`.
pub fn check_reduced_graph(b: &BlowupGraph, k: usize) -> Result<()> {
    if k == 0 || k >= b.levels {
        return Err(Error::IndexOutOfRange(format!("reduced-graph check needs 1 <= k < {}", b.levels)));
    }
    let size_k = b.layer_sizes[k - 1];
    let size_next = b.layer_sizes[k];
    let f: BTreeSet<usize> = b.level_sets[k].iter().copied().collect();
    // components of Y_{k+1} minus F_{k+1}, and their boundaries
    let mut comp = vec![usize::MAX; size_next];
    let mut reduced = BTreeSet::new();
    let mut ncomp = 0;
    for s in 0..size_next {
        if f.contains(&s) || comp[s] != usize::MAX {
            continue;
        }
        let mut boundary = BTreeSet::new();
        comp[s] = ncomp;
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for &w in &b.adjacency[v] {
                if w >= size_next {
                    continue;
                }
                if f.contains(&w) {
                    boundary.insert(w);
                } else if comp[w] == usize::MAX {
                    comp[w] = ncomp;
                    stack.push(w);
                }
            }
        }
        let bd: Vec<usize> = boundary.into_iter().collect();
        for (i, &x) in bd.iter().enumerate() {
            for &y in &bd[i + 1..] {
                reduced.insert((x, y));
            }
        }
        ncomp += 1;
    }
    let mut image = BTreeSet::new();
    for &(x, y) in &b.edges {
        if y < size_k {
            let (px, py) = (b.psi(x).unwrap(), b.psi(y).unwrap());
            image.insert((px.min(py), px.max(py)));
        }
    }
    let mut vertices: Vec<usize> = (0..size_k).map(|x| b.psi(x).unwrap()).collect();
    vertices.sort_unstable();
    vertices.dedup();
    if vertices.len() != size_k || vertices.iter().copied().collect::<BTreeSet<_>>() != f {
        return Err(Error::Structure(format!("psi is not a bijection of Y_{k} onto F_{}", k + 1)));
    }
    if image != reduced {
        return Err(Error::Structure(format!("reduced graph of Y_{} is not psi(Y_{k})", k + 1)));
    }
    Ok(())
}

/// Degree law `deg(x) = (theta-1) * (number of cliques at x)` on every vertex.
pub fn check_degree_law(b: &BlowupGraph) -> Result<()> {
    let mut count = vec![0usize; b.vertex_count()];
    for (_, c) in b.cliques() {
        for v in c {
            count[v] += 1;
        }
    }
    for v in 0..b.vertex_count() {
        if b.degree(v) != (b.theta - 1) * count[v] {
            return Err(Error::Structure(format!("vertex {v}: degree {} vs {} cliques", b.degree(v), count[v])));
        }
    }
    Ok(())
}

/// Check `d(psi x, psi y) >= 2 d(x, y)` for every pair in `Y_{levels-2}` with
/// `x` among the first `sources` vertices; distances are taken in `Y_levels`.
/// Returns the number of pairs checked.
pub fn check_distance_doubling(b: &BlowupGraph, sources: usize) -> Result<usize> {
    if b.levels < 3 {
        return Ok(0);
    }
    let inner = b.layer_sizes[b.levels - 3];
    let mut checked = 0;
    for x in 0..inner.min(sources) {
        let dx = b.distances_from(x);
        let px = b.psi(x).expect("psi defined on inner layers");
        let dpx = b.distances_from(px);
        for y in 0..inner {
            let py = b.psi(y).expect("psi defined on inner layers");
            if dpx[py] < 2 * dx[y] {
                return Err(Error::Structure(format!(
                    "d(psi {x}, psi {y}) = {} < 2 d({x}, {y}) = {}",
                    dpx[py],
                    2 * dx[y]
                )));
            }
            checked += 1;
        }
    }
    Ok(checked)
}

/// Lossless exchange form of a blow-up graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExportedGraph {
    pub vertices: usize,
    pub edges: Vec<[usize; 2]>,
    pub levels: usize,
    pub level_sets: Vec<Vec<usize>>,
    pub origin: Option<usize>,
    pub psi: Vec<[usize; 2]>,
    pub base_clique_index: usize,
    pub boundary: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    EdgeList,
    CellFormat,
    AdjacencyJson,
}

impl std::str::FromStr for ExportFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "edge-list" | "edges" => Ok(Self::EdgeList),
            "cell-format" | "cell" => Ok(Self::CellFormat),
            "adjacency-json" | "json" => Ok(Self::AdjacencyJson),
            other => Err(Error::Parse(format!("unknown export format '{other}'"))),
        }
    }
}

impl BlowupGraph {
    pub fn to_exported(&self) -> ExportedGraph {
        ExportedGraph {
            vertices: self.vertex_count(),
            edges: self.edges.iter().map(|&(a, b)| [a, b]).collect(),
            levels: self.levels,
            level_sets: self.level_sets.clone(),
            origin: self.origin,
            psi: self.psi_pairs().into_iter().map(|(a, b)| [a, b]).collect(),
            base_clique_index: self.base_clique_index,
            boundary: self.outer_boundary(),
        }
    }
}

fn write_header(s: &mut String, g: &ExportedGraph) {
    writeln!(s, "# levels {}", g.levels).unwrap();
    writeln!(s, "# base-clique {}", g.base_clique_index).unwrap();
    match g.origin {
        Some(o) => writeln!(s, "# origin {o}").unwrap(),
        None => writeln!(s, "# origin none").unwrap(),
    }
    for (k, f) in g.level_sets.iter().enumerate() {
        write!(s, "# level-set {}", k + 1).unwrap();
        for v in f {
            write!(s, " {v}").unwrap();
        }
        s.push('\n');
    }
    write!(s, "# psi").unwrap();
    for [a, b] in &g.psi {
        write!(s, " {a}:{b}").unwrap();
    }
    s.push('\n');
}

pub fn export_graph(b: &BlowupGraph, format: ExportFormat) -> String {
    let g = b.to_exported();
    let mut s = String::new();
    match format {
        ExportFormat::AdjacencyJson => {
            s = serde_json::to_string_pretty(&g).expect("serializable");
            s.push('\n');
        }
        ExportFormat::EdgeList => {
            writeln!(s, "# vertices {}", g.vertices).unwrap();
            write!(s, "# boundary").unwrap();
            for v in &g.boundary {
                write!(s, " {v}").unwrap();
            }
            s.push('\n');
            write_header(&mut s, &g);
            for [a, c] in &g.edges {
                writeln!(s, "{a} {c}").unwrap();
            }
        }
        ExportFormat::CellFormat => {
            write_header(&mut s, &g);
            writeln!(s, "vertices {}", g.vertices).unwrap();
            for [a, c] in &g.edges {
                writeln!(s, "edge {a} {c}").unwrap();
            }
            write!(s, "boundary").unwrap();
            for v in &g.boundary {
                write!(s, " {v}").unwrap();
            }
            s.push('\n');
        }
    }
    s
}

fn parse_usize(t: &str) -> Result<usize> {
    t.parse().map_err(|_| Error::Parse(format!("bad integer '{t}'")))
}

/// Parse any of the three export formats back into the exchange form.
pub fn import_graph(text: &str) -> Result<ExportedGraph> {
    if text.trim_start().starts_with('{') {
        return serde_json::from_str(text).map_err(|e| Error::Parse(format!("graph JSON: {e}")));
    }
    let mut g = ExportedGraph {
        vertices: 0,
        edges: Vec::new(),
        levels: 0,
        level_sets: Vec::new(),
        origin: None,
        psi: Vec::new(),
        base_clique_index: 0,
        boundary: Vec::new(),
    };
    let mut sets = BTreeMap::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (comment, body) = match line.strip_prefix('#') {
            Some(rest) => (true, rest.trim()),
            None => (false, line),
        };
        let parts: Vec<&str> = body.split_whitespace().collect();
        if parts.is_empty() {
            continue;
        }
        match (comment, parts[0]) {
            (_, "vertices") => g.vertices = parse_usize(parts.get(1).copied().unwrap_or(""))?,
            (_, "boundary") => g.boundary = parts[1..].iter().map(|t| parse_usize(t)).collect::<Result<_>>()?,
            (true, "levels") => g.levels = parse_usize(parts.get(1).copied().unwrap_or(""))?,
            (true, "base-clique") => g.base_clique_index = parse_usize(parts.get(1).copied().unwrap_or(""))?,
            (true, "origin") => {
                g.origin = match parts.get(1) {
                    Some(&"none") => None,
                    Some(t) => Some(parse_usize(t)?),
                    None => return Err(Error::Parse("origin line without value".into())),
                }
            }
            (true, "level-set") => {
                let k = parse_usize(parts.get(1).copied().unwrap_or(""))?;
                let ids = parts[2..].iter().map(|t| parse_usize(t)).collect::<Result<Vec<_>>>()?;
                sets.insert(k, ids);
            }
            (true, "psi") => {
                for pair in &parts[1..] {
                    let (a, b) = pair.split_once(':').ok_or_else(|| Error::Parse(format!("bad psi pair '{pair}'")))?;
                    g.psi.push([parse_usize(a)?, parse_usize(b)?]);
                }
            }
            (true, _) => {}
            (false, "edge") if parts.len() == 3 => g.edges.push([parse_usize(parts[1])?, parse_usize(parts[2])?]),
            (false, _) if parts.len() == 2 => g.edges.push([parse_usize(parts[0])?, parse_usize(parts[1])?]),
            (false, other) => return Err(Error::Parse(format!("unexpected line starting with '{other}'"))),
        }
    }
    g.level_sets = sets.into_values().collect();
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn level_one_is_the_cell() {
        let c = fixtures::flake(3).unwrap();
        let b = blow_up(&c, 1, 1).unwrap();
        assert_eq!(b.vertex_count(), c.vertex_count());
        assert_eq!(b.edges(), c.edges());
        assert!(safe_ball_radius(&b, &c).unwrap() >= 1);
    }

    #[test]
    fn flake4_two_levels() {
        let c = fixtures::flake(4).unwrap();
        let b = blow_up(&c, 1, 2).unwrap();
        assert_eq!(b.cliques().len(), 16);
        assert_eq!(b.edges().len(), 96);
    }

    #[test]
    fn gasket_counts() {
        let c = fixtures::sierpinski(2, 2).unwrap();
        let i = origin_clique(&c).unwrap();
        for k in 1..=5u32 {
            let b = blow_up(&c, i, k as usize).unwrap();
            assert_eq!(b.cliques().len(), 3usize.pow(k));
            assert_eq!(b.edges().len(), 3usize.pow(k + 1));
            assert_eq!(b.vertex_count(), (3usize.pow(k + 1) + 3) / 2);
        }
        let b = blow_up(&c, i, 4).unwrap();
        assert_eq!(safe_ball_radius(&b, &c).unwrap(), 15);
    }

    #[test]
    fn line_ray_radius() {
        let c = fixtures::line(2).unwrap();
        let b = blow_up(&c, 1, 3).unwrap();
        assert_eq!(b.origin(), Some(0));
        assert_eq!(safe_ball_radius(&b, &c).unwrap(), 7);
    }

    #[test]
    fn index_errors() {
        let c = fixtures::line(3).unwrap();
        assert!(matches!(blow_up(&c, 0, 2), Err(Error::IndexOutOfRange(_))));
        assert!(matches!(blow_up(&c, 4, 2), Err(Error::IndexOutOfRange(_))));
    }

    #[test]
    fn reduced_graphs_and_degrees() {
        for c in [fixtures::line(3).unwrap(), fixtures::flake(3).unwrap(), fixtures::sierpinski(2, 2).unwrap()] {
            let b = blow_up(&c, origin_clique(&c).unwrap(), 4).unwrap();
            for k in 1..=3 {
                check_reduced_graph(&b, k).unwrap();
            }
            check_degree_law(&b).unwrap();
            assert!(check_distance_doubling(&b, 8).unwrap() > 0);
        }
    }

    #[test]
    fn export_round_trips() {
        let c = fixtures::flake(3).unwrap();
        let b = blow_up(&c, 1, 3).unwrap();
        for fmt in [ExportFormat::EdgeList, ExportFormat::CellFormat, ExportFormat::AdjacencyJson] {
            let text = export_graph(&b, fmt);
            assert_eq!(import_graph(&text).unwrap(), b.to_exported(), "{fmt:?}");
        }
    }

    #[test]
    fn cell_export_is_a_cell_graph() {
        let c = fixtures::sierpinski(2, 2).unwrap();
        let b = blow_up(&c, 1, 3).unwrap();
        let big = crate::cellgraph::load_cell_graph(&export_graph(&b, ExportFormat::CellFormat)).unwrap();
        assert_eq!(big.mu(), 27);
    }
}
