//! The history graph: level graphs `Γ_n` on the limit-set cells, vertical
//! parent edges between consecutive levels, and an origin joined to `Γ_0`.
//!
//! Vertices are addressed globally by `u32`: `0` is the origin and level `n`
//! occupies a contiguous block starting at `offset(n)`. Distances are
//! `Option<u32>` with `None` meaning "not connected".

use std::collections::VecDeque;
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::complex::NONE;
use crate::subdivision::{LevelData, Levels};
use crate::validate::CheckedRule;

/// Unreached marker in BFS distance arrays.
pub const UNREACHED: u32 = u32::MAX;

pub const ORIGIN: u32 = 0;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HistoryError {
    #[error("level {0} was not computed")]
    UnknownLevel(usize),
    #[error("level {level} has no vertex {vertex}")]
    UnknownVertex { level: usize, vertex: u32 },
}

/// Which face pairs get a horizontal edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum HorizontalEdges {
    /// Every strictly comparable pair.
    #[default]
    Comparable,
    /// Only pairs whose ranks differ by one.
    Covering,
}

/// Compressed adjacency lists.
#[derive(Debug, Clone, Default)]
pub struct Csr {
    start: Vec<u32>,
    adj: Vec<u32>,
}

impl Csr {
    /// Undirected graph on `n` vertices.
    pub fn undirected(n: usize, edges: &[(u32, u32)]) -> Self {
        let mut deg = vec![0u32; n + 1];
        for &(a, b) in edges {
            deg[a as usize] += 1;
            deg[b as usize] += 1;
        }
        Self::fill(n, deg, edges.iter().flat_map(|&(a, b)| [(a, b), (b, a)]))
    }

    /// Directed graph on `n` vertices.
    pub fn directed(n: usize, edges: &[(u32, u32)]) -> Self {
        let mut deg = vec![0u32; n + 1];
        for &(a, _) in edges {
            deg[a as usize] += 1;
        }
        Self::fill(n, deg, edges.iter().copied())
    }

    fn fill(n: usize, deg: Vec<u32>, arcs: impl Iterator<Item = (u32, u32)>) -> Self {
        let mut start = Vec::with_capacity(n + 1);
        let mut acc = 0u32;
        for d in &deg[..n] {
            start.push(acc);
            acc += d;
        }
        start.push(acc);
        let mut pos = start.clone();
        let mut adj = vec![0u32; acc as usize];
        for (a, b) in arcs {
            adj[pos[a as usize] as usize] = b;
            pos[a as usize] += 1;
        }
        Self { start, adj }
    }

    pub fn len(&self) -> usize {
        self.start.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        let v = v as usize;
        &self.adj[self.start[v] as usize..self.start[v + 1] as usize]
    }

    /// Single-source BFS distances (`UNREACHED` when disconnected), optionally
    /// stopping past `limit`.
    pub fn bfs(&self, src: u32, limit: Option<u32>, dist: &mut Vec<u32>) {
        dist.clear();
        dist.resize(self.len(), UNREACHED);
        let mut queue = VecDeque::new();
        dist[src as usize] = 0;
        queue.push_back(src);
        while let Some(v) = queue.pop_front() {
            let d = dist[v as usize];
            if limit.is_some_and(|l| d >= l) {
                continue;
            }
            for &w in self.neighbors(v) {
                if dist[w as usize] == UNREACHED {
                    dist[w as usize] = d + 1;
                    queue.push_back(w);
                }
            }
        }
    }
}

/// Converts a BFS array entry to a distance.
pub fn as_distance(d: u32) -> Option<u32> {
    (d != UNREACHED).then_some(d)
}

/// `Γ_n`: one vertex per cell of `Λ_n`, horizontal edges between comparable cells.
#[derive(Debug, Clone)]
pub struct LevelGraph {
    pub level: usize,
    cells: Vec<u32>,
    vertex_of: Vec<u32>,
    ranks: Vec<u32>,
    edge_count: usize,
    adj: Csr,
}

impl LevelGraph {
    pub fn vertex_count(&self) -> usize {
        self.cells.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Cell of `R^n(X)` behind vertex `v`.
    pub fn cell(&self, v: u32) -> usize {
        self.cells[v as usize] as usize
    }

    pub fn vertex_of_cell(&self, cell: usize) -> Option<u32> {
        self.vertex_of.get(cell).copied().filter(|&v| v != NONE)
    }

    pub fn rank(&self, v: u32) -> u32 {
        self.ranks[v as usize]
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        self.adj.neighbors(v)
    }

    pub fn adjacency(&self) -> &Csr {
        &self.adj
    }

    fn check(&self, v: u32) -> Result<(), HistoryError> {
        if (v as usize) < self.cells.len() {
            Ok(())
        } else {
            Err(HistoryError::UnknownVertex { level: self.level, vertex: v })
        }
    }

    /// Fills `dist` with `d_n(src, ·)`.
    pub fn bfs(&self, src: u32, dist: &mut Vec<u32>) {
        self.adj.bfs(src, None, dist);
    }

    /// `d_n(x, y)`.
    pub fn distance(&self, x: u32, y: u32) -> Result<Option<u32>, HistoryError> {
        self.check(x)?;
        self.check(y)?;
        if x == y {
            return Ok(Some(0));
        }
        let mut dist = vec![UNREACHED; self.vertex_count()];
        let mut queue = VecDeque::from([x]);
        dist[x as usize] = 0;
        while let Some(v) = queue.pop_front() {
            for &w in self.neighbors(v) {
                if dist[w as usize] == UNREACHED {
                    dist[w as usize] = dist[v as usize] + 1;
                    if w == y {
                        return Ok(Some(dist[w as usize]));
                    }
                    queue.push_back(w);
                }
            }
        }
        Ok(None)
    }

    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.vertex_count() as u32)
            .flat_map(move |v| self.neighbors(v).iter().filter(move |&&w| v < w).map(move |&w| (v, w)))
    }
}

/// Builds `Γ_n` from one level.
pub fn build_level_graph(level: &LevelData, mode: HorizontalEdges) -> LevelGraph {
    let x = &level.complex;
    let mut vertex_of = vec![NONE; x.len()];
    let mut cells = Vec::new();
    for (c, _) in level.limit_mask.iter().enumerate().filter(|(_, &m)| m) {
        vertex_of[c] = cells.len() as u32;
        cells.push(c as u32);
    }
    let ranks: Vec<u32> = cells.iter().map(|&c| x.rank(c as usize)).collect();
    let mut edges = Vec::new();
    for (v, &c) in cells.iter().enumerate() {
        let r = ranks[v];
        for &f in x.attach(c as usize) {
            let fr = x.rank(f as usize);
            let keep = match mode {
                HorizontalEdges::Comparable => fr < r,
                HorizontalEdges::Covering => fr + 1 == r,
            };
            if keep {
                edges.push((vertex_of[f as usize], v as u32));
            }
        }
    }
    let adj = Csr::undirected(cells.len(), &edges);
    LevelGraph { level: level.level, cells, vertex_of, ranks, edge_count: edges.len(), adj }
}

/// Vertical edges between `Γ_n` (from `lower`) and `Γ_{n+1}` (from `upper`) as
/// `(parent vertex, child vertex)` pairs in level-local numbering.
pub fn vertical_edges(lower: &LevelGraph, upper: &LevelGraph, upper_data: &LevelData) -> Vec<(u32, u32)> {
    let parent = upper_data.parent.as_ref().expect("levels above 0 have parents");
    (0..upper.vertex_count() as u32)
        .map(|v| {
            let p = parent[upper.cell(v)] as usize;
            let pv = lower.vertex_of_cell(p).expect("parents of limit cells are limit cells");
            (pv, v)
        })
        .collect()
}

/// The truncated history graph over computed levels `0..=N`.
#[derive(Debug, Clone)]
pub struct HistoryGraph<'a> {
    levels: &'a Levels,
    graphs: Vec<LevelGraph>,
    /// `parents[n][v]`: parent of vertex `v` of `Γ_n` in `Γ_{n-1}` (empty for n = 0).
    parents: Vec<Vec<u32>>,
    /// `children[n]`: vertex of `Γ_n` to its children in `Γ_{n+1}`.
    children: Vec<Csr>,
    offsets: Vec<u32>,
}

impl<'a> HistoryGraph<'a> {
    pub fn build(levels: &'a Levels, mode: HorizontalEdges) -> Self {
        let graphs: Vec<LevelGraph> = levels.levels.iter().map(|l| build_level_graph(l, mode)).collect();
        let mut parents = vec![Vec::new()];
        let mut children = Vec::new();
        for n in 1..graphs.len() {
            let edges = vertical_edges(&graphs[n - 1], &graphs[n], &levels.levels[n]);
            let mut parent = vec![0; graphs[n].vertex_count()];
            for &(p, c) in &edges {
                parent[c as usize] = p;
            }
            children.push(Csr::directed(graphs[n - 1].vertex_count(), &edges));
            parents.push(parent);
        }
        children.push(Csr::directed(graphs.last().map_or(0, LevelGraph::vertex_count), &[]));
        let mut offsets = Vec::with_capacity(graphs.len() + 1);
        let mut acc = 1u32;
        for g in &graphs {
            offsets.push(acc);
            acc += g.vertex_count() as u32;
        }
        offsets.push(acc);
        Self { levels, graphs, parents, children, offsets }
    }

    pub fn levels(&self) -> &'a Levels {
        self.levels
    }

    pub fn max_level(&self) -> usize {
        self.graphs.len() - 1
    }

    pub fn level(&self, n: usize) -> &LevelGraph {
        &self.graphs[n]
    }

    pub fn level_graphs(&self) -> &[LevelGraph] {
        &self.graphs
    }

    pub fn vertex_count(&self) -> usize {
        *self.offsets.last().expect("offsets end with the total") as usize
    }

    /// Global id of vertex `v` of `Γ_n`.
    pub fn global(&self, n: usize, v: u32) -> u32 {
        self.offsets[n] + v
    }

    /// `(level, local vertex)` of a global id, `None` for the origin.
    pub fn locate(&self, g: u32) -> Option<(usize, u32)> {
        if g == ORIGIN {
            return None;
        }
        let n = self.offsets.partition_point(|&o| o <= g) - 1;
        Some((n, g - self.offsets[n]))
    }

    /// Looks up a vertex of `Γ_n` by cell name.
    pub fn find(&self, n: usize, name: &str) -> Option<u32> {
        let cell = self.levels.levels.get(n)?.complex.index_of(name)?;
        self.graphs[n].vertex_of_cell(cell)
    }

    pub fn cell_name(&self, n: usize, v: u32) -> &str {
        self.levels.levels[n].complex.name(self.graphs[n].cell(v))
    }

    pub fn parent(&self, n: usize, v: u32) -> Option<u32> {
        (n > 0).then(|| self.parents[n][v as usize])
    }

    pub fn children(&self, n: usize, v: u32) -> &[u32] {
        self.children[n].neighbors(v)
    }

    fn check(&self, n: usize, v: u32) -> Result<(), HistoryError> {
        let g = self.graphs.get(n).ok_or(HistoryError::UnknownLevel(n))?;
        g.check(v)
    }

    /// `d_n(x, y)`.
    pub fn distance_in_level(&self, n: usize, x: u32, y: u32) -> Result<Option<u32>, HistoryError> {
        self.graphs.get(n).ok_or(HistoryError::UnknownLevel(n))?.distance(x, y)
    }

    /// `f_{m,n}`: the `(n - m)`-fold parent.
    pub fn project(&self, m: usize, n: usize, v: u32) -> Result<u32, HistoryError> {
        self.check(n, v)?;
        if m > n {
            return Err(HistoryError::UnknownLevel(m));
        }
        let mut v = v;
        for k in (m + 1..=n).rev() {
            v = self.parents[k][v as usize];
        }
        Ok(v)
    }

    /// Calls `f` on every neighbor of global vertex `g`.
    pub fn for_each_neighbor(&self, g: u32, mut f: impl FnMut(u32)) {
        match self.locate(g) {
            None => {
                if let Some(g0) = self.graphs.first() {
                    (0..g0.vertex_count() as u32).for_each(|v| f(self.offsets[0] + v));
                }
            }
            Some((n, v)) => {
                let base = self.offsets[n];
                for &w in self.graphs[n].neighbors(v) {
                    f(base + w);
                }
                match self.parent(n, v) {
                    Some(p) => f(self.offsets[n - 1] + p),
                    None => f(ORIGIN),
                }
                if n < self.max_level() {
                    let up = self.offsets[n + 1];
                    for &c in self.children(n, v) {
                        f(up + c);
                    }
                }
            }
        }
    }

    /// BFS distances from global vertex `src` over the whole truncated graph.
    pub fn bfs_global(&self, src: u32, dist: &mut Vec<u32>) {
        dist.clear();
        dist.resize(self.vertex_count(), UNREACHED);
        dist[src as usize] = 0;
        let mut queue = VecDeque::from([src]);
        while let Some(v) = queue.pop_front() {
            let d = dist[v as usize] + 1;
            self.for_each_neighbor(v, |w| {
                if dist[w as usize] == UNREACHED {
                    dist[w as usize] = d;
                    queue.push_back(w);
                }
            });
        }
    }

    /// Shortest-path distance in the truncated graph between global vertices.
    pub fn distance_global(&self, a: u32, b: u32) -> Result<Option<u32>, HistoryError> {
        for g in [a, b] {
            if g as usize >= self.vertex_count() {
                let (n, v) = self.locate(g).unwrap_or((0, g));
                return Err(HistoryError::UnknownVertex { level: n, vertex: v });
            }
        }
        if a == b {
            return Ok(Some(0));
        }
        let mut dist = vec![UNREACHED; self.vertex_count()];
        dist[a as usize] = 0;
        let mut queue = VecDeque::from([a]);
        while let Some(v) = queue.pop_front() {
            let d = dist[v as usize] + 1;
            let mut hit = false;
            self.for_each_neighbor(v, |w| {
                if dist[w as usize] == UNREACHED {
                    dist[w as usize] = d;
                    hit |= w == b;
                    queue.push_back(w);
                }
            });
            if hit {
                return Ok(Some(d));
            }
        }
        Ok(None)
    }

    /// The vertical chain `O, f_0(v), ..., v` as global ids; empty for the origin.
    pub fn geodesic_to_origin(&self, g: u32) -> Vec<u32> {
        let Some((n, v)) = self.locate(g) else {
            return Vec::new();
        };
        let mut chain = vec![g];
        let mut cur = v;
        for k in (1..=n).rev() {
            cur = self.parents[k][cur as usize];
            chain.push(self.offsets[k - 1] + cur);
        }
        chain.push(ORIGIN);
        chain.reverse();
        chain
    }

    /// Combing distance between the rays to `v` and `w`: the difference of their
    /// lengths plus the largest distance between points at equal times, each ray
    /// held constant past its end.
    pub fn combing_distance(&self, v: u32, w: u32) -> Option<u32> {
        let rv = self.geodesic_to_origin(v);
        let rw = self.geodesic_to_origin(w);
        let len = |r: &[u32]| r.len().saturating_sub(1) as u32;
        let at = |r: &[u32], t: usize| if r.is_empty() { ORIGIN } else { r[t.min(r.len() - 1)] };
        let steps = rv.len().max(rw.len()).max(1);
        let mut worst = 0;
        for t in 0..steps {
            worst = worst.max(self.distance_global(at(&rv, t), at(&rw, t)).ok()??);
        }
        Some(len(&rv).abs_diff(len(&rw)) + worst)
    }

    /// Global distance through the normal form: a shortest path between `a ∈ Γ_la`
    /// and `b ∈ Γ_lb` goes down vertically to some common level `h`, across `Γ_h`,
    /// and back up; `h = -1` is the route through the origin.
    pub fn distance_normal_form(&self, a: u32, b: u32) -> Option<u32> {
        let (Some((la, va)), Some((lb, vb))) = (self.locate(a), self.locate(b)) else {
            let other = if a == ORIGIN { b } else { a };
            return Some(self.locate(other).map_or(0, |(n, _)| n as u32 + 1));
        };
        let mut best = (la + lb + 2) as u32;
        let (mut x, mut y) = (va, vb);
        for h in (0..=la.min(lb)).rev() {
            if h < la {
                x = self.project(h, la, va).ok()?;
            }
            if h < lb {
                y = self.project(h, lb, vb).ok()?;
            }
            if let Some(d) = self.graphs[h].distance(x, y).ok()? {
                best = best.min((la - h) as u32 + (lb - h) as u32 + d);
            }
        }
        Some(best)
    }

    /// Whether some ideal tile contains each limit cell of level `n`.
    pub fn touches_ideal(&self, rule: &CheckedRule, n: usize) -> Vec<bool> {
        let l = &self.levels.levels[n];
        let x = &l.complex;
        let dim = rule.dimension();
        let mut mask = vec![false; x.len()];
        for c in 0..x.len() {
            if x.rank(c) == dim && rule.is_ideal(x.type_index(c)) {
                for &f in x.attach(c) {
                    mask[f as usize] = true;
                }
            }
        }
        let g = &self.graphs[n];
        (0..g.vertex_count() as u32).map(|v| mask[g.cell(v)]).collect()
    }

    /// Graphviz rendering; vertex ids are `o` and `v{global}`.
    pub fn to_dot(&self, rule: &CheckedRule) -> String {
        let mut s = String::from("graph history {\n  o [label=\"O\", level=-1];\n");
        for n in 0..=self.max_level() {
            let ideal = self.touches_ideal(rule, n);
            for v in 0..self.graphs[n].vertex_count() as u32 {
                let _ = writeln!(
                    s,
                    "  v{} [label=\"{}\", level={}, rank={}, ideal={}];",
                    self.global(n, v),
                    self.cell_name(n, v).replace('"', "\\\""),
                    n,
                    self.graphs[n].rank(v),
                    ideal[v as usize]
                );
            }
        }
        for e in self.edges() {
            let name = |g: u32| if g == ORIGIN { "o".to_owned() } else { format!("v{g}") };
            let _ = writeln!(s, "  {} -- {} [kind={}];", name(e.from), name(e.to), e.kind.as_str());
        }
        s.push_str("}\n");
        s
    }

    pub fn to_json(&self, rule: &CheckedRule) -> GraphExport {
        let mut vertices = vec![VertexExport { id: ORIGIN, level: -1, cell: String::new(), rank: None, ideal: false }];
        for n in 0..=self.max_level() {
            let ideal = self.touches_ideal(rule, n);
            for v in 0..self.graphs[n].vertex_count() as u32 {
                vertices.push(VertexExport {
                    id: self.global(n, v),
                    level: n as i64,
                    cell: self.cell_name(n, v).to_owned(),
                    rank: Some(self.graphs[n].rank(v)),
                    ideal: ideal[v as usize],
                });
            }
        }
        GraphExport { vertices, edges: self.edges().collect(), truncated: self.levels.truncated.is_some() }
    }

    /// All edges: origin edges, then per level horizontal and downward vertical edges.
    pub fn edges(&self) -> impl Iterator<Item = EdgeExport> + '_ {
        (0..=self.max_level()).flat_map(move |n| {
            let g = &self.graphs[n];
            let base = self.offsets[n];
            let horizontal =
                g.edges().map(move |(a, b)| EdgeExport { from: base + a, to: base + b, kind: EdgeKind::Horizontal });
            let vertical = (0..g.vertex_count() as u32).map(move |v| EdgeExport {
                from: match self.parent(n, v) {
                    Some(p) => self.offsets[n - 1] + p,
                    None => ORIGIN,
                },
                to: base + v,
                kind: EdgeKind::Vertical,
            });
            vertical.chain(horizontal)
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Horizontal,
    Vertical,
}

impl EdgeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgeKind::Horizontal => "horizontal",
            EdgeKind::Vertical => "vertical",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdgeExport {
    pub from: u32,
    pub to: u32,
    pub kind: EdgeKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VertexExport {
    pub id: u32,
    pub level: i64,
    pub cell: String,
    pub rank: Option<u32>,
    /// Whether the cell also lies in an ideal tile.
    pub ideal: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GraphExport {
    pub vertices: Vec<VertexExport>,
    pub edges: Vec<EdgeExport>,
    pub truncated: bool,
}
