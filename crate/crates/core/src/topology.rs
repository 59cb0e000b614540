//! Components of `Λ_n` across levels (ends), component diameters, the finite
//! circle/sphere checklist on `Λ_n`, and bounded-distance quotients of `Γ_n`.

use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::history::{Csr, HistoryGraph, LevelGraph, UNREACHED};
use crate::subdivision::LevelData;
use crate::union_find::UnionFind;
use crate::validate::CheckedRule;

/// Components up to this size get an exact diameter; larger ones a double-sweep estimate.
pub const EXACT_DIAMETER_LIMIT: usize = 2048;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TopologyError {
    #[error("ends classification needs at least 3 levels, got {0}")]
    TooFewLevels(usize),
}

/// Horizontal components of one level.
#[derive(Debug, Clone, Serialize)]
pub struct LevelComponents {
    pub level: usize,
    /// Component label of each vertex of `Γ_n`.
    #[serde(skip)]
    pub component_of: Vec<u32>,
    pub sizes: Vec<u32>,
    /// Component of the previous level containing the projection (empty at level 0).
    pub parent: Vec<u32>,
    pub diameters: Vec<u32>,
    /// False where the diameter is a double-sweep lower bound.
    pub diameter_exact: Vec<bool>,
}

impl LevelComponents {
    pub fn count(&self) -> usize {
        self.sizes.len()
    }

    pub fn max_diameter(&self) -> u32 {
        self.diameters.iter().copied().max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ComponentTree {
    pub levels: Vec<LevelComponents>,
}

impl ComponentTree {
    pub fn counts(&self) -> Vec<usize> {
        self.levels.iter().map(LevelComponents::count).collect()
    }

    /// True when every horizontal edge of every level projects into a single
    /// component of the level below, so `parent` is well defined.
    pub fn links_consistent(&self, h: &HistoryGraph<'_>) -> bool {
        (1..self.levels.len()).all(|n| {
            let below = &self.levels[n - 1].component_of;
            let here = &self.levels[n];
            h.level(n).edges().all(|(a, b)| {
                let pa = below[h.parent(n, a).expect("n > 0") as usize];
                let pb = below[h.parent(n, b).expect("n > 0") as usize];
                pa == pb && pa == here.parent[here.component_of[a as usize] as usize]
            })
        })
    }

    /// DOT rendering: one node per component, labelled with its size and diameter.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph components {\n");
        for lc in &self.levels {
            for c in 0..lc.count() {
                let _ = writeln!(
                    s,
                    "  \"{}:{}\" [label=\"L{} #{} size={} diam={}\"];",
                    lc.level, c, lc.level, c, lc.sizes[c], lc.diameters[c]
                );
            }
            for (c, &p) in lc.parent.iter().enumerate() {
                let _ = writeln!(s, "  \"{}:{}\" -> \"{}:{}\";", lc.level - 1, p, lc.level, c);
            }
        }
        s.push_str("}\n");
        s
    }
}

/// Labels the components of a level graph.
pub fn components(g: &LevelGraph) -> (Vec<u32>, usize) {
    let mut uf = UnionFind::new(g.vertex_count());
    for (a, b) in g.edges() {
        uf.union(a, b);
    }
    let count = uf.set_count();
    (uf.labels(), count)
}

/// BFS confined to the component of `src`; returns (eccentricity, farthest vertex).
/// `dist` must be all `UNREACHED` on entry and is restored before returning.
fn eccentricity(adj: &Csr, src: u32, dist: &mut [u32], seen: &mut Vec<u32>) -> (u32, u32) {
    seen.clear();
    dist[src as usize] = 0;
    seen.push(src);
    let mut head = 0;
    let mut far = (0, src);
    while head < seen.len() {
        let v = seen[head];
        head += 1;
        let d = dist[v as usize];
        if d > far.0 {
            far = (d, v);
        }
        for &w in adj.neighbors(v) {
            if dist[w as usize] == UNREACHED {
                dist[w as usize] = d + 1;
                seen.push(w);
            }
        }
    }
    for &v in seen.iter() {
        dist[v as usize] = UNREACHED;
    }
    far
}

fn level_components(h: &HistoryGraph<'_>, n: usize, below: Option<&[u32]>) -> LevelComponents {
    let g = h.level(n);
    let (component_of, count) = components(g);
    let mut members: Vec<Vec<u32>> = vec![Vec::new(); count];
    for (v, &c) in component_of.iter().enumerate() {
        members[c as usize].push(v as u32);
    }
    let parent = match below {
        Some(below) => members.iter().map(|m| below[h.parent(n, m[0]).expect("n > 0") as usize]).collect(),
        None => Vec::new(),
    };
    let mut dist = vec![UNREACHED; g.vertex_count()];
    let mut seen = Vec::new();
    let mut diameters = Vec::with_capacity(count);
    let mut exact = Vec::with_capacity(count);
    for m in &members {
        if m.len() <= EXACT_DIAMETER_LIMIT {
            let d = m.iter().map(|&v| eccentricity(g.adjacency(), v, &mut dist, &mut seen).0).max().unwrap_or(0);
            diameters.push(d);
            exact.push(true);
        } else {
            let (_, far) = eccentricity(g.adjacency(), m[0], &mut dist, &mut seen);
            diameters.push(eccentricity(g.adjacency(), far, &mut dist, &mut seen).0);
            exact.push(false);
        }
    }
    LevelComponents {
        level: n,
        component_of,
        sizes: members.iter().map(|m| m.len() as u32).collect(),
        parent,
        diameters,
        diameter_exact: exact,
    }
}

/// Components of every `Γ_n` with parent links induced by projection.
pub fn component_tree(h: &HistoryGraph<'_>) -> ComponentTree {
    let mut levels: Vec<LevelComponents> = Vec::with_capacity(h.max_level() + 1);
    for n in 0..=h.max_level() {
        let lc = level_components(h, n, levels.last().map(|l| l.component_of.as_slice()));
        levels.push(lc);
    }
    ComponentTree { levels }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Ends {
    Zero,
    One,
    Two,
    FiniteStable {
        k: usize,
    },
    Growing,
    /// Neither constant nor strictly increasing over the trailing half.
    Unstable,
}

impl std::fmt::Display for Ends {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Ends::Zero => f.write_str("zero"),
            Ends::One => f.write_str("one"),
            Ends::Two => f.write_str("two"),
            Ends::FiniteStable { k } => write!(f, "finite-stable({k})"),
            Ends::Growing => f.write_str("growing"),
            Ends::Unstable => f.write_str("unstable"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EndsReport {
    pub counts: Vec<usize>,
    pub classification: Ends,
    /// Largest component diameter per level.
    pub max_diameters: Vec<u32>,
    pub diameters_exact: bool,
    /// Max diameter nonincreasing over the trailing half of the levels.
    pub diameter_bounded: bool,
}

fn trailing_half<T>(s: &[T]) -> &[T] {
    &s[s.len() / 2..]
}

pub fn ends_classification(tree: &ComponentTree) -> Result<EndsReport, TopologyError> {
    let counts = tree.counts();
    if counts.len() < 3 {
        return Err(TopologyError::TooFewLevels(counts.len()));
    }
    let tail = trailing_half(&counts);
    let classification = if counts.contains(&0) {
        Ends::Zero
    } else if tail.windows(2).all(|w| w[0] == w[1]) {
        match tail[0] {
            1 => Ends::One,
            2 => Ends::Two,
            k => Ends::FiniteStable { k },
        }
    } else if tail.windows(2).all(|w| w[0] < w[1]) {
        Ends::Growing
    } else {
        Ends::Unstable
    };
    let max_diameters: Vec<u32> = tree.levels.iter().map(LevelComponents::max_diameter).collect();
    let diameter_bounded = trailing_half(&max_diameters).windows(2).all(|w| w[1] <= w[0]);
    Ok(EndsReport {
        counts,
        classification,
        max_diameters,
        diameters_exact: tree.levels.iter().all(|l| l.diameter_exact.iter().all(|&e| e)),
        diameter_bounded,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ManifoldKind {
    Circle,
    ClosedSurfaceSphere,
    Other,
}

impl std::fmt::Display for ManifoldKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ManifoldKind::Circle => "circle",
            ManifoldKind::ClosedSurfaceSphere => "closed-surface-sphere",
            ManifoldKind::Other => "other",
        })
    }
}

/// Outcome of the checklist on one `Λ_n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelManifold {
    pub level: usize,
    pub kind: ManifoldKind,
    pub cells: usize,
    pub dimension: Option<u32>,
    pub connected: bool,
    pub pure: bool,
    pub euler_characteristic: i64,
    /// Vertices without exactly two edge cofaces (rank 1).
    pub bad_vertices: usize,
    /// Edges without exactly two tile cofaces (rank 2).
    pub bad_edges: usize,
    /// Vertices whose link is not a single cycle (rank 2).
    pub link_failures: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ManifoldVerdict {
    pub levels: Vec<LevelManifold>,
    /// The common kind when every level agrees.
    pub stable: Option<ManifoldKind>,
    pub note: &'static str,
}

impl ManifoldVerdict {
    pub fn every_level(&self, kind: ManifoldKind) -> bool {
        self.stable == Some(kind)
    }
}

/// Runs the circle/sphere checklist on the subcomplex `Λ_n` of one level.
pub fn detect_manifold(rule: &CheckedRule, level: &LevelData) -> LevelManifold {
    let x = &level.complex;
    let in_lambda = &level.limit_mask;
    let cells: Vec<usize> = (0..x.len()).filter(|&c| in_lambda[c]).collect();
    let dimension = cells.iter().map(|&c| x.rank(c)).max();
    let mut uf = UnionFind::new(x.len());
    let mut covered = vec![false; x.len()];
    let mut chi = 0i64;
    // cofaces[c]: number of attach entries of rank(c)+1 cells of Λ_n that hit c
    let mut cofaces = vec![0u32; x.len()];
    for &c in &cells {
        chi += if x.rank(c).is_multiple_of(2) { 1 } else { -1 };
        for &f in x.attach(c) {
            uf.union(c as u32, f);
            if Some(x.rank(c)) == dimension {
                covered[f as usize] = true;
            }
            if x.rank(f as usize) + 1 == x.rank(c) {
                cofaces[f as usize] += 1;
            }
        }
    }
    let connected = !cells.is_empty() && cells.iter().all(|&c| uf.find(c as u32) == uf.find(cells[0] as u32));
    let pure = cells.iter().all(|&c| covered[c]);
    let count_bad = |rank: u32| cells.iter().filter(|&&c| x.rank(c) == rank && cofaces[c] != 2).count();
    let (bad_vertices, bad_edges, link_failures) = match dimension {
        Some(1) => (count_bad(0), 0, 0),
        Some(2) => (0, count_bad(1), link_failures(rule, level, &cells)),
        _ => (0, 0, 0),
    };
    let kind = match dimension {
        _ if !connected || !pure => ManifoldKind::Other,
        Some(1) if bad_vertices == 0 => ManifoldKind::Circle,
        Some(2) if bad_edges == 0 && link_failures == 0 && chi == 2 => ManifoldKind::ClosedSurfaceSphere,
        _ => ManifoldKind::Other,
    };
    LevelManifold {
        level: level.level,
        kind,
        cells: cells.len(),
        dimension,
        connected,
        pure,
        euler_characteristic: chi,
        bad_vertices,
        bad_edges,
        link_failures,
    }
}

/// Counts vertices of a 2-dimensional `Λ_n` whose link is not one cycle. Link
/// edges come from the corners of each tile's model polygon.
fn link_failures(rule: &CheckedRule, level: &LevelData, cells: &[usize]) -> usize {
    let x = &level.complex;
    let mut link: Vec<Vec<(u32, u32)>> = vec![Vec::new(); x.len()];
    let mut broken = vec![false; x.len()];
    for &f in cells.iter().filter(|&&c| x.rank(c) == 2) {
        let model = &rule.rule().types[x.type_index(f)].model;
        let image = x.attach(f);
        for (p, pc) in model.cells.iter().enumerate() {
            if pc.rank != 0 {
                continue;
            }
            let corner: Vec<usize> = model
                .cells
                .iter()
                .enumerate()
                .filter(|(_, e)| e.rank == 1 && e.attach.iter().any(|&q| q as usize == p))
                .map(|(e, _)| e)
                .collect();
            let v = image[p] as usize;
            if let [a, b] = corner[..] {
                link[v].push((image[a], image[b]));
            } else {
                broken[v] = true;
            }
        }
    }
    cells.iter().filter(|&&v| x.rank(v) == 0).filter(|&&v| broken[v] || !is_single_cycle(&link[v])).count()
}

/// A multigraph given by its edge list is one cycle: nonempty, connected, all degrees 2.
fn is_single_cycle(edges: &[(u32, u32)]) -> bool {
    if edges.is_empty() {
        return false;
    }
    let mut nodes: Vec<u32> = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
    nodes.sort_unstable();
    let degrees_ok = nodes.chunk_by(|a, b| a == b).all(|run| run.len() == 2);
    nodes.dedup();
    let index = |v: u32| nodes.binary_search(&v).expect("node present") as u32;
    let mut uf = UnionFind::new(nodes.len());
    for &(a, b) in edges {
        uf.union(index(a), index(b));
    }
    degrees_ok && uf.set_count() == 1
}

/// Checklist over every computed level.
pub fn manifold_verdict(rule: &CheckedRule, levels: &[LevelData]) -> ManifoldVerdict {
    let per_level: Vec<LevelManifold> = levels.iter().map(|l| detect_manifold(rule, l)).collect();
    let first = per_level.first().map(|l| l.kind);
    let stable = first.filter(|k| per_level.iter().all(|l| l.kind == *k));
    ManifoldVerdict {
        levels: per_level,
        stable,
        note: "heuristic: checked on the limit complex at each level, not on its bounded-distance quotient",
    }
}

/// `Γ_n` with vertices at distance at most `bound` identified (transitively).
#[derive(Debug, Clone)]
pub struct Quotient {
    pub bound: Option<u32>,
    pub class_of: Vec<u32>,
    pub class_count: usize,
    /// Induced edges between distinct classes, sorted and deduplicated.
    pub edges: Vec<(u32, u32)>,
}

impl Quotient {
    pub fn degree(&self, c: u32) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == c || b == c).count()
    }

    /// A simple cycle graph on at least three vertices.
    pub fn is_cycle(&self) -> bool {
        if self.class_count < 3 || self.edges.len() != self.class_count {
            return false;
        }
        let mut deg = vec![0usize; self.class_count];
        let mut uf = UnionFind::new(self.class_count);
        for &(a, b) in &self.edges {
            deg[a as usize] += 1;
            deg[b as usize] += 1;
            uf.union(a, b);
        }
        deg.iter().all(|&d| d == 2) && uf.set_count() == 1
    }
}

/// Quotient of `Γ_n` by the transitive closure of `d_n ≤ bound` (`None` means
/// unbounded within components).
pub fn quotient_graph(g: &LevelGraph, bound: Option<u32>) -> Quotient {
    let n = g.vertex_count();
    let (class_of, class_count) = if bound == Some(0) {
        ((0..n as u32).collect(), n)
    } else {
        // any bound >= 1 relates every edge, and edges generate the same closure
        components(g)
    };
    let mut edges: Vec<(u32, u32)> = g
        .edges()
        .map(|(a, b)| (class_of[a as usize], class_of[b as usize]))
        .filter(|(a, b)| a != b)
        .map(|(a, b)| (a.min(b), a.max(b)))
        .collect();
    edges.sort_unstable();
    edges.dedup();
    Quotient { bound, class_of, class_count, edges }
}

/// `⌈δ̂⌉ + 1` from a doubled four-point estimate.
pub fn default_quotient_bound(delta_doubled: u32) -> u32 {
    delta_doubled.div_ceil(2) + 1
}
