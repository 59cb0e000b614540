use std::collections::{BTreeSet, HashMap};

use subrule::corpus::{corpus, CORPUS_NAMES};
use subrule::history::{build_level_graph, HistoryGraph, HorizontalEdges, ORIGIN, UNREACHED};
use subrule::subdivision::{iterate, Levels};
use subrule::CheckedRule;

fn levels(name: &str, n: usize) -> (CheckedRule, Levels) {
    let e = corpus(name).unwrap();
    let rule = CheckedRule::new(e.rule).unwrap();
    let l = iterate(&rule, e.complex, n, 1_000_000).unwrap();
    (rule, l)
}

/// Global vertex ids keyed by (level, cell), and adjacency lists.
type Oracle = (HashMap<(usize, usize), usize>, Vec<Vec<u32>>);

/// Independent construction of the truncated history graph from closures and
/// parent maps, solved by Floyd-Warshall.
fn oracle(l: &Levels) -> Oracle {
    let mut id = HashMap::new();
    let mut next = 1;
    for (n, lvl) in l.levels.iter().enumerate() {
        for c in 0..lvl.complex.len() {
            if lvl.limit_mask[c] {
                id.insert((n, c), next);
                next += 1;
            }
        }
    }
    let mut d = vec![vec![UNREACHED; next]; next];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    let mut link = |a: usize, b: usize| {
        d[a][b] = 1;
        d[b][a] = 1;
    };
    for (n, lvl) in l.levels.iter().enumerate() {
        for c in 0..lvl.complex.len() {
            let Some(&v) = id.get(&(n, c)) else { continue };
            for f in lvl.complex.closure(c).unwrap() {
                if f != c && lvl.complex.rank(f) < lvl.complex.rank(c) {
                    link(id[&(n, f)], v);
                }
            }
            match lvl.parent_of(c) {
                Some(p) => link(id[&(n - 1, p)], v),
                None => link(0, v),
            }
        }
    }
    for k in 0..next {
        for i in 0..next {
            if d[i][k] == UNREACHED {
                continue;
            }
            for j in 0..next {
                if d[k][j] != UNREACHED && d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    (id, d)
}

#[test]
fn cantor_level_graphs() {
    let (_, l) = levels("cantor", 2);
    let g0 = build_level_graph(&l.levels[0], HorizontalEdges::Comparable);
    assert_eq!((g0.vertex_count(), g0.edge_count()), (3, 2));
    let g1 = build_level_graph(&l.levels[1], HorizontalEdges::Comparable);
    assert_eq!((g1.vertex_count(), g1.edge_count()), (6, 4));
    let h = HistoryGraph::build(&l, HorizontalEdges::Comparable);
    let s = h.find(0, "s").unwrap();
    assert_eq!(h.children(0, s).len(), 4);
    let v0 = h.find(0, "v0").unwrap();
    assert_eq!(h.children(0, v0).len(), 1);
    let mut origin_degree = 0;
    h.for_each_neighbor(ORIGIN, |_| origin_degree += 1);
    assert_eq!(origin_degree, 3);

    let left = h.find(1, "s/l").unwrap();
    let right = h.find(1, "s/r").unwrap();
    assert_eq!(h.distance_in_level(1, left, right).unwrap(), None);
    assert_eq!(h.distance_global(h.global(1, left), h.global(1, right)).unwrap(), Some(2));
    assert_eq!(h.project(0, 1, left).unwrap(), s);
    let mid = h.find(1, "s/m1").unwrap();
    assert_eq!(h.project(0, 1, mid).unwrap(), s);
    assert_eq!(h.project(1, 1, mid).unwrap(), mid);

    let leftmost = h.find(2, "s/l/l").unwrap();
    let ray = h.geodesic_to_origin(h.global(2, leftmost));
    assert_eq!(ray.len() - 1, 3);
    assert_eq!(ray, vec![ORIGIN, h.global(0, s), h.global(1, left), h.global(2, leftmost)]);
    assert!(h.geodesic_to_origin(ORIGIN).is_empty());
    for v in 0..h.level(2).vertex_count() as u32 {
        assert_eq!(h.distance_global(ORIGIN, h.global(2, v)).unwrap(), Some(3));
    }
}

#[test]
fn empty_limit_set_gives_empty_graph() {
    let (_, l) = levels("ideal-point", 2);
    let h = HistoryGraph::build(&l, HorizontalEdges::Comparable);
    for g in h.level_graphs() {
        assert_eq!(g.vertex_count(), 0);
    }
    assert_eq!(h.vertex_count(), 1);
}

#[test]
fn binary_circle_opposite_edges() {
    let (_, l) = levels("binary-circle", 1);
    let h = HistoryGraph::build(&l, HorizontalEdges::Comparable);
    let g = h.level(1);
    assert_eq!(g.vertex_count(), 12);
    // e0/l and e1/r sit half a circle apart.
    let a = h.find(1, "e0/l").unwrap();
    let b = h.find(1, "e1/r").unwrap();
    assert_eq!(g.distance(a, b).unwrap(), Some(6));
    let v = h.find(1, "e0/m").unwrap();
    assert_eq!(g.distance(a, v).unwrap(), Some(1));
    assert!(g.distance(a, 99).is_err());
}

#[test]
fn distances_match_oracle() {
    for (name, n) in
        [("cantor", 3), ("binary-circle", 3), ("quadrant-annulus", 3), ("quadrant-sphere", 1), ("barycentric-2", 1)]
    {
        let (_, l) = levels(name, n);
        let h = HistoryGraph::build(&l, HorizontalEdges::Comparable);
        let (id, d) = oracle(&l);
        assert_eq!(id.len() + 1, h.vertex_count(), "{name}");
        let global = |k: usize, c: usize| h.global(k, h.level(k).vertex_of_cell(c).unwrap());
        let mut verts: Vec<(u32, usize)> = vec![(ORIGIN, 0)];
        verts.extend(id.iter().map(|(&(k, c), &i)| (global(k, c), i)));
        let mut dist = Vec::new();
        for &(a, ia) in &verts {
            h.bfs_global(a, &mut dist);
            for &(b, ib) in &verts {
                assert_eq!(dist[b as usize], d[ia][ib], "{name}");
                assert_eq!(h.distance_normal_form(a, b), Some(d[ia][ib]), "{name}");
            }
        }
    }
}

#[test]
fn projection_is_monotone_and_functorial() {
    for name in CORPUS_NAMES {
        let (_, l) = levels(name, 3);
        let h = HistoryGraph::build(&l, HorizontalEdges::Comparable);
        let top = h.max_level();
        let mut dn = Vec::new();
        let mut dm = Vec::new();
        for n in 1..=top {
            let g = h.level(n);
            for x in 0..g.vertex_count() as u32 {
                g.bfs(x, &mut dn);
                for m in 0..n {
                    let fx = h.project(m, n, x).unwrap();
                    h.level(m).bfs(fx, &mut dm);
                    for y in 0..g.vertex_count() as u32 {
                        let fy = h.project(m, n, y).unwrap();
                        assert!(dm[fy as usize] <= dn[y as usize], "{name}: {m} < {n}");
                        for k in m..=n {
                            let via = h.project(m, k, h.project(k, n, y).unwrap()).unwrap();
                            assert_eq!(via, fy);
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn geodesics_to_origin_are_unique() {
    for name in ["cantor", "binary-circle", "quadrant-sphere", "ring-tower"] {
        let (_, l) = levels(name, 3);
        let h = HistoryGraph::build(&l, HorizontalEdges::Comparable);
        let mut dist = Vec::new();
        h.bfs_global(ORIGIN, &mut dist);
        let mut order: Vec<u32> = (0..h.vertex_count() as u32).collect();
        order.sort_by_key(|&v| dist[v as usize]);
        let mut count = vec![0u64; h.vertex_count()];
        count[ORIGIN as usize] = 1;
        for &v in &order[1..] {
            let mut c = 0;
            h.for_each_neighbor(v, |w| {
                if dist[w as usize] + 1 == dist[v as usize] {
                    c += count[w as usize];
                }
            });
            count[v as usize] = c;
        }
        for v in 1..h.vertex_count() as u32 {
            let (n, _) = h.locate(v).unwrap();
            assert_eq!(dist[v as usize], n as u32 + 1, "{name}");
            assert_eq!(count[v as usize], 1, "{name}");
            let ray = h.geodesic_to_origin(v);
            assert_eq!(ray.len() as u32 - 1, dist[v as usize]);
        }
    }
}

#[test]
fn combing_bounds() {
    for name in ["cantor", "binary-circle", "quadrant-annulus"] {
        let (_, l) = levels(name, 2);
        let h = HistoryGraph::build(&l, HorizontalEdges::Comparable);
        let all: Vec<u32> = (0..h.vertex_count() as u32).collect();
        for &v in &all {
            for &w in &all {
                let d = h.distance_global(v, w).unwrap().unwrap();
                let dp = h.combing_distance(v, w).unwrap();
                assert!(d <= dp && dp <= 2 * d, "{name}: d={d} dp={dp}");
            }
        }
    }
    let (_, l) = levels("cantor", 1);
    let h = HistoryGraph::build(&l, HorizontalEdges::Comparable);
    let (a, b) = (h.global(0, h.find(0, "v0").unwrap()), h.global(0, h.find(0, "v1").unwrap()));
    assert_eq!(h.combing_distance(a, a), Some(0));
    assert_eq!(h.combing_distance(a, b), Some(2));
    let (l1, r1) = (h.global(1, h.find(1, "s/l").unwrap()), h.global(1, h.find(1, "s/r").unwrap()));
    assert_eq!(h.combing_distance(l1, r1), Some(2));
}

#[test]
fn horizontal_edges_join_distinct_ranks() {
    for mode in [HorizontalEdges::Comparable, HorizontalEdges::Covering] {
        let (_, l) = levels("quadrant-sphere", 2);
        let h = HistoryGraph::build(&l, mode);
        for g in h.level_graphs() {
            for (a, b) in g.edges() {
                assert_ne!(g.rank(a), g.rank(b));
                if mode == HorizontalEdges::Covering {
                    assert_eq!(g.rank(a).abs_diff(g.rank(b)), 1);
                }
            }
        }
    }
    let (_, l) = levels("quadrant-sphere", 0);
    let full = build_level_graph(&l.levels[0], HorizontalEdges::Comparable);
    let covering = build_level_graph(&l.levels[0], HorizontalEdges::Covering);
    // Each square adds 4 vertex-square edges.
    assert_eq!(full.edge_count(), covering.edge_count() + 8);
}

#[test]
fn exports() {
    let (rule, l) = levels("cantor", 1);
    let h = HistoryGraph::build(&l, HorizontalEdges::Comparable);
    let json = h.to_json(&rule);
    assert_eq!(json.vertices.len(), 10);
    // 3 origin edges, 2 + 4 horizontal, 6 vertical.
    assert_eq!(json.edges.len(), 15);
    let ideal: BTreeSet<&str> = json.vertices.iter().filter(|v| v.ideal).map(|v| v.cell.as_str()).collect();
    assert_eq!(ideal, BTreeSet::from(["s/m1", "s/m2"]));
    let dot = h.to_dot(&rule);
    assert!(dot.starts_with("graph history {"));
    assert_eq!(dot.matches(" -- ").count(), 15);
}
