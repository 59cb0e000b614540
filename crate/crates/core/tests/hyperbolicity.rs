use subrule::corpus::corpus;
use subrule::history::{HistoryGraph, HorizontalEdges, ORIGIN};
use subrule::hyperbolicity::{
    check_constants, estimate_delta, four_point_doubled, search_constants, standard_path, HyperbolicityParams,
    HyperbolicityVerdict, DEFAULT_DELTA_SAMPLES, DEFAULT_EXHAUSTIVE_BOUND, DEFAULT_PAIR_BUDGET,
};
use subrule::subdivision::{iterate, Levels};
use subrule::CheckedRule;

fn levels(name: &str, n: usize) -> Levels {
    let e = corpus(name).unwrap();
    let rule = CheckedRule::new(e.rule).unwrap();
    iterate(&rule, e.complex, n, 1_000_000).unwrap()
}

fn check(h: &HistoryGraph<'_>, m: u32, j: usize) -> bool {
    check_constants(h, HyperbolicityParams { m, j }, DEFAULT_PAIR_BUDGET, 0).survives()
}

#[test]
fn cantor_constants() {
    let l = levels("cantor", 6);
    let h = HistoryGraph::build(&l, HorizontalEdges::Comparable);
    assert!(check(&h, 3, 1));
    assert!(!check(&h, 1, 1));
    let r = search_constants(&h, 8, 3, DEFAULT_PAIR_BUDGET, 0);
    // M = 2 already survives: the only level pairs at projected distance 2 are
    // the two endpoints of an A-edge, whose children lie in different components.
    assert_eq!(r.minimal_surviving, Some(HyperbolicityParams { m: 2, j: 1 }));
}

#[test]
fn binary_circle_certifies() {
    let l = levels("binary-circle", 8);
    let h = HistoryGraph::build(&l, HorizontalEdges::Comparable);
    assert!(check(&h, 8, 1));
    let r = search_constants(&h, 8, 1, DEFAULT_PAIR_BUDGET, 0);
    let p = r.minimal_surviving.expect("some constants survive");
    assert!(p.m <= 8 && p.j == 1);
    assert!(!r.sampled);
}

#[test]
fn ring_tower_fails_everywhere() {
    let l = levels("ring-tower", 6);
    let h = HistoryGraph::build(&l, HorizontalEdges::Comparable);
    let r = search_constants(&h, 6, 3, DEFAULT_PAIR_BUDGET, 0);
    assert_eq!(r.verdict, HyperbolicityVerdict::NotHyperbolicUpToBounds);
    for s in &r.per_level {
        for m in 1..=6 {
            assert!(s.has_counterexample(m), "M={m} j={} n={}", s.j, s.n);
        }
    }
}

#[test]
fn two_point_survives_vacuously() {
    let l = levels("two-point", 5);
    let h = HistoryGraph::build(&l, HorizontalEdges::Comparable);
    let r = search_constants(&h, 4, 2, DEFAULT_PAIR_BUDGET, 0);
    assert_eq!(r.minimal_surviving, Some(HyperbolicityParams { m: 1, j: 1 }));
    assert!(r.per_level.iter().all(|s| s.pairs_checked == 0));
}

#[test]
fn counterexamples_reverify_and_are_monotone() {
    for name in ["cantor", "quadrant-annulus", "ring-tower", "binary-circle"] {
        let l = levels(name, 5);
        let h = HistoryGraph::build(&l, HorizontalEdges::Comparable);
        let r = search_constants(&h, 6, 2, DEFAULT_PAIR_BUDGET, 0);
        for c in &r.counterexamples {
            let up = c.n + c.j;
            let (x, y) = (h.find(up, &c.x).unwrap(), h.find(up, &c.y).unwrap());
            let du = h.distance_in_level(up, x, y).unwrap().unwrap();
            let (fx, fy) = (h.project(c.n, up, x).unwrap(), h.project(c.n, up, y).unwrap());
            let dl = h.distance_in_level(c.n, fx, fy).unwrap().unwrap();
            assert_eq!((du, dl), (c.d_upper, c.d_lower), "{name}");
            assert!(du <= dl);
        }
        for j in 1..=2 {
            let survive: Vec<bool> = (1..=6).map(|m| check(&h, m, j)).collect();
            for w in survive.windows(2) {
                assert!(!w[0] || w[1], "{name}: survival not monotone in M");
            }
            for m in 1..=6u32 {
                let from_search = r.constants_checked.iter().find(|v| v.m == m && v.j == j).unwrap();
                assert_eq!(from_search.survives(), survive[m as usize - 1], "{name} M={m} j={j}");
            }
        }
    }
}

#[test]
fn sampling_is_deterministic() {
    let l = levels("binary-circle", 6);
    let h = HistoryGraph::build(&l, HorizontalEdges::Comparable);
    let a = search_constants(&h, 4, 1, 2_000, 7);
    let b = search_constants(&h, 4, 1, 2_000, 7);
    assert!(a.sampled);
    assert_eq!(a, b);
}

#[test]
fn standard_paths() {
    let l = levels("cantor", 3);
    let h = HistoryGraph::build(&l, HorizontalEdges::Comparable);
    let s = h.global(0, h.find(0, "s").unwrap());
    let leaf = h.global(2, h.find(2, "s/l/l").unwrap());
    let p = standard_path(&h, s, leaf).unwrap();
    assert_eq!(p.len() - 1, 2);
    let (v0, v1) = (h.global(0, h.find(0, "v0").unwrap()), h.global(0, h.find(0, "v1").unwrap()));
    assert_eq!(standard_path(&h, v0, s).unwrap(), vec![v0, s]);
    let (l1, r1) = (h.global(1, h.find(1, "s/l").unwrap()), h.global(1, h.find(1, "s/r").unwrap()));
    assert_eq!(standard_path(&h, l1, r1).unwrap(), vec![l1, s, r1]);
    assert_eq!(standard_path(&h, v0, v1).unwrap().len() - 1, 2);

    for name in ["cantor", "binary-circle", "quadrant-annulus"] {
        let l = levels(name, 3);
        let h = HistoryGraph::build(&l, HorizontalEdges::Comparable);
        for a in 0..h.vertex_count() as u32 {
            for b in 0..h.vertex_count() as u32 {
                let p = standard_path(&h, a, b).unwrap();
                assert_eq!((p[0], *p.last().unwrap()), (a, b));
                for w in p.windows(2) {
                    let mut adjacent = false;
                    h.for_each_neighbor(w[0], |x| adjacent |= x == w[1]);
                    assert!(adjacent, "{name}: path steps must be edges");
                }
                let d = h.distance_global(a, b).unwrap().unwrap();
                assert_eq!(p.len() as u32 - 1, d, "{name}");
            }
        }
    }
}

#[test]
fn delta_estimates() {
    let l = levels("ideal-point", 3);
    let h = HistoryGraph::build(&l, HorizontalEdges::Comparable);
    assert_eq!(estimate_delta(&h, 8, DEFAULT_EXHAUSTIVE_BOUND, DEFAULT_DELTA_SAMPLES, 0).delta_doubled, 0);

    let l = levels("cantor", 3);
    let h = HistoryGraph::build(&l, HorizontalEdges::Comparable);
    let mut last = 0;
    for radius in 1..=3 {
        let d = estimate_delta(&h, radius, 100, DEFAULT_DELTA_SAMPLES, 0);
        assert!(d.exhaustive);
        assert!(d.delta_doubled >= last);
        last = d.delta_doubled;
    }
    assert!(last <= 4, "cantor delta {}", last as f64 / 2.0);

    // Vertical edges alone form a tree rooted at the origin.
    let verts: Vec<u32> = (0..h.vertex_count() as u32).collect();
    let rays: Vec<Vec<u32>> = verts.iter().map(|&v| h.geodesic_to_origin(v)).collect();
    let k = verts.len();
    let mut d = vec![0u32; k * k];
    for a in 0..k {
        for b in 0..k {
            let (ra, rb) = (&rays[a], &rays[b]);
            let common = ra.iter().zip(rb).take_while(|(x, y)| x == y).count().max(1);
            d[a * k + b] = (ra.len().max(1) - common + rb.len().max(1) - common) as u32;
        }
    }
    assert_eq!(d[ORIGIN as usize * k + 5], h.geodesic_to_origin(5).len() as u32 - 1);
    assert_eq!(four_point_doubled(k, &d), 0);
}

#[test]
fn binary_circle_delta_within_six_m() {
    let l = levels("binary-circle", 8);
    let h = HistoryGraph::build(&l, HorizontalEdges::Comparable);
    let m = search_constants(&h, 8, 1, DEFAULT_PAIR_BUDGET, 0).minimal_surviving.unwrap().m;
    let d = estimate_delta(&h, 8, DEFAULT_EXHAUSTIVE_BOUND, DEFAULT_DELTA_SAMPLES, 0);
    if d.delta > 6.0 * m as f64 {
        eprintln!("warning: delta {} exceeds 6M = {}", d.delta, 6 * m);
    }
}
