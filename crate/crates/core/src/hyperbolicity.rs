//! Finite-level check of the hyperbolicity criterion on history graphs, the
//! search for constants `(M, j)`, standard paths, and a four-point δ estimate.
//!
//! A pair `x, y ∈ Γ_{n+j}` at finite distance is a counterexample for `M` when
//! `d_n(f x, f y) ≥ M` and `d_{n+j}(x, y) ≤ d_n(f x, f y)`. One sweep over the
//! pairs of a level finds counterexamples for every `M` at once, since a pair
//! with projected distance `D` is a counterexample for all `M ≤ D`.

use std::collections::HashMap;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::history::{HistoryError, HistoryGraph, LevelGraph, ORIGIN, UNREACHED};

/// Default number of ordered pairs examined per level before sampling sources.
pub const DEFAULT_PAIR_BUDGET: u64 = 4_000_000;
/// Vertex count up to which δ is computed over all quadruples.
pub const DEFAULT_EXHAUSTIVE_BOUND: usize = 60;
pub const DEFAULT_DELTA_SAMPLES: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HyperbolicityParams {
    pub m: u32,
    pub j: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    /// Lower level; `x, y` live in level `n + j`.
    pub n: usize,
    pub j: usize,
    pub x: String,
    pub y: String,
    pub d_upper: u32,
    pub d_lower: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstantsVerdict {
    pub m: u32,
    pub j: usize,
    pub levels_checked: usize,
    pub sampled: bool,
    /// First counterexample in (level, x, y) order, if any.
    pub counterexample: Option<Counterexample>,
}

impl ConstantsVerdict {
    pub fn survives(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Largest projected distance among counterexamples at one level, so that a
/// counterexample exists there exactly for `M ≤ max_violating`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelSweep {
    pub n: usize,
    pub j: usize,
    pub pairs_checked: u64,
    pub sampled: bool,
    pub max_violating: Option<u32>,
}

impl LevelSweep {
    pub fn has_counterexample(&self, m: u32) -> bool {
        self.max_violating.is_some_and(|d| d >= m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "status")]
pub enum HyperbolicityVerdict {
    Survives { m: u32, j: usize, levels: usize },
    NotHyperbolicUpToBounds,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicityReport {
    pub levels_checked: usize,
    pub m_max: u32,
    pub j_max: usize,
    pub sampled: bool,
    /// Verdicts in lexicographic `(M, j)` order.
    pub constants_checked: Vec<ConstantsVerdict>,
    pub minimal_surviving: Option<HyperbolicityParams>,
    pub verdict: HyperbolicityVerdict,
    pub counterexamples: Vec<Counterexample>,
    pub per_level: Vec<LevelSweep>,
    pub delta_estimate: Option<DeltaEstimate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaEstimate {
    pub delta: f64,
    /// `2 δ̂`, exact.
    pub delta_doubled: u32,
    pub radius: u32,
    pub vertices: usize,
    pub samples: usize,
    pub exhaustive: bool,
}

fn choose_sources(count: usize, budget: u64, seed: u64, salt: u64) -> (Vec<u32>, bool) {
    let pairs = count as u64 * count.saturating_sub(1) as u64 / 2;
    if pairs <= budget {
        return ((0..count as u32).collect(), false);
    }
    let k = ((budget / count.max(1) as u64).max(1) as usize).min(count);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let mut picked: Vec<u32> = sample(&mut rng, count, k).into_iter().map(|i| i as u32).collect();
    picked.sort_unstable();
    (picked, true)
}

/// Result of sweeping the pairs of `Γ_{n+j}` against `Γ_n`.
struct Sweep {
    info: LevelSweep,
    /// First counterexample per `M` (index `M - 1`), in canonical order.
    first: Vec<Option<Counterexample>>,
}

fn sweep_level(h: &HistoryGraph<'_>, n: usize, j: usize, m_max: u32, budget: u64, seed: u64) -> Sweep {
    let upper: &LevelGraph = h.level(n + j);
    let lower: &LevelGraph = h.level(n);
    let (sources, sampled) = choose_sources(upper.vertex_count(), budget, seed, ((n as u64) << 8) | j as u64);
    let proj: Vec<u32> =
        (0..upper.vertex_count() as u32).map(|v| h.project(n, n + j, v).expect("vertex of upper level")).collect();
    let mut du = Vec::new();
    let mut dl = Vec::new();
    let mut dl_source = UNREACHED;
    let mut first: Vec<Option<Counterexample>> = vec![None; m_max as usize];
    let mut max_violating = None;
    let mut pairs = 0u64;
    for &x in &sources {
        upper.bfs(x, &mut du);
        let fx = proj[x as usize];
        if dl_source != fx {
            lower.bfs(fx, &mut dl);
            dl_source = fx;
        }
        for y in 0..upper.vertex_count() as u32 {
            // Sampled sources pair with every target; exhaustive sweeps take x < y.
            if (!sampled && y <= x) || y == x {
                continue;
            }
            let d_up = du[y as usize];
            if d_up == UNREACHED {
                continue;
            }
            pairs += 1;
            let d_low = dl[proj[y as usize] as usize];
            if d_low == UNREACHED || d_low == 0 || d_up > d_low {
                continue;
            }
            max_violating = max_violating.max(Some(d_low));
            for m in 1..=d_low.min(m_max) {
                let slot = &mut first[m as usize - 1];
                if slot.is_none() {
                    *slot = Some(Counterexample {
                        n,
                        j,
                        x: h.cell_name(n + j, x).to_owned(),
                        y: h.cell_name(n + j, y).to_owned(),
                        d_upper: d_up,
                        d_lower: d_low,
                    });
                }
            }
        }
    }
    Sweep { info: LevelSweep { n, j, pairs_checked: pairs, sampled, max_violating }, first }
}

/// Checks one pair of constants on all levels `n ≤ N - j`.
pub fn check_constants(h: &HistoryGraph<'_>, params: HyperbolicityParams, budget: u64, seed: u64) -> ConstantsVerdict {
    let top = h.max_level();
    let mut sampled = false;
    let mut counterexample = None;
    if params.j <= top && params.m >= 1 {
        for n in 0..=top - params.j {
            let s = sweep_level(h, n, params.j, params.m, budget, seed);
            sampled |= s.info.sampled;
            if let Some(c) = s.first[params.m as usize - 1].clone() {
                counterexample = Some(c);
                break;
            }
        }
    }
    ConstantsVerdict { m: params.m, j: params.j, levels_checked: top, sampled, counterexample }
}

/// Scans all `(M, j)` with `M ≤ m_max`, `j ≤ j_max` and reports the minimal
/// surviving pair in lexicographic order.
pub fn search_constants(h: &HistoryGraph<'_>, m_max: u32, j_max: usize, budget: u64, seed: u64) -> HyperbolicityReport {
    let top = h.max_level();
    let js: Vec<usize> = (1..=j_max.min(top)).collect();
    let mut per_level = Vec::new();
    let mut first: HashMap<(u32, usize), Counterexample> = HashMap::new();
    let mut sampled = false;
    for &j in &js {
        for n in 0..=top - j {
            let s = sweep_level(h, n, j, m_max, budget, seed);
            sampled |= s.info.sampled;
            for (i, c) in s.first.into_iter().enumerate() {
                if let Some(c) = c {
                    first.entry((i as u32 + 1, j)).or_insert(c);
                }
            }
            per_level.push(s.info);
        }
    }
    let mut constants_checked = Vec::new();
    for m in 1..=m_max {
        for &j in &js {
            let level_sampled = per_level.iter().any(|l| l.j == j && l.sampled);
            constants_checked.push(ConstantsVerdict {
                m,
                j,
                levels_checked: top,
                sampled: level_sampled,
                counterexample: first.get(&(m, j)).cloned(),
            });
        }
    }
    let minimal_surviving =
        constants_checked.iter().find(|v| v.survives()).map(|v| HyperbolicityParams { m: v.m, j: v.j });
    let verdict = match minimal_surviving {
        Some(p) => HyperbolicityVerdict::Survives { m: p.m, j: p.j, levels: top },
        None => HyperbolicityVerdict::NotHyperbolicUpToBounds,
    };
    let counterexamples = constants_checked.iter().filter_map(|v| v.counterexample.clone()).collect();
    HyperbolicityReport {
        levels_checked: top,
        m_max,
        j_max,
        sampled,
        constants_checked,
        minimal_surviving,
        verdict,
        counterexamples,
        per_level,
        delta_estimate: None,
    }
}

/// Shortest down-horizontal-up path between two global vertices. Among equally
/// short options the deepest crossing level wins; the route through the origin
/// is used only when no level route is as short.
pub fn standard_path(h: &HistoryGraph<'_>, a: u32, b: u32) -> Result<Vec<u32>, HistoryError> {
    for v in [a, b] {
        if v as usize >= h.vertex_count() {
            return Err(HistoryError::UnknownVertex { level: 0, vertex: v });
        }
    }
    // Rays run O, level 0, ..., the vertex itself.
    let ray_a = h.geodesic_to_origin(a);
    let ray_b = h.geodesic_to_origin(b);
    let mut through_origin: Vec<u32> = ray_a.iter().rev().copied().collect();
    if through_origin.is_empty() {
        through_origin.push(ORIGIN);
    }
    through_origin.extend(ray_b.iter().skip(1));
    let (Some((la, _)), Some((lb, _))) = (h.locate(a), h.locate(b)) else {
        return Ok(through_origin);
    };
    let mut best: Option<Vec<u32>> = None;
    for lvl in 0..=la.min(lb) {
        let (_, x) = h.locate(ray_a[lvl + 1]).expect("ray vertex below the origin");
        let (_, y) = h.locate(ray_b[lvl + 1]).expect("ray vertex below the origin");
        let Some(mid) = shortest_level_path(h.level(lvl), x, y) else { continue };
        let len = (la - lvl) + (lb - lvl) + mid.len() - 1;
        if best.as_ref().is_some_and(|p| p.len() - 1 < len) {
            continue;
        }
        let mut path: Vec<u32> = ray_a[lvl + 2..].iter().rev().copied().collect();
        path.extend(mid.iter().map(|&v| h.global(lvl, v)));
        path.extend(&ray_b[lvl + 2..]);
        best = Some(path);
    }
    Ok(match best {
        Some(p) if p.len() <= through_origin.len() => p,
        _ => through_origin,
    })
}

fn shortest_level_path(g: &LevelGraph, x: u32, y: u32) -> Option<Vec<u32>> {
    let mut prev = vec![UNREACHED; g.vertex_count()];
    prev[x as usize] = x;
    let mut queue = std::collections::VecDeque::from([x]);
    while let Some(v) = queue.pop_front() {
        if v == y {
            break;
        }
        for &w in g.neighbors(v) {
            if prev[w as usize] == UNREACHED {
                prev[w as usize] = v;
                queue.push_back(w);
            }
        }
    }
    if prev[y as usize] == UNREACHED {
        return None;
    }
    let mut path = vec![y];
    let mut cur = y;
    while cur != x {
        cur = prev[cur as usize];
        path.push(cur);
    }
    path.reverse();
    Some(path)
}

/// Four-point δ over the ball of the given radius about the origin (levels
/// `< radius`); exhaustive when the ball has at most `exhaustive_bound`
/// vertices, otherwise over `samples` seeded vertices.
pub fn estimate_delta(
    h: &HistoryGraph<'_>,
    radius: u32,
    exhaustive_bound: usize,
    samples: usize,
    seed: u64,
) -> DeltaEstimate {
    let mut from_origin = Vec::new();
    h.bfs_global(ORIGIN, &mut from_origin);
    let ball: Vec<u32> = (0..h.vertex_count() as u32).filter(|&v| from_origin[v as usize] <= radius).collect();
    let exhaustive = ball.len() <= exhaustive_bound;
    let chosen: Vec<u32> = if exhaustive {
        ball.clone()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut picked: Vec<u32> =
            sample(&mut rng, ball.len(), samples.min(ball.len())).into_iter().map(|i| ball[i]).collect();
        picked.sort_unstable();
        picked
    };
    let k = chosen.len();
    let mut d = vec![0u32; k * k];
    let mut dist = Vec::new();
    for (i, &v) in chosen.iter().enumerate() {
        h.bfs_global(v, &mut dist);
        for (jdx, &w) in chosen.iter().enumerate() {
            d[i * k + jdx] = dist[w as usize];
        }
    }
    let best = four_point_doubled(k, &d);
    DeltaEstimate {
        delta: best as f64 / 2.0,
        delta_doubled: best,
        radius,
        vertices: ball.len(),
        samples: k,
        exhaustive,
    }
}

/// `2 δ` of a finite metric given as a row-major `k × k` distance matrix: the
/// largest `min{(x,y)_p, (y,z)_p} - (x,z)_p` over all quadruples, doubled and
/// floored at zero.
pub fn four_point_doubled(k: usize, d: &[u32]) -> u32 {
    let at = |i: usize, j: usize| d[i * k + j] as i64;
    let mut best = 0i64;
    for p in 0..k {
        for x in 0..k {
            for y in 0..k {
                let xy = at(p, x) + at(p, y) - at(x, y);
                for z in 0..k {
                    let yz = at(p, y) + at(p, z) - at(y, z);
                    let xz = at(p, x) + at(p, z) - at(x, z);
                    best = best.max(xy.min(yz) - xz);
                }
            }
        }
    }
    best as u32
}
