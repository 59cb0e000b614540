//! Plain-text renderings of reports.

use std::fmt::Write as _;

use subrule::corpus::Manifest;
use subrule::growth::GrowthReport;
use subrule::history::HistoryGraph;
use subrule::hyperbolicity::{DeltaEstimate, HyperbolicityReport, HyperbolicityVerdict};
use subrule::pipeline::{Analysis, RunConfig};
use subrule::subdivision::Truncation;
use subrule::topology::EndsReport;
use subrule::ValidationReport;

fn header(config: &RunConfig) -> String {
    let a = &config.assumptions;
    format!(
        "config: levels={} budget={} pair-budget={} mmax={} jmax={} radius={} seed={} edges={:?} window={} epsilon={} qi-to-group={} manifold-group={} model-geometry={}\n",
        config.levels,
        config.cell_budget,
        config.pair_budget,
        config.m_max,
        config.j_max,
        config.radius,
        config.seed,
        config.horizontal_edges,
        config.window,
        config.epsilon,
        a.qi_to_group,
        a.manifold_group,
        a.model_geometry_dim_le_3,
    )
}

fn list<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

fn truncation_line(t: Option<Truncation>) -> String {
    match t {
        Some(t) => format!("truncated: level {} needs {} cells (budget {})\n", t.level, t.required_cells, t.budget),
        None => String::new(),
    }
}

pub fn validation(r: &ValidationReport) -> String {
    if r.ok {
        return "ok\n".into();
    }
    let mut s = String::from("invalid\n");
    for v in &r.violations {
        let _ = writeln!(s, "  {:?} [{}]: {}", v.code, v.ids.join(", "), v.message);
    }
    s
}

pub fn subdivide(config: &RunConfig, cells: &[u64], limit: &[u64], t: Option<Truncation>) -> String {
    let mut s = header(config);
    for (n, (c, l)) in cells.iter().zip(limit).enumerate() {
        let _ = writeln!(s, "level {n}: {c} cells, {l} in the limit set");
    }
    s + &truncation_line(t)
}

pub fn graph(h: &HistoryGraph<'_>) -> String {
    let mut s = String::new();
    for (n, g) in h.level_graphs().iter().enumerate() {
        let _ = writeln!(s, "level {n}: {} vertices, {} horizontal edges", g.vertex_count(), g.edge_count());
    }
    let _ = writeln!(s, "total: {} vertices including the origin", h.vertex_count());
    s + &truncation_line(h.levels().truncated)
}

pub fn growth(config: &RunConfig, r: &GrowthReport) -> String {
    let mut s = header(config);
    let _ = writeln!(s, "limit-set sizes: {}", list(&r.counts));
    let _ = writeln!(s, "counting function: {}", list(&r.cumulative));
    let _ = writeln!(s, "exact per-level class: {}", r.exact.per_level.kind);
    let _ = writeln!(s, "exact counting function class: {}", r.exact.cumulative);
    let _ = writeln!(s, "nilpotent: {}", r.exact.nilpotent);
    let _ = writeln!(s, "empirical counting function class: {}", r.empirical.kind);
    let _ = writeln!(s, "agree: {}", r.agree);
    if r.truncated {
        s.push_str("truncated: yes\n");
    }
    s
}

pub fn ends(config: &RunConfig, r: &EndsReport) -> String {
    let mut s = header(config);
    let _ = writeln!(s, "component counts: {}", list(&r.counts));
    let _ = writeln!(s, "ends: {}", r.classification);
    let _ = writeln!(s, "max component diameters: {}", list(&r.max_diameters));
    let _ = writeln!(s, "diameters exact: {}", r.diameters_exact);
    let _ = writeln!(s, "diameter bounded: {}", r.diameter_bounded);
    s
}

pub fn hyperbolicity(config: &RunConfig, r: &HyperbolicityReport) -> String {
    let mut s = header(config);
    match r.verdict {
        HyperbolicityVerdict::Survives { m, j, levels } => {
            let _ = writeln!(s, "constants M={m} j={j} survive through level {levels}");
        }
        HyperbolicityVerdict::NotHyperbolicUpToBounds => {
            let _ = writeln!(s, "no constants with M<={} j<={} survive", r.m_max, r.j_max);
        }
    }
    let surviving: Vec<String> =
        r.constants_checked.iter().filter(|c| c.survives()).map(|c| format!("({},{})", c.m, c.j)).collect();
    let _ = writeln!(s, "surviving pairs: {}", if surviving.is_empty() { "none".into() } else { surviving.join(" ") });
    let _ = writeln!(s, "counterexamples recorded: {}", r.counterexamples.len());
    let _ = writeln!(s, "sampled: {}", r.sampled);
    if let Some(d) = &r.delta_estimate {
        s.push_str(&delta_line(d));
    }
    s
}

fn delta_line(d: &DeltaEstimate) -> String {
    format!(
        "four-point delta: {} (radius {}, {} vertices, {})\n",
        d.delta,
        d.radius,
        d.vertices,
        if d.exhaustive { "exhaustive".to_string() } else { format!("{} samples", d.samples) }
    )
}

pub fn delta(config: &RunConfig, d: &DeltaEstimate) -> String {
    header(config) + &delta_line(d)
}

pub fn classification(a: &Analysis) -> String {
    let mut s = header(&a.config);
    let v = &a.verdict;
    let _ = writeln!(s, "verdict: {}", v.geometry);
    let _ = writeln!(
        s,
        "certainty: {}",
        match v.certainty {
            subrule::classifier::Certainty::Exact => "exact",
            subrule::classifier::Certainty::BoundedLevelEvidence => "bounded-level evidence",
        }
    );
    for e in &v.evidence {
        let _ = writeln!(s, "  [{}] {} {}: {}", e.step, if e.fired { "fired" } else { "no   " }, e.rule, e.detail);
    }
    if !v.conditional_on.is_empty() {
        let _ = writeln!(s, "conditional on: {}", v.conditional_on.join(", "));
    }
    for n in &v.notes {
        let _ = writeln!(s, "note: {n}");
    }
    s + &truncation_line(a.truncated)
}

pub fn corpus_list(ms: &[Manifest]) -> String {
    let width = ms.iter().map(|m| m.name.len()).max().unwrap_or(0);
    let mut s = String::new();
    for m in ms {
        let mut flags = Vec::new();
        if m.qi_to_group {
            flags.push("qi-to-group");
        }
        if m.manifold_group {
            flags.push("manifold-group");
        }
        if m.model_geometry {
            flags.push("model-geometry");
        }
        if m.reconstruction {
            flags.push("reconstruction");
        }
        let _ = writeln!(s, "{:width$}  {:16}  {}  [{}]", m.name, m.expected_verdict, m.description, flags.join(", "));
    }
    s
}
