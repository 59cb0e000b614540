use std::time::Instant;

use subrule::classifier::{classify, Assumptions, Certainty, ClassifyError, Geometry, Reports};
use subrule::corpus::{corpus, manifests};
use subrule::pipeline::{analyze, Analysis, RunConfig};
use subrule::CheckedRule;

fn run(name: &str, assumptions: Assumptions) -> Analysis {
    let e = corpus(name).unwrap();
    let rule = CheckedRule::new(e.rule).unwrap();
    let config = RunConfig { assumptions, ..RunConfig::default() };
    analyze(&rule, e.complex, &config).unwrap()
}

fn manifest_assumptions(name: &str) -> Assumptions {
    let m = corpus(name).unwrap().manifest;
    Assumptions {
        qi_to_group: m.qi_to_group,
        manifold_group: m.manifold_group,
        model_geometry_dim_le_3: m.model_geometry,
    }
}

#[test]
fn corpus_verdicts_match_manifest() {
    for m in manifests() {
        let t = Instant::now();
        let a = run(&m.name, manifest_assumptions(&m.name));
        eprintln!("{} -> {} ({:?}) in {:?}", m.name, a.verdict.geometry, a.verdict.certainty, t.elapsed());
        assert_eq!(a.verdict.geometry.name(), m.expected_verdict, "{}: {:#?}", m.name, a.verdict);
    }
}

#[test]
fn compact_is_exact_and_others_are_evidence() {
    let a = run("ideal-point", Assumptions::default());
    assert_eq!((a.verdict.geometry, a.verdict.certainty), (Geometry::Compact, Certainty::Exact));
    assert_eq!(a.limit_counts[0], 0);
    let a = run("two-point", Assumptions::default());
    assert_eq!((a.verdict.geometry, a.verdict.certainty), (Geometry::Line, Certainty::BoundedLevelEvidence));
}

#[test]
fn flags_gate_conditional_verdicts() {
    let a = run("quadrant-sphere", Assumptions::default());
    assert_eq!(a.verdict.geometry, Geometry::Unknown);
    assert!(a.verdict.notes.iter().any(|n| n.contains("qi-to-group")));
    let a = run("quadrant-sphere", Assumptions { qi_to_group: true, ..Assumptions::default() });
    assert_eq!(a.verdict.geometry, Geometry::E3);
    assert_eq!(a.verdict.conditional_on, vec!["qi_to_group".to_string()]);
    let a = run("ring-tower", Assumptions::default());
    assert_eq!(a.verdict.geometry, Geometry::Unknown);
}

#[test]
fn verdicts_are_deterministic() {
    let a = run("binary-circle", Assumptions::default());
    let b = run("binary-circle", Assumptions::default());
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    let again = classify(
        Reports { growth: &a.growth, hyperbolicity: &a.hyperbolicity, ends: &a.ends, manifold: &a.manifold },
        Assumptions::default(),
    )
    .unwrap();
    assert_eq!(again, a.verdict);
}

#[test]
fn mismatched_level_ranges_are_rejected() {
    let a = run("cantor", Assumptions::default());
    let mut ends = a.ends.clone();
    ends.counts.pop();
    let err = classify(
        Reports { growth: &a.growth, hyperbolicity: &a.hyperbolicity, ends: &ends, manifold: &a.manifold },
        Assumptions::default(),
    );
    assert!(matches!(err, Err(ClassifyError::InconsistentLevels { .. })));
}

#[test]
fn geometry_names_round_trip() {
    for g in Geometry::ALL {
        assert_eq!(Geometry::from_name(g.name()), Some(g));
        assert_eq!(serde_json::to_string(&g).unwrap(), format!("\"{}\"", g.name()));
    }
    assert_eq!(Geometry::from_name("Nil"), None);
}
