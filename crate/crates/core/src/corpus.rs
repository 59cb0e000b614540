//! Built-in example rules with their initial complexes.

use serde::{Deserialize, Serialize};

use crate::builder::{build_complex, BuildError, CellSpec, RuleBuilder};
use crate::complex::{SubdivisionRule, TypedComplex};
use crate::rulefile::{canonical_complex, canonical_rule};

/// Names accepted by [`corpus`], in listing order.
pub const CORPUS_NAMES: [&str; 8] = [
    "cantor",
    "ideal-point",
    "two-point",
    "binary-circle",
    "quadrant-annulus",
    "quadrant-sphere",
    "ring-tower",
    "barycentric-2",
];

/// Expected outcome of the classifier on a corpus entry under its listed flags.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub name: String,
    pub description: String,
    pub expected_verdict: String,
    pub qi_to_group: bool,
    pub manifold_group: bool,
    pub model_geometry: bool,
    /// Combinatorially equivalent stand-in for a figure that could not be transcribed.
    pub reconstruction: bool,
}

#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub rule: SubdivisionRule,
    pub complex: TypedComplex,
    pub manifest: Manifest,
}

fn manifest(name: &str, description: &str, verdict: &str, flags: (bool, bool, bool)) -> Manifest {
    Manifest {
        name: name.into(),
        description: description.into(),
        expected_verdict: verdict.into(),
        qi_to_group: flags.0,
        manifold_group: flags.1,
        model_geometry: flags.2,
        reconstruction: matches!(name, "quadrant-annulus" | "quadrant-sphere" | "ring-tower"),
    }
}

const NO_FLAGS: (bool, bool, bool) = (false, false, false);

/// Looks up a corpus entry by name.
pub fn corpus(name: &str) -> Option<CorpusEntry> {
    let built = match name {
        "cantor" => cantor(),
        "ideal-point" => ideal_point(),
        "two-point" => two_point(),
        "binary-circle" => binary_circle(),
        "quadrant-annulus" => quadrant_annulus(),
        "quadrant-sphere" => quadrant_sphere(),
        "ring-tower" => ring_tower(),
        "barycentric-2" => barycentric(),
        _ => return None,
    };
    Some(built.unwrap_or_else(|e| panic!("corpus entry `{name}` is malformed: {e}")))
}

pub fn manifests() -> Vec<Manifest> {
    CORPUS_NAMES.iter().filter_map(|n| corpus(n)).map(|e| e.manifest).collect()
}

fn edge(b: &mut RuleBuilder, id: &str, ideal: bool) -> Result<(), BuildError> {
    b.cell_type(id, 1, ideal, &[("a", "V", &[]), ("b", "V", &[])])?;
    Ok(())
}

fn unchanged_edge(b: &mut RuleBuilder, id: &str) -> Result<(), BuildError> {
    b.subdivision(id, &[("a", "V", &[], "a"), ("b", "V", &[], "b"), ("e", id, &["a", "b"], "top")])?;
    Ok(())
}

fn halved_edge(b: &mut RuleBuilder, id: &str, left: &str, right: &str) -> Result<(), BuildError> {
    b.subdivision(
        id,
        &[
            ("a", "V", &[], "a"),
            ("m", "V", &[], "top"),
            ("b", "V", &[], "b"),
            ("l", left, &["a", "m"], "top"),
            ("r", right, &["m", "b"], "top"),
        ],
    )?;
    Ok(())
}

fn finish(b: RuleBuilder, cells: &[CellSpec<'_>], m: Manifest) -> Result<CorpusEntry, BuildError> {
    let rule = b.build();
    let complex = build_complex(&rule, cells)?;
    Ok(CorpusEntry { complex: canonical_complex(&rule, &complex), rule: canonical_rule(&rule), manifest: m })
}

fn cantor() -> Result<CorpusEntry, BuildError> {
    let mut b = RuleBuilder::new();
    b.vertex_type("V", false)?;
    edge(&mut b, "A", false)?;
    edge(&mut b, "B", true)?;
    b.subdivision(
        "A",
        &[
            ("a", "V", &[], "a"),
            ("m1", "V", &[], "top"),
            ("m2", "V", &[], "top"),
            ("b", "V", &[], "b"),
            ("l", "A", &["a", "m1"], "top"),
            ("c", "B", &["m1", "m2"], "top"),
            ("r", "A", &["m2", "b"], "top"),
        ],
    )?;
    unchanged_edge(&mut b, "B")?;
    finish(
        b,
        &[("v0", "V", &[]), ("v1", "V", &[]), ("s", "A", &["v0", "v1"])],
        manifest("cantor", "middle thirds: A -> A B A with B ideal", "TreeLikeManyEnds", NO_FLAGS),
    )
}

fn ideal_point() -> Result<CorpusEntry, BuildError> {
    let mut b = RuleBuilder::new();
    b.vertex_type("A", true)?;
    finish(b, &[("p", "A", &[])], manifest("ideal-point", "one ideal point", "Compact", NO_FLAGS))
}

fn two_point() -> Result<CorpusEntry, BuildError> {
    let mut b = RuleBuilder::new();
    b.vertex_type("A", false)?;
    finish(b, &[("p", "A", &[]), ("q", "A", &[])], manifest("two-point", "two non-ideal points", "Line", NO_FLAGS))
}

fn binary_circle() -> Result<CorpusEntry, BuildError> {
    let mut b = RuleBuilder::new();
    b.vertex_type("V", false)?;
    edge(&mut b, "E", false)?;
    halved_edge(&mut b, "E", "E", "E")?;
    finish(
        b,
        &[
            ("v0", "V", &[]),
            ("v1", "V", &[]),
            ("v2", "V", &[]),
            ("e0", "E", &["v0", "v1"]),
            ("e1", "E", &["v1", "v2"]),
            ("e2", "E", &["v2", "v0"]),
        ],
        manifest("binary-circle", "circle of three edges, each halved", "FuchsianH2", NO_FLAGS),
    )
}

fn quadrant_annulus() -> Result<CorpusEntry, BuildError> {
    let mut b = RuleBuilder::new();
    b.vertex_type("V", false)?;
    edge(&mut b, "A", false)?;
    edge(&mut b, "B", false)?;
    halved_edge(&mut b, "A", "A", "B")?;
    unchanged_edge(&mut b, "B")?;
    finish(
        b,
        &[("p", "V", &[]), ("q", "V", &[]), ("e0", "A", &["p", "q"]), ("e1", "A", &["q", "p"])],
        manifest("quadrant-annulus", "A -> A B, B -> B on a two-edge circle", "E2", (true, false, false)),
    )
}

fn square_type(b: &mut RuleBuilder, id: &str, bottom: &str, top: &str, sides: &str) -> Result<(), BuildError> {
    b.cell_type(
        id,
        2,
        false,
        &[
            ("v00", "V", &[]),
            ("v10", "V", &[]),
            ("v01", "V", &[]),
            ("v11", "V", &[]),
            ("bottom", bottom, &["v00", "v10"]),
            ("top_edge", top, &["v01", "v11"]),
            ("left", sides, &["v00", "v01"]),
            ("right", sides, &["v10", "v11"]),
        ],
    )?;
    Ok(())
}

fn quadrant_sphere() -> Result<CorpusEntry, BuildError> {
    let mut b = RuleBuilder::new();
    b.vertex_type("V", false)?;
    edge(&mut b, "S", false)?;
    edge(&mut b, "U", false)?;
    // A: all four edges have their corner end at the lower-left of the quadrant.
    square_type(&mut b, "A", "S", "S", "S")?;
    square_type(&mut b, "B", "U", "U", "S")?;
    square_type(&mut b, "C", "U", "U", "U")?;
    halved_edge(&mut b, "S", "S", "U")?;
    unchanged_edge(&mut b, "U")?;
    b.subdivision(
        "A",
        &[
            ("p00", "V", &[], "v00"),
            ("p10", "V", &[], "bottom"),
            ("p20", "V", &[], "v10"),
            ("p01", "V", &[], "left"),
            ("p11", "V", &[], "top"),
            ("p21", "V", &[], "right"),
            ("p02", "V", &[], "v01"),
            ("p12", "V", &[], "top_edge"),
            ("p22", "V", &[], "v11"),
            ("b0", "S", &["p00", "p10"], "bottom"),
            ("b1", "U", &["p10", "p20"], "bottom"),
            ("l0", "S", &["p00", "p01"], "left"),
            ("l1", "U", &["p01", "p02"], "left"),
            ("t0", "S", &["p02", "p12"], "top_edge"),
            ("t1", "U", &["p12", "p22"], "top_edge"),
            ("r0", "S", &["p20", "p21"], "right"),
            ("r1", "U", &["p21", "p22"], "right"),
            ("h0", "S", &["p01", "p11"], "top"),
            ("h1", "U", &["p11", "p21"], "top"),
            ("w0", "S", &["p10", "p11"], "top"),
            ("w1", "U", &["p11", "p12"], "top"),
            ("qa", "A", &["p00", "p10", "p01", "p11"], "top"),
            ("qb", "B", &["p10", "p20", "p11", "p21"], "top"),
            ("qd", "B", &["p01", "p02", "p11", "p12"], "top"),
            ("qc", "C", &["p11", "p21", "p12", "p22"], "top"),
        ],
    )?;
    b.subdivision(
        "B",
        &[
            ("v00", "V", &[], "v00"),
            ("v10", "V", &[], "v10"),
            ("v01", "V", &[], "v01"),
            ("v11", "V", &[], "v11"),
            ("ml", "V", &[], "left"),
            ("mr", "V", &[], "right"),
            ("bottom", "U", &["v00", "v10"], "bottom"),
            ("up", "U", &["v01", "v11"], "top_edge"),
            ("l0", "S", &["v00", "ml"], "left"),
            ("l1", "U", &["ml", "v01"], "left"),
            ("r0", "S", &["v10", "mr"], "right"),
            ("r1", "U", &["mr", "v11"], "right"),
            ("mid", "U", &["ml", "mr"], "top"),
            ("lower", "B", &["v00", "v10", "ml", "mr"], "top"),
            ("upper", "C", &["ml", "mr", "v01", "v11"], "top"),
        ],
    )?;
    b.subdivision(
        "C",
        &[
            ("v00", "V", &[], "v00"),
            ("v10", "V", &[], "v10"),
            ("v01", "V", &[], "v01"),
            ("v11", "V", &[], "v11"),
            ("bottom", "U", &["v00", "v10"], "bottom"),
            ("up", "U", &["v01", "v11"], "top_edge"),
            ("left", "U", &["v00", "v01"], "left"),
            ("right", "U", &["v10", "v11"], "right"),
            ("face", "C", &["v00", "v10", "v01", "v11"], "top"),
        ],
    )?;
    finish(
        b,
        &[
            ("w00", "V", &[]),
            ("w10", "V", &[]),
            ("w01", "V", &[]),
            ("w11", "V", &[]),
            ("bottom", "S", &["w00", "w10"]),
            ("left", "S", &["w00", "w01"]),
            ("up", "S", &["w01", "w11"]),
            ("right", "S", &["w10", "w11"]),
            ("f0", "A", &SQUARE_W),
            ("f1", "A", &SQUARE_W),
        ],
        manifest(
            "quadrant-sphere",
            "pillow of two quadrant squares, corner tiles A -> A + 2B + C",
            "E3",
            (true, false, false),
        ),
    )
}

const SQUARE_W: [&str; 4] = ["w00", "w10", "w01", "w11"];

fn ring_tower() -> Result<CorpusEntry, BuildError> {
    let mut b = RuleBuilder::new();
    b.vertex_type("V", false)?;
    edge(&mut b, "E", false)?;
    edge(&mut b, "B", false)?;
    halved_edge(&mut b, "E", "E", "E")?;
    unchanged_edge(&mut b, "B")?;
    let names: Vec<String> = (0..9).map(|i| format!("v{i}")).collect();
    let edges: Vec<(String, [&str; 2])> =
        (0..9).map(|i| (format!("e{i}"), [names[i].as_str(), names[(i + 1) % 9].as_str()])).collect();
    let mut cells: Vec<CellSpec<'_>> = names.iter().map(|n| (n.as_str(), "V", &[][..])).collect();
    for (i, (n, vs)) in edges.iter().enumerate() {
        cells.push((n.as_str(), if i == 0 { "E" } else { "B" }, &vs[..]));
    }
    finish(
        b,
        &cells,
        manifest("ring-tower", "circle of eight inert edges and one doubling edge", "H2xR", (false, false, true)),
    )
}

fn barycentric() -> Result<CorpusEntry, BuildError> {
    let mut b = RuleBuilder::new();
    b.vertex_type("V", false)?;
    edge(&mut b, "E", false)?;
    b.cell_type(
        "T",
        2,
        false,
        &[
            ("v0", "V", &[]),
            ("v1", "V", &[]),
            ("v2", "V", &[]),
            ("e01", "E", &["v0", "v1"]),
            ("e12", "E", &["v1", "v2"]),
            ("e02", "E", &["v0", "v2"]),
        ],
    )?;
    // Both halves of an edge point at its midpoint.
    b.subdivision(
        "E",
        &[
            ("a", "V", &[], "a"),
            ("b", "V", &[], "b"),
            ("m", "V", &[], "top"),
            ("ha", "E", &["a", "m"], "top"),
            ("hb", "E", &["b", "m"], "top"),
        ],
    )?;
    b.subdivision(
        "T",
        &[
            ("v0", "V", &[], "v0"),
            ("v1", "V", &[], "v1"),
            ("v2", "V", &[], "v2"),
            ("m01", "V", &[], "e01"),
            ("m12", "V", &[], "e12"),
            ("m02", "V", &[], "e02"),
            ("c", "V", &[], "top"),
            ("h01a", "E", &["v0", "m01"], "e01"),
            ("h01b", "E", &["v1", "m01"], "e01"),
            ("h12a", "E", &["v1", "m12"], "e12"),
            ("h12b", "E", &["v2", "m12"], "e12"),
            ("h02a", "E", &["v0", "m02"], "e02"),
            ("h02b", "E", &["v2", "m02"], "e02"),
            ("s0", "E", &["v0", "c"], "top"),
            ("s1", "E", &["v1", "c"], "top"),
            ("s2", "E", &["v2", "c"], "top"),
            ("s01", "E", &["m01", "c"], "top"),
            ("s12", "E", &["m12", "c"], "top"),
            ("s02", "E", &["m02", "c"], "top"),
            ("t0", "T", &["v0", "m01", "c"], "top"),
            ("t1", "T", &["v1", "m01", "c"], "top"),
            ("t2", "T", &["v1", "m12", "c"], "top"),
            ("t3", "T", &["v2", "m12", "c"], "top"),
            ("t4", "T", &["v0", "m02", "c"], "top"),
            ("t5", "T", &["v2", "m02", "c"], "top"),
        ],
    )?;
    finish(
        b,
        &[
            ("x0", "V", &[]),
            ("x1", "V", &[]),
            ("x2", "V", &[]),
            ("e01", "E", &["x0", "x1"]),
            ("e12", "E", &["x1", "x2"]),
            ("e02", "E", &["x0", "x2"]),
            ("t", "T", &["x0", "x1", "x2"]),
        ],
        manifest("barycentric-2", "barycentric subdivision of a triangle", "Unknown", NO_FLAGS),
    )
}
