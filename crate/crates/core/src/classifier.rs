//! Turns growth, hyperbolicity, ends and manifold reports into a geometry
//! verdict. Rules are tried in a fixed order; the first one that fires wins.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::growth::{GrowthKind, GrowthReport};
use crate::hyperbolicity::HyperbolicityReport;
use crate::topology::{Ends, EndsReport, ManifoldKind, ManifoldVerdict};

/// Hypotheses that cannot be checked from the rule and must be asserted by the user.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Assumptions {
    pub qi_to_group: bool,
    pub manifold_group: bool,
    pub model_geometry_dim_le_3: bool,
}

/// Possible verdicts. Nil and Sol have no variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Geometry {
    Compact,
    Line,
    FuchsianH2,
    KleinianH3,
    E2,
    E3,
    H2xR,
    TreeLikeManyEnds,
    Unknown,
}

impl Geometry {
    pub const ALL: [Geometry; 9] = [
        Geometry::Compact,
        Geometry::Line,
        Geometry::FuchsianH2,
        Geometry::KleinianH3,
        Geometry::E2,
        Geometry::E3,
        Geometry::H2xR,
        Geometry::TreeLikeManyEnds,
        Geometry::Unknown,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Geometry::Compact => "Compact",
            Geometry::Line => "Line",
            Geometry::FuchsianH2 => "FuchsianH2",
            Geometry::KleinianH3 => "KleinianH3",
            Geometry::E2 => "E2",
            Geometry::E3 => "E3",
            Geometry::H2xR => "H2xR",
            Geometry::TreeLikeManyEnds => "TreeLikeManyEnds",
            Geometry::Unknown => "Unknown",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|g| g.name() == s)
    }
}

impl std::fmt::Display for Geometry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Certainty {
    Exact,
    BoundedLevelEvidence,
}

/// One decision rule as it was evaluated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvidenceRecord {
    pub step: u8,
    pub rule: String,
    pub fired: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub geometry: Geometry,
    pub certainty: Certainty,
    pub evidence: Vec<EvidenceRecord>,
    /// Assumption flags the verdict is conditional on.
    pub conditional_on: Vec<String>,
    pub notes: Vec<String>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassifyError {
    #[error("reports cover different level ranges: growth {growth}, hyperbolicity {hyperbolicity}, ends {ends}, manifold {manifold}")]
    InconsistentLevels { growth: usize, hyperbolicity: usize, ends: usize, manifold: usize },
}

/// The analyzer outputs the classifier reads.
#[derive(Debug, Clone, Copy)]
pub struct Reports<'a> {
    pub growth: &'a GrowthReport,
    pub hyperbolicity: &'a HyperbolicityReport,
    pub ends: &'a EndsReport,
    pub manifold: &'a ManifoldVerdict,
}

struct Trail {
    evidence: Vec<EvidenceRecord>,
    notes: Vec<String>,
}

impl Trail {
    fn record(&mut self, step: u8, rule: &str, fired: bool, detail: String) -> bool {
        self.evidence.push(EvidenceRecord { step, rule: rule.into(), fired, detail });
        fired
    }

    fn finish(self, geometry: Geometry, certainty: Certainty, flags: &[&str]) -> Verdict {
        Verdict {
            geometry,
            certainty,
            evidence: self.evidence,
            conditional_on: flags.iter().map(|s| s.to_string()).collect(),
            notes: self.notes,
        }
    }
}

pub fn classify(r: Reports<'_>, a: Assumptions) -> Result<Verdict, ClassifyError> {
    let (g, h, e, m) =
        (r.growth.counts.len(), r.hyperbolicity.levels_checked + 1, r.ends.counts.len(), r.manifold.levels.len());
    if g != h || g != e || g != m {
        return Err(ClassifyError::InconsistentLevels { growth: g, hyperbolicity: h, ends: e, manifold: m });
    }
    let mut t = Trail { evidence: Vec::new(), notes: Vec::new() };
    let exact = &r.growth.exact;
    let surviving = r.hyperbolicity.minimal_surviving;
    let surviving_text = match surviving {
        Some(p) => format!("constants M={} j={} survive to level {}", p.m, p.j, r.hyperbolicity.levels_checked),
        None => format!(
            "no constants with M<={} j<={} survive to level {}",
            r.hyperbolicity.m_max, r.hyperbolicity.j_max, r.hyperbolicity.levels_checked
        ),
    };
    let circle = r.manifold.every_level(ManifoldKind::Circle);
    let sphere = r.manifold.every_level(ManifoldKind::ClosedSurfaceSphere);
    let manifold_text = match r.manifold.stable {
        Some(k) => format!("limit complex is {k} at every level"),
        None => "limit complex changes type across levels".to_string(),
    };

    if t.record(1, "nilpotent", exact.nilpotent, format!("non-ideal transition matrix nilpotent: {}", exact.nilpotent))
    {
        return Ok(t.finish(Geometry::Compact, Certainty::Exact, &[]));
    }

    let two = r.ends.classification == Ends::Two;
    let detail = format!("ends {}, diameter bounded: {}", r.ends.classification, r.ends.diameter_bounded);
    if t.record(2, "two-ends-bounded", two && r.ends.diameter_bounded, detail) {
        return Ok(t.finish(Geometry::Line, Certainty::BoundedLevelEvidence, &[]));
    }

    if t.record(3, "hyperbolic-circle", surviving.is_some() && circle, format!("{surviving_text}; {manifold_text}")) {
        return Ok(t.finish(Geometry::FuchsianH2, Certainty::BoundedLevelEvidence, &[]));
    }

    let fired = surviving.is_some() && sphere && a.manifold_group;
    if surviving.is_some() && sphere && !a.manifold_group {
        t.notes.push("hyperbolic with a sphere limit complex; KleinianH3 needs the manifold-group assumption".into());
    }
    if t.record(
        4,
        "hyperbolic-sphere",
        fired,
        format!("{surviving_text}; {manifold_text}; manifold_group={}", a.manifold_group),
    ) {
        return Ok(t.finish(Geometry::KleinianH3, Certainty::BoundedLevelEvidence, &["manifold_group"]));
    }

    for (step, degree, geometry) in [(5, 2, Geometry::E2), (6, 3, Geometry::E3)] {
        let matches = exact.cumulative == GrowthKind::Polynomial { degree };
        if matches && !a.qi_to_group {
            t.notes.push(format!("counting function is exactly polynomial of degree {degree}; {geometry} needs the qi-to-group assumption"));
        }
        let detail = format!("exact counting function class {}; qi_to_group={}", exact.cumulative, a.qi_to_group);
        let rule = if degree == 2 { "quadratic-growth" } else { "cubic-growth" };
        if t.record(step, rule, matches && a.qi_to_group, detail) {
            return Ok(t.finish(geometry, Certainty::BoundedLevelEvidence, &["qi_to_group"]));
        }
    }

    let exponential = exact.cumulative == GrowthKind::Exponential;
    if exponential && surviving.is_none() && !a.model_geometry_dim_le_3 {
        t.notes.push("exponential and not hyperbolic; H2xR needs the model-geometry assumption".into());
    }
    let detail = format!(
        "exact counting function class {}; {surviving_text}; model_geometry={}",
        exact.cumulative, a.model_geometry_dim_le_3
    );
    if t.record(
        7,
        "exponential-not-hyperbolic",
        exponential && surviving.is_none() && a.model_geometry_dim_le_3,
        detail,
    ) {
        return Ok(t.finish(Geometry::H2xR, Certainty::BoundedLevelEvidence, &["model_geometry_dim_le_3"]));
    }

    let growing = r.ends.classification == Ends::Growing;
    if t.record(
        8,
        "many-ends-hyperbolic",
        growing && surviving.is_some(),
        format!("ends {}; {surviving_text}", r.ends.classification),
    ) {
        return Ok(t.finish(Geometry::TreeLikeManyEnds, Certainty::BoundedLevelEvidence, &[]));
    }

    Ok(t.finish(Geometry::Unknown, Certainty::BoundedLevelEvidence, &[]))
}
