//! End-to-end analysis of one rule and complex under a recorded configuration.

use serde::Serialize;
use thiserror::Error;

use crate::classifier::{classify, Assumptions, ClassifyError, Reports, Verdict};
use crate::complex::TypedComplex;
use crate::growth::{growth_report, GrowthError, GrowthReport, DEFAULT_EPSILON, DEFAULT_WINDOW};
use crate::history::{HistoryGraph, HorizontalEdges};
use crate::hyperbolicity::{
    estimate_delta, search_constants, HyperbolicityReport, DEFAULT_DELTA_SAMPLES, DEFAULT_EXHAUSTIVE_BOUND,
    DEFAULT_PAIR_BUDGET,
};
use crate::subdivision::{iterate, transition_matrix, Levels, SubdivisionError, Truncation, DEFAULT_CELL_BUDGET};
use crate::topology::{
    component_tree, ends_classification, manifold_verdict, EndsReport, ManifoldVerdict, TopologyError,
};
use crate::validate::CheckedRule;

/// Every knob of a run; serialized verbatim into reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub levels: usize,
    pub cell_budget: usize,
    pub pair_budget: u64,
    pub m_max: u32,
    pub j_max: usize,
    pub radius: u32,
    pub seed: u64,
    pub horizontal_edges: HorizontalEdges,
    pub window: usize,
    pub epsilon: f64,
    pub assumptions: Assumptions,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            levels: 8,
            cell_budget: DEFAULT_CELL_BUDGET,
            pair_budget: DEFAULT_PAIR_BUDGET,
            m_max: 8,
            j_max: 3,
            radius: 8,
            seed: 0,
            horizontal_edges: HorizontalEdges::Comparable,
            window: DEFAULT_WINDOW,
            epsilon: DEFAULT_EPSILON,
            assumptions: Assumptions::default(),
        }
    }
}

impl RunConfig {
    /// Rejects zero bounds; returns the name of the first offending field.
    pub fn check(&self) -> Result<(), &'static str> {
        let fields = [
            ("levels", self.levels as u64),
            ("cell_budget", self.cell_budget as u64),
            ("pair_budget", self.pair_budget),
            ("m_max", self.m_max as u64),
            ("j_max", self.j_max as u64),
            ("radius", self.radius as u64),
            ("window", self.window as u64),
        ];
        match fields.iter().find(|(_, v)| *v == 0) {
            Some((name, _)) => Err(name),
            None if self.epsilon.is_nan() || self.epsilon <= 0.0 => Err("epsilon"),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Subdivision(#[from] SubdivisionError),
    #[error("only {computed} levels fit in the cell budget, the analysis needs {required}")]
    TooFewLevels { computed: usize, required: usize, truncation: Option<Truncation> },
    #[error(transparent)]
    Growth(#[from] GrowthError),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
}

#[derive(Debug, Clone, Serialize)]
pub struct Analysis {
    pub config: RunConfig,
    pub max_level: usize,
    pub truncated: Option<Truncation>,
    pub cell_counts: Vec<u64>,
    pub limit_counts: Vec<u64>,
    pub growth: GrowthReport,
    pub hyperbolicity: HyperbolicityReport,
    pub ends: EndsReport,
    pub manifold: ManifoldVerdict,
    pub verdict: Verdict,
}

/// Builds the levels a configuration asks for.
pub fn compute_levels(rule: &CheckedRule, x: TypedComplex, config: &RunConfig) -> Result<Levels, SubdivisionError> {
    iterate(rule, x, config.levels, config.cell_budget)
}

/// Runs every analyzer and the classifier.
pub fn analyze(rule: &CheckedRule, x: TypedComplex, config: &RunConfig) -> Result<Analysis, PipelineError> {
    let matrix = transition_matrix(rule, &x);
    let levels = compute_levels(rule, x, config)?;
    analyze_levels(rule, &levels, &matrix, config)
}

pub fn analyze_levels(
    rule: &CheckedRule,
    levels: &Levels,
    matrix: &crate::subdivision::TransitionMatrix,
    config: &RunConfig,
) -> Result<Analysis, PipelineError> {
    let required = (config.window + 1).max(3);
    if levels.levels.len() < required {
        return Err(PipelineError::TooFewLevels {
            computed: levels.levels.len(),
            required,
            truncation: levels.truncated,
        });
    }
    let growth = growth_report(levels, matrix, config.window, config.epsilon)?;
    let h = HistoryGraph::build(levels, config.horizontal_edges);
    let mut hyperbolicity = search_constants(&h, config.m_max, config.j_max, config.pair_budget, config.seed);
    hyperbolicity.delta_estimate =
        Some(estimate_delta(&h, config.radius, DEFAULT_EXHAUSTIVE_BOUND, DEFAULT_DELTA_SAMPLES, config.seed));
    let ends = ends_classification(&component_tree(&h))?;
    let manifold = manifold_verdict(rule, &levels.levels);
    let verdict = classify(
        Reports { growth: &growth, hyperbolicity: &hyperbolicity, ends: &ends, manifold: &manifold },
        config.assumptions,
    )?;
    Ok(Analysis {
        config: config.clone(),
        max_level: levels.max_level(),
        truncated: levels.truncated,
        cell_counts: levels.cell_counts(),
        limit_counts: levels.limit_counts(),
        growth,
        hyperbolicity,
        ends,
        manifold,
        verdict,
    })
}
