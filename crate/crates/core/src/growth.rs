//! Growth of the counting function `c_X(n) = Σ_{i≤n} |Λ_i|`, classified twice:
//! from finite differences of the computed prefix, and exactly from the
//! non-ideal tile matrix.

use petgraph::algo::{condensation, toposort};
use petgraph::graph::DiGraph;
use petgraph::visit::EdgeRef;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::subdivision::{Levels, TransitionMatrix};

pub const DEFAULT_WINDOW: usize = 5;
pub const DEFAULT_EPSILON: f64 = 0.05;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GrowthError {
    #[error("sequence of length {len} is too short for window {window} (need {needed})")]
    SequenceTooShort { len: usize, window: usize, needed: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GrowthKind {
    EventuallyZero,
    Polynomial { degree: u32 },
    Exponential,
    Inconclusive,
}

impl GrowthKind {
    pub fn is_conclusive(self) -> bool {
        self != GrowthKind::Inconclusive
    }

    /// Growth of the partial sums of a sequence of this kind.
    pub fn cumulative(self) -> GrowthKind {
        match self {
            GrowthKind::Polynomial { degree } => GrowthKind::Polynomial { degree: degree + 1 },
            other => other,
        }
    }
}

impl std::fmt::Display for GrowthKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GrowthKind::EventuallyZero => f.write_str("eventually zero"),
            GrowthKind::Polynomial { degree } => write!(f, "polynomial of degree {degree}"),
            GrowthKind::Exponential => f.write_str("exponential"),
            GrowthKind::Inconclusive => f.write_str("inconclusive"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum Evidence {
    MatrixExact {
        /// Non-ideal tile types reachable from the initial complex.
        reachable: Vec<String>,
        cyclic_components: usize,
        /// Most cyclic components met along one path of the condensation.
        longest_cyclic_chain: usize,
        /// Whether some reachable component has a node with more than one
        /// weighted edge back into it.
        branching: bool,
    },
    FiniteDifference {
        window: usize,
        /// Order of the first difference sequence constant over the window.
        constant_order: Option<usize>,
        /// Trailing ratios `s[i+1] / s[i]` over the window.
        trailing_ratios: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthClass {
    #[serde(flatten)]
    pub kind: GrowthKind,
    pub evidence: Evidence,
}

/// Exact growth of the per-level counts and of `c_X`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactGrowth {
    /// Class of `|Λ_n|` (equivalently of the non-ideal tile count).
    pub per_level: GrowthClass,
    /// Class of `c_X`.
    pub cumulative: GrowthKind,
    /// `B` restricted to the reachable types is nilpotent.
    pub nilpotent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub counts: Vec<u64>,
    pub cumulative: Vec<u64>,
    pub empirical: GrowthClass,
    pub exact: ExactGrowth,
    /// Empirical and exact classes of `c_X` coincide, or the empirical method
    /// was inconclusive.
    pub agree: bool,
    pub truncated: bool,
}

/// `c_X(n)` for each computed level.
pub fn counting_function(levels: &Levels) -> Vec<u64> {
    levels
        .limit_counts()
        .into_iter()
        .scan(0u64, |acc, a| {
            *acc += a;
            Some(*acc)
        })
        .collect()
}

/// Classifies a sequence from its trailing `window` entries.
pub fn empirical_degree(seq: &[u64], window: usize, epsilon: f64) -> Result<GrowthClass, GrowthError> {
    let needed = window + 1;
    if seq.len() < needed || window == 0 {
        return Err(GrowthError::SequenceTooShort { len: seq.len(), window, needed });
    }
    let tail = &seq[seq.len() - window..];
    let trailing_ratios: Vec<f64> = seq[seq.len() - window - 1..]
        .windows(2)
        .map(|w| if w[0] == 0 { f64::INFINITY } else { w[1] as f64 / w[0] as f64 })
        .collect();
    let evidence = |order: Option<usize>| Evidence::FiniteDifference {
        window,
        constant_order: order,
        trailing_ratios: trailing_ratios.clone(),
    };

    let mut diffs: Vec<i128> = seq.iter().map(|&x| x as i128).collect();
    for order in 0..=seq.len() - window {
        let t = &diffs[diffs.len() - window..];
        if t.iter().all(|&d| d == t[0]) {
            let kind = if order == 0 && t[0] == 0 {
                GrowthKind::EventuallyZero
            } else {
                GrowthKind::Polynomial { degree: order as u32 }
            };
            return Ok(GrowthClass { kind, evidence: evidence(Some(order)) });
        }
        diffs = diffs.windows(2).map(|w| w[1] - w[0]).collect();
    }
    let increasing = tail.windows(2).all(|w| w[1] > w[0]);
    let kind = if increasing && trailing_ratios.iter().all(|&r| r >= 1.0 + epsilon) {
        GrowthKind::Exponential
    } else {
        GrowthKind::Inconclusive
    };
    Ok(GrowthClass { kind, evidence: evidence(None) })
}

/// Exact growth class from the non-ideal tile matrix and the initial vector.
pub fn exact_growth_class(m: &TransitionMatrix) -> ExactGrowth {
    let k = m.nonideal_tiles.len();
    // Edge t -> t' when a tile of type t produces tiles of type t'.
    let mut reach = vec![false; k];
    let mut stack: Vec<usize> = (0..k).filter(|&t| m.initial_nonideal[t] > 0).collect();
    for &t in &stack {
        reach[t] = true;
    }
    while let Some(t) = stack.pop() {
        for (u, r) in reach.iter_mut().enumerate() {
            if m.nonideal[u][t] > 0 && !*r {
                *r = true;
                stack.push(u);
            }
        }
    }
    let nodes: Vec<usize> = (0..k).filter(|&t| reach[t]).collect();
    let mut g = DiGraph::<usize, u64>::new();
    let idx: Vec<_> = nodes.iter().map(|&t| g.add_node(t)).collect();
    for (a, &t) in nodes.iter().enumerate() {
        for (b, &u) in nodes.iter().enumerate() {
            let w = m.nonideal[u][t];
            if w > 0 {
                g.add_edge(idx[a], idx[b], w);
            }
        }
    }
    let cond = condensation(g.clone(), true);
    let mut cyclic = vec![false; cond.node_count()];
    let mut branching = false;
    for c in cond.node_indices() {
        let members = &cond[c];
        for &t in members {
            let node = idx[nodes.iter().position(|&x| x == t).expect("member of graph")];
            let inner: u64 = g.edges(node).filter(|e| members.contains(&g[e.target()])).map(|e| *e.weight()).sum();
            if inner > 0 {
                cyclic[c.index()] = true;
            }
            if inner > 1 {
                branching = true;
            }
        }
    }
    let order = toposort(&cond, None).expect("condensation is acyclic");
    let mut chain = vec![0usize; cond.node_count()];
    for &c in order.iter().rev() {
        let best = cond.neighbors(c).map(|d| chain[d.index()]).max().unwrap_or(0);
        chain[c.index()] = best + usize::from(cyclic[c.index()]);
    }
    let longest = chain.iter().copied().max().unwrap_or(0);
    let cyclic_components = cyclic.iter().filter(|&&c| c).count();
    let evidence = Evidence::MatrixExact {
        reachable: nodes.iter().map(|&t| m.types[m.nonideal_tiles[t]].0.clone()).collect(),
        cyclic_components,
        longest_cyclic_chain: longest,
        branching,
    };
    let nilpotent = cyclic_components == 0;
    let (per_level, cumulative) = if nilpotent {
        let c = if nodes.is_empty() { GrowthKind::EventuallyZero } else { GrowthKind::Polynomial { degree: 0 } };
        (GrowthKind::EventuallyZero, c)
    } else if branching {
        (GrowthKind::Exponential, GrowthKind::Exponential)
    } else {
        let p = GrowthKind::Polynomial { degree: longest as u32 - 1 };
        (p, p.cumulative())
    };
    ExactGrowth { per_level: GrowthClass { kind: per_level, evidence }, cumulative, nilpotent }
}

/// Counts, both classifications and their agreement.
pub fn growth_report(
    levels: &Levels,
    matrix: &TransitionMatrix,
    window: usize,
    epsilon: f64,
) -> Result<GrowthReport, GrowthError> {
    let cumulative = counting_function(levels);
    let empirical = empirical_degree(&cumulative, window, epsilon)?;
    let exact = exact_growth_class(matrix);
    let agree = !empirical.kind.is_conclusive() || empirical.kind == exact.cumulative;
    Ok(GrowthReport {
        counts: levels.limit_counts(),
        cumulative,
        empirical,
        exact,
        agree,
        truncated: levels.truncated.is_some(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kind(seq: &[u64]) -> GrowthKind {
        empirical_degree(seq, DEFAULT_WINDOW, DEFAULT_EPSILON).unwrap().kind
    }

    #[test]
    fn finite_differences() {
        assert_eq!(kind(&[2, 4, 6, 8, 10, 12]), GrowthKind::Polynomial { degree: 1 });
        assert_eq!(kind(&[3, 6, 12, 24, 48, 96]), GrowthKind::Exponential);
        assert_eq!(kind(&[5, 5, 5, 5, 5, 5]), GrowthKind::Polynomial { degree: 0 });
        assert_eq!(kind(&[0; 8]), GrowthKind::EventuallyZero);
        let cubes: Vec<u64> = (0..10u64).map(|n| n * n * n + 2 * n).collect();
        assert_eq!(kind(&cubes), GrowthKind::Polynomial { degree: 3 });
        assert!(matches!(
            empirical_degree(&[1, 2, 3], DEFAULT_WINDOW, DEFAULT_EPSILON),
            Err(GrowthError::SequenceTooShort { .. })
        ));
    }

    #[test]
    fn slow_sequences_are_inconclusive() {
        // n^1.5: neither polynomial over the window nor fast enough.
        let seq: Vec<u64> = (100..112u64).map(|n| (n * n * n).isqrt()).collect();
        assert_eq!(kind(&seq), GrowthKind::Inconclusive);
    }

    fn matrix(nonideal: Vec<Vec<u64>>, initial: Vec<u64>) -> TransitionMatrix {
        let k = nonideal.len();
        TransitionMatrix {
            types: (0..k).map(|i| crate::CellTypeId(format!("T{i}"))).collect(),
            full: nonideal.clone(),
            initial: initial.clone(),
            nonideal_tiles: (0..k).collect(),
            nonideal,
            initial_nonideal: initial,
        }
    }

    #[test]
    fn exact_classes() {
        let e = exact_growth_class(&matrix(vec![vec![2]], vec![1]));
        assert_eq!(e.per_level.kind, GrowthKind::Exponential);
        let e = exact_growth_class(&matrix(vec![vec![0]], vec![1]));
        assert!(e.nilpotent);
        assert_eq!(e.per_level.kind, GrowthKind::EventuallyZero);
        assert_eq!(e.cumulative, GrowthKind::Polynomial { degree: 0 });
        let e = exact_growth_class(&matrix(vec![vec![1, 0, 0], vec![2, 1, 0], vec![1, 1, 1]], vec![1, 0, 0]));
        assert_eq!(e.per_level.kind, GrowthKind::Polynomial { degree: 2 });
        assert_eq!(e.cumulative, GrowthKind::Polynomial { degree: 3 });
        // Unreachable types do not count.
        let e = exact_growth_class(&matrix(vec![vec![1, 0, 0], vec![2, 1, 0], vec![1, 1, 1]], vec![0, 0, 1]));
        assert_eq!(e.per_level.kind, GrowthKind::Polynomial { degree: 0 });
        // A two-cycle permuting types stays bounded.
        let e = exact_growth_class(&matrix(vec![vec![0, 1], vec![1, 0]], vec![1, 0]));
        assert_eq!(e.per_level.kind, GrowthKind::Polynomial { degree: 0 });
        let e = exact_growth_class(&matrix(vec![vec![1, 1], vec![1, 0]], vec![1, 0]));
        assert_eq!(e.per_level.kind, GrowthKind::Exponential);
        let e = exact_growth_class(&matrix(vec![], vec![]));
        assert_eq!(e.cumulative, GrowthKind::EventuallyZero);
    }
}
