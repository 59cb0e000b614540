//! Subdivision of R-complexes: `R(X)`, `R^n(X)`, parent maps, limit-set masks
//! and tile-type transition matrices.
//!
//! A cell of `R(X)` is a pair `(c, u)` where `c` is a cell of `X` and `u` a cell
//! of `Sub(type(c))` carried by the open top cell. Faces of `(c, u)` whose carrier
//! is a proper face `x` of the model are pulled back through `attach_c(x)` and the
//! rule's boundary isomorphisms, so every face resolves to exactly one owner and
//! no alias merging is needed. The cell `(c, u)` is named `"{name(c)}/{id(u)}"`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{CellTypeId, TypedComplex};
use crate::validate::{validate_complex, CheckedRule, ValidationReport};

pub const DEFAULT_CELL_BUDGET: usize = 1_000_000;

#[derive(Debug, Error)]
pub enum SubdivisionError {
    #[error("level {level} needs {required} cells, budget is {budget}")]
    BudgetExceeded { level: usize, required: u64, budget: usize },
    #[error("invalid complex: {0}")]
    InvalidInput(ValidationReport),
}

/// One level `R^n(X)` together with its parent map and limit-set mask.
#[derive(Debug, Clone)]
pub struct LevelData {
    pub level: usize,
    pub complex: TypedComplex,
    /// Cell of level `n - 1` whose open cell carries each cell; `None` at level 0.
    pub parent: Option<Vec<u32>>,
    /// Cells of `Λ_n`: faces of non-ideal tiles.
    pub limit_mask: Vec<bool>,
}

impl LevelData {
    /// Validates `x` against the rule and wraps it as level 0.
    pub fn level_zero(rule: &CheckedRule, x: TypedComplex) -> Result<Self, SubdivisionError> {
        let report = validate_complex(rule, &x);
        if !report.ok {
            return Err(SubdivisionError::InvalidInput(report));
        }
        let limit_mask = limit_mask(rule, &x);
        Ok(Self { level: 0, complex: x, parent: None, limit_mask })
    }

    pub fn limit_count(&self) -> usize {
        self.limit_mask.iter().filter(|&&b| b).count()
    }

    pub fn parent_of(&self, cell: usize) -> Option<usize> {
        self.parent.as_ref().map(|p| p[cell] as usize)
    }
}

/// Marks every cell lying below a non-ideal tile.
pub fn limit_mask(rule: &CheckedRule, x: &TypedComplex) -> Vec<bool> {
    let mut mask = vec![false; x.len()];
    let dim = rule.dimension();
    for c in 0..x.len() {
        let t = x.type_index(c);
        if x.rank(c) == dim && !rule.is_ideal(t) {
            for &f in x.attach(c) {
                mask[f as usize] = true;
            }
        }
    }
    mask
}

/// Cells of `Λ_n`, in index order.
pub fn limit_set(level: &LevelData) -> Vec<usize> {
    level.limit_mask.iter().enumerate().filter_map(|(i, &b)| b.then_some(i)).collect()
}

/// Number of cells `R(x)` will have.
pub fn subdivided_size(rule: &CheckedRule, x: &TypedComplex) -> u64 {
    (0..x.len()).map(|c| rule.interior(x.type_index(c)).len() as u64).sum()
}

/// Computes the next level `R(X)` from `level`.
pub fn subdivide(rule: &CheckedRule, level: &LevelData, budget: usize) -> Result<LevelData, SubdivisionError> {
    let x = &level.complex;
    let mut offset = Vec::with_capacity(x.len() + 1);
    let mut total = 0u64;
    for c in 0..x.len() {
        offset.push(total as u32);
        total += rule.interior(x.type_index(c)).len() as u64;
    }
    if total > budget as u64 {
        return Err(SubdivisionError::BudgetExceeded { level: level.level + 1, required: total, budget });
    }
    let types = &rule.rule().types;
    let resolve = |c: usize, w: usize| -> u32 {
        let t = x.type_index(c);
        let carrier = types[t].sub.cells[w].carrier as usize;
        if carrier == rule.top(t) {
            offset[c] + rule.interior_position(t, w)
        } else {
            let owner = x.attach(c)[carrier] as usize;
            let lifted = rule.lift(t, carrier, w) as usize;
            offset[owner] + rule.interior_position(x.type_index(owner), lifted)
        }
    };

    let mut out = TypedComplex::with_capacity(total as usize, total as usize * 4);
    let mut parent = Vec::with_capacity(total as usize);
    let mut attach = Vec::new();
    for c in 0..x.len() {
        let t = x.type_index(c);
        for &u in rule.interior(t) {
            let cell = &types[t].sub.cells[u as usize];
            attach.clear();
            attach.extend(cell.attach.iter().map(|&w| resolve(c, w as usize)));
            out.push_cell(format!("{}/{}", x.name(c), cell.id), cell.rank, cell.ty, &attach);
            parent.push(c as u32);
        }
    }
    let limit_mask = limit_mask(rule, &out);
    Ok(LevelData { level: level.level + 1, complex: out, parent: Some(parent), limit_mask })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truncation {
    /// First level that could not be built.
    pub level: usize,
    pub required_cells: u64,
    pub budget: usize,
}

/// Levels `0..=n` of a subdivision, possibly cut short by the cell budget.
#[derive(Debug, Clone)]
pub struct Levels {
    pub levels: Vec<LevelData>,
    pub truncated: Option<Truncation>,
}

impl Levels {
    /// Index of the deepest computed level.
    pub fn max_level(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn limit_counts(&self) -> Vec<u64> {
        self.levels.iter().map(|l| l.limit_count() as u64).collect()
    }

    pub fn cell_counts(&self) -> Vec<u64> {
        self.levels.iter().map(|l| l.complex.len() as u64).collect()
    }
}

/// Computes `X, R(X), ..., R^n(X)`, stopping early if a level exceeds `budget`.
pub fn iterate(rule: &CheckedRule, x: TypedComplex, n: usize, budget: usize) -> Result<Levels, SubdivisionError> {
    let mut levels = vec![LevelData::level_zero(rule, x)?];
    let mut truncated = None;
    for _ in 0..n {
        match subdivide(rule, levels.last().expect("nonempty"), budget) {
            Ok(next) => levels.push(next),
            Err(SubdivisionError::BudgetExceeded { level, required, budget }) => {
                truncated = Some(Truncation { level, required_cells: required, budget });
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(Levels { levels, truncated })
}

/// Type-indexed transition matrices of a rule and an initial complex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionMatrix {
    pub types: Vec<CellTypeId>,
    /// `full[t'][t]`: cells of type `t'` carried by the top of `Sub(t)`.
    pub full: Vec<Vec<u64>>,
    pub initial: Vec<u64>,
    /// Indices (into `types`) of the non-ideal tile types.
    pub nonideal_tiles: Vec<usize>,
    /// Restriction of `full` to the non-ideal tile types.
    pub nonideal: Vec<Vec<u64>>,
    pub initial_nonideal: Vec<u64>,
}

fn mat_vec(m: &[Vec<u64>], v: &[u128]) -> Vec<u128> {
    m.iter()
        .map(|row| row.iter().zip(v).fold(0u128, |acc, (&a, &b)| acc.saturating_add((a as u128).saturating_mul(b))))
        .collect()
}

impl TransitionMatrix {
    /// `A^n v`: predicted type-wise cell counts of `R^n(X)`.
    pub fn predict(&self, n: usize) -> Vec<u128> {
        let mut v: Vec<u128> = self.initial.iter().map(|&c| c as u128).collect();
        for _ in 0..n {
            v = mat_vec(&self.full, &v);
        }
        v
    }

    /// `B^n v`: predicted non-ideal tile counts per non-ideal tile type.
    pub fn predict_nonideal(&self, n: usize) -> Vec<u128> {
        let mut v: Vec<u128> = self.initial_nonideal.iter().map(|&c| c as u128).collect();
        for _ in 0..n {
            v = mat_vec(&self.nonideal, &v);
        }
        v
    }

    /// `‖B^n v‖₁`.
    pub fn nonideal_tiles_at(&self, n: usize) -> u128 {
        self.predict_nonideal(n).iter().sum()
    }
}

pub fn transition_matrix(rule: &CheckedRule, x: &TypedComplex) -> TransitionMatrix {
    let types = &rule.rule().types;
    let k = types.len();
    let mut full = vec![vec![0u64; k]; k];
    for (t, row) in (0..k).map(|t| (t, rule.interior(t))) {
        for &u in row {
            full[types[t].sub.cells[u as usize].ty][t] += 1;
        }
    }
    let initial = x.type_counts(k);
    let nonideal_tiles: Vec<usize> = (0..k).filter(|&t| rule.is_tile(t) && !rule.is_ideal(t)).collect();
    let nonideal = nonideal_tiles.iter().map(|&a| nonideal_tiles.iter().map(|&b| full[a][b]).collect()).collect();
    let initial_nonideal = nonideal_tiles.iter().map(|&t| initial[t]).collect();
    TransitionMatrix {
        types: types.iter().map(|t| t.id.clone()).collect(),
        full,
        initial,
        nonideal_tiles,
        nonideal,
        initial_nonideal,
    }
}
