//! Typed face-poset cell complexes and subdivision rules.
//!
//! A cell complex is an abstract graded poset. Every cell carries a type and an
//! explicit attachment map: a bijection from the local cells of its type's model
//! onto the cell's closed down-set. The image of the attachment map *is* the
//! down-set, so the face order never has to be stored separately.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Marker for "no index" in dense `u32` lookup tables.
pub(crate) const NONE: u32 = u32::MAX;

/// Identifier of a cell type of the subdivision complex.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CellTypeId(pub String);

impl fmt::Display for CellTypeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for CellTypeId {
    fn from(s: &str) -> Self {
        CellTypeId(s.to_owned())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("unknown cell `{0}`")]
    UnknownCell(String),
    #[error("cell set is not downward closed: `{missing}` is a face of `{of}` but not in the set")]
    NotDownwardClosed { missing: String, of: String },
}

/// Read access shared by model complexes, subdivided models and typed complexes.
pub trait CellTable {
    fn cell_count(&self) -> usize;
    fn cell_rank(&self, i: usize) -> u32;
    fn cell_type(&self, i: usize) -> usize;
    /// Attachment map indexed by the local cells of `Model(cell_type(i))`.
    fn cell_attach(&self, i: usize) -> &[u32];
    fn cell_name(&self, i: usize) -> &str;

    /// Closed down-set of `i`, including `i` itself, sorted by index.
    fn down_set(&self, i: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.cell_attach(i).iter().map(|&c| c as usize).collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// A local cell of a model complex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelCell {
    pub id: String,
    pub rank: u32,
    pub ty: usize,
    pub attach: Vec<u32>,
}

/// The closed model cell of one cell type.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ModelComplex {
    pub cells: Vec<ModelCell>,
}

impl ModelComplex {
    /// The unique cell of maximal rank, if there is exactly one.
    pub fn top(&self) -> Option<usize> {
        let max = self.cells.iter().map(|c| c.rank).max()?;
        let mut it = self.cells.iter().enumerate().filter(|(_, c)| c.rank == max);
        let (i, _) = it.next()?;
        if it.next().is_some() {
            None
        } else {
            Some(i)
        }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

impl CellTable for ModelComplex {
    fn cell_count(&self) -> usize {
        self.cells.len()
    }
    fn cell_rank(&self, i: usize) -> u32 {
        self.cells[i].rank
    }
    fn cell_type(&self, i: usize) -> usize {
        self.cells[i].ty
    }
    fn cell_attach(&self, i: usize) -> &[u32] {
        &self.cells[i].attach
    }
    fn cell_name(&self, i: usize) -> &str {
        &self.cells[i].id
    }
}

/// A cell of the subdivided model `Sub(t)`, with its carrier in `Model(t)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubCell {
    pub id: String,
    pub rank: u32,
    pub ty: usize,
    pub carrier: u32,
    pub attach: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SubComplex {
    pub cells: Vec<SubCell>,
}

impl CellTable for SubComplex {
    fn cell_count(&self) -> usize {
        self.cells.len()
    }
    fn cell_rank(&self, i: usize) -> u32 {
        self.cells[i].rank
    }
    fn cell_type(&self, i: usize) -> usize {
        self.cells[i].ty
    }
    fn cell_attach(&self, i: usize) -> &[u32] {
        &self.cells[i].attach
    }
    fn cell_name(&self, i: usize) -> &str {
        &self.cells[i].id
    }
}

/// One cell type of the subdivision complex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellType {
    pub id: CellTypeId,
    pub dim: u32,
    /// Only meaningful for top-dimensional types.
    pub ideal: bool,
    pub model: ModelComplex,
    pub sub: SubComplex,
}

/// A colored finite subdivision rule, described type by type.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SubdivisionRule {
    pub types: Vec<CellType>,
}

impl SubdivisionRule {
    pub fn type_index(&self, id: &str) -> Option<usize> {
        self.types.iter().position(|t| t.id.0 == id)
    }

    /// Dimension of the rule: the largest type dimension.
    pub fn dimension(&self) -> u32 {
        self.types.iter().map(|t| t.dim).max().unwrap_or(0)
    }

    /// Whether `t` is a tile type (top-dimensional).
    pub fn is_tile(&self, t: usize) -> bool {
        self.types[t].dim == self.dimension()
    }
}

/// A finite typed complex stored in flat arrays.
///
/// Attachment maps live in one shared buffer; `attach(i)` is indexed by the local
/// cells of the model of `type_index(i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypedComplex {
    names: Vec<String>,
    ranks: Vec<u32>,
    types: Vec<u32>,
    attach_start: Vec<u32>,
    attach: Vec<u32>,
}

impl Default for TypedComplex {
    fn default() -> Self {
        Self::new()
    }
}

impl TypedComplex {
    pub fn new() -> Self {
        Self { names: Vec::new(), ranks: Vec::new(), types: Vec::new(), attach_start: vec![0], attach: Vec::new() }
    }

    pub fn with_capacity(cells: usize, attach_entries: usize) -> Self {
        let mut start = Vec::with_capacity(cells + 1);
        start.push(0);
        Self {
            names: Vec::with_capacity(cells),
            ranks: Vec::with_capacity(cells),
            types: Vec::with_capacity(cells),
            attach_start: start,
            attach: Vec::with_capacity(attach_entries),
        }
    }

    /// Appends a cell and returns its index. The attachment map may refer to the
    /// new cell itself (at the model's top position) and to later cells.
    pub fn push_cell(&mut self, name: impl Into<String>, rank: u32, ty: usize, attach: &[u32]) -> usize {
        let idx = self.names.len();
        self.names.push(name.into());
        self.ranks.push(rank);
        self.types.push(ty as u32);
        self.attach.extend_from_slice(attach);
        self.attach_start.push(self.attach.len() as u32);
        idx
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn rank(&self, i: usize) -> u32 {
        self.ranks[i]
    }

    pub fn type_index(&self, i: usize) -> usize {
        self.types[i] as usize
    }

    pub fn attach(&self, i: usize) -> &[u32] {
        let a = self.attach_start[i] as usize;
        let b = self.attach_start[i + 1] as usize;
        &self.attach[a..b]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Largest cell rank, `None` for the empty complex.
    pub fn dimension(&self) -> Option<u32> {
        self.ranks.iter().copied().max()
    }

    /// Closed down-set of a cell, including the cell.
    pub fn closure(&self, cell: usize) -> Result<Vec<usize>, ComplexError> {
        if cell >= self.len() {
            return Err(ComplexError::UnknownCell(cell.to_string()));
        }
        Ok(self.down_set(cell))
    }

    pub fn closure_by_name(&self, name: &str) -> Result<Vec<usize>, ComplexError> {
        let i = self.index_of(name).ok_or_else(|| ComplexError::UnknownCell(name.to_owned()))?;
        self.closure(i)
    }

    /// Alternating count `Σ (−1)^rank` over a downward-closed set of cells.
    pub fn euler_characteristic(&self, cells: &[usize]) -> Result<i64, ComplexError> {
        euler_characteristic(self, cells)
    }

    /// Number of cells of each type.
    pub fn type_counts(&self, type_count: usize) -> Vec<u64> {
        let mut counts = vec![0u64; type_count];
        for &t in &self.types {
            counts[t as usize] += 1;
        }
        counts
    }

    /// Cells of maximal rank `dim` that contain `cell` (its tile cofaces).
    pub fn cofaces_of_rank(&self, cell: usize, rank: u32) -> Vec<usize> {
        (0..self.len())
            .filter(|&c| self.ranks[c] == rank && c != cell && self.attach(c).contains(&(cell as u32)))
            .collect()
    }
}

impl CellTable for TypedComplex {
    fn cell_count(&self) -> usize {
        self.len()
    }
    fn cell_rank(&self, i: usize) -> u32 {
        self.rank(i)
    }
    fn cell_type(&self, i: usize) -> usize {
        self.type_index(i)
    }
    fn cell_attach(&self, i: usize) -> &[u32] {
        self.attach(i)
    }
    fn cell_name(&self, i: usize) -> &str {
        self.name(i)
    }
}

/// Euler characteristic of a downward-closed cell set of any cell table.
pub fn euler_characteristic<T: CellTable + ?Sized>(table: &T, cells: &[usize]) -> Result<i64, ComplexError> {
    let set: BTreeSet<usize> = cells.iter().copied().collect();
    for &c in &set {
        if c >= table.cell_count() {
            return Err(ComplexError::UnknownCell(c.to_string()));
        }
        for &f in table.cell_attach(c) {
            if !set.contains(&(f as usize)) {
                return Err(ComplexError::NotDownwardClosed {
                    missing: table.cell_name(f as usize).to_owned(),
                    of: table.cell_name(c).to_owned(),
                });
            }
        }
    }
    Ok(set.iter().map(|&c| if table.cell_rank(c) % 2 == 0 { 1 } else { -1 }).sum())
}
