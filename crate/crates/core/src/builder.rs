//! Construction helpers that derive attachment maps from vertex lists.
//!
//! A cell is described by its type and the images of its model's vertices. The
//! images of the higher model cells are found by searching the cells built so
//! far for the unique one of the right type whose own attachment agrees. This is
//! enough for every complex whose cells are determined by their vertices and
//! orientations; complexes with parallel cells of equal type need explicit maps.

use std::collections::HashMap;

use thiserror::Error;

use crate::complex::{
    CellType, CellTypeId, ModelCell, ModelComplex, SubCell, SubComplex, SubdivisionRule, TypedComplex, NONE,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BuildError {
    #[error("unknown cell type `{0}`")]
    UnknownType(String),
    #[error("unknown cell `{0}`")]
    UnknownCell(String),
    #[error("cell `{cell}`: {message}")]
    Resolve { cell: String, message: String },
}

/// Local cell table under construction: (rank, type, attach).
struct Table {
    names: Vec<String>,
    cells: Vec<(u32, usize, Vec<u32>)>,
    by_name: HashMap<String, u32>,
}

impl Table {
    fn new() -> Self {
        Self { names: Vec::new(), cells: Vec::new(), by_name: HashMap::new() }
    }

    fn lookup(&self, name: &str) -> Result<u32, BuildError> {
        self.by_name.get(name).copied().ok_or_else(|| BuildError::UnknownCell(name.to_owned()))
    }

    /// Resolves the attach map of a new cell of type `s` with the given vertex
    /// images, then appends it.
    fn add(&mut self, rule: &SubdivisionRule, name: &str, s: usize, vertices: &[&str]) -> Result<u32, BuildError> {
        let err = |message: String| BuildError::Resolve { cell: name.to_owned(), message };
        let me = self.cells.len() as u32;
        let model = &rule.types[s].model;
        let top = model.top().ok_or_else(|| err("model has no top cell".into()))?;
        let mut alpha = vec![NONE; model.cells.len()];
        alpha[top] = me;
        let model_vertices: Vec<usize> =
            (0..model.cells.len()).filter(|&l| model.cells[l].rank == 0 && l != top).collect();
        if model_vertices.len() != vertices.len() {
            return Err(err(format!("expected {} vertices, got {}", model_vertices.len(), vertices.len())));
        }
        for (&l, v) in model_vertices.iter().zip(vertices) {
            alpha[l] = self.lookup(v)?;
        }
        let mut order: Vec<usize> = (0..model.cells.len()).filter(|&l| model.cells[l].rank > 0 && l != top).collect();
        order.sort_by_key(|&l| model.cells[l].rank);
        for l in order {
            let local = &model.cells[l];
            let inner_top = rule.types[local.ty].model.top();
            let want: Vec<u32> = local
                .attach
                .iter()
                .enumerate()
                .map(|(k, &g)| if Some(k) == inner_top { NONE } else { alpha[g as usize] })
                .collect();
            let found: Vec<u32> = (0..self.cells.len() as u32)
                .filter(|&c| {
                    let (rank, ty, ref att) = self.cells[c as usize];
                    rank == local.rank
                        && ty == local.ty
                        && att.len() == want.len()
                        && att.iter().zip(&want).all(|(&a, &w)| w == NONE || a == w)
                })
                .collect();
            match found.as_slice() {
                [one] => alpha[l] = *one,
                [] => return Err(err(format!("no cell matches model face `{}`", local.id))),
                _ => return Err(err(format!("model face `{}` is ambiguous", local.id))),
            }
        }
        let rank = model.cells[top].rank;
        self.names.push(name.to_owned());
        self.by_name.insert(name.to_owned(), me);
        self.cells.push((rank, s, alpha));
        Ok(me)
    }
}

/// Incremental builder for a [`SubdivisionRule`].
#[derive(Debug, Default)]
pub struct RuleBuilder {
    rule: SubdivisionRule,
}

/// Description of one cell: `(name, type, vertex names)`.
pub type CellSpec<'a> = (&'a str, &'a str, &'a [&'a str]);

/// Description of one subdivided cell: `(name, type, vertex names, carrier)`.
pub type SubSpec<'a> = (&'a str, &'a str, &'a [&'a str], &'a str);

impl RuleBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    fn type_idx(&self, id: &str) -> Result<usize, BuildError> {
        self.rule.type_index(id).ok_or_else(|| BuildError::UnknownType(id.to_owned()))
    }

    /// Declares a cell type. `faces` lists the proper faces of the model in rank
    /// order, vertices first; the top cell is appended automatically as `"top"`.
    pub fn cell_type(
        &mut self,
        id: &str,
        dim: u32,
        ideal: bool,
        faces: &[CellSpec<'_>],
    ) -> Result<&mut Self, BuildError> {
        let me = self.rule.types.len();
        self.rule.types.push(CellType {
            id: CellTypeId(id.to_owned()),
            dim,
            ideal,
            model: ModelComplex::default(),
            sub: SubComplex::default(),
        });
        let mut table = Table::new();
        for (name, ty, verts) in faces {
            let s = self.type_idx(ty)?;
            table.add(&self.rule, name, s, verts)?;
        }
        let n = table.cells.len() as u32;
        let mut cells: Vec<ModelCell> = table
            .cells
            .into_iter()
            .zip(table.names)
            .map(|((rank, ty, attach), id)| ModelCell { id, rank, ty, attach })
            .collect();
        cells.push(ModelCell { id: "top".into(), rank: dim, ty: me, attach: (0..=n).collect() });
        self.rule.types[me].model = ModelComplex { cells };
        Ok(self)
    }

    /// Sets `Sub(id)`. Carriers name local cells of the model (`"top"` for the
    /// open top cell).
    pub fn subdivision(&mut self, id: &str, cells: &[SubSpec<'_>]) -> Result<&mut Self, BuildError> {
        let t = self.type_idx(id)?;
        let mut table = Table::new();
        let mut carriers = Vec::with_capacity(cells.len());
        for (name, ty, verts, carrier) in cells {
            let s = self.type_idx(ty)?;
            table.add(&self.rule, name, s, verts)?;
            let c = self.rule.types[t]
                .model
                .cells
                .iter()
                .position(|m| m.id == *carrier)
                .ok_or_else(|| BuildError::UnknownCell(format!("{id}:{carrier}")))?;
            carriers.push(c as u32);
        }
        let sub = table
            .cells
            .into_iter()
            .zip(table.names)
            .zip(carriers)
            .map(|(((rank, ty, attach), id), carrier)| SubCell { id, rank, ty, carrier, attach })
            .collect();
        self.rule.types[t].sub = SubComplex { cells: sub };
        Ok(self)
    }

    /// A vertex type with the trivial subdivision.
    pub fn vertex_type(&mut self, id: &str, ideal: bool) -> Result<&mut Self, BuildError> {
        self.cell_type(id, 0, ideal, &[])?;
        self.subdivision(id, &[("p", id, &[], "top")])
    }

    pub fn build(self) -> SubdivisionRule {
        self.rule
    }

    pub fn rule(&self) -> &SubdivisionRule {
        &self.rule
    }
}

/// Builds a typed complex over `rule` from vertex lists.
pub fn build_complex(rule: &SubdivisionRule, cells: &[CellSpec<'_>]) -> Result<TypedComplex, BuildError> {
    let mut table = Table::new();
    for (name, ty, verts) in cells {
        let s = rule.type_index(ty).ok_or_else(|| BuildError::UnknownType((*ty).to_owned()))?;
        table.add(rule, name, s, verts)?;
    }
    let mut x = TypedComplex::new();
    for ((rank, ty, attach), name) in table.cells.into_iter().zip(table.names) {
        x.push_cell(name, rank, ty, &attach);
    }
    Ok(x)
}
