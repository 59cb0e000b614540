//! JSON encoding of rules and complexes.
//!
//! Canonical form: UTF-8, object keys sorted, arrays of cell types and cells
//! sorted by id, no insignificant whitespace. Parsing goes through the same
//! document types, so index order inside the in-memory structures is always the
//! sorted id order.

use std::collections::{BTreeMap, HashMap};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{
    CellType, CellTypeId, ModelCell, ModelComplex, SubCell, SubComplex, SubdivisionRule, TypedComplex,
};
use crate::validate::{validate_complex, validate_rule, CheckedRule, ValidationReport, Violation, ViolationCode};

pub const FORMAT_VERSION: &str = "1";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RuleFileError {
    #[error("malformed JSON at line {line}, column {column} (byte {offset}): {message}")]
    Parse { line: usize, column: usize, offset: usize, message: String },
    #[error("schema error at `{path}`: {message}")]
    Schema { path: String, message: String },
    #[error("validation failed: {0}")]
    Validation(ValidationReport),
}

impl RuleFileError {
    fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Schema { path: path.into(), message: message.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleDocument {
    pub format_version: String,
    pub celltypes: Vec<CellTypeDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellTypeDoc {
    pub id: String,
    pub dim: u32,
    #[serde(default)]
    pub ideal: bool,
    pub model: ModelDoc,
    pub subdivision: SubDoc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDoc {
    pub cells: Vec<ModelCellDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelCellDoc {
    pub local_id: String,
    pub rank: u32,
    #[serde(rename = "type")]
    pub ty: String,
    /// Omitted for the top cell, whose attach map is the identity.
    #[serde(default)]
    pub attach: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubDoc {
    pub cells: Vec<SubCellDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubCellDoc {
    pub local_id: String,
    pub rank: u32,
    #[serde(rename = "type")]
    pub ty: String,
    pub carrier: String,
    pub attach: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexDocument {
    pub format_version: String,
    pub cells: Vec<ComplexCellDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexCellDoc {
    pub id: String,
    pub rank: u32,
    #[serde(rename = "type")]
    pub ty: String,
    pub attach: BTreeMap<String, String>,
}

/// Serializes any value in canonical form: sorted keys, compact.
pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("document types serialize to JSON");
    serde_json::to_string(&v).expect("JSON values serialize")
}

fn parse_document<T: DeserializeOwned>(bytes: &[u8]) -> Result<T, RuleFileError> {
    let value: serde_json::Value = serde_json::from_slice(bytes).map_err(|e| {
        let (line, column) = (e.line(), e.column());
        let offset = if e.is_eof() { bytes.len() } else { byte_offset(bytes, line, column) };
        RuleFileError::Parse { line, column, offset, message: e.to_string() }
    })?;
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        RuleFileError::schema(path, e.into_inner().to_string())
    })
}

/// Zero-based offset of the 1-based `(line, column)` position.
fn byte_offset(bytes: &[u8], line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let start: usize = bytes.split_inclusive(|&b| b == b'\n').take(line - 1).map(<[u8]>::len).sum();
    (start + column.saturating_sub(1)).min(bytes.len())
}

fn check_version(v: &str) -> Result<(), RuleFileError> {
    if v == FORMAT_VERSION {
        Ok(())
    } else {
        Err(RuleFileError::schema("format_version", format!("unsupported version `{v}`, expected `{FORMAT_VERSION}`")))
    }
}

fn unknown_type(path: &str, id: &str) -> Violation {
    Violation {
        code: ViolationCode::UnknownType,
        ids: vec![id.to_owned()],
        message: format!("{path}: no cell type `{id}`"),
    }
}

/// Converts an id-keyed attach map into the positional form indexed by the
/// local cells of the model it is keyed by.
fn positional_attach(
    path: &str,
    map: &BTreeMap<String, String>,
    keys: &[String],
    targets: &HashMap<&str, u32>,
) -> Result<Vec<u32>, RuleFileError> {
    for k in map.keys() {
        if !keys.contains(k) {
            return Err(RuleFileError::schema(format!("{path}.attach.{k}"), format!("model has no local cell `{k}`")));
        }
    }
    keys.iter()
        .map(|k| {
            let v = map.get(k).ok_or_else(|| {
                RuleFileError::schema(format!("{path}.attach"), format!("missing entry for local cell `{k}`"))
            })?;
            targets
                .get(v.as_str())
                .copied()
                .ok_or_else(|| RuleFileError::schema(format!("{path}.attach.{k}"), format!("no cell `{v}`")))
        })
        .collect()
}

fn sort_rule_document(doc: &mut RuleDocument) {
    doc.celltypes.sort_by(|a, b| a.id.cmp(&b.id));
    for t in &mut doc.celltypes {
        t.model.cells.sort_by(|a, b| a.local_id.cmp(&b.local_id));
        t.subdivision.cells.sort_by(|a, b| a.local_id.cmp(&b.local_id));
    }
}

fn duplicate<'a>(ids: impl Iterator<Item = &'a str>) -> Option<(usize, &'a str)> {
    let mut seen = std::collections::HashSet::new();
    ids.enumerate().find(|(_, id)| !seen.insert(*id))
}

impl RuleDocument {
    pub fn from_rule(rule: &SubdivisionRule) -> Self {
        let local_ids = |t: usize| -> Vec<&str> { rule.types[t].model.cells.iter().map(|c| c.id.as_str()).collect() };
        let mut celltypes: Vec<CellTypeDoc> = rule
            .types
            .iter()
            .map(|t| {
                let own = |i: u32| t.model.cells[i as usize].id.clone();
                let model = t
                    .model
                    .cells
                    .iter()
                    .map(|c| ModelCellDoc {
                        local_id: c.id.clone(),
                        rank: c.rank,
                        ty: rule.types[c.ty].id.0.clone(),
                        attach: local_ids(c.ty)
                            .into_iter()
                            .map(str::to_owned)
                            .zip(c.attach.iter().map(|&i| own(i)))
                            .collect(),
                    })
                    .collect();
                let sub = t
                    .sub
                    .cells
                    .iter()
                    .map(|c| SubCellDoc {
                        local_id: c.id.clone(),
                        rank: c.rank,
                        ty: rule.types[c.ty].id.0.clone(),
                        carrier: own(c.carrier),
                        attach: local_ids(c.ty)
                            .into_iter()
                            .map(str::to_owned)
                            .zip(c.attach.iter().map(|&i| t.sub.cells[i as usize].id.clone()))
                            .collect(),
                    })
                    .collect();
                CellTypeDoc {
                    id: t.id.0.clone(),
                    dim: t.dim,
                    ideal: t.ideal,
                    model: ModelDoc { cells: model },
                    subdivision: SubDoc { cells: sub },
                }
            })
            .collect();
        celltypes.sort_by(|a, b| a.id.cmp(&b.id));
        let mut doc = Self { format_version: FORMAT_VERSION.into(), celltypes };
        sort_rule_document(&mut doc);
        doc
    }

    /// Builds the in-memory rule (in sorted id order) without semantic validation.
    pub fn to_rule(&self) -> Result<SubdivisionRule, RuleFileError> {
        check_version(&self.format_version)?;
        let mut doc = self.clone();
        sort_rule_document(&mut doc);
        if let Some((i, id)) = duplicate(doc.celltypes.iter().map(|t| t.id.as_str())) {
            return Err(RuleFileError::schema(format!("celltypes[{i}].id"), format!("duplicate cell type `{id}`")));
        }
        let type_idx: HashMap<&str, usize> =
            doc.celltypes.iter().enumerate().map(|(i, t)| (t.id.as_str(), i)).collect();
        let locals: Vec<Vec<String>> =
            doc.celltypes.iter().map(|t| t.model.cells.iter().map(|c| c.local_id.clone()).collect()).collect();
        let mut unknown = Vec::new();
        let mut types = Vec::with_capacity(doc.celltypes.len());
        for (ti, t) in doc.celltypes.iter().enumerate() {
            let base = format!("celltypes.{}", t.id);
            if let Some((_, id)) = duplicate(t.model.cells.iter().map(|c| c.local_id.as_str())) {
                return Err(RuleFileError::schema(format!("{base}.model.cells.{id}"), "duplicate local id"));
            }
            if let Some((_, id)) = duplicate(t.subdivision.cells.iter().map(|c| c.local_id.as_str())) {
                return Err(RuleFileError::schema(format!("{base}.subdivision.cells.{id}"), "duplicate local id"));
            }
            let model_targets: HashMap<&str, u32> =
                t.model.cells.iter().enumerate().map(|(i, c)| (c.local_id.as_str(), i as u32)).collect();
            let mut model = Vec::with_capacity(t.model.cells.len());
            for c in &t.model.cells {
                let path = format!("{base}.model.cells.{}", c.local_id);
                let Some(&ty) = type_idx.get(c.ty.as_str()) else {
                    unknown.push(unknown_type(&path, &c.ty));
                    continue;
                };
                let attach = if ty == ti && c.attach.is_empty() {
                    (0..t.model.cells.len() as u32).collect()
                } else {
                    positional_attach(&path, &c.attach, &locals[ty], &model_targets)?
                };
                model.push(ModelCell { id: c.local_id.clone(), rank: c.rank, ty, attach });
            }
            let sub_targets: HashMap<&str, u32> =
                t.subdivision.cells.iter().enumerate().map(|(i, c)| (c.local_id.as_str(), i as u32)).collect();
            let mut sub = Vec::with_capacity(t.subdivision.cells.len());
            for c in &t.subdivision.cells {
                let path = format!("{base}.subdivision.cells.{}", c.local_id);
                let Some(&ty) = type_idx.get(c.ty.as_str()) else {
                    unknown.push(unknown_type(&path, &c.ty));
                    continue;
                };
                let carrier = *model_targets.get(c.carrier.as_str()).ok_or_else(|| {
                    RuleFileError::schema(format!("{path}.carrier"), format!("no model cell `{}`", c.carrier))
                })?;
                let attach = positional_attach(&path, &c.attach, &locals[ty], &sub_targets)?;
                sub.push(SubCell { id: c.local_id.clone(), rank: c.rank, ty, carrier, attach });
            }
            types.push(CellType {
                id: CellTypeId(t.id.clone()),
                dim: t.dim,
                ideal: t.ideal,
                model: ModelComplex { cells: model },
                sub: SubComplex { cells: sub },
            });
        }
        if !unknown.is_empty() {
            return Err(RuleFileError::Validation(ValidationReport { ok: false, violations: unknown }));
        }
        Ok(SubdivisionRule { types })
    }
}

impl ComplexDocument {
    pub fn from_complex(rule: &SubdivisionRule, x: &TypedComplex) -> Self {
        let mut cells: Vec<ComplexCellDoc> = (0..x.len())
            .map(|i| {
                let t = &rule.types[x.type_index(i)];
                ComplexCellDoc {
                    id: x.name(i).to_owned(),
                    rank: x.rank(i),
                    ty: t.id.0.clone(),
                    attach: t
                        .model
                        .cells
                        .iter()
                        .map(|c| c.id.clone())
                        .zip(x.attach(i).iter().map(|&j| x.name(j as usize).to_owned()))
                        .collect(),
                }
            })
            .collect();
        cells.sort_by(|a, b| a.id.cmp(&b.id));
        Self { format_version: FORMAT_VERSION.into(), cells }
    }

    /// Builds the complex (cells in sorted id order) without semantic validation.
    pub fn to_complex(&self, rule: &SubdivisionRule) -> Result<TypedComplex, RuleFileError> {
        check_version(&self.format_version)?;
        let mut cells: Vec<&ComplexCellDoc> = self.cells.iter().collect();
        cells.sort_by(|a, b| a.id.cmp(&b.id));
        if let Some((_, id)) = duplicate(cells.iter().map(|c| c.id.as_str())) {
            return Err(RuleFileError::schema(format!("cells.{id}"), "duplicate cell id"));
        }
        let targets: HashMap<&str, u32> = cells.iter().enumerate().map(|(i, c)| (c.id.as_str(), i as u32)).collect();
        let locals: Vec<Vec<String>> =
            rule.types.iter().map(|t| t.model.cells.iter().map(|c| c.id.clone()).collect()).collect();
        let mut unknown = Vec::new();
        let mut x = TypedComplex::with_capacity(cells.len(), cells.len() * 4);
        for c in cells {
            let path = format!("cells.{}", c.id);
            let Some(ty) = rule.type_index(&c.ty) else {
                unknown.push(unknown_type(&path, &c.ty));
                continue;
            };
            let attach = positional_attach(&path, &c.attach, &locals[ty], &targets)?;
            x.push_cell(c.id.clone(), c.rank, ty, &attach);
        }
        if !unknown.is_empty() {
            return Err(RuleFileError::Validation(ValidationReport { ok: false, violations: unknown }));
        }
        Ok(x)
    }
}

/// Parses and validates a rule.
pub fn parse_rule(bytes: &[u8]) -> Result<SubdivisionRule, RuleFileError> {
    let doc: RuleDocument = parse_document(bytes)?;
    let rule = doc.to_rule()?;
    let report = validate_rule(&rule);
    if report.ok {
        Ok(rule)
    } else {
        Err(RuleFileError::Validation(report))
    }
}

/// Parses a complex and validates it against `rule`.
pub fn parse_complex(bytes: &[u8], rule: &CheckedRule) -> Result<TypedComplex, RuleFileError> {
    let doc: ComplexDocument = parse_document(bytes)?;
    let x = doc.to_complex(rule.rule())?;
    let report = validate_complex(rule, &x);
    if report.ok {
        Ok(x)
    } else {
        Err(RuleFileError::Validation(report))
    }
}

pub fn serialize_rule(rule: &SubdivisionRule) -> String {
    to_canonical_json(&RuleDocument::from_rule(rule))
}

pub fn serialize_complex(rule: &SubdivisionRule, x: &TypedComplex) -> String {
    to_canonical_json(&ComplexDocument::from_complex(rule, x))
}

/// Re-indexes a rule into sorted id order.
pub fn canonical_rule(rule: &SubdivisionRule) -> SubdivisionRule {
    RuleDocument::from_rule(rule).to_rule().expect("documents built from rules convert back")
}

/// Re-indexes a complex over `canonical_rule(rule)` into sorted id order.
pub fn canonical_complex(rule: &SubdivisionRule, x: &TypedComplex) -> TypedComplex {
    let canon = canonical_rule(rule);
    ComplexDocument::from_complex(rule, x).to_complex(&canon).expect("documents built from complexes convert back")
}
