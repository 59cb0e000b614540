//! Validation of subdivision rules and typed complexes.
//!
//! Violations are data: a report collects every broken invariant with a stable
//! code. A rule that validates can be turned into a [`CheckedRule`], which also
//! carries the lookup tables the subdivision engine needs.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::complex::{CellTable, SubdivisionRule, TypedComplex, NONE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ViolationCode {
    UnknownType,
    AttachNotIso,
    CarrierIncompatible,
    IdealClosureViolation,
    NotPure,
    IntersectionNotSingleCell,
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub code: ViolationCode,
    pub ids: Vec<String>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    fn from_violations(violations: Vec<Violation>) -> Self {
        Self { ok: violations.is_empty(), violations }
    }

    pub fn has(&self, code: ViolationCode) -> bool {
        self.violations.iter().any(|v| v.code == code)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok {
            return f.write_str("ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{} [{}]: {}", v.code, v.ids.join(", "), v.message)?;
        }
        Ok(())
    }
}

struct Sink(Vec<Violation>);

impl Sink {
    fn push(&mut self, code: ViolationCode, ids: Vec<String>, message: impl Into<String>) {
        self.0.push(Violation { code, ids, message: message.into() });
    }
}

/// Checks type resolution, attachment bijectivity and attach coherence for every
/// cell of `table`. `context` prefixes reported ids.
fn check_attachments<T: CellTable + ?Sized>(
    table: &T,
    rule: &SubdivisionRule,
    tops: &[Option<usize>],
    context: &str,
    sink: &mut Sink,
) {
    let n = table.cell_count();
    let id = |i: usize| format!("{context}{}", table.cell_name(i));
    for i in 0..n {
        let t = table.cell_type(i);
        if t >= rule.types.len() {
            sink.push(ViolationCode::UnknownType, vec![id(i)], format!("type index {t} does not resolve"));
            continue;
        }
        let model = &rule.types[t].model;
        let alpha = table.cell_attach(i);
        if alpha.len() != model.cells.len() {
            sink.push(
                ViolationCode::AttachNotIso,
                vec![id(i)],
                format!(
                    "attach has {} entries but the model of {} has {}",
                    alpha.len(),
                    rule.types[t].id,
                    model.cells.len()
                ),
            );
            continue;
        }
        if let Some(&bad) = alpha.iter().find(|&&a| a as usize >= n) {
            sink.push(ViolationCode::AttachNotIso, vec![id(i)], format!("attach target {bad} out of range"));
            continue;
        }
        if let Some(top) = tops[t] {
            if alpha[top] as usize != i {
                sink.push(ViolationCode::AttachNotIso, vec![id(i)], "model top is not sent to the cell itself");
                continue;
            }
        }
        let mut problem = None;
        let mut seen = BTreeSet::new();
        for (l, &a) in alpha.iter().enumerate() {
            let a = a as usize;
            let local = &model.cells[l];
            if table.cell_rank(a) != local.rank {
                problem = Some(format!(
                    "local `{}` of rank {} sent to `{}` of rank {}",
                    local.id,
                    local.rank,
                    table.cell_name(a),
                    table.cell_rank(a)
                ));
                break;
            }
            if table.cell_type(a) != local.ty {
                problem = Some(format!("local `{}` sent to `{}` of a different type", local.id, table.cell_name(a)));
                break;
            }
            if !seen.insert(a) {
                problem = Some(format!("attach is not injective at `{}`", table.cell_name(a)));
                break;
            }
        }
        if problem.is_none() {
            // attach(alpha(l)) must equal alpha ∘ attach_model(l).
            'outer: for (l, &a) in alpha.iter().enumerate() {
                if Some(l) == tops[t] || a as usize == i {
                    continue;
                }
                let inner = &model.cells[l].attach;
                let beta = table.cell_attach(a as usize);
                if beta.len() != inner.len() {
                    problem =
                        Some(format!("face `{}` has an attach map of the wrong size", table.cell_name(a as usize)));
                    break;
                }
                for (k, &g) in inner.iter().enumerate() {
                    if g as usize >= alpha.len() || beta[k] != alpha[g as usize] {
                        problem = Some(format!(
                            "attach of face `{}` does not agree with the composite through local `{}`",
                            table.cell_name(a as usize),
                            model.cells[l].id
                        ));
                        break 'outer;
                    }
                }
            }
        }
        if let Some(msg) = problem {
            sink.push(ViolationCode::AttachNotIso, vec![id(i)], msg);
        }
    }
}

/// Every cell must lie below a cell of rank `dim`.
fn check_pure<T: CellTable + ?Sized>(table: &T, dim: u32, context: &str, sink: &mut Sink) {
    let n = table.cell_count();
    let mut covered = vec![false; n];
    for i in 0..n {
        if table.cell_rank(i) == dim {
            for &f in table.cell_attach(i) {
                if (f as usize) < n {
                    covered[f as usize] = true;
                }
            }
            covered[i] = true;
        }
    }
    for (i, ok) in covered.iter().enumerate() {
        if !ok {
            sink.push(
                ViolationCode::NotPure,
                vec![format!("{context}{}", table.cell_name(i))],
                format!("not a face of any cell of rank {dim}"),
            );
        }
    }
}

/// Any two cells meet in at most one maximal common face.
fn check_single_intersection<T: CellTable + ?Sized>(table: &T, context: &str, sink: &mut Sink) {
    let n = table.cell_count();
    let downs: Vec<BTreeSet<usize>> =
        (0..n).map(|i| table.cell_attach(i).iter().map(|&a| a as usize).filter(|&a| a < n).collect()).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            if downs[i].contains(&j) || downs[j].contains(&i) {
                continue;
            }
            let common: Vec<usize> = downs[i].intersection(&downs[j]).copied().collect();
            let maximal = common.iter().filter(|&&c| !common.iter().any(|&d| d != c && downs[d].contains(&c))).count();
            if maximal > 1 {
                sink.push(
                    ViolationCode::IntersectionNotSingleCell,
                    vec![format!("{context}{}", table.cell_name(i)), format!("{context}{}", table.cell_name(j))],
                    format!("cells meet in {maximal} maximal common faces"),
                );
            }
        }
    }
}

/// Finds the type-, carrier- and attach-preserving isomorphism from `Sub(s)` onto
/// the part of `Sub(t)` carried into the closed face `x` of `Model(t)`, where
/// `s` is the type of `x`. Returns `iso[w]` for every cell `w` of `Sub(s)`.
fn boundary_iso(rule: &SubdivisionRule, t: usize, x: usize) -> Option<Vec<u32>> {
    let model_t = &rule.types[t].model;
    let local = &model_t.cells[x];
    let s = local.ty;
    let sub_s = &rule.types[s].sub;
    let sub_t = &rule.types[t].sub;
    let ax = &local.attach;
    let down_x: BTreeSet<u32> = ax.iter().copied().collect();
    let targets: Vec<usize> = (0..sub_t.cells.len()).filter(|&u| down_x.contains(&sub_t.cells[u].carrier)).collect();
    if targets.len() != sub_s.cells.len() {
        return None;
    }
    let mut order: Vec<usize> = (0..sub_s.cells.len()).collect();
    order.sort_by_key(|&w| (sub_s.cells[w].rank, w));

    struct Search<'a> {
        rule: &'a SubdivisionRule,
        s: usize,
        t: usize,
        ax: &'a [u32],
        targets: &'a [usize],
        order: &'a [usize],
        phi: Vec<u32>,
        used: Vec<bool>,
    }

    impl Search<'_> {
        fn run(&mut self, pos: usize) -> bool {
            if pos == self.order.len() {
                return true;
            }
            let sub_s = &self.rule.types[self.s].sub;
            let sub_t = &self.rule.types[self.t].sub;
            let w = self.order[pos];
            let cw = &sub_s.cells[w];
            let Some(&want_carrier) = self.ax.get(cw.carrier as usize) else {
                return false;
            };
            for &u in self.targets {
                if self.used[u] {
                    continue;
                }
                let cu = &sub_t.cells[u];
                if cu.rank != cw.rank || cu.ty != cw.ty || cu.carrier != want_carrier {
                    continue;
                }
                if cu.attach.len() != cw.attach.len() {
                    continue;
                }
                let faces_agree = cw.attach.iter().zip(&cu.attach).all(|(&fw, &fu)| {
                    fw as usize == w || {
                        let m = self.phi.get(fw as usize).copied().unwrap_or(NONE);
                        m != NONE && m == fu
                    }
                });
                if !faces_agree {
                    continue;
                }
                self.phi[w] = u as u32;
                self.used[u] = true;
                if self.run(pos + 1) {
                    return true;
                }
                self.phi[w] = NONE;
                self.used[u] = false;
            }
            false
        }
    }

    let mut search = Search {
        rule,
        s,
        t,
        ax,
        targets: &targets,
        order: &order,
        phi: vec![NONE; sub_s.cells.len()],
        used: vec![false; sub_t.cells.len()],
    };
    if search.run(0) {
        Some(search.phi)
    } else {
        None
    }
}

/// Lookup tables derived from a valid rule.
#[derive(Debug, Clone)]
struct RuleTables {
    tops: Vec<usize>,
    interior: Vec<Vec<u32>>,
    interior_pos: Vec<Vec<u32>>,
    lifts: Vec<Vec<Vec<u32>>>,
}

fn analyze_rule(rule: &SubdivisionRule) -> (ValidationReport, Option<RuleTables>) {
    let mut sink = Sink(Vec::new());
    let ntypes = rule.types.len();
    let rule_dim = rule.dimension();

    let mut seen = BTreeSet::new();
    for ct in &rule.types {
        if !seen.insert(&ct.id) {
            sink.push(ViolationCode::UnknownType, vec![ct.id.0.clone()], "duplicate cell type id");
        }
    }

    let tops: Vec<Option<usize>> = rule
        .types
        .iter()
        .enumerate()
        .map(|(t, ct)| {
            let top = ct.model.top()?;
            let c = &ct.model.cells[top];
            (c.ty == t && c.rank == ct.dim).then_some(top)
        })
        .collect();
    for (t, ct) in rule.types.iter().enumerate() {
        if tops[t].is_none() {
            sink.push(
                ViolationCode::NotPure,
                vec![ct.id.0.clone()],
                format!("model needs a unique top cell of rank {} and type {}", ct.dim, ct.id),
            );
        }
        if ct.ideal && ct.dim != rule_dim {
            sink.push(
                ViolationCode::IdealClosureViolation,
                vec![ct.id.0.clone()],
                "ideal coloring is only defined for top-dimensional tile types",
            );
        }
    }

    for ct in &rule.types {
        check_attachments(&ct.model, rule, &tops, &format!("{}:model:", ct.id), &mut sink);
        check_single_intersection(&ct.model, &format!("{}:model:", ct.id), &mut sink);
    }

    let mut lifts = vec![Vec::new(); ntypes];
    for (t, ct) in rule.types.iter().enumerate() {
        let ctx = format!("{}:sub:", ct.id);
        let sub = &ct.sub;
        let before = sink.0.len();
        check_attachments(sub, rule, &tops, &ctx, &mut sink);
        check_pure(sub, ct.dim, &ctx, &mut sink);
        check_single_intersection(sub, &ctx, &mut sink);
        let structural_ok = sink.0.len() == before;

        let Some(top) = tops[t] else { continue };
        let model = &ct.model;
        let mut carriers_ok = true;
        for cell in &sub.cells {
            let c = cell.carrier as usize;
            if c >= model.cells.len() {
                sink.push(
                    ViolationCode::CarrierIncompatible,
                    vec![format!("{ctx}{}", cell.id)],
                    "carrier does not resolve",
                );
                carriers_ok = false;
                continue;
            }
            if cell.rank > model.cells[c].rank {
                sink.push(
                    ViolationCode::CarrierIncompatible,
                    vec![format!("{ctx}{}", cell.id)],
                    format!("rank {} exceeds carrier rank {}", cell.rank, model.cells[c].rank),
                );
                carriers_ok = false;
            }
        }
        if !carriers_ok || !structural_ok {
            continue;
        }
        for cell in &sub.cells {
            let carrier_down = &model.cells[cell.carrier as usize].attach;
            for &f in &cell.attach {
                let fc = sub.cells[f as usize].carrier;
                if !carrier_down.contains(&fc) {
                    sink.push(
                        ViolationCode::CarrierIncompatible,
                        vec![format!("{ctx}{}", cell.id), format!("{ctx}{}", sub.cells[f as usize].id)],
                        "carrier of a face is not a face of the carrier",
                    );
                }
            }
        }
        if !sub.cells.iter().any(|c| c.carrier as usize == top) {
            sink.push(
                ViolationCode::CarrierIncompatible,
                vec![ct.id.0.clone()],
                "no subdivided cell is carried by the open top cell",
            );
        }
        if ct.ideal {
            for cell in sub.cells.iter().filter(|c| c.rank == ct.dim) {
                if !rule.types.get(cell.ty).is_some_and(|ty| ty.ideal) {
                    sink.push(
                        ViolationCode::IdealClosureViolation,
                        vec![format!("{ctx}{}", cell.id)],
                        format!("ideal tile {} subdivides into a non-ideal tile", ct.id),
                    );
                }
            }
        }
        let mut per_face = vec![Vec::new(); model.cells.len()];
        for (x, slot) in per_face.iter_mut().enumerate() {
            if x == top {
                continue;
            }
            match boundary_iso(rule, t, x) {
                Some(iso) => {
                    let mut inverse = vec![NONE; sub.cells.len()];
                    for (w, &u) in iso.iter().enumerate() {
                        inverse[u as usize] = w as u32;
                    }
                    *slot = inverse;
                }
                None => sink.push(
                    ViolationCode::CarrierIncompatible,
                    vec![ct.id.0.clone(), model.cells[x].id.clone()],
                    format!(
                        "subdivision restricted to face `{}` is not isomorphic to the subdivision of {}",
                        model.cells[x].id,
                        rule.types.get(model.cells[x].ty).map(|c| c.id.0.as_str()).unwrap_or("?")
                    ),
                ),
            }
        }
        lifts[t] = per_face;
    }

    let report = ValidationReport::from_violations(sink.0);
    if !report.ok {
        return (report, None);
    }
    let tops: Vec<usize> = tops.into_iter().map(|t| t.expect("valid rule has tops")).collect();
    let mut interior = Vec::with_capacity(ntypes);
    let mut interior_pos = Vec::with_capacity(ntypes);
    for (t, ct) in rule.types.iter().enumerate() {
        let inner: Vec<u32> =
            (0..ct.sub.cells.len() as u32).filter(|&u| ct.sub.cells[u as usize].carrier as usize == tops[t]).collect();
        let mut pos = vec![NONE; ct.sub.cells.len()];
        for (k, &u) in inner.iter().enumerate() {
            pos[u as usize] = k as u32;
        }
        interior.push(inner);
        interior_pos.push(pos);
    }
    (report, Some(RuleTables { tops, interior, interior_pos, lifts }))
}

/// Validates a subdivision rule. Idempotent and side-effect free.
pub fn validate_rule(rule: &SubdivisionRule) -> ValidationReport {
    analyze_rule(rule).0
}

/// A rule that passed validation, together with the tables used for gluing.
#[derive(Debug, Clone)]
pub struct CheckedRule {
    rule: SubdivisionRule,
    dim: u32,
    tables: RuleTables,
}

impl CheckedRule {
    pub fn new(rule: SubdivisionRule) -> Result<Self, ValidationReport> {
        let (report, tables) = analyze_rule(&rule);
        match tables {
            Some(tables) => Ok(Self { dim: rule.dimension(), rule, tables }),
            None => Err(report),
        }
    }

    pub fn rule(&self) -> &SubdivisionRule {
        &self.rule
    }

    pub fn dimension(&self) -> u32 {
        self.dim
    }

    pub fn type_count(&self) -> usize {
        self.rule.types.len()
    }

    pub fn is_tile(&self, t: usize) -> bool {
        self.rule.types[t].dim == self.dim
    }

    pub fn is_ideal(&self, t: usize) -> bool {
        self.rule.types[t].ideal
    }

    /// Top local cell of `Model(t)`.
    pub fn top(&self, t: usize) -> usize {
        self.tables.tops[t]
    }

    /// Cells of `Sub(t)` carried by the open top cell, in index order.
    pub fn interior(&self, t: usize) -> &[u32] {
        &self.tables.interior[t]
    }

    pub(crate) fn interior_position(&self, t: usize, u: usize) -> u32 {
        self.tables.interior_pos[t][u]
    }

    /// For a cell `w` of `Sub(t)` carried by the proper face `x`, the
    /// corresponding cell of `Sub(type(x))`.
    pub(crate) fn lift(&self, t: usize, x: usize, w: usize) -> u32 {
        self.tables.lifts[t][x][w]
    }
}

/// Validates an R-complex against a checked rule.
pub fn validate_complex(rule: &CheckedRule, x: &TypedComplex) -> ValidationReport {
    let mut sink = Sink(Vec::new());
    let tops: Vec<Option<usize>> = rule.tables.tops.iter().map(|&t| Some(t)).collect();
    check_attachments(x, &rule.rule, &tops, "", &mut sink);
    if let Some(dim) = x.dimension() {
        if sink.0.is_empty() {
            if dim != rule.dimension() {
                sink.push(
                    ViolationCode::NotPure,
                    Vec::new(),
                    format!("complex has dimension {dim}, rule has dimension {}", rule.dimension()),
                );
            }
            check_pure(x, dim, "", &mut sink);
        }
    }
    ValidationReport::from_violations(sink.0)
}
