//! Finite subdivision rules on typed cell complexes, their history graphs, and
//! the numerical and combinatorial invariants used to guess a limit geometry.

pub mod builder;
pub mod classifier;
pub mod complex;
pub mod corpus;
pub mod growth;
pub mod history;
pub mod hyperbolicity;
pub mod pipeline;
pub mod rulefile;
pub mod subdivision;
pub mod topology;
pub mod union_find;
pub mod validate;

pub use complex::{CellType, CellTypeId, SubdivisionRule, TypedComplex};
pub use subdivision::{iterate, subdivide, LevelData, Levels, SubdivisionError};
pub use validate::{validate_complex, validate_rule, CheckedRule, ValidationReport, Violation, ViolationCode};
