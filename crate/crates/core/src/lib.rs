//! Satisfiability of ALC concepts, with and without TBoxes.
//!
//! The crate holds the concept syntax tree and its surface syntax, a
//! brute-force finite-model oracle, two tableau engines, a trace-tree CNF
//! encoding with a DPLL solver, parameter analysis, and seeded generators.

pub mod analysis;
pub mod concept;
pub mod gen;
pub mod kb;
pub mod sat;
pub mod semantics;
pub mod syntax;
pub mod tableau;

pub use concept::{nnf, Concept, Fragment, Signature};
pub use kb::{KbError, KnowledgeBase};
pub use syntax::{
    parse_concept, parse_knowledge_base, print_concept, print_knowledge_base, ParseDiagnostic,
};
