//! Propositional route for empty-TBox satisfiability: a trace-tree CNF
//! encoding whose size is exponential only in the number of full
//! existentials, a plain DPLL solver, and DIMACS I/O.

mod dimacs;
mod dpll;
mod encode;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::concept::Concept;

pub use dimacs::{export_dimacs, parse_dimacs, DimacsError};
pub use dpll::{evaluate, solve_cnf, Assignment, SolveResult};
pub use encode::{encode_trace_cnf, EncodeError};

/// One edge of a trace path.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TraceStep {
    /// Successor for a full existential occurrence, identified by its
    /// position in the occurrence table of the encoded concept.
    Full(usize),
    /// The shared successor for the limited existential `∃R.⊤`.
    Limited(String),
}

/// A node of the symbolic trace tree: the path of steps from the root `ε`.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TraceNode {
    pub steps: Vec<TraceStep>,
}

impl TraceNode {
    pub fn root() -> Self {
        TraceNode::default()
    }

    pub fn child(&self, step: TraceStep) -> Self {
        let mut steps = self.steps.clone();
        steps.push(step);
        TraceNode { steps }
    }

    pub fn depth(&self) -> usize {
        self.steps.len()
    }

    pub fn full_steps(&self) -> impl Iterator<Item = usize> + '_ {
        self.steps.iter().filter_map(|s| match s {
            TraceStep::Full(o) => Some(*o),
            TraceStep::Limited(_) => None,
        })
    }
}

impl fmt::Display for TraceNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.steps.is_empty() {
            return f.write_str("ε");
        }
        for (i, s) in self.steps.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            match s {
                TraceStep::Full(o) => write!(f, "o{o}")?,
                TraceStep::Limited(r) => write!(f, "[{r}]")?,
            }
        }
        Ok(())
    }
}

/// A clause set over variables `1..=num_vars`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CnfFormula {
    pub num_vars: usize,
    pub clauses: Vec<Vec<i32>>,
    /// What each variable asserts: "concept holds at trace node".
    pub var_meaning: BTreeMap<u32, (TraceNode, Concept)>,
}

impl CnfFormula {
    pub fn new(num_vars: usize, clauses: Vec<Vec<i32>>) -> Self {
        CnfFormula {
            num_vars,
            clauses,
            var_meaning: BTreeMap::new(),
        }
    }

    /// The canonical unsatisfiable formula: one empty clause, no variables.
    pub fn unsatisfiable() -> Self {
        CnfFormula::new(0, vec![Vec::new()])
    }

    pub fn is_canonical_unsat(&self) -> bool {
        self.num_vars == 0 && self.clauses == [Vec::<i32>::new()]
    }

    /// Checks the structural invariants: literals in range, no duplicate
    /// literal in a clause, and no empty clause outside the canonical
    /// unsatisfiable formula.
    pub fn is_well_formed(&self) -> bool {
        if self.is_canonical_unsat() {
            return true;
        }
        self.clauses.iter().all(|cl| {
            !cl.is_empty()
                && cl
                    .iter()
                    .all(|&l| l != 0 && l.unsigned_abs() as usize <= self.num_vars)
                && cl.iter().enumerate().all(|(i, l)| !cl[..i].contains(l))
        })
    }

    /// Distinct trace nodes mentioned by `var_meaning`.
    pub fn trace_nodes(&self) -> Vec<&TraceNode> {
        let mut nodes: Vec<&TraceNode> = self.var_meaning.values().map(|(n, _)| n).collect();
        nodes.sort();
        nodes.dedup();
        nodes
    }
}
