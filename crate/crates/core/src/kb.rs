//! Knowledge bases: an acyclic definition part plus general concept
//! inclusions over one signature.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::concept::{Concept, Signature};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KbError {
    #[error("`{0}` is defined more than once")]
    DuplicateDefinition(String),
    #[error("cyclic definitions: {}", .0.join(" -> "))]
    CyclicDefinition(Vec<String>),
    #[error("names used both as atom and role: {}", .0.join(", "))]
    OverlappingNames(Vec<String>),
}

/// `T1` (definitions `A ≡ C`, acyclic, at most one per atom) and `T2`
/// (GCIs `C ⊑ D`).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnowledgeBase {
    pub signature: Signature,
    pub definitions: Vec<(String, Concept)>,
    pub gcis: Vec<(Concept, Concept)>,
}

impl KnowledgeBase {
    pub fn new(
        definitions: Vec<(String, Concept)>,
        gcis: Vec<(Concept, Concept)>,
    ) -> Result<Self, KbError> {
        let mut seen = BTreeSet::new();
        for (name, _) in &definitions {
            if !seen.insert(name.as_str()) {
                return Err(KbError::DuplicateDefinition(name.clone()));
            }
        }
        check_acyclic(&definitions).map_err(KbError::CyclicDefinition)?;
        let mut signature = Signature::default();
        for (name, body) in &definitions {
            signature.atomic_concepts.insert(name.clone());
            signature.add_concept(body);
        }
        for (lhs, rhs) in &gcis {
            signature.add_concept(lhs);
            signature.add_concept(rhs);
        }
        let overlap = signature.overlapping_names();
        if !overlap.is_empty() {
            return Err(KbError::OverlappingNames(overlap));
        }
        Ok(KnowledgeBase {
            signature,
            definitions,
            gcis,
        })
    }

    pub fn empty() -> Self {
        KnowledgeBase::default()
    }

    pub fn general(gcis: Vec<(Concept, Concept)>) -> Self {
        KnowledgeBase::new(Vec::new(), gcis)
            .expect("a GCI-only knowledge base has no definitions to reject")
    }

    pub fn is_empty(&self) -> bool {
        self.definitions.is_empty() && self.gcis.is_empty()
    }

    pub fn definition(&self, atom: &str) -> Option<&Concept> {
        self.definitions
            .iter()
            .find(|(n, _)| n == atom)
            .map(|(_, c)| c)
    }

    /// Total number of AST nodes across all statements (one extra node per
    /// statement for the defined atom or the inclusion itself).
    pub fn symbol_size(&self) -> usize {
        let defs: usize = self.definitions.iter().map(|(_, c)| 2 + c.size()).sum();
        let gcis: usize = self.gcis.iter().map(|(l, r)| 1 + l.size() + r.size()).sum();
        defs + gcis
    }

    /// Longest chain `A1 -> A2 -> ...` of definitions whose bodies mention
    /// the next defined atom (0 without definitions).
    pub fn definition_depth(&self) -> usize {
        let graph = dependency_graph(&self.definitions);
        fn depth(
            a: &str,
            graph: &BTreeMap<&str, BTreeSet<&str>>,
            memo: &mut BTreeMap<String, usize>,
        ) -> usize {
            if let Some(d) = memo.get(a) {
                return *d;
            }
            let d = match graph.get(a) {
                None => 0,
                Some(succ) => {
                    1 + succ
                        .iter()
                        .map(|b| depth(b, graph, memo))
                        .max()
                        .unwrap_or(0)
                }
            };
            memo.insert(a.to_string(), d);
            d
        }
        let mut memo = BTreeMap::new();
        graph
            .keys()
            .map(|a| depth(a, &graph, &mut memo))
            .max()
            .unwrap_or(0)
    }
}

fn dependency_graph(definitions: &[(String, Concept)]) -> BTreeMap<&str, BTreeSet<&str>> {
    let mut graph = BTreeMap::new();
    for (name, body) in definitions {
        let mut uses = BTreeSet::new();
        body.walk(&mut |c| {
            if let Concept::Atom(b) = c {
                uses.insert(b.as_str());
            }
        });
        graph.insert(name.as_str(), uses);
    }
    graph
}

/// Look for a cycle in the definition dependency graph (edge `A -> B` iff
/// `B` occurs in the body of `A`). Roots and successors are visited in
/// lexicographic order; the returned cycle starts at the first atom on it
/// that the search entered.
pub fn check_acyclic(definitions: &[(String, Concept)]) -> Result<(), Vec<String>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Active,
        Done,
    }
    fn visit<'a>(
        a: &'a str,
        graph: &BTreeMap<&'a str, BTreeSet<&'a str>>,
        marks: &mut BTreeMap<&'a str, Mark>,
        stack: &mut Vec<&'a str>,
    ) -> Option<Vec<String>> {
        match marks.get(a) {
            Some(Mark::Done) => return None,
            Some(Mark::Active) => {
                let start = stack
                    .iter()
                    .position(|s| *s == a)
                    .expect("active node is on the stack");
                return Some(stack[start..].iter().map(|s| s.to_string()).collect());
            }
            None => {}
        }
        let succ = graph.get(a)?;
        marks.insert(a, Mark::Active);
        stack.push(a);
        for b in succ {
            if let Some(cycle) = visit(b, graph, marks, stack) {
                return Some(cycle);
            }
        }
        stack.pop();
        marks.insert(a, Mark::Done);
        None
    }

    let graph = dependency_graph(definitions);
    let mut marks = BTreeMap::new();
    for root in graph.keys() {
        let mut stack = Vec::new();
        if let Some(cycle) = visit(root, &graph, &mut marks, &mut stack) {
            return Err(cycle);
        }
    }
    Ok(())
}
