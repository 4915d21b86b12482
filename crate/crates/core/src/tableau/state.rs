use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::concept::Concept;
use crate::semantics::{eval_concept, Interpretation};

/// Individuals are allocated by the engines, sequentially from `x0 = 0`.
pub type Individual = u32;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Assertion {
    Concept(Individual, Concept),
    Role(Individual, Individual, String),
    Clash,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TableauError {
    #[error("input concept is not in negation normal form")]
    NotNnf,
    #[error("cyclic definitions: {}", .0.join(" -> "))]
    CyclicDefinitions(Vec<String>),
    #[error("completion state contains a clash at node {0}")]
    ClashInWitness(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Satisfiable,
    Unsatisfiable,
}

impl Verdict {
    pub fn from_bool(sat: bool) -> Self {
        if sat {
            Verdict::Satisfiable
        } else {
            Verdict::Unsatisfiable
        }
    }

    pub fn is_sat(self) -> bool {
        self == Verdict::Satisfiable
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Satisfiable => "satisfiable",
            Verdict::Unsatisfiable => "unsatisfiable",
        })
    }
}

/// Per-rule application tallies over the whole search.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleCounts {
    pub and: u64,
    pub or: u64,
    /// All `∃`-rule applications, limited `∃R.⊤` included.
    pub exists: u64,
    pub forall: u64,
    /// Clash detections (`⊥`-rule).
    pub bot: u64,
    pub unfold: u64,
    pub gci: u64,
}

/// Search instrumentation. Every counter is exact and deterministic.
///
/// The OR/AND aggregation follows the alternating reading of the search:
/// `or_branch_points` sums over the two alternatives of a `⊔` choice but
/// takes the maximum over the `∃` instantiations of an AND node, i.e. it is
/// the number of `⊔` choices whose both alternatives were explored along the
/// worst universal branch.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub or_branch_points: u64,
    /// Full (`∃R.D`, `D ≠ ⊤`) `∃`-rule applications on the worst
    /// root-to-leaf trace.
    pub exists_applications_max_per_trace: u64,
    pub rule_counts: RuleCounts,
    /// Longest role path explored.
    pub max_depth: u64,
    pub blocked_nodes: u64,
    /// `∃`-rule applications after which a sibling existential survived.
    pub trace_shape_violations: u64,
    /// `∃`-rule applications at a node whose label is contained in an
    /// ancestor label.
    pub blocking_violations: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub label: BTreeSet<Concept>,
    /// Parent node and the role of the connecting edge.
    pub parent: Option<(usize, String)>,
    /// Ancestor whose label contains this node's label.
    pub blocked_by: Option<usize>,
}

/// A completed, clash-free tableau: a tree of labelled nodes rooted at node
/// 0. The empty-TBox engine reports the union of its accepted traces here.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompletionState {
    pub nodes: Vec<Node>,
    /// Definitions the labels were unfolded against (empty for the
    /// empty-TBox engine).
    pub definitions: Vec<(String, Concept)>,
}

impl CompletionState {
    pub fn children(&self, id: usize) -> impl Iterator<Item = (usize, &str)> + '_ {
        self.nodes
            .iter()
            .enumerate()
            .filter_map(move |(i, n)| match &n.parent {
                Some((p, r)) if *p == id => Some((i, r.as_str())),
                _ => None,
            })
    }

    pub fn depth(&self, mut id: usize) -> usize {
        let mut d = 0;
        while let Some((p, _)) = &self.nodes[id].parent {
            id = *p;
            d += 1;
        }
        d
    }

    pub fn ancestors(&self, id: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut cur = id;
        while let Some((p, _)) = &self.nodes[cur].parent {
            out.push(*p);
            cur = *p;
        }
        out
    }

    /// The state as an ABox over individuals `0..nodes.len()`.
    pub fn assertions(&self) -> BTreeSet<Assertion> {
        let mut out = BTreeSet::new();
        for (i, node) in self.nodes.iter().enumerate() {
            let x = i as Individual;
            for c in &node.label {
                out.insert(Assertion::Concept(x, c.clone()));
            }
            if let Some((p, r)) = &node.parent {
                out.insert(Assertion::Role(*p as Individual, x, r.clone()));
            }
            if label_has_clash(&node.label) {
                out.insert(Assertion::Clash);
            }
        }
        out
    }
}

pub(crate) fn label_has_clash(label: &BTreeSet<Concept>) -> bool {
    label.iter().any(|c| match c {
        Concept::Bot => true,
        Concept::Atom(_) => label.contains(&Concept::not(c.clone())),
        _ => false,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SatResult {
    pub verdict: Verdict,
    pub witness: Option<CompletionState>,
    pub stats: SearchStats,
}

/// Accepted subtree produced by a search, before numbering.
#[derive(Debug, Clone)]
pub(crate) struct WitnessNode {
    pub label: BTreeSet<Concept>,
    /// Index into the path of ancestors (0 = root) of the blocking node.
    pub blocked_by_depth: Option<usize>,
    pub children: Vec<(String, WitnessNode)>,
}

impl WitnessNode {
    #[cfg(test)]
    pub fn leaf(label: BTreeSet<Concept>) -> Self {
        WitnessNode {
            label,
            blocked_by_depth: None,
            children: Vec::new(),
        }
    }

    pub fn into_state(self, definitions: Vec<(String, Concept)>) -> CompletionState {
        fn number(
            w: WitnessNode,
            parent: Option<(usize, String)>,
            path: &mut Vec<usize>,
            nodes: &mut Vec<Node>,
        ) {
            let id = nodes.len();
            nodes.push(Node {
                label: w.label,
                parent,
                blocked_by: w.blocked_by_depth.map(|d| path[d]),
            });
            path.push(id);
            for (role, child) in w.children {
                number(child, Some((id, role)), path, nodes);
            }
            path.pop();
        }
        let mut nodes = Vec::new();
        number(self, None, &mut Vec::new(), &mut nodes);
        CompletionState { nodes, definitions }
    }
}

/// Unravel a completed state into a finite interpretation.
///
/// The domain is the non-blocked nodes (renumbered in node order); an edge
/// into a blocked node is redirected to its blocker. Primitive atoms hold
/// exactly where they are asserted; defined atoms are interpreted through
/// their definitions. `individual_map` maps `x<node>` to its element.
pub fn extract_model(witness: &CompletionState) -> Result<Interpretation, TableauError> {
    if let Some(bad) = witness.nodes.iter().position(|n| label_has_clash(&n.label)) {
        return Err(TableauError::ClashInWitness(bad));
    }
    let mut element = vec![usize::MAX; witness.nodes.len()];
    let mut next = 0;
    for (i, node) in witness.nodes.iter().enumerate() {
        if node.blocked_by.is_none() {
            element[i] = next;
            next += 1;
        }
    }
    let target = |i: usize| match witness.nodes[i].blocked_by {
        Some(b) => element[b],
        None => element[i],
    };

    let defined: BTreeMap<&str, &Concept> = witness
        .definitions
        .iter()
        .map(|(a, c)| (a.as_str(), c))
        .collect();
    let mut model = Interpretation::new(next.max(1));
    for (i, node) in witness.nodes.iter().enumerate() {
        model.individual_map.insert(format!("x{i}"), target(i));
        if node.blocked_by.is_some() {
            continue;
        }
        for c in &node.label {
            if let Concept::Atom(a) = c {
                if !defined.contains_key(a.as_str()) {
                    model.add_atom(a, element[i]);
                }
            }
        }
        if let Some((p, role)) = &node.parent {
            model.add_edge(role, element[*p], element[i]);
        }
    }
    // edges into blocked nodes go to the blocker
    for node in &witness.nodes {
        if let (Some(b), Some((p, role))) = (node.blocked_by, &node.parent) {
            model.add_edge(role, element[*p], element[b]);
        }
    }

    // defined atoms, in dependency order
    let mut done: BTreeSet<&str> = BTreeSet::new();
    while done.len() < defined.len() {
        let before = done.len();
        for (a, body) in &defined {
            if done.contains(a) {
                continue;
            }
            let mut ready = true;
            body.walk(&mut |c| {
                if let Concept::Atom(b) = c {
                    if defined.contains_key(b.as_str()) && !done.contains(b.as_str()) {
                        ready = false;
                    }
                }
            });
            if ready {
                let ext = eval_concept(&model, body);
                model.atom_ext.insert(a.to_string(), ext);
                done.insert(a);
            }
        }
        if done.len() == before {
            return Err(TableauError::CyclicDefinitions(
                defined
                    .keys()
                    .filter(|a| !done.contains(*a))
                    .map(|a| a.to_string())
                    .collect(),
            ));
        }
    }
    Ok(model)
}
