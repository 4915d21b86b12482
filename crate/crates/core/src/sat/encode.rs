use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::concept::Concept;

use super::{CnfFormula, TraceNode, TraceStep};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodeError {
    #[error("input concept is not in negation normal form")]
    NotNnf,
}

/// Encode satisfiability of an NNF concept (empty TBox) as CNF.
///
/// A variable `x(s, D)` states that `D` holds at trace node `s`. Starting
/// from `x(ε, c)`, obligations "premises → D at s" are decomposed:
/// conjunctions split, disjunctions become one clause over their disjuncts,
/// and literals and quantified concepts get variables. Every full
/// existential `∃R.E` at `s` owns the successor `s·o` (o its occurrence)
/// which receives `E` and every `D` of a `∀R.D` at `s`; the limited `∃R.⊤`
/// shares one successor per role that only receives the `∀R.D` fillers.
/// `A` and `¬A` at the same node clash. The disjunctive choices are left to
/// the solver.
///
/// Only conjunctions that occur as disjuncts get a variable of their own;
/// `⊤` never does.
pub fn encode_trace_cnf(c: &Concept) -> Result<CnfFormula, EncodeError> {
    if !c.is_nnf() {
        return Err(EncodeError::NotNnf);
    }
    let mut enc = Encoder::default();
    let root = enc.node(TraceNode::root());
    enc.imply(&[], c, root);
    let mut next = 0;
    while next < enc.nodes.len() {
        enc.expand_successors(next);
        next += 1;
    }
    enc.clash_clauses();
    if enc.clauses.iter().any(Vec::is_empty) {
        return Ok(CnfFormula::unsatisfiable());
    }
    let var_meaning = enc
        .meaning
        .into_iter()
        .enumerate()
        .map(|(i, (node, concept))| (i as u32 + 1, (enc.nodes[node].path.clone(), concept)))
        .collect();
    Ok(CnfFormula {
        num_vars: enc.vars.len(),
        clauses: enc.clauses,
        var_meaning,
    })
}

#[derive(Default)]
struct NodeInfo {
    path: TraceNode,
    exists: Vec<(String, Concept, u32)>,
    forall: Vec<(String, Concept, u32)>,
}

#[derive(Default)]
struct Encoder {
    nodes: Vec<NodeInfo>,
    node_ids: HashMap<TraceNode, usize>,
    /// (depth, ∃R.E) -> occurrence id
    occurrences: BTreeMap<(usize, Concept), usize>,
    vars: HashMap<(usize, Concept), u32>,
    meaning: Vec<(usize, Concept)>,
    clauses: Vec<Vec<i32>>,
}

impl Encoder {
    fn node(&mut self, path: TraceNode) -> usize {
        if let Some(&id) = self.node_ids.get(&path) {
            return id;
        }
        let id = self.nodes.len();
        self.node_ids.insert(path.clone(), id);
        self.nodes.push(NodeInfo {
            path,
            ..NodeInfo::default()
        });
        id
    }

    fn var(&mut self, node: usize, c: &Concept) -> u32 {
        if let Some(&v) = self.vars.get(&(node, c.clone())) {
            return v;
        }
        let v = self.vars.len() as u32 + 1;
        self.vars.insert((node, c.clone()), v);
        self.meaning.push((node, c.clone()));
        match c {
            Concept::Exists(r, e) => self.nodes[node].exists.push((r.clone(), (**e).clone(), v)),
            Concept::Forall(r, d) => self.nodes[node].forall.push((r.clone(), (**d).clone(), v)),
            // conjunction standing for a disjunct
            Concept::And(..) => self.imply(&[v], c, node),
            _ => {}
        }
        v
    }

    fn clause(&mut self, premises: &[u32], conclusion: &[i32]) {
        let mut cl: Vec<i32> = premises.iter().map(|&p| -(p as i32)).collect();
        for &l in conclusion {
            if !cl.contains(&l) {
                cl.push(l);
            }
        }
        cl.dedup();
        self.clauses.push(cl);
    }

    /// Emit clauses for "all premises → c holds at node".
    fn imply(&mut self, premises: &[u32], c: &Concept, node: usize) {
        match c {
            Concept::Top => {}
            Concept::Bot => self.clause(premises, &[]),
            Concept::And(a, b) => {
                self.imply(premises, a, node);
                self.imply(premises, b, node);
            }
            Concept::Or(..) => {
                let mut disjuncts = Vec::new();
                flatten_or(c, &mut disjuncts);
                let mut lits = Vec::new();
                for d in disjuncts {
                    match d {
                        Concept::Top => return,
                        Concept::Bot => {}
                        _ => lits.push(self.var(node, d) as i32),
                    }
                }
                self.clause(premises, &lits);
            }
            _ => {
                let v = self.var(node, c) as i32;
                self.clause(premises, &[v]);
            }
        }
    }

    fn expand_successors(&mut self, node: usize) {
        let path = self.nodes[node].path.clone();
        let depth = path.depth();
        let exists = self.nodes[node].exists.clone();
        let forall = self.nodes[node].forall.clone();
        for (role, filler, ev) in exists {
            let step = if filler == Concept::Top {
                TraceStep::Limited(role.clone())
            } else {
                let key = (depth, Concept::exists(role.clone(), filler.clone()));
                let next_id = self.occurrences.len();
                TraceStep::Full(*self.occurrences.entry(key).or_insert(next_id))
            };
            let relevant: Vec<(Concept, u32)> = forall
                .iter()
                .filter(|(r, _, _)| *r == role)
                .map(|(_, d, fv)| (d.clone(), *fv))
                .collect();
            if filler == Concept::Top && relevant.is_empty() {
                continue;
            }
            let child = self.node(path.child(step));
            self.imply(&[ev], &filler, child);
            for (d, fv) in relevant {
                self.imply(&[ev, fv], &d, child);
            }
        }
    }

    fn clash_clauses(&mut self) {
        let mut pairs = Vec::new();
        for ((node, c), &v) in &self.vars {
            if let Concept::Not(inner) = c {
                if let Some(&pos) = self.vars.get(&(*node, (**inner).clone())) {
                    pairs.push((pos, v));
                }
            }
        }
        pairs.sort_unstable();
        for (pos, neg) in pairs {
            self.clauses.push(vec![-(pos as i32), -(neg as i32)]);
        }
    }
}

fn flatten_or<'a>(c: &'a Concept, out: &mut Vec<&'a Concept>) {
    match c {
        Concept::Or(a, b) => {
            flatten_or(a, out);
            flatten_or(b, out);
        }
        _ => out.push(c),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concept::{nnf, subconcepts};
    use crate::sat::{solve_cnf, SolveResult};
    use crate::syntax::parse_concept;

    fn encode(s: &str) -> CnfFormula {
        encode_trace_cnf(&nnf(&parse_concept(s).unwrap())).unwrap()
    }

    fn sat(f: &CnfFormula) -> bool {
        matches!(solve_cnf(f), SolveResult::Sat(_))
    }

    #[test]
    fn contradiction_is_unsat() {
        let f = encode("A & !A");
        assert!(f.is_well_formed());
        assert!(!sat(&f));
        assert_eq!(f.clauses, vec![vec![1], vec![2], vec![-1, -2]]);
    }

    #[test]
    fn disjunction_has_single_node() {
        let f = encode("A | B");
        assert!(sat(&f));
        assert_eq!(f.trace_nodes(), vec![&TraceNode::root()]);
        assert!(f.num_vars <= subconcepts(&parse_concept("A | B").unwrap()).len());
    }

    #[test]
    fn universal_propagates_into_successor() {
        let f = encode("some R. A & only R. !A");
        assert!(!sat(&f));
        assert!(f.trace_nodes().iter().any(|n| n.depth() == 1));
    }

    #[test]
    fn limited_existential_gets_a_successor_when_constrained() {
        assert!(!sat(&encode("some r. top & only r. bot")));
        assert!(!sat(&encode("some r. top & only r. (A & !A)")));
        assert!(sat(&encode("some r. top & only s. bot")));
        assert_eq!(encode("some r. top").trace_nodes().len(), 1);
    }

    #[test]
    fn bottom_at_root_is_canonical_unsat() {
        let f = encode("bot");
        assert!(f.is_canonical_unsat());
        assert!(!sat(&f));
        assert!(sat(&encode("top")));
    }

    #[test]
    fn conjunction_under_disjunction_gets_a_variable() {
        let f = encode("(A & B) | C");
        assert!(sat(&f));
        assert!(f
            .var_meaning
            .values()
            .any(|(_, c)| matches!(c, Concept::And(..))));
        assert!(!sat(&encode("((A & B) | (A & !A)) & !B")));
    }

    #[test]
    fn non_nnf_rejected() {
        assert_eq!(
            encode_trace_cnf(&parse_concept("!(A | B)").unwrap()),
            Err(EncodeError::NotNnf)
        );
    }
}
