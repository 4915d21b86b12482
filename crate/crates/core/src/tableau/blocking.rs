use std::collections::{BTreeMap, BTreeSet};

use crate::concept::{is_full_existential, nnf, nnf_negated, Concept};
use crate::kb::{check_acyclic, KnowledgeBase};

use super::state::{
    label_has_clash, RuleCounts, SatResult, SearchStats, TableauError, Verdict, WitnessNode,
};

type Label = BTreeSet<Concept>;

struct Outcome {
    accepted: bool,
    or_points: u64,
    witness: Option<WitnessNode>,
}

impl Outcome {
    fn reject(or_points: u64) -> Self {
        Outcome {
            accepted: false,
            or_points,
            witness: None,
        }
    }
}

struct Engine {
    /// atom -> (nnf(body), nnf(¬body))
    unfold: BTreeMap<String, (Concept, Concept)>,
    /// nnf(¬C) ⊔ nnf(D) for every GCI C ⊑ D
    gci_concepts: Vec<Concept>,
    counts: RuleCounts,
    max_depth: u64,
    max_full_exists: u64,
    blocked_nodes: u64,
    blocking_violations: u64,
}

/// Decide satisfiability of an NNF concept with respect to a knowledge base
/// with acyclic definitions and GCIs.
///
/// Each node is completed before any of its successors is created: `⊓`,
/// lazy unfolding (`A` adds the body, `¬A` adds the negated body) and the
/// GCI concepts first, `⊔` as an OR over both disjuncts, then the `∃`-rule
/// with `∀`-propagation into the new successors. The `∃`-rule is not applied
/// at a node whose label is a subset of an ancestor's label; such a node is
/// blocked by its nearest qualifying ancestor. Successor subtrees are
/// explored depth first as an AND.
pub fn decide_with_tboxes(c: &Concept, kb: &KnowledgeBase) -> Result<SatResult, TableauError> {
    if !c.is_nnf() {
        return Err(TableauError::NotNnf);
    }
    check_acyclic(&kb.definitions).map_err(TableauError::CyclicDefinitions)?;
    let mut engine = Engine {
        unfold: kb
            .definitions
            .iter()
            .map(|(a, body)| (a.clone(), (nnf(body), nnf_negated(body))))
            .collect(),
        gci_concepts: kb
            .gcis
            .iter()
            .map(|(lhs, rhs)| Concept::or(nnf_negated(lhs), nnf(rhs)))
            .collect(),
        counts: RuleCounts::default(),
        max_depth: 0,
        max_full_exists: 0,
        blocked_nodes: 0,
        blocking_violations: 0,
    };
    let mut root = Label::from([c.clone()]);
    engine.add_gci_concepts(&mut root);
    let out = engine.expand(root, &mut Vec::new(), 0);
    let stats = SearchStats {
        or_branch_points: out.or_points,
        exists_applications_max_per_trace: engine.max_full_exists,
        rule_counts: engine.counts,
        max_depth: engine.max_depth,
        blocked_nodes: engine.blocked_nodes,
        trace_shape_violations: 0,
        blocking_violations: engine.blocking_violations,
    };
    Ok(SatResult {
        verdict: Verdict::from_bool(out.accepted),
        witness: out.witness.map(|w| w.into_state(kb.definitions.clone())),
        stats,
    })
}

impl Engine {
    fn add_gci_concepts(&mut self, label: &mut Label) {
        for g in &self.gci_concepts {
            if label.insert(g.clone()) {
                self.counts.gci += 1;
            }
        }
    }

    fn expand(
        &mut self,
        mut label: Label,
        ancestors: &mut Vec<Label>,
        full_exists: u64,
    ) -> Outcome {
        if !self.saturate(&mut label) {
            return Outcome::reject(0);
        }
        if let Some((left, right)) = first_union(&label) {
            self.counts.or += 1;
            let mut first = label.clone();
            first.insert(left);
            let l = self.expand(first, ancestors, full_exists);
            if l.accepted {
                return l;
            }
            label.insert(right);
            let r = self.expand(label, ancestors, full_exists);
            return Outcome {
                accepted: r.accepted,
                or_points: 1 + l.or_points + r.or_points,
                witness: r.witness,
            };
        }

        if let Some(blocker) = (0..ancestors.len())
            .rev()
            .find(|&i| label.is_subset(&ancestors[i]))
        {
            self.blocked_nodes += 1;
            return Outcome {
                accepted: true,
                or_points: 0,
                witness: Some(WitnessNode {
                    label,
                    blocked_by_depth: Some(blocker),
                    children: Vec::new(),
                }),
            };
        }

        // ∃-rule, with ∀-propagation into each new successor
        let mut successors: Vec<(String, Label, bool)> = Vec::new();
        for c in &label {
            let Concept::Exists(role, filler) = c else {
                continue;
            };
            let witnessed = successors
                .iter()
                .any(|(r, l, _)| r == role && l.contains(&**filler));
            if witnessed {
                continue;
            }
            if ancestors.iter().any(|a| label.is_subset(a)) {
                self.blocking_violations += 1;
            }
            self.counts.exists += 1;
            let mut child = Label::from([(**filler).clone()]);
            for d in &label {
                if let Concept::Forall(r, inner) = d {
                    if r == role && child.insert((**inner).clone()) {
                        self.counts.forall += 1;
                    }
                }
            }
            successors.push((role.clone(), child, is_full_existential(c)));
        }

        let depth = ancestors.len() as u64 + 1;
        if !successors.is_empty() {
            self.max_depth = self.max_depth.max(depth);
        }
        ancestors.push(label);
        let mut children = Vec::with_capacity(successors.len());
        let mut or_points = 0;
        for (role, mut child, full) in successors {
            self.add_gci_concepts(&mut child);
            let on_path = full_exists + u64::from(full);
            self.max_full_exists = self.max_full_exists.max(on_path);
            let out = self.expand(child, ancestors, on_path);
            or_points = or_points.max(out.or_points);
            if !out.accepted {
                ancestors.pop();
                return Outcome::reject(or_points);
            }
            children.push((role, out.witness.expect("accepted runs carry a witness")));
        }
        let label = ancestors.pop().expect("pushed above");
        Outcome {
            accepted: true,
            or_points,
            witness: Some(WitnessNode {
                label,
                blocked_by_depth: None,
                children,
            }),
        }
    }

    /// `⊓`, lazy unfolding and clash detection to a fixpoint.
    fn saturate(&mut self, label: &mut Label) -> bool {
        loop {
            if label_has_clash(label) {
                self.counts.bot += 1;
                return false;
            }
            let mut additions = Vec::new();
            for c in label.iter() {
                match c {
                    Concept::And(a, b) => {
                        if !(label.contains(&**a) && label.contains(&**b)) {
                            self.counts.and += 1;
                            additions.push((**a).clone());
                            additions.push((**b).clone());
                        }
                    }
                    Concept::Atom(a) => {
                        if let Some((body, _)) = self.unfold.get(a) {
                            if !label.contains(body) {
                                self.counts.unfold += 1;
                                additions.push(body.clone());
                            }
                        }
                    }
                    Concept::Not(inner) => {
                        if let Concept::Atom(a) = &**inner {
                            if let Some((_, negated)) = self.unfold.get(a) {
                                if !label.contains(negated) {
                                    self.counts.unfold += 1;
                                    additions.push(negated.clone());
                                }
                            }
                        }
                    }
                    _ => {}
                }
            }
            let mut changed = false;
            for c in additions {
                changed |= label.insert(c);
            }
            if !changed {
                return true;
            }
        }
    }
}

fn first_union(label: &Label) -> Option<(Concept, Concept)> {
    label.iter().find_map(|c| match c {
        Concept::Or(a, b) if !label.contains(&**a) && !label.contains(&**b) => {
            Some(((**a).clone(), (**b).clone()))
        }
        _ => None,
    })
}
