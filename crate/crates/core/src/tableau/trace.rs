use std::collections::{BTreeMap, BTreeSet};

use crate::concept::{is_full_existential, Concept};

use super::state::{
    Individual, RuleCounts, SatResult, SearchStats, TableauError, Verdict, WitnessNode,
};

/// The ABox the empty-TBox engine transforms. Role assertions always form a
/// single path from `x0` (the trace).
#[derive(Debug, Clone)]
struct Abox {
    concepts: BTreeMap<Individual, BTreeSet<Concept>>,
    roles: BTreeSet<(Individual, Individual, String)>,
    /// Individuals the `∃`-rule has moved past. Their remaining `⊓`/`⊔`
    /// assertions are settled; deleting sibling existentials must not make
    /// those rules fire again.
    left_behind: BTreeSet<Individual>,
    next_fresh: Individual,
    full_exists_on_trace: u64,
}

impl Abox {
    fn new(c: Concept) -> Self {
        Abox {
            concepts: BTreeMap::from([(0, BTreeSet::from([c]))]),
            roles: BTreeSet::new(),
            left_behind: BTreeSet::new(),
            next_fresh: 1,
            full_exists_on_trace: 0,
        }
    }

    fn has(&self, x: Individual, c: &Concept) -> bool {
        self.concepts.get(&x).is_some_and(|l| l.contains(c))
    }

    fn add(&mut self, x: Individual, c: Concept) -> bool {
        self.concepts.entry(x).or_default().insert(c)
    }
}

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

#[derive(Default)]
struct Engine {
    counts: RuleCounts,
    max_depth: u64,
    max_full_exists: u64,
    trace_shape_violations: u64,
}

/// Decide satisfiability of an NNF concept with respect to the empty TBox.
///
/// Phase I applies the `⊓`-, `∀`- and `⊥`-rules greedily and resolves the
/// first applicable `⊔` assertion (individuals in creation order, concepts
/// in structural order) as an OR over both successor ABoxes, left first,
/// stopping at the first success. Phase II applies the `∃`-rule under every
/// applicable instantiation in the same order, each on its own copy of the
/// ABox and with the sibling existentials of that individual deleted; all of
/// them must accept, stopping at the first failure.
pub fn decide_alc(c: &Concept) -> Result<SatResult, TableauError> {
    if !c.is_nnf() {
        return Err(TableauError::NotNnf);
    }
    let mut engine = Engine::default();
    let out = engine.run(Abox::new(c.clone()), 0);
    let stats = SearchStats {
        or_branch_points: out.or_points,
        exists_applications_max_per_trace: engine.max_full_exists,
        rule_counts: engine.counts,
        max_depth: engine.max_depth,
        blocked_nodes: 0,
        trace_shape_violations: engine.trace_shape_violations,
        blocking_violations: 0,
    };
    Ok(SatResult {
        verdict: Verdict::from_bool(out.accepted),
        witness: out.witness.map(|w| w.into_state(Vec::new())),
        stats,
    })
}

impl Engine {
    fn run(&mut self, mut abox: Abox, focus: Individual) -> Outcome {
        // phase I
        if !self.saturate(&mut abox) {
            return Outcome::reject(0);
        }
        if let Some((x, left, right)) = first_union(&abox) {
            self.counts.or += 1;
            let mut first = abox.clone();
            first.add(x, left);
            let l = self.run(first, focus);
            if l.accepted {
                return l;
            }
            abox.add(x, right);
            let r = self.run(abox, focus);
            return Outcome {
                accepted: r.accepted,
                or_points: 1 + l.or_points + r.or_points,
                witness: r.witness,
            };
        }

        // phase II
        let instantiations = applicable_existentials(&abox);
        let mut children = Vec::with_capacity(instantiations.len());
        let mut or_points = 0;
        for (x, exists) in instantiations {
            debug_assert_eq!(x, focus, "existentials only remain at the end of the trace");
            let Concept::Exists(role, filler) = &exists else {
                unreachable!("instantiations are existentials")
            };
            let mut next = abox.clone();
            let y = next.next_fresh;
            next.next_fresh += 1;
            next.add(y, (**filler).clone());
            next.roles.insert((x, y, role.clone()));
            if let Some(label) = next.concepts.get_mut(&x) {
                label.retain(|c| !matches!(c, Concept::Exists(..)) || *c == exists);
            }
            next.left_behind.insert(x);
            self.counts.exists += 1;
            if is_full_existential(&exists) {
                next.full_exists_on_trace += 1;
            }
            let siblings_left = next.concepts[&x]
                .iter()
                .filter(|c| matches!(c, Concept::Exists(..)) && **c != exists)
                .count();
            if siblings_left > 0 {
                self.trace_shape_violations += 1;
            }
            self.max_depth = self.max_depth.max(next.roles.len() as u64);
            self.max_full_exists = self.max_full_exists.max(next.full_exists_on_trace);

            let out = self.run(next, y);
            or_points = or_points.max(out.or_points);
            if !out.accepted {
                return Outcome::reject(or_points);
            }
            children.push((
                role.clone(),
                out.witness.expect("accepted runs carry a witness"),
            ));
        }
        Outcome {
            accepted: true,
            or_points,
            witness: Some(WitnessNode {
                label: abox.concepts.get(&focus).cloned().unwrap_or_default(),
                blocked_by_depth: None,
                children,
            }),
        }
    }

    /// Greedy `⊓`, `∀` and `⊥` rules. Returns false on a clash.
    fn saturate(&mut self, abox: &mut Abox) -> bool {
        loop {
            if has_clash(abox) {
                self.counts.bot += 1;
                return false;
            }
            let mut additions: Vec<(Individual, Concept)> = Vec::new();
            for (&x, label) in &abox.concepts {
                if abox.left_behind.contains(&x) {
                    continue;
                }
                for c in label {
                    if let Concept::And(a, b) = c {
                        if !(label.contains(a) && label.contains(b)) {
                            self.counts.and += 1;
                            additions.push((x, (**a).clone()));
                            additions.push((x, (**b).clone()));
                        }
                    }
                }
            }
            for (x, y, role) in &abox.roles {
                for c in abox.concepts.get(x).into_iter().flatten() {
                    if let Concept::Forall(r, d) = c {
                        if r == role && !abox.has(*y, d) {
                            self.counts.forall += 1;
                            additions.push((*y, (**d).clone()));
                        }
                    }
                }
            }
            let mut changed = false;
            for (x, c) in additions {
                changed |= abox.add(x, c);
            }
            if !changed {
                return true;
            }
        }
    }
}

fn has_clash(abox: &Abox) -> bool {
    abox.concepts.values().any(super::state::label_has_clash)
}

fn first_union(abox: &Abox) -> Option<(Individual, Concept, Concept)> {
    for (&x, label) in &abox.concepts {
        if abox.left_behind.contains(&x) {
            continue;
        }
        for c in label {
            if let Concept::Or(a, b) = c {
                if !label.contains(a) && !label.contains(b) {
                    return Some((x, (**a).clone(), (**b).clone()));
                }
            }
        }
    }
    None
}

/// Existentials still to instantiate. Individuals the trace has moved past
/// are settled: deleting siblings further down may remove what witnessed
/// their existentials, and that must not make them fire again.
fn applicable_existentials(abox: &Abox) -> Vec<(Individual, Concept)> {
    let mut out = Vec::new();
    for (&x, label) in &abox.concepts {
        if abox.left_behind.contains(&x) {
            continue;
        }
        for c in label {
            if let Concept::Exists(role, filler) = c {
                let witnessed = abox
                    .roles
                    .iter()
                    .any(|(from, to, r)| *from == x && r == role && abox.has(*to, filler));
                if !witnessed {
                    out.push((x, c.clone()));
                }
            }
        }
    }
    out
}
