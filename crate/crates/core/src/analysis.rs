//! Parameter measurement, the impacted-concept closure, the reduction of a
//! general TBox to one GCI over a fresh atom, and complexity-regime labels.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::concept::{
    classify_fragment, count_full_existentials, count_unions, nnf, nnf_negated, subconcepts,
    Concept, Fragment, Signature,
};
use crate::kb::{check_acyclic, KbError, KnowledgeBase};

/// The least set of concepts that contains both sides of every GCI, is
/// closed under subconcepts, and contains the body of every definition
/// whose atom it contains.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImpactedSet {
    pub concepts: BTreeSet<Concept>,
    pub size: usize,
}

pub fn impacted_concepts(kb: &KnowledgeBase) -> Result<ImpactedSet, KbError> {
    check_acyclic(&kb.definitions).map_err(KbError::CyclicDefinition)?;
    let mut set = BTreeSet::new();
    let mut queue: Vec<Concept> = Vec::new();
    for (lhs, rhs) in &kb.gcis {
        queue.push(lhs.clone());
        queue.push(rhs.clone());
    }
    while let Some(c) = queue.pop() {
        for sub in subconcepts(&c) {
            if !set.insert(sub.clone()) {
                continue;
            }
            if let Concept::Atom(a) = &sub {
                if let Some(body) = kb.definition(a) {
                    queue.push(body.clone());
                }
            }
        }
    }
    Ok(ImpactedSet {
        size: set.len(),
        concepts: set,
    })
}

/// Smallest of `Fresh`, `Fresh1`, `Fresh2`, … not in `reserved`.
pub fn fresh_atom(reserved: &Signature) -> String {
    let mut n = 0usize;
    loop {
        let name = if n == 0 {
            "Fresh".to_string()
        } else {
            format!("Fresh{n}")
        };
        if !reserved.contains_name(&name) {
            return name;
        }
        n += 1;
    }
}

/// Replace a general TBox `{C_i ⊑ D_i}` by `A ≡ ⨅ nnf(¬C_i ⊔ D_i)` plus the
/// single GCI `⊤ ⊑ A`, for a fresh atom `A`. An empty TBox yields `A ≡ ⊤`.
pub fn reduce_to_nearly_acyclic(gcis: &[(Concept, Concept)]) -> (KnowledgeBase, String) {
    reduce_avoiding(gcis, &Signature::default())
}

/// [`reduce_to_nearly_acyclic`] with the fresh atom also kept out of
/// `reserved` (e.g. the signature of the concepts that will be tested).
pub fn reduce_avoiding(
    gcis: &[(Concept, Concept)],
    reserved: &Signature,
) -> (KnowledgeBase, String) {
    let mut sig = reserved.clone();
    for (lhs, rhs) in gcis {
        sig.add_concept(lhs);
        sig.add_concept(rhs);
    }
    let fresh = fresh_atom(&sig);
    let body = Concept::conjunction(
        gcis.iter()
            .map(|(lhs, rhs)| Concept::or(nnf_negated(lhs), nnf(rhs))),
    );
    let kb = KnowledgeBase::new(
        vec![(fresh.clone(), body)],
        vec![(Concept::Top, Concept::Atom(fresh.clone()))],
    )
    .expect("a single definition over a fresh atom is acyclic");
    (kb, fresh)
}

pub const REGIME_LABELS: [&str; 10] = [
    "EXPTIME-c",
    "para-EXPTIME-c",
    "para-PSPACE-c",
    "PSPACE-c",
    "para-co-NP-c",
    "para-NP-c",
    "FPT",
    "co-NP-c",
    "NP-c",
    "P",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Regime {
    pub parameter: String,
    pub label: String,
}

fn regime(parameter: &str, label: &str) -> Regime {
    debug_assert!(REGIME_LABELS.contains(&label));
    Regime {
        parameter: parameter.to_string(),
        label: label.to_string(),
    }
}

/// Complexity of concept satisfiability without TBoxes, per parameter.
pub fn empty_tbox_regimes() -> Vec<Regime> {
    vec![
        regime("none", "PSPACE-c"),
        regime("unions", "para-co-NP-c"),
        regime("full_existentials", "para-NP-c"),
        regime("unions+full_existentials", "FPT"),
    ]
}

/// Complexity of concept satisfiability w.r.t. an acyclic and a general
/// TBox, per parameter.
pub fn tbox_regimes() -> Vec<Regime> {
    vec![
        regime("none", "EXPTIME-c"),
        regime("gci_count", "para-EXPTIME-c"),
        regime("impacted_concepts", "para-PSPACE-c"),
    ]
}

/// Classical complexity of the fragment itself (empty TBox).
pub fn fragment_regime(f: Fragment) -> &'static str {
    match f {
        Fragment::Al => "P",
        Fragment::Ale => "co-NP-c",
        Fragment::Alu => "NP-c",
        Fragment::Alc => "PSPACE-c",
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub union_count: usize,
    pub full_existential_count: usize,
    pub gci_count: usize,
    /// Total symbol size of the GCIs, reported next to the count.
    pub gci_symbol_size: usize,
    pub impacted_size: usize,
    pub fragment: Fragment,
    pub regimes: Vec<Regime>,
}

/// Measure every parameter of `(c, kb)`. Without any TBox statement the
/// regimes are the empty-TBox rows plus the fragment's classical class;
/// otherwise the rows for the two-TBox problem.
pub fn analyze(c: &Concept, kb: &KnowledgeBase) -> Result<AnalysisReport, KbError> {
    let impacted = impacted_concepts(kb)?;
    let fragment = classify_fragment(c);
    let regimes = if kb.is_empty() {
        let mut r = empty_tbox_regimes();
        r.push(regime("fragment", fragment_regime(fragment)));
        r
    } else {
        tbox_regimes()
    };
    Ok(AnalysisReport {
        union_count: count_unions(c),
        full_existential_count: count_full_existentials(c),
        gci_count: kb.gcis.len(),
        gci_symbol_size: kb.gcis.iter().map(|(l, r)| 1 + l.size() + r.size()).sum(),
        impacted_size: impacted.size,
        fragment,
        regimes,
    })
}

impl AnalysisReport {
    pub fn regime_for(&self, parameter: &str) -> Option<&str> {
        self.regimes
            .iter()
            .find(|r| r.parameter == parameter)
            .map(|r| r.label.as_str())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_concept, parse_knowledge_base};

    fn c(s: &str) -> Concept {
        parse_concept(s).unwrap()
    }

    #[test]
    fn impacted_worked_example() {
        let kb = parse_knowledge_base("def A = some R. B\ngci top <= A").unwrap();
        let i = impacted_concepts(&kb).unwrap();
        assert_eq!(i.size, 4);
        assert_eq!(
            i.concepts,
            BTreeSet::from([Concept::Top, c("A"), c("some R. B"), c("B")])
        );
    }

    #[test]
    fn impacted_without_gcis_is_empty() {
        let kb = parse_knowledge_base("def A = some R. B\ndef B = C & D").unwrap();
        assert_eq!(impacted_concepts(&kb).unwrap().size, 0);
    }

    #[test]
    fn definition_only_fires_for_impacted_atoms() {
        let kb = parse_knowledge_base("def A = B & C\ngci B <= C").unwrap();
        let i = impacted_concepts(&kb).unwrap();
        assert_eq!(i.concepts, BTreeSet::from([c("B"), c("C")]));
    }

    #[test]
    fn reduction_examples() {
        let (kb, a) = reduce_to_nearly_acyclic(&[(c("C1"), c("D1"))]);
        assert_eq!(a, "Fresh");
        assert_eq!(kb.definitions, vec![("Fresh".to_string(), c("!C1 | D1"))]);
        assert_eq!(kb.gcis, vec![(Concept::Top, c("Fresh"))]);

        let (kb, _) = reduce_to_nearly_acyclic(&[]);
        assert_eq!(kb.definitions, vec![("Fresh".to_string(), Concept::Top)]);

        let (kb, _) = reduce_to_nearly_acyclic(&[(c("B"), c("C")), (c("C"), c("B"))]);
        assert_eq!(kb.definitions[0].1, c("(!B | C) & (!C | B)"));
        assert_eq!(kb.gcis.len(), 1);
    }

    #[test]
    fn fresh_name_skips_taken_names() {
        let (_, a) = reduce_to_nearly_acyclic(&[(c("Fresh"), c("Fresh1"))]);
        assert_eq!(a, "Fresh2");
        let (_, a) = reduce_avoiding(&[], &c("Fresh").signature());
        assert_eq!(a, "Fresh1");
    }

    #[test]
    fn analyze_examples() {
        let r = analyze(&c("some R. A & only R. B"), &KnowledgeBase::empty()).unwrap();
        assert_eq!((r.union_count, r.full_existential_count), (0, 1));
        assert_eq!(r.fragment, Fragment::Ale);
        assert_eq!(r.regime_for("unions"), Some("para-co-NP-c"));

        let kb = parse_knowledge_base("def A = some R. B\ngci top <= A").unwrap();
        let r = analyze(&c("A"), &kb).unwrap();
        assert_eq!(r.impacted_size, 4);
        assert_eq!(r.regime_for("impacted_concepts"), Some("para-PSPACE-c"));
        assert_eq!(r.regime_for("gci_count"), Some("para-EXPTIME-c"));

        let r = analyze(&c("A & some R. top"), &KnowledgeBase::empty()).unwrap();
        assert_eq!(r.fragment, Fragment::Al);
        assert_eq!(r.regime_for("unions+full_existentials"), Some("FPT"));
        assert_eq!(r.regime_for("fragment"), Some("P"));

        let r = analyze(&c("A | B"), &KnowledgeBase::empty()).unwrap();
        assert_eq!(r.fragment, Fragment::Alu);
        assert_eq!(r.regime_for("full_existentials"), Some("para-NP-c"));
    }
}
