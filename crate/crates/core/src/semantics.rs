//! Model theory: finite interpretations, concept evaluation, knowledge-base
//! checking and a bounded exhaustive model search used as ground truth.

use std::collections::{BTreeMap, BTreeSet};

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::concept::{Concept, Signature};
use crate::kb::KnowledgeBase;

pub type Element = usize;

/// A finite interpretation over the domain `0..domain_size`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interpretation {
    pub domain_size: usize,
    pub atom_ext: BTreeMap<String, BTreeSet<Element>>,
    pub role_ext: BTreeMap<String, BTreeSet<(Element, Element)>>,
    #[serde(default)]
    pub individual_map: BTreeMap<String, Element>,
}

impl Interpretation {
    pub fn new(domain_size: usize) -> Self {
        assert!(
            domain_size > 0,
            "an interpretation needs a non-empty domain"
        );
        Interpretation {
            domain_size,
            atom_ext: BTreeMap::new(),
            role_ext: BTreeMap::new(),
            individual_map: BTreeMap::new(),
        }
    }

    pub fn domain(&self) -> std::ops::Range<Element> {
        0..self.domain_size
    }

    pub fn add_atom(&mut self, atom: &str, e: Element) {
        debug_assert!(e < self.domain_size);
        self.atom_ext.entry(atom.to_string()).or_default().insert(e);
    }

    pub fn add_edge(&mut self, role: &str, from: Element, to: Element) {
        debug_assert!(from < self.domain_size && to < self.domain_size);
        self.role_ext
            .entry(role.to_string())
            .or_default()
            .insert((from, to));
    }
}

/// Per-role successor sets, built once per evaluation.
struct Evaluator<'a> {
    interp: &'a Interpretation,
    successors: BTreeMap<&'a str, Vec<FixedBitSet>>,
    empty: Vec<FixedBitSet>,
}

impl<'a> Evaluator<'a> {
    fn new(interp: &'a Interpretation) -> Self {
        let n = interp.domain_size;
        let successors = interp
            .role_ext
            .iter()
            .map(|(role, pairs)| {
                let mut succ = vec![FixedBitSet::with_capacity(n); n];
                for &(a, b) in pairs {
                    succ[a].insert(b);
                }
                (role.as_str(), succ)
            })
            .collect();
        Evaluator {
            interp,
            successors,
            empty: vec![FixedBitSet::with_capacity(n); n],
        }
    }

    fn full(&self) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(self.interp.domain_size);
        s.insert_range(..);
        s
    }

    fn eval(&self, c: &Concept) -> FixedBitSet {
        let n = self.interp.domain_size;
        match c {
            Concept::Atom(a) => {
                let mut s = FixedBitSet::with_capacity(n);
                if let Some(ext) = self.interp.atom_ext.get(a) {
                    s.extend(ext.iter().copied());
                }
                s
            }
            Concept::Top => self.full(),
            Concept::Bot => FixedBitSet::with_capacity(n),
            Concept::Not(d) => {
                let mut s = self.eval(d);
                s.toggle_range(..);
                s
            }
            Concept::And(a, b) => {
                let mut s = self.eval(a);
                s.intersect_with(&self.eval(b));
                s
            }
            Concept::Or(a, b) => {
                let mut s = self.eval(a);
                s.union_with(&self.eval(b));
                s
            }
            Concept::Exists(r, d) => {
                let inner = self.eval(d);
                let succ = self.successors.get(r.as_str()).unwrap_or(&self.empty);
                let mut s = FixedBitSet::with_capacity(n);
                s.extend((0..n).filter(|&x| !succ[x].is_disjoint(&inner)));
                s
            }
            Concept::Forall(r, d) => {
                let inner = self.eval(d);
                let succ = self.successors.get(r.as_str()).unwrap_or(&self.empty);
                let mut s = FixedBitSet::with_capacity(n);
                s.extend((0..n).filter(|&x| succ[x].is_subset(&inner)));
                s
            }
        }
    }

    fn check_kb(&self, kb: &KnowledgeBase) -> bool {
        kb.definitions
            .iter()
            .all(|(a, body)| self.eval(&Concept::Atom(a.clone())) == self.eval(body))
            && kb
                .gcis
                .iter()
                .all(|(lhs, rhs)| self.eval(lhs).is_subset(&self.eval(rhs)))
    }
}

/// The extension `C^I`. Names missing from `i` have empty extensions.
pub fn eval_concept(i: &Interpretation, c: &Concept) -> BTreeSet<Element> {
    Evaluator::new(i).eval(c).ones().collect()
}

/// Every definition holds with equality and every GCI with inclusion.
pub fn check_kb(i: &Interpretation, kb: &KnowledgeBase) -> bool {
    Evaluator::new(i).check_kb(kb)
}

/// `i` is a model of `kb` in which `c` is non-empty.
pub fn verify_model(i: &Interpretation, c: &Concept, kb: &KnowledgeBase) -> bool {
    let ev = Evaluator::new(i);
    ev.check_kb(kb) && !ev.eval(c).is_clear()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleOutcome {
    /// A model; `c` is satisfiable.
    Found(Interpretation),
    /// Every interpretation with at most this many elements was refuted.
    NoModelUpTo(usize),
    /// The search budget ran out; sizes up to `complete_up_to` (0 = none)
    /// were refuted exhaustively before that.
    BudgetExhausted { complete_up_to: usize },
}

impl OracleOutcome {
    pub fn model(&self) -> Option<&Interpretation> {
        match self {
            OracleOutcome::Found(i) => Some(i),
            _ => None,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, OracleOutcome::Found(_))
    }
}

/// Largest domain the exhaustive search accepts.
pub const MAX_ORACLE_DOMAIN: usize = 32;

/// Exhaustive search for a model of `kb` with `c^I ≠ ∅`, domain sizes
/// `1..=max_domain` ascending.
///
/// Within one size the interpretations are ordered as a binary counter over
/// the bit string `atom_1(0..d) … atom_p(0..d) role_1(0,0) (0,1) … role_q(…)`
/// (atoms and roles in signature order, earlier bits more significant); the
/// first model in that order is returned. The search is a depth-first walk
/// over that bit string that abandons a prefix as soon as three-valued
/// evaluation shows no completion can be a model, so it visits exactly the
/// counter order minus refuted blocks.
pub fn brute_force_sat(c: &Concept, kb: &KnowledgeBase, max_domain: usize) -> OracleOutcome {
    brute_force_sat_bounded(c, kb, max_domain, u64::MAX)
}

/// [`brute_force_sat`] with a cap on the number of search nodes visited.
pub fn brute_force_sat_bounded(
    c: &Concept,
    kb: &KnowledgeBase,
    max_domain: usize,
    budget: u64,
) -> OracleOutcome {
    assert!(max_domain >= 1, "max_domain must be at least 1");
    assert!(
        max_domain <= MAX_ORACLE_DOMAIN,
        "max_domain above {MAX_ORACLE_DOMAIN}"
    );
    let mut sig = kb.signature.clone();
    sig.add_concept(c);
    let mut remaining = budget;
    for d in 1..=max_domain {
        let mut search = PartialSearch::new(&sig, c, kb, d);
        match search.run(&mut remaining) {
            Search::Model => {
                let model = search.to_interpretation();
                debug_assert!(verify_model(&model, c, kb));
                return OracleOutcome::Found(model);
            }
            Search::Refuted => {}
            Search::OutOfBudget => {
                return OracleOutcome::BudgetExhausted {
                    complete_up_to: d - 1,
                }
            }
        }
    }
    OracleOutcome::NoModelUpTo(max_domain)
}

enum Search {
    Model,
    Refuted,
    OutOfBudget,
}

/// Three-valued extension: `sure` ⊆ `maybe`, both bit masks over the domain.
#[derive(Clone, Copy)]
struct Tri {
    sure: u32,
    maybe: u32,
}

/// A partial interpretation over bit masks: a bit is either fixed
/// (`known`) with a value, or open.
struct PartialSearch<'a> {
    d: usize,
    all: u32,
    concept: &'a Concept,
    kb: &'a KnowledgeBase,
    atoms: Vec<&'a str>,
    roles: Vec<&'a str>,
    atom_known: Vec<u32>,
    atom_val: Vec<u32>,
    // [role][source] -> target mask
    role_known: Vec<Vec<u32>>,
    role_val: Vec<Vec<u32>>,
}

impl<'a> PartialSearch<'a> {
    fn new(sig: &'a Signature, concept: &'a Concept, kb: &'a KnowledgeBase, d: usize) -> Self {
        let atoms: Vec<&str> = sig.atomic_concepts.iter().map(String::as_str).collect();
        let roles: Vec<&str> = sig.roles.iter().map(String::as_str).collect();
        PartialSearch {
            d,
            all: if d == 32 { u32::MAX } else { (1u32 << d) - 1 },
            concept,
            kb,
            atom_known: vec![0; atoms.len()],
            atom_val: vec![0; atoms.len()],
            role_known: vec![vec![0; d]; roles.len()],
            role_val: vec![vec![0; d]; roles.len()],
            atoms,
            roles,
        }
    }

    fn num_bits(&self) -> usize {
        self.atoms.len() * self.d + self.roles.len() * self.d * self.d
    }

    fn set_bit(&mut self, idx: usize, value: Option<bool>) {
        let atom_bits = self.atoms.len() * self.d;
        let (known, val, bit) = if idx < atom_bits {
            let (a, e) = (idx / self.d, idx % self.d);
            (&mut self.atom_known[a], &mut self.atom_val[a], e)
        } else {
            let rest = idx - atom_bits;
            let per_role = self.d * self.d;
            let (r, pair) = (rest / per_role, rest % per_role);
            let (from, to) = (pair / self.d, pair % self.d);
            (
                &mut self.role_known[r][from],
                &mut self.role_val[r][from],
                to,
            )
        };
        let m = 1u32 << bit;
        match value {
            None => {
                *known &= !m;
                *val &= !m;
            }
            Some(v) => {
                *known |= m;
                if v {
                    *val |= m;
                } else {
                    *val &= !m;
                }
            }
        }
    }

    fn run(&mut self, budget: &mut u64) -> Search {
        self.descend(0, budget)
    }

    fn descend(&mut self, idx: usize, budget: &mut u64) -> Search {
        if *budget == 0 {
            return Search::OutOfBudget;
        }
        *budget -= 1;
        if !self.viable() {
            return Search::Refuted;
        }
        if idx == self.num_bits() {
            return Search::Model;
        }
        for v in [false, true] {
            self.set_bit(idx, Some(v));
            match self.descend(idx + 1, budget) {
                Search::Refuted => {}
                other => return other,
            }
        }
        self.set_bit(idx, None);
        Search::Refuted
    }

    /// False when no completion of the current partial interpretation can
    /// satisfy the knowledge base with a non-empty extension of the concept.
    fn viable(&self) -> bool {
        if self.eval(self.concept).maybe == 0 {
            return false;
        }
        for (a, body) in &self.kb.definitions {
            let lhs = self.eval_atom(a);
            let rhs = self.eval(body);
            if (lhs.sure & !rhs.maybe) | (rhs.sure & !lhs.maybe) != 0 {
                return false;
            }
        }
        for (lhs, rhs) in &self.kb.gcis {
            if self.eval(lhs).sure & !self.eval(rhs).maybe != 0 {
                return false;
            }
        }
        true
    }

    fn eval_atom(&self, a: &str) -> Tri {
        let i = self
            .atoms
            .binary_search(&a)
            .expect("atom is in the signature");
        let (k, v) = (self.atom_known[i], self.atom_val[i]);
        Tri {
            sure: k & v,
            maybe: (v | !k) & self.all,
        }
    }

    fn eval(&self, c: &Concept) -> Tri {
        match c {
            Concept::Atom(a) => self.eval_atom(a),
            Concept::Top => Tri {
                sure: self.all,
                maybe: self.all,
            },
            Concept::Bot => Tri { sure: 0, maybe: 0 },
            Concept::Not(d) => {
                let t = self.eval(d);
                Tri {
                    sure: self.all & !t.maybe,
                    maybe: self.all & !t.sure,
                }
            }
            Concept::And(a, b) => {
                let (x, y) = (self.eval(a), self.eval(b));
                Tri {
                    sure: x.sure & y.sure,
                    maybe: x.maybe & y.maybe,
                }
            }
            Concept::Or(a, b) => {
                let (x, y) = (self.eval(a), self.eval(b));
                Tri {
                    sure: x.sure | y.sure,
                    maybe: x.maybe | y.maybe,
                }
            }
            Concept::Exists(r, d) | Concept::Forall(r, d) => {
                let inner = self.eval(d);
                let ri = self
                    .roles
                    .binary_search(&r.as_str())
                    .expect("role is in the signature");
                let mut t = Tri { sure: 0, maybe: 0 };
                for x in 0..self.d {
                    let (k, v) = (self.role_known[ri][x], self.role_val[ri][x]);
                    let edge_sure = k & v;
                    let edge_maybe = (v | !k) & self.all;
                    let (sure, maybe) = if matches!(c, Concept::Exists(..)) {
                        (edge_sure & inner.sure != 0, edge_maybe & inner.maybe != 0)
                    } else {
                        (edge_maybe & !inner.sure == 0, edge_sure & !inner.maybe == 0)
                    };
                    if sure {
                        t.sure |= 1 << x;
                    }
                    if maybe {
                        t.maybe |= 1 << x;
                    }
                }
                t
            }
        }
    }

    fn to_interpretation(&self) -> Interpretation {
        let mut i = Interpretation::new(self.d);
        for (ai, a) in self.atoms.iter().enumerate() {
            for e in 0..self.d {
                if self.atom_val[ai] >> e & 1 == 1 {
                    i.add_atom(a, e);
                }
            }
        }
        for (ri, r) in self.roles.iter().enumerate() {
            for from in 0..self.d {
                for to in 0..self.d {
                    if self.role_val[ri][from] >> to & 1 == 1 {
                        i.add_edge(r, from, to);
                    }
                }
            }
        }
        i
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_concept, parse_knowledge_base};

    fn c(s: &str) -> Concept {
        parse_concept(s).unwrap()
    }

    fn two_element() -> Interpretation {
        let mut i = Interpretation::new(2);
        i.add_atom("A", 0);
        i.add_edge("r", 0, 1);
        i
    }

    #[test]
    fn eval_examples() {
        let i = two_element();
        assert_eq!(eval_concept(&i, &c("some r. top")), BTreeSet::from([0]));
        assert_eq!(eval_concept(&i, &c("only r. A")), BTreeSet::from([1]));
        assert_eq!(eval_concept(&i, &c("A | !A")), BTreeSet::from([0, 1]));
        assert_eq!(eval_concept(&i, &c("bot")), BTreeSet::new());
        assert_eq!(
            eval_concept(&i, &c("Unknown | some s. top")),
            BTreeSet::new()
        );
    }

    #[test]
    fn check_kb_examples() {
        let mut loop1 = Interpretation::new(1);
        loop1.add_atom("A", 0);
        loop1.add_edge("r", 0, 0);
        assert!(check_kb(
            &loop1,
            &parse_knowledge_base("gci A <= some r. A").unwrap()
        ));

        let mut i = Interpretation::new(1);
        i.add_atom("A", 0);
        assert!(!check_kb(&i, &parse_knowledge_base("def A = B").unwrap()));
        assert!(check_kb(&i, &KnowledgeBase::empty()));
    }

    #[test]
    fn brute_force_examples() {
        let empty = KnowledgeBase::empty();
        assert_eq!(
            brute_force_sat(&c("A & !A"), &empty, 3),
            OracleOutcome::NoModelUpTo(3)
        );

        let kb = parse_knowledge_base("gci top <= !A | some r. A").unwrap();
        let found = brute_force_sat(&c("A"), &kb, 2);
        let model = found.model().expect("a model exists");
        assert!(model.domain_size <= 2);
        assert!(verify_model(model, &c("A"), &kb));

        let top = brute_force_sat(&Concept::Top, &empty, 1);
        assert_eq!(top.model().unwrap().domain_size, 1);
    }

    #[test]
    fn first_model_follows_counter_order() {
        // At size 1 the only atom bit is 0 first: `!A` is satisfied by the
        // all-empty interpretation.
        let m = brute_force_sat(&c("!A"), &KnowledgeBase::empty(), 2);
        assert_eq!(m, OracleOutcome::Found(Interpretation::new(1)));
        // `some r. A & some r. !A` needs two elements.
        let m = brute_force_sat(&c("some r. A & some r. !A"), &KnowledgeBase::empty(), 3);
        assert_eq!(m.model().unwrap().domain_size, 2);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let hard = c("some r. (A & some r. (B & some r. !A)) & only r. only r. only r. bot");
        let out = brute_force_sat_bounded(&hard, &KnowledgeBase::empty(), 4, 5);
        assert!(matches!(out, OracleOutcome::BudgetExhausted { .. }));
    }

    #[test]
    fn verify_model_examples() {
        let mut i = Interpretation::new(1);
        i.add_atom("A", 0);
        i.add_atom("B", 0);
        assert!(verify_model(&i, &c("A & B"), &KnowledgeBase::empty()));
        assert!(!verify_model(
            &Interpretation::new(1),
            &c("A"),
            &KnowledgeBase::empty()
        ));
    }
}
