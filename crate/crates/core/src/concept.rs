//! ALC concept syntax: the AST, signatures, negation normal form and the
//! syntactic measures (union / full-existential occurrence counts) that the
//! parameterized engines key on.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

/// An ALC concept.
///
/// Only binary `And`/`Or` exist; n-ary surface syntax is right-associated by
/// the parser. The derived `Ord` is the structural order used everywhere a
/// deterministic iteration order over concepts is needed.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Concept {
    Atom(String),
    Top,
    Bot,
    Not(Box<Concept>),
    And(Box<Concept>, Box<Concept>),
    Or(Box<Concept>, Box<Concept>),
    Exists(String, Box<Concept>),
    Forall(String, Box<Concept>),
}

impl Concept {
    pub fn atom(name: impl Into<String>) -> Self {
        Concept::Atom(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(c: Concept) -> Self {
        Concept::Not(Box::new(c))
    }

    pub fn and(a: Concept, b: Concept) -> Self {
        Concept::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Concept, b: Concept) -> Self {
        Concept::Or(Box::new(a), Box::new(b))
    }

    pub fn exists(role: impl Into<String>, c: Concept) -> Self {
        Concept::Exists(role.into(), Box::new(c))
    }

    pub fn forall(role: impl Into<String>, c: Concept) -> Self {
        Concept::Forall(role.into(), Box::new(c))
    }

    /// Right-associated conjunction; the empty conjunction is `Top`.
    pub fn conjunction(parts: impl IntoIterator<Item = Concept>) -> Self {
        let mut parts: Vec<Concept> = parts.into_iter().collect();
        let Some(mut acc) = parts.pop() else {
            return Concept::Top;
        };
        while let Some(next) = parts.pop() {
            acc = Concept::and(next, acc);
        }
        acc
    }

    /// Right-associated disjunction; the empty disjunction is `Bot`.
    pub fn disjunction(parts: impl IntoIterator<Item = Concept>) -> Self {
        let mut parts: Vec<Concept> = parts.into_iter().collect();
        let Some(mut acc) = parts.pop() else {
            return Concept::Bot;
        };
        while let Some(next) = parts.pop() {
            acc = Concept::or(next, acc);
        }
        acc
    }

    /// Immediate sub-terms, left to right.
    pub fn children(&self) -> Vec<&Concept> {
        match self {
            Concept::Atom(_) | Concept::Top | Concept::Bot => Vec::new(),
            Concept::Not(c) | Concept::Exists(_, c) | Concept::Forall(_, c) => vec![c],
            Concept::And(a, b) | Concept::Or(a, b) => vec![a, b],
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        1 + self
            .children()
            .into_iter()
            .map(Concept::size)
            .sum::<usize>()
    }

    /// Nesting depth of `∃`/`∀`.
    pub fn modal_depth(&self) -> usize {
        match self {
            Concept::Atom(_) | Concept::Top | Concept::Bot => 0,
            Concept::Not(c) => c.modal_depth(),
            Concept::And(a, b) | Concept::Or(a, b) => a.modal_depth().max(b.modal_depth()),
            Concept::Exists(_, c) | Concept::Forall(_, c) => 1 + c.modal_depth(),
        }
    }

    /// True when negation only occurs directly in front of atoms.
    pub fn is_nnf(&self) -> bool {
        match self {
            Concept::Atom(_) | Concept::Top | Concept::Bot => true,
            Concept::Not(c) => matches!(**c, Concept::Atom(_)),
            Concept::And(a, b) | Concept::Or(a, b) => a.is_nnf() && b.is_nnf(),
            Concept::Exists(_, c) | Concept::Forall(_, c) => c.is_nnf(),
        }
    }

    /// `A` or `¬A`.
    pub fn is_literal(&self) -> bool {
        match self {
            Concept::Atom(_) => true,
            Concept::Not(c) => matches!(**c, Concept::Atom(_)),
            _ => false,
        }
    }

    pub fn signature(&self) -> Signature {
        let mut sig = Signature::default();
        sig.add_concept(self);
        sig
    }

    /// Visit every node in pre-order.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Concept)) {
        f(self);
        for child in self.children() {
            child.walk(f);
        }
    }
}

/// Negation normal form.
///
/// Pushes negation inward with De Morgan and quantifier duality, rewrites
/// `¬⊤`/`¬⊥` and drops double negation. No other simplification is done, so
/// the occurrence counts of the result are predictable. Linear in `|c|`.
pub fn nnf(c: &Concept) -> Concept {
    to_nnf(c, false)
}

/// `nnf(¬c)` without building the intermediate negation.
pub fn nnf_negated(c: &Concept) -> Concept {
    to_nnf(c, true)
}

fn to_nnf(c: &Concept, negated: bool) -> Concept {
    match (c, negated) {
        (Concept::Atom(_), false) => c.clone(),
        (Concept::Atom(_), true) => Concept::not(c.clone()),
        (Concept::Top, false) | (Concept::Bot, true) => Concept::Top,
        (Concept::Top, true) | (Concept::Bot, false) => Concept::Bot,
        (Concept::Not(inner), _) => to_nnf(inner, !negated),
        (Concept::And(a, b), false) => Concept::and(to_nnf(a, false), to_nnf(b, false)),
        (Concept::And(a, b), true) => Concept::or(to_nnf(a, true), to_nnf(b, true)),
        (Concept::Or(a, b), false) => Concept::or(to_nnf(a, false), to_nnf(b, false)),
        (Concept::Or(a, b), true) => Concept::and(to_nnf(a, true), to_nnf(b, true)),
        (Concept::Exists(r, d), false) => Concept::exists(r.clone(), to_nnf(d, false)),
        (Concept::Exists(r, d), true) => Concept::forall(r.clone(), to_nnf(d, true)),
        (Concept::Forall(r, d), false) => Concept::forall(r.clone(), to_nnf(d, false)),
        (Concept::Forall(r, d), true) => Concept::exists(r.clone(), to_nnf(d, true)),
    }
}

/// All syntactic subconcepts of `c` (including `c`), deduplicated by
/// structural equality, in pre-order of first occurrence.
pub fn subconcepts(c: &Concept) -> Vec<Concept> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    c.walk(&mut |node| {
        if seen.insert(node) {
            out.push(node.clone());
        }
    });
    out
}

/// Occurrences of `⊔`. Defined on NNF input.
pub fn count_unions(c: &Concept) -> usize {
    let mut n = 0;
    c.walk(&mut |node| {
        if matches!(node, Concept::Or(..)) {
            n += 1;
        }
    });
    n
}

/// Occurrences of `∃R.D` with `D` not structurally `⊤`. Defined on NNF input.
pub fn count_full_existentials(c: &Concept) -> usize {
    let mut n = 0;
    c.walk(&mut |node| {
        if is_full_existential(node) {
            n += 1;
        }
    });
    n
}

pub fn is_full_existential(c: &Concept) -> bool {
    matches!(c, Concept::Exists(_, d) if **d != Concept::Top)
}

/// The ALC fragments obtained by dropping `⊔` (ALE), full existentials (ALU)
/// or both (AL).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Fragment {
    #[serde(rename = "AL")]
    Al,
    #[serde(rename = "ALE")]
    Ale,
    #[serde(rename = "ALU")]
    Alu,
    #[serde(rename = "ALC")]
    Alc,
}

impl Fragment {
    pub fn as_str(self) -> &'static str {
        match self {
            Fragment::Al => "AL",
            Fragment::Ale => "ALE",
            Fragment::Alu => "ALU",
            Fragment::Alc => "ALC",
        }
    }
}

impl fmt::Display for Fragment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Least fragment containing `c` (NNF input).
pub fn classify_fragment(c: &Concept) -> Fragment {
    match (count_unions(c) == 0, count_full_existentials(c) == 0) {
        (true, true) => Fragment::Al,
        (true, false) => Fragment::Ale,
        (false, true) => Fragment::Alu,
        (false, false) => Fragment::Alc,
    }
}

/// Atomic concept, role and individual names, each kept sorted.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub atomic_concepts: BTreeSet<String>,
    pub roles: BTreeSet<String>,
    pub individuals: BTreeSet<String>,
}

impl Signature {
    pub fn add_concept(&mut self, c: &Concept) {
        c.walk(&mut |node| match node {
            Concept::Atom(a) => {
                self.atomic_concepts.insert(a.clone());
            }
            Concept::Exists(r, _) | Concept::Forall(r, _) => {
                self.roles.insert(r.clone());
            }
            _ => {}
        });
    }

    pub fn merge(&mut self, other: &Signature) {
        self.atomic_concepts
            .extend(other.atomic_concepts.iter().cloned());
        self.roles.extend(other.roles.iter().cloned());
        self.individuals.extend(other.individuals.iter().cloned());
    }

    pub fn contains_name(&self, name: &str) -> bool {
        self.atomic_concepts.contains(name)
            || self.roles.contains(name)
            || self.individuals.contains(name)
    }

    /// Names that occur in more than one of the three sets.
    pub fn overlapping_names(&self) -> Vec<String> {
        let mut out = Vec::new();
        for name in &self.atomic_concepts {
            if self.roles.contains(name) || self.individuals.contains(name) {
                out.push(name.clone());
            }
        }
        for name in &self.roles {
            if self.individuals.contains(name) {
                out.push(name.clone());
            }
        }
        out
    }
}
