//! Seeded random instances: concepts, knowledge bases, CNFs, and concepts
//! with exact parameter values. All generators draw from `ChaCha8Rng`, so a
//! seed fixes the output on every platform.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::concept::{count_full_existentials, count_unions, Concept};
use crate::kb::KnowledgeBase;
use crate::sat::CnfFormula;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Shape limits for [`random_concept`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Shape {
    pub atoms: usize,
    pub roles: usize,
    pub max_size: usize,
    pub max_depth: usize,
}

impl Shape {
    /// The small instances used for differential testing.
    pub const SMALL: Shape = Shape {
        atoms: 3,
        roles: 2,
        max_size: 40,
        max_depth: 4,
    };
}

pub fn atom_name(i: usize) -> String {
    char::from(b'A' + i as u8).to_string()
}

pub fn role_name(i: usize) -> String {
    ["r", "s", "t", "u"][i].to_string()
}

/// A random NNF concept within `shape` (size and role depth both bounded).
pub fn random_nnf(rng: &mut impl Rng, shape: Shape) -> Concept {
    let budget = rng.gen_range(shape.max_size.div_ceil(4)..=shape.max_size);
    let c = nnf_node(rng, shape, budget, shape.max_depth);
    debug_assert!(c.is_nnf() && c.size() <= shape.max_size && c.modal_depth() <= shape.max_depth);
    c
}

fn literal(rng: &mut impl Rng, atoms: usize) -> Concept {
    let a = Concept::atom(atom_name(rng.gen_range(0..atoms)));
    if rng.gen_bool(0.5) {
        Concept::not(a)
    } else {
        a
    }
}

/// A node of at most `budget` AST nodes.
fn nnf_node(rng: &mut impl Rng, shape: Shape, budget: usize, depth: usize) -> Concept {
    if budget == 1 {
        return match rng.gen_range(0..12) {
            0 => Concept::Top,
            1 => Concept::Bot,
            _ => Concept::atom(atom_name(rng.gen_range(0..shape.atoms))),
        };
    }
    if budget == 2 {
        return if depth > 0 && rng.gen_bool(0.3) {
            Concept::exists(role_name(rng.gen_range(0..shape.roles)), Concept::Top)
        } else {
            literal(rng, shape.atoms)
        };
    }
    let quantifier = depth > 0 && rng.gen_bool(0.4);
    if quantifier {
        let role = role_name(rng.gen_range(0..shape.roles));
        let size = rng.gen_range(1..budget);
        let inner = nnf_node(rng, shape, size, depth - 1);
        if rng.gen_bool(0.5) {
            Concept::exists(role, inner)
        } else {
            Concept::forall(role, inner)
        }
    } else {
        let left = rng.gen_range(1..budget - 1);
        let right = rng.gen_range(1..=budget - 1 - left);
        let a = nnf_node(rng, shape, left, depth);
        let b = nnf_node(rng, shape, right, depth);
        // conjunction-leaning, so that clashes and unsatisfiable inputs are common
        if rng.gen_bool(0.65) {
            Concept::and(a, b)
        } else {
            Concept::or(a, b)
        }
    }
}

/// A random concept in full syntax (negation anywhere) within `shape`.
pub fn random_concept(rng: &mut impl Rng, shape: Shape) -> Concept {
    let budget = rng.gen_range(1..=shape.max_size);
    any_node(rng, shape, budget, shape.max_depth)
}

fn any_node(rng: &mut impl Rng, shape: Shape, budget: usize, depth: usize) -> Concept {
    if budget == 1 {
        return match rng.gen_range(0..10) {
            0 => Concept::Top,
            1 => Concept::Bot,
            _ => Concept::atom(atom_name(rng.gen_range(0..shape.atoms))),
        };
    }
    match rng.gen_range(0..5) {
        0 => Concept::not(any_node(rng, shape, budget - 1, depth)),
        1 if depth > 0 => {
            let role = role_name(rng.gen_range(0..shape.roles));
            let size = rng.gen_range(1..budget);
            let inner = any_node(rng, shape, size, depth - 1);
            if rng.gen_bool(0.5) {
                Concept::exists(role, inner)
            } else {
                Concept::forall(role, inner)
            }
        }
        _ if budget >= 3 => {
            let left = rng.gen_range(1..budget - 1);
            let right = rng.gen_range(1..=budget - 1 - left);
            let a = any_node(rng, shape, left, depth);
            let b = any_node(rng, shape, right, depth);
            if rng.gen_bool(0.5) {
                Concept::and(a, b)
            } else {
                Concept::or(a, b)
            }
        }
        _ => Concept::not(any_node(rng, shape, budget - 1, depth)),
    }
}

/// Limits for [`random_instance`]. Defined atoms are named `D0, D1, …`; a body of
/// `Di` only mentions primitive atoms and `Dj` with `j > i`, so the
/// definitions are acyclic and their depth is at most `defs`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KbShape {
    pub concept: Shape,
    pub defs: usize,
    pub gcis: usize,
    pub body_size: usize,
}

impl KbShape {
    pub const SMALL: KbShape = KbShape {
        concept: Shape {
            atoms: 2,
            roles: 1,
            max_size: 10,
            max_depth: 2,
        },
        defs: 3,
        gcis: 2,
        body_size: 6,
    };
}

pub fn defined_name(i: usize) -> String {
    format!("D{i}")
}

/// A random NNF concept over the primitive atoms of `shape` plus the
/// defined atoms in `defined`.
fn nnf_with_defined(rng: &mut impl Rng, shape: Shape, defined: &[String]) -> Concept {
    let c = random_nnf(rng, shape);
    if defined.is_empty() {
        return c;
    }
    substitute_atoms(rng, &c, defined)
}

/// Replace each positive or negated atom occurrence by a defined atom with
/// probability 1/3.
fn substitute_atoms(rng: &mut impl Rng, c: &Concept, defined: &[String]) -> Concept {
    match c {
        Concept::Atom(_) if rng.gen_bool(1.0 / 3.0) => {
            Concept::atom(defined.choose(rng).expect("non-empty").clone())
        }
        Concept::Atom(_) | Concept::Top | Concept::Bot => c.clone(),
        Concept::Not(a) => Concept::not(substitute_atoms(rng, a, defined)),
        Concept::And(a, b) => Concept::and(
            substitute_atoms(rng, a, defined),
            substitute_atoms(rng, b, defined),
        ),
        Concept::Or(a, b) => Concept::or(
            substitute_atoms(rng, a, defined),
            substitute_atoms(rng, b, defined),
        ),
        Concept::Exists(r, a) => Concept::exists(r.clone(), substitute_atoms(rng, a, defined)),
        Concept::Forall(r, a) => Concept::forall(r.clone(), substitute_atoms(rng, a, defined)),
    }
}

/// A random `(c, kb)` with `0..=defs` definitions and `0..=gcis` GCIs.
pub fn random_instance(rng: &mut impl Rng, shape: KbShape) -> (Concept, KnowledgeBase) {
    let def_count = rng.gen_range(0..=shape.defs);
    let gci_count = rng.gen_range(0..=shape.gcis);
    let names: Vec<String> = (0..def_count).map(defined_name).collect();
    let body_shape = Shape {
        max_size: shape.body_size,
        ..shape.concept
    };
    let definitions = (0..def_count)
        .map(|i| {
            (
                names[i].clone(),
                nnf_with_defined(rng, body_shape, &names[i + 1..]),
            )
        })
        .collect();
    let gcis = (0..gci_count)
        .map(|_| {
            (
                nnf_with_defined(rng, body_shape, &names),
                nnf_with_defined(rng, body_shape, &names),
            )
        })
        .collect();
    let kb = KnowledgeBase::new(definitions, gcis).expect("index-ordered definitions are acyclic");
    let c = nnf_with_defined(rng, shape.concept, &names);
    (c, kb)
}

/// A random general TBox: `1..=count` GCIs in full syntax.
pub fn random_general_tbox(
    rng: &mut impl Rng,
    shape: Shape,
    count: usize,
) -> Vec<(Concept, Concept)> {
    let n = rng.gen_range(1..=count);
    (0..n)
        .map(|_| (random_concept(rng, shape), random_concept(rng, shape)))
        .collect()
}

/// A random CNF with `1..=max_vars` variables and `0..=max_clauses` clauses
/// of width 1 to 4; each clause has distinct literals.
pub fn random_cnf(rng: &mut impl Rng, max_vars: usize, max_clauses: usize) -> CnfFormula {
    let n = rng.gen_range(1..=max_vars);
    let m = rng.gen_range(0..=max_clauses);
    let clauses = (0..m)
        .map(|_| {
            let width = rng.gen_range(1..=4.min(n));
            let mut vars: Vec<i32> = (1..=n as i32).collect();
            vars.shuffle(rng);
            vars.truncate(width);
            vars.into_iter()
                .map(|v| if rng.gen_bool(0.5) { v } else { -v })
                .collect()
        })
        .collect();
    CnfFormula::new(n, clauses)
}

/// Parameters for [`generate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenSpec {
    pub seed: u64,
    pub atoms: usize,
    pub roles: usize,
    pub target_unions: usize,
    pub target_existentials: usize,
    pub max_depth: usize,
    pub gci_count: usize,
    pub def_count: usize,
}

pub const MAX_GEN_ATOMS: usize = 8;
pub const MAX_GEN_ROLES: usize = 4;
pub const MAX_GEN_DEPTH: usize = 6;
pub const MAX_GEN_ATTEMPTS: u64 = 1000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("{0} out of range (allowed {1})")]
    OutOfRange(&'static str, String),
    #[error("targets are infeasible: {0}")]
    Infeasible(&'static str),
    #[error("no instance met the targets within {MAX_GEN_ATTEMPTS} attempts")]
    Exhausted,
}

/// A concept with exactly `target_unions` occurrences of `⊔` and
/// `target_existentials` full existentials, role depth at most `max_depth`,
/// plus a knowledge base with `def_count` definitions and `gci_count` GCIs.
///
/// Construction is top-down: each node receives a quota of unions and full
/// existentials and splits it among its children, so the counts are exact
/// by construction. The result is still checked; a miss retries with the
/// sub-seed `seed + attempt`.
pub fn generate(spec: &GenSpec) -> Result<(Concept, KnowledgeBase), GenError> {
    if spec.atoms == 0 || spec.atoms > MAX_GEN_ATOMS {
        return Err(GenError::OutOfRange(
            "atoms",
            format!("1..={MAX_GEN_ATOMS}"),
        ));
    }
    if spec.roles == 0 || spec.roles > MAX_GEN_ROLES {
        return Err(GenError::OutOfRange(
            "roles",
            format!("1..={MAX_GEN_ROLES}"),
        ));
    }
    if spec.max_depth > MAX_GEN_DEPTH {
        return Err(GenError::OutOfRange(
            "max_depth",
            format!("0..={MAX_GEN_DEPTH}"),
        ));
    }
    if spec.target_existentials > 0 && spec.max_depth == 0 {
        return Err(GenError::Infeasible(
            "full existentials need max_depth >= 1",
        ));
    }
    for attempt in 0..MAX_GEN_ATTEMPTS {
        let mut rng = rng(spec.seed.wrapping_add(attempt));
        let shape = Shape {
            atoms: spec.atoms,
            roles: spec.roles,
            max_size: usize::MAX,
            max_depth: spec.max_depth,
        };
        let c = quota_node(
            &mut rng,
            shape,
            spec.target_unions,
            spec.target_existentials,
            spec.max_depth,
        );
        if count_unions(&c) != spec.target_unions
            || count_full_existentials(&c) != spec.target_existentials
            || c.modal_depth() > spec.max_depth
        {
            continue;
        }
        let kb_shape = KbShape {
            concept: Shape {
                max_size: 8,
                max_depth: spec.max_depth.min(2),
                ..shape
            },
            defs: spec.def_count,
            gcis: spec.gci_count,
            body_size: 8,
        };
        let kb = exact_kb(&mut rng, kb_shape);
        return Ok((c, kb));
    }
    Err(GenError::Exhausted)
}

fn exact_kb(rng: &mut impl Rng, shape: KbShape) -> KnowledgeBase {
    let names: Vec<String> = (0..shape.defs).map(defined_name).collect();
    let body_shape = Shape {
        max_size: shape.body_size,
        ..shape.concept
    };
    let definitions = (0..shape.defs)
        .map(|i| {
            (
                names[i].clone(),
                nnf_with_defined(rng, body_shape, &names[i + 1..]),
            )
        })
        .collect();
    let gcis = (0..shape.gcis)
        .map(|_| {
            (
                nnf_with_defined(rng, body_shape, &names),
                nnf_with_defined(rng, body_shape, &names),
            )
        })
        .collect();
    KnowledgeBase::new(definitions, gcis).expect("index-ordered definitions are acyclic")
}

/// A concept free of `⊔` and full existentials.
fn al_leaf(rng: &mut impl Rng, shape: Shape, depth: usize) -> Concept {
    match rng.gen_range(0..6) {
        0 if depth > 0 => Concept::exists(role_name(rng.gen_range(0..shape.roles)), Concept::Top),
        1 if depth > 0 => Concept::forall(
            role_name(rng.gen_range(0..shape.roles)),
            literal(rng, shape.atoms),
        ),
        2 => Concept::and(literal(rng, shape.atoms), literal(rng, shape.atoms)),
        _ => literal(rng, shape.atoms),
    }
}

/// A concept with exactly `u` unions and `e` full existentials; requires
/// `e == 0 || depth > 0`.
fn quota_node(rng: &mut impl Rng, shape: Shape, u: usize, e: usize, depth: usize) -> Concept {
    debug_assert!(e == 0 || depth > 0);
    if u == 0 && e == 0 {
        return al_leaf(rng, shape, depth);
    }
    let mut options = Vec::new();
    if u > 0 {
        options.push(0); // ⊔ here
    }
    if e > 0 {
        options.push(1); // ∃ here
    }
    if u + e >= 2 {
        options.push(2); // split under ⊓
    }
    if depth > 1 || (depth == 1 && e == 0) {
        options.push(3); // push under ∀
    }
    let role = role_name(rng.gen_range(0..shape.roles));
    match *options.choose(rng).expect("some option applies") {
        0 => {
            let (u1, e1) = (rng.gen_range(0..u), rng.gen_range(0..=e));
            Concept::or(
                quota_node(rng, shape, u1, e1, depth),
                quota_node(rng, shape, u - 1 - u1, e - e1, depth),
            )
        }
        1 => {
            // the filler takes part of the quota if it fits below
            let (u1, e1) = if depth > 1 {
                (rng.gen_range(0..=u), rng.gen_range(0..e))
            } else {
                (rng.gen_range(0..=u), 0)
            };
            let filler = quota_node(rng, shape, u1, e1, depth - 1);
            let here = Concept::exists(role, filler);
            let (ur, er) = (u - u1, e - 1 - e1);
            if ur == 0 && er == 0 {
                here
            } else {
                Concept::and(here, quota_node(rng, shape, ur, er, depth))
            }
        }
        2 => {
            let (u1, e1) = loop {
                let split = (rng.gen_range(0..=u), rng.gen_range(0..=e));
                if split != (0, 0) && split != (u, e) {
                    break split;
                }
            };
            Concept::and(
                quota_node(rng, shape, u1, e1, depth),
                quota_node(rng, shape, u - u1, e - e1, depth),
            )
        }
        _ => Concept::forall(role, quota_node(rng, shape, u, e, depth - 1)),
    }
}
