//! Tableau decision procedures for ALC concept satisfiability.
//!
//! * [`decide_alc`] — empty TBox. Works on a single ABox with the trace
//!   technique, resolving `⊔` as an OR (left first) and the `∃`-rule
//!   instantiations as an AND, both by deterministic iteration.
//! * [`decide_with_tboxes`] — acyclic definitions (lazily unfolded) plus
//!   GCIs, over a completion tree with static ancestor subset blocking.
//!
//! Both return a [`SatResult`] whose witness can be turned into a finite
//! model with [`extract_model`].

mod blocking;
mod state;
mod trace;

pub use blocking::decide_with_tboxes;
pub use state::{
    extract_model, Assertion, CompletionState, Individual, Node, RuleCounts, SatResult,
    SearchStats, TableauError, Verdict,
};
pub use trace::decide_alc;
