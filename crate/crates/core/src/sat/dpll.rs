use serde::{Deserialize, Serialize};

use super::CnfFormula;

/// A total assignment; index 0 is unused.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment(pub Vec<bool>);

impl Assignment {
    pub fn value(&self, var: usize) -> bool {
        self.0[var]
    }

    pub fn satisfies(&self, clause: &[i32]) -> bool {
        clause
            .iter()
            .any(|&l| self.0[l.unsigned_abs() as usize] == (l > 0))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveResult {
    Sat(Assignment),
    Unsat,
}

/// Every clause satisfied under `a`.
pub fn evaluate(f: &CnfFormula, a: &Assignment) -> bool {
    f.clauses.iter().all(|c| a.satisfies(c))
}

/// Plain DPLL: unit propagation to a fixpoint, then branch on the
/// lowest-numbered unassigned variable, `true` first.
pub fn solve_cnf(f: &CnfFormula) -> SolveResult {
    let mut solver = Solver {
        clauses: &f.clauses,
        values: vec![None; f.num_vars + 1],
        trail: Vec::new(),
    };
    if solver.search() {
        let values = solver.values.iter().map(|v| v.unwrap_or(true)).collect();
        let a = Assignment(values);
        debug_assert!(evaluate(f, &a));
        SolveResult::Sat(a)
    } else {
        SolveResult::Unsat
    }
}

struct Solver<'a> {
    clauses: &'a [Vec<i32>],
    values: Vec<Option<bool>>,
    trail: Vec<usize>,
}

impl Solver<'_> {
    fn assign(&mut self, lit: i32) {
        let v = lit.unsigned_abs() as usize;
        self.values[v] = Some(lit > 0);
        self.trail.push(v);
    }

    fn undo_to(&mut self, len: usize) {
        while self.trail.len() > len {
            let v = self.trail.pop().expect("trail longer than len");
            self.values[v] = None;
        }
    }

    /// Returns false on a conflict.
    fn propagate(&mut self) -> bool {
        loop {
            let mut changed = false;
            for clause in self.clauses {
                let mut open = None;
                let mut open_count = 0;
                let mut satisfied = false;
                for &l in clause {
                    match self.values[l.unsigned_abs() as usize] {
                        Some(v) if v == (l > 0) => {
                            satisfied = true;
                            break;
                        }
                        Some(_) => {}
                        None => {
                            open_count += 1;
                            open = Some(l);
                        }
                    }
                }
                if satisfied {
                    continue;
                }
                match open_count {
                    0 => return false,
                    1 => {
                        self.assign(open.expect("one open literal"));
                        changed = true;
                    }
                    _ => {}
                }
            }
            if !changed {
                return true;
            }
        }
    }

    fn search(&mut self) -> bool {
        let mark = self.trail.len();
        if !self.propagate() {
            self.undo_to(mark);
            return false;
        }
        let Some(var) = (1..self.values.len()).find(|&v| self.values[v].is_none()) else {
            return true;
        };
        for value in [true, false] {
            let before = self.trail.len();
            self.assign(if value { var as i32 } else { -(var as i32) });
            if self.search() {
                return true;
            }
            self.undo_to(before);
        }
        self.undo_to(mark);
        false
    }
}
