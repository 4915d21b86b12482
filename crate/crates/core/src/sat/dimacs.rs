use std::fmt::Write;

use thiserror::Error;

use crate::syntax::print_concept;

use super::CnfFormula;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DimacsError {
    #[error("line {0}: missing or malformed `p cnf` header")]
    Header(usize),
    #[error("line {0}: bad literal `{1}`")]
    Literal(usize, String),
    #[error("literal {0} exceeds the declared {1} variables")]
    OutOfRange(i32, usize),
    #[error("header declares {declared} clauses, found {found}")]
    ClauseCount { declared: usize, found: usize },
}

/// DIMACS CNF text. Variable meanings come first as `c <var> <node> <concept>`
/// comment lines.
pub fn export_dimacs(f: &CnfFormula) -> String {
    let mut out = String::new();
    for (var, (node, concept)) in &f.var_meaning {
        let _ = writeln!(out, "c {var} {node} {}", print_concept(concept));
    }
    let _ = writeln!(out, "p cnf {} {}", f.num_vars, f.clauses.len());
    for clause in &f.clauses {
        for lit in clause {
            let _ = write!(out, "{lit} ");
        }
        out.push_str("0\n");
    }
    out
}

/// Read DIMACS CNF. Comments are skipped; clauses may span lines.
pub fn parse_dimacs(src: &str) -> Result<CnfFormula, DimacsError> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current = Vec::new();
    for (i, line) in src.lines().enumerate() {
        let line_no = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if line.starts_with('p') {
            let parts: Vec<&str> = line.split_whitespace().collect();
            match parts.as_slice() {
                ["p", "cnf", v, c] => {
                    let v = v.parse().map_err(|_| DimacsError::Header(line_no))?;
                    let c = c.parse().map_err(|_| DimacsError::Header(line_no))?;
                    header = Some((v, c));
                }
                _ => return Err(DimacsError::Header(line_no)),
            }
            continue;
        }
        let Some((num_vars, _)) = header else {
            return Err(DimacsError::Header(line_no));
        };
        for tok in line.split_whitespace() {
            let lit: i32 = tok
                .parse()
                .map_err(|_| DimacsError::Literal(line_no, tok.to_string()))?;
            if lit == 0 {
                clauses.push(std::mem::take(&mut current));
            } else if lit.unsigned_abs() as usize > num_vars {
                return Err(DimacsError::OutOfRange(lit, num_vars));
            } else {
                current.push(lit);
            }
        }
    }
    let Some((num_vars, declared)) = header else {
        return Err(DimacsError::Header(0));
    };
    if !current.is_empty() {
        clauses.push(current);
    }
    if clauses.len() != declared {
        return Err(DimacsError::ClauseCount {
            declared,
            found: clauses.len(),
        });
    }
    Ok(CnfFormula::new(num_vars, clauses))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn export_examples() {
        let text = export_dimacs(&CnfFormula::new(2, vec![vec![1, -2]]));
        assert!(text.contains("p cnf 2 1"));
        assert!(text.contains("1 -2 0"));
        assert_eq!(export_dimacs(&CnfFormula::new(0, vec![])), "p cnf 0 0\n");
    }

    #[test]
    fn round_trip_with_comments() {
        let f = crate::sat::encode_trace_cnf(
            &crate::syntax::parse_concept("(A | B) & only r. !A & some r. A").unwrap(),
        )
        .unwrap();
        let text = export_dimacs(&f);
        assert!(text.starts_with("c 1 ε "));
        let back = parse_dimacs(&text).unwrap();
        assert_eq!(back.num_vars, f.num_vars);
        assert_eq!(back.clauses, f.clauses);
    }

    #[test]
    fn canonical_unsat_round_trips() {
        let text = export_dimacs(&CnfFormula::unsatisfiable());
        assert_eq!(text, "p cnf 0 1\n0\n");
        assert_eq!(parse_dimacs(&text).unwrap(), CnfFormula::unsatisfiable());
    }

    #[test]
    fn rejects_malformed() {
        assert_eq!(parse_dimacs("1 2 0\n"), Err(DimacsError::Header(1)));
        assert_eq!(
            parse_dimacs("p cnf 1 1\n2 0\n"),
            Err(DimacsError::OutOfRange(2, 1))
        );
        assert!(matches!(
            parse_dimacs("p cnf 2 2\n1 0\n"),
            Err(DimacsError::ClauseCount { .. })
        ));
        assert!(matches!(
            parse_dimacs("p cnf 2 1\n1 x 0\n"),
            Err(DimacsError::Literal(2, _))
        ));
    }
}
