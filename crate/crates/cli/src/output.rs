use std::fmt::Write;
use std::io::IsTerminal;

use dlsat_core::analysis::AnalysisReport;
use dlsat_core::semantics::Interpretation;
use dlsat_core::tableau::{SearchStats, Verdict};
use serde_json::{Map, Value};

use crate::Engine;

/// Terminal colouring: on for a terminal unless `NO_COLOR` is set.
#[derive(Debug, Clone, Copy)]
pub struct Style {
    color: bool,
}

impl Style {
    pub fn detect() -> Self {
        let no_color = std::env::var_os("NO_COLOR").is_some_and(|v| !v.is_empty());
        Style {
            color: !no_color && std::io::stdout().is_terminal(),
        }
    }

    fn paint(&self, code: &str, text: &str) -> String {
        if self.color {
            format!("\x1b[{code}m{text}\x1b[0m")
        } else {
            text.to_string()
        }
    }

    pub fn verdict(&self, v: Verdict) -> String {
        let code = if v.is_sat() { "32" } else { "31" };
        self.paint(code, &v.to_string())
    }

    pub fn error(&self, text: &str) -> String {
        self.paint("1;31", text)
    }
}

pub fn engine_name(e: Engine) -> &'static str {
    match e {
        Engine::Tableau => "tableau",
        Engine::Sat => "sat",
        Engine::Bruteforce => "bruteforce",
    }
}

pub fn stats_lines(s: &SearchStats) -> String {
    let r = &s.rule_counts;
    let mut out = String::new();
    let rows = [
        ("or_branch_points", s.or_branch_points),
        (
            "exists_applications_max_per_trace",
            s.exists_applications_max_per_trace,
        ),
        ("max_depth", s.max_depth),
        ("blocked_nodes", s.blocked_nodes),
        ("trace_shape_violations", s.trace_shape_violations),
        ("blocking_violations", s.blocking_violations),
        ("rule_and", r.and),
        ("rule_or", r.or),
        ("rule_exists", r.exists),
        ("rule_forall", r.forall),
        ("rule_bot", r.bot),
        ("rule_unfold", r.unfold),
        ("rule_gci", r.gci),
    ];
    for (k, v) in rows {
        let _ = writeln!(out, "{k}: {v}");
    }
    out
}

fn set_text<T: std::fmt::Debug>(items: impl Iterator<Item = T>) -> String {
    let parts: Vec<String> = items.map(|i| format!("{i:?}")).collect();
    format!("{{{}}}", parts.join(", "))
}

pub fn model_text(m: &Interpretation) -> String {
    let mut out = format!("model: {} element(s)\n", m.domain_size);
    for (a, ext) in &m.atom_ext {
        let _ = writeln!(out, "  {a} = {}", set_text(ext.iter()));
    }
    for (r, ext) in &m.role_ext {
        let _ = writeln!(out, "  {r} = {}", set_text(ext.iter()));
    }
    out
}

/// `key=value` pairs shared by the text and JSON renderings, in output
/// order.
fn analysis_pairs(r: &AnalysisReport) -> Vec<(String, Value)> {
    let mut pairs = vec![
        ("union_count".to_string(), Value::from(r.union_count)),
        (
            "full_existential_count".to_string(),
            Value::from(r.full_existential_count),
        ),
        ("gci_count".to_string(), Value::from(r.gci_count)),
        (
            "gci_symbol_size".to_string(),
            Value::from(r.gci_symbol_size),
        ),
        ("impacted_size".to_string(), Value::from(r.impacted_size)),
        ("fragment".to_string(), Value::from(r.fragment.as_str())),
    ];
    for reg in &r.regimes {
        pairs.push((
            format!("regime.{}", reg.parameter),
            Value::from(reg.label.clone()),
        ));
    }
    pairs
}

pub fn analysis_json(r: &AnalysisReport) -> Value {
    Value::Object(analysis_pairs(r).into_iter().collect::<Map<_, _>>())
}

pub fn analysis_text(r: &AnalysisReport) -> String {
    let mut out = format!(
        "Concept in {} with {} union(s) and {} full existential(s); {} GCI(s), {} impacted concept(s).\n",
        r.fragment, r.union_count, r.full_existential_count, r.gci_count, r.impacted_size
    );
    for reg in &r.regimes {
        let _ = writeln!(
            out,
            "  parameterized by {:<26} {}",
            reg.parameter, reg.label
        );
    }
    for (k, v) in analysis_pairs(r) {
        match v {
            Value::String(s) => {
                let _ = writeln!(out, "{k}={s}");
            }
            other => {
                let _ = writeln!(out, "{k}={other}");
            }
        }
    }
    out
}
