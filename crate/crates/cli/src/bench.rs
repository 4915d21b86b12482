use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, Context};
use dlsat_core::analysis::analyze;
use dlsat_core::sat::{encode_trace_cnf, solve_cnf, SolveResult};
use dlsat_core::semantics::{brute_force_sat, OracleOutcome};
use dlsat_core::tableau::{decide_alc, decide_with_tboxes, extract_model, SearchStats};
use rayon::prelude::*;
use serde::Serialize;

use crate::{load_concept, load_kb, Engine, InputError};

pub struct Options {
    pub engines: Vec<Engine>,
    pub max_domain: usize,
    pub flip_verdict: Option<String>,
}

/// One engine run on one instance. Field order is the serialization order.
#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub id: String,
    pub engine: Engine,
    pub verdict: &'static str,
    /// Size of the model behind a `satisfiable` verdict, when one was built.
    pub model_size: Option<usize>,
    pub or_branch_points: u64,
    pub exists_applications_max_per_trace: u64,
    pub max_depth: u64,
    pub blocked_nodes: u64,
    pub trace_shape_violations: u64,
    pub blocking_violations: u64,
    pub rule_and: u64,
    pub rule_or: u64,
    pub rule_exists: u64,
    pub rule_forall: u64,
    pub rule_bot: u64,
    pub rule_unfold: u64,
    pub rule_gci: u64,
    pub union_count: usize,
    pub full_existential_count: usize,
    pub gci_count: usize,
    pub impacted_size: usize,
    pub fragment: String,
    pub wall_ms: f64,
}

struct Instance {
    id: String,
    concept: PathBuf,
    kb: Option<PathBuf>,
}

fn corpus(dir: &Path) -> Result<Vec<Instance>, InputError> {
    let entries =
        fs::read_dir(dir).with_context(|| format!("cannot read corpus {}", dir.display()))?;
    let mut out = Vec::new();
    for entry in entries {
        let path = entry?.path();
        if path.extension().is_some_and(|e| e == "cpt") {
            let id = path
                .file_stem()
                .and_then(|s| s.to_str())
                .ok_or_else(|| anyhow!("non-UTF-8 file name {}", path.display()))?
                .to_string();
            let kb = path.with_extension("kb");
            out.push(Instance {
                id,
                kb: kb.exists().then_some(kb),
                concept: path,
            });
        }
    }
    out.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(out)
}

/// Run every engine on every instance (instances in parallel), write the
/// records in `(id, engine)` order, and return 3 if any two engines
/// disagree on an instance.
pub fn run(dir: &Path, opts: &Options, out: Option<&Path>) -> Result<u8, InputError> {
    let instances = corpus(dir)?;
    let mut engines = opts.engines.clone();
    engines.sort();
    engines.dedup();

    let results: Vec<Result<Vec<RunRecord>, InputError>> = instances
        .par_iter()
        .map(|inst| run_instance(inst, &engines, opts))
        .collect();

    let sink: Box<dyn Write> = match out {
        Some(p) => {
            Box::new(fs::File::create(p).with_context(|| format!("cannot write {}", p.display()))?)
        }
        None => Box::new(std::io::stdout().lock()),
    };
    let mut sink = BufWriter::new(sink);
    let mut disagreements = Vec::new();
    for (inst, res) in instances.iter().zip(results) {
        let records = res?;
        if disagree(&records, opts.max_domain) {
            disagreements.push(inst.id.clone());
        }
        for r in &records {
            serde_json::to_writer(&mut sink, r)?;
            sink.write_all(b"\n")?;
        }
    }
    sink.flush()?;
    if disagreements.is_empty() {
        Ok(0)
    } else {
        eprintln!("engines disagree on: {}", disagreements.join(", "));
        Ok(3)
    }
}

/// Two conclusive verdicts differ. A bruteforce "unsatisfiable" only claims
/// that no small model exists, so it conflicts with a "satisfiable" only
/// when that verdict came with a model within the domain bound or without
/// any model size to compare.
fn disagree(records: &[RunRecord], max_domain: usize) -> bool {
    records.iter().enumerate().any(|(i, a)| {
        records[i + 1..].iter().any(|b| {
            if a.verdict == b.verdict {
                return false;
            }
            let (sat, unsat) = if a.verdict == "satisfiable" {
                (a, b)
            } else {
                (b, a)
            };
            if unsat.engine == Engine::Bruteforce {
                return sat.model_size.is_none_or(|n| n <= max_domain);
            }
            true
        })
    })
}

fn run_instance(
    inst: &Instance,
    engines: &[Engine],
    opts: &Options,
) -> Result<Vec<RunRecord>, InputError> {
    let c = load_concept(&inst.concept)?;
    let kb = load_kb(inst.kb.as_deref())?;
    let report = analyze(&c, &kb).map_err(anyhow::Error::from)?;
    let mut records = Vec::new();
    for &engine in engines {
        if engine == Engine::Sat && !kb.is_empty() {
            continue;
        }
        let start = Instant::now();
        let (mut sat, stats, model_size) = match engine {
            Engine::Tableau => {
                let res = if kb.is_empty() {
                    decide_alc(&c)
                } else {
                    decide_with_tboxes(&c, &kb)
                }
                .map_err(anyhow::Error::from)?;
                let size = match &res.witness {
                    Some(w) => Some(extract_model(w).map_err(anyhow::Error::from)?.domain_size),
                    None => None,
                };
                (res.verdict.is_sat(), res.stats, size)
            }
            Engine::Sat => {
                let cnf = encode_trace_cnf(&c).map_err(anyhow::Error::from)?;
                (
                    matches!(solve_cnf(&cnf), SolveResult::Sat(_)),
                    SearchStats::default(),
                    None,
                )
            }
            Engine::Bruteforce => match brute_force_sat(&c, &kb, opts.max_domain) {
                OracleOutcome::Found(m) => (true, SearchStats::default(), Some(m.domain_size)),
                _ => (false, SearchStats::default(), None),
            },
        };
        let wall_ms = start.elapsed().as_secs_f64() * 1000.0;
        if engine == Engine::Tableau && opts.flip_verdict.as_deref() == Some(inst.id.as_str()) {
            sat = !sat;
        }
        let r = &stats.rule_counts;
        records.push(RunRecord {
            id: inst.id.clone(),
            engine,
            verdict: if sat { "satisfiable" } else { "unsatisfiable" },
            model_size: model_size.filter(|_| sat),
            or_branch_points: stats.or_branch_points,
            exists_applications_max_per_trace: stats.exists_applications_max_per_trace,
            max_depth: stats.max_depth,
            blocked_nodes: stats.blocked_nodes,
            trace_shape_violations: stats.trace_shape_violations,
            blocking_violations: stats.blocking_violations,
            rule_and: r.and,
            rule_or: r.or,
            rule_exists: r.exists,
            rule_forall: r.forall,
            rule_bot: r.bot,
            rule_unfold: r.unfold,
            rule_gci: r.gci,
            union_count: report.union_count,
            full_existential_count: report.full_existential_count,
            gci_count: report.gci_count,
            impacted_size: report.impacted_size,
            fragment: report.fragment.to_string(),
            wall_ms,
        });
    }
    Ok(records)
}
