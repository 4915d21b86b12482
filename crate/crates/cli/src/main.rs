mod bench;
mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use dlsat_core::analysis::{analyze, reduce_to_nearly_acyclic};
use dlsat_core::gen::{generate, GenSpec};
use dlsat_core::kb::KnowledgeBase;
use dlsat_core::sat::{encode_trace_cnf, export_dimacs, solve_cnf, SolveResult};
use dlsat_core::semantics::{brute_force_sat, OracleOutcome, MAX_ORACLE_DOMAIN};
use dlsat_core::syntax::{
    parse_concept, parse_knowledge_base, print_concept, print_knowledge_base,
};
use dlsat_core::tableau::{decide_alc, decide_with_tboxes, extract_model, Verdict};
use dlsat_core::{nnf, Concept};

use output::Style;

#[derive(Parser)]
#[command(
    name = "dlsat",
    version,
    about = "Concept satisfiability for the description logic ALC"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a concept is satisfiable, optionally w.r.t. a TBox.
    Sat {
        file: PathBuf,
        #[arg(long)]
        tbox: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Engine::Tableau)]
        engine: Engine,
        /// Largest domain tried by the bruteforce engine.
        #[arg(long, default_value_t = 4)]
        max_domain: usize,
        /// Print the model found, if any.
        #[arg(long)]
        model: bool,
        #[arg(long)]
        json: bool,
    },
    /// Measure the parameters of a concept and TBox and list the matching
    /// complexity regimes.
    Analyze {
        file: PathBuf,
        #[arg(long)]
        tbox: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Rewrite a general TBox into one definition plus the GCI `top <= A`.
    Reduce {
        tbox: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the trace-tree CNF of a concept in DIMACS format.
    Encode {
        file: PathBuf,
        #[arg(long)]
        tbox: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a concept (and TBox) with exact parameter values.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        atoms: usize,
        #[arg(long, default_value_t = 2)]
        roles: usize,
        #[arg(long, default_value_t = 0)]
        unions: usize,
        #[arg(long, default_value_t = 0)]
        existentials: usize,
        #[arg(long, default_value_t = 3)]
        max_depth: usize,
        #[arg(long, default_value_t = 0)]
        gcis: usize,
        #[arg(long, default_value_t = 0)]
        defs: usize,
        /// Write `<OUT>.cpt` and, for a non-empty TBox, `<OUT>.kb`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run engines over a directory of `.cpt` files (with optional `.kb`
    /// companions) and cross-check their verdicts.
    Bench {
        corpus: PathBuf,
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Engine::Tableau, Engine::Bruteforce])]
        engines: Vec<Engine>,
        #[arg(long, default_value_t = 4)]
        max_domain: usize,
        /// JSON-lines output file (default: standard output).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Invert the tableau verdict for one instance (harness use).
        #[arg(long, hide = true)]
        flip_verdict: Option<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Tableau,
    Sat,
    Bruteforce,
}

/// An error that maps to exit status 2.
#[derive(Debug)]
struct InputError(anyhow::Error);

impl<E: Into<anyhow::Error>> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let style = Style::detect();
    match run(cli.command, style) {
        Ok(code) => ExitCode::from(code),
        Err(InputError(e)) => {
            eprintln!("{}: {e:#}", style.error("error"));
            ExitCode::from(2)
        }
    }
}

fn run(command: Command, style: Style) -> Result<u8, InputError> {
    match command {
        Command::Sat {
            file,
            tbox,
            engine,
            max_domain,
            model,
            json,
        } => cmd_sat(
            &file,
            tbox.as_deref(),
            engine,
            max_domain,
            model,
            json,
            style,
        ),
        Command::Analyze { file, tbox, json } => cmd_analyze(&file, tbox.as_deref(), json),
        Command::Reduce { tbox, out } => cmd_reduce(&tbox, out.as_deref()),
        Command::Encode { file, tbox, out } => cmd_encode(&file, tbox.as_deref(), out.as_deref()),
        Command::Gen {
            seed,
            atoms,
            roles,
            unions,
            existentials,
            max_depth,
            gcis,
            defs,
            out,
        } => {
            let spec = GenSpec {
                seed,
                atoms,
                roles,
                target_unions: unions,
                target_existentials: existentials,
                max_depth,
                gci_count: gcis,
                def_count: defs,
            };
            cmd_gen(&spec, out.as_deref())
        }
        Command::Bench {
            corpus,
            engines,
            max_domain,
            out,
            flip_verdict,
        } => {
            check_domain(max_domain)?;
            let opts = bench::Options {
                engines,
                max_domain,
                flip_verdict,
            };
            bench::run(&corpus, &opts, out.as_deref())
        }
    }
}

fn read(path: &Path) -> Result<String, InputError> {
    Ok(fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?)
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<(), InputError> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

/// Read a concept file and bring it into NNF.
pub(crate) fn load_concept(path: &Path) -> Result<Concept, InputError> {
    let src = read(path)?;
    let c = parse_concept(&src).map_err(|d| anyhow!("{}:{d}", path.display()))?;
    Ok(nnf(&c))
}

pub(crate) fn load_kb(path: Option<&Path>) -> Result<KnowledgeBase, InputError> {
    let Some(path) = path else {
        return Ok(KnowledgeBase::empty());
    };
    let src = read(path)?;
    let kb = parse_knowledge_base(&src).map_err(|d| {
        let mut msg = format!("{}:{d}", path.display());
        if let Some(cycle) = &d.cycle_path {
            msg.push_str(&format!(" ({})", cycle.join(" -> ")));
        }
        anyhow!(msg)
    })?;
    Ok(kb)
}

fn check_domain(max_domain: usize) -> Result<(), InputError> {
    if !(1..=MAX_ORACLE_DOMAIN).contains(&max_domain) {
        return Err(anyhow!("--max-domain must be between 1 and {MAX_ORACLE_DOMAIN}").into());
    }
    Ok(())
}

fn cmd_sat(
    file: &Path,
    tbox: Option<&Path>,
    engine: Engine,
    max_domain: usize,
    want_model: bool,
    json: bool,
    style: Style,
) -> Result<u8, InputError> {
    let c = load_concept(file)?;
    let kb = load_kb(tbox)?;
    if engine == Engine::Sat && !kb.is_empty() {
        return Err(anyhow!(
            "the sat engine only decides concepts without a TBox; use --engine tableau"
        )
        .into());
    }
    if engine == Engine::Bruteforce {
        check_domain(max_domain)?;
    }
    let (verdict, stats, model, note) = match engine {
        Engine::Tableau => {
            let res = if kb.is_empty() {
                decide_alc(&c)
            } else {
                decide_with_tboxes(&c, &kb)
            }
            .map_err(anyhow::Error::from)?;
            let model = match (&res.witness, want_model) {
                (Some(w), true) => Some(extract_model(w).map_err(anyhow::Error::from)?),
                _ => None,
            };
            (res.verdict, Some(res.stats), model, None)
        }
        Engine::Sat => {
            let cnf = encode_trace_cnf(&c).map_err(anyhow::Error::from)?;
            let verdict = Verdict::from_bool(matches!(solve_cnf(&cnf), SolveResult::Sat(_)));
            let note = format!("{} variables, {} clauses", cnf.num_vars, cnf.clauses.len());
            (verdict, None, None, Some(note))
        }
        Engine::Bruteforce => match brute_force_sat(&c, &kb, max_domain) {
            OracleOutcome::Found(m) => (Verdict::Satisfiable, None, want_model.then_some(m), None),
            _ => (
                Verdict::Unsatisfiable,
                None,
                None,
                Some(format!("no model with at most {max_domain} elements")),
            ),
        },
    };
    if json {
        let value = serde_json::json!({
            "verdict": verdict,
            "engine": engine,
            "stats": stats,
            "note": note,
            "model": model,
        });
        println!("{value}");
    } else {
        println!("verdict: {}", style.verdict(verdict));
        println!("engine: {}", output::engine_name(engine));
        if let Some(note) = &note {
            println!("note: {note}");
        }
        if let Some(s) = &stats {
            print!("{}", output::stats_lines(s));
        }
        if want_model {
            match &model {
                Some(m) => print!("{}", output::model_text(m)),
                None if verdict.is_sat() => println!("model: not available from this engine"),
                None => {}
            }
        }
    }
    Ok(if verdict.is_sat() { 0 } else { 1 })
}

fn cmd_analyze(file: &Path, tbox: Option<&Path>, json: bool) -> Result<u8, InputError> {
    let c = load_concept(file)?;
    let kb = load_kb(tbox)?;
    let report = analyze(&c, &kb).map_err(anyhow::Error::from)?;
    if json {
        println!(
            "{}",
            serde_json::to_string(&output::analysis_json(&report))?
        );
    } else {
        print!("{}", output::analysis_text(&report));
    }
    Ok(0)
}

fn cmd_reduce(tbox: &Path, out: Option<&Path>) -> Result<u8, InputError> {
    let kb = load_kb(Some(tbox))?;
    if !kb.definitions.is_empty() {
        return Err(anyhow!(
            "{}: reduce takes a general TBox; found {} definition statement(s)",
            tbox.display(),
            kb.definitions.len()
        )
        .into());
    }
    let (reduced, fresh) = reduce_to_nearly_acyclic(&kb.gcis);
    let text = print_knowledge_base(&reduced);
    match out {
        Some(_) => {
            write_or_print(out, &text)?;
            println!("fresh: {fresh}");
        }
        None => {
            print!("{text}");
            eprintln!("fresh: {fresh}");
        }
    }
    Ok(0)
}

fn cmd_encode(file: &Path, tbox: Option<&Path>, out: Option<&Path>) -> Result<u8, InputError> {
    if tbox.is_some() {
        return Err(anyhow!("encode works on concepts without a TBox").into());
    }
    let c = load_concept(file)?;
    let cnf = encode_trace_cnf(&c).map_err(anyhow::Error::from)?;
    write_or_print(out, &export_dimacs(&cnf))?;
    Ok(0)
}

fn cmd_gen(spec: &GenSpec, out: Option<&Path>) -> Result<u8, InputError> {
    let (c, kb) = generate(spec)?;
    let concept = format!("{}\n", print_concept(&c));
    let kb_text = (!kb.is_empty()).then(|| print_knowledge_base(&kb));
    match out {
        Some(prefix) => {
            let cpt = prefix.with_extension("cpt");
            write_or_print(Some(&cpt), &concept)?;
            if let Some(text) = &kb_text {
                write_or_print(Some(&prefix.with_extension("kb")), text)?;
            }
        }
        None => {
            print!("{concept}");
            if let Some(text) = &kb_text {
                print!("\n{text}");
            }
        }
    }
    Ok(0)
}
