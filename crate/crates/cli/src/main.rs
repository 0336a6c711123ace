//! Command-line front end. Every command prints one JSON report on stdout;
//! the exit code is 0 for true/sat, 1 for false/unsat, 2 for errors and 3
//! when a budget is exceeded.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use amcdes::corpus::{parse_corpus, Entry};
use amcdes::mc::{self, Valuation};
use amcdes::onestep::{extract_one_step_model, one_step_sat, OneStepProblem};
use amcdes::resolution::{clauses_from_atoms, saturate, Mode, Saturation, DEFAULT_CAP};
use amcdes::sat::{satisfiable, Verdict};
use amcdes::{closure, parse, parse_infer, Cgses, Formula, ParityGame, Signature};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "amcdes", version, about = "Decision procedures for the alternating-time mu-calculus with explicit strategies")]
struct Cli {
    /// Agents to declare before inference, comma separated. Agents not
    /// mentioned in a formula stay idle, which keeps modalities non-grand.
    #[arg(long, global = true, value_delimiter = ',')]
    agents: Vec<String>,
    /// Indent the JSON report.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a formula and report its normal form and closure.
    Parse { formula: String },
    /// Model-check a formula at a state of a model.
    Mc {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        formula: String,
        /// State name or index; defaults to the model's initial state.
        #[arg(long)]
        state: Option<String>,
        #[arg(long, value_enum, default_value_t = McMode::Fixed)]
        mode: McMode,
        #[arg(long, value_enum, default_value_t = Engine::Naive)]
        engine: Engine,
        /// With `--mode open`, write the witnessing model here.
        #[arg(long)]
        emit_model: Option<PathBuf>,
    },
    /// Decide satisfiability of a formula.
    Sat {
        formula: String,
        /// Write the model of a satisfiable formula here.
        #[arg(long)]
        emit_model: Option<PathBuf>,
    },
    /// Decide a one-step problem and print a witness game.
    Onestep { file: PathBuf },
    /// Saturate the clauses generated from a one-step problem.
    Resolve {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = ResolveMode::Sr)]
        mode: ResolveMode,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
        /// Include the derivation of the empty clause.
        #[arg(long)]
        trace: bool,
    },
    /// Run satisfiability on every `*.txt` corpus in a directory.
    Corpus {
        dir: PathBuf,
        /// Worker threads; defaults to the available parallelism.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Solve a parity game in PGSolver format.
    SolveGame { file: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum McMode {
    Fixed,
    Open,
}

#[derive(Clone, Copy, ValueEnum)]
enum Engine {
    Naive,
    Game,
    Onestep,
}

#[derive(Clone, Copy, ValueEnum)]
enum ResolveMode {
    Sr,
    Lsr,
    #[value(name = "sr+")]
    SrPlus,
}

#[derive(Serialize)]
struct RunReport {
    command: &'static str,
    verdict: &'static str,
    wall_ms: f64,
    stats: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<String>,
    #[serde(skip_serializing_if = "Value::is_null")]
    detail: Value,
}

impl RunReport {
    fn exit_code(&self) -> u8 {
        match self.verdict {
            "true" | "sat" => 0,
            "false" | "unsat" => 1,
            "budget-exceeded" => 3,
            _ => 2,
        }
    }
}

struct Outcome {
    verdict: &'static str,
    stats: Value,
    witness: Option<String>,
    detail: Value,
}

impl Outcome {
    fn new(verdict: &'static str, stats: Value) -> Outcome {
        Outcome { verdict, stats, witness: None, detail: Value::Null }
    }
}

type Result<T> = std::result::Result<T, String>;

fn base_signature(agents: &[String]) -> Signature {
    Signature::new(agents.to_vec(), vec![Vec::new(); agents.len()])
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<String> {
    std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(path.display().to_string())
}

fn cmd_parse(agents: &[String], text: &str) -> Result<Outcome> {
    let mut sig = base_signature(agents);
    let phi = parse_infer(text, &mut sig).map_err(|e| e.to_string())?;
    let cl = closure(&phi.uniquify_binders());
    let mut out = Outcome::new("true", json!({ "size": phi.size(), "closure": cl.len(), "max_priority": cl.max_priority() }));
    out.detail = json!({
        "formula": phi.display(&sig).to_string(),
        "negation": phi.negate().display(&sig).to_string(),
        "agents": sig.agents,
        "moves": sig.moves,
    });
    Ok(out)
}

fn resolve_state(m: &Cgses, initial: Option<usize>, state: Option<&str>) -> Result<usize> {
    match state {
        None => initial.ok_or_else(|| "no --state given and the model has no initial state".to_string()),
        Some(s) => m
            .state_index(s)
            .or_else(|| s.parse().ok().filter(|&i| i < m.n_states()))
            .ok_or_else(|| format!("unknown state {s:?}")),
    }
}

fn cmd_mc(
    model: &Path,
    text: &str,
    state: Option<&str>,
    mode: McMode,
    engine: Engine,
    emit: Option<&Path>,
) -> Result<Outcome> {
    let (m, initial) = Cgses::from_json_with_initial(&read(model)?).map_err(|e| e.to_string())?;
    let phi = parse(text, &m.sig).map_err(|e| e.to_string())?;
    let w = resolve_state(&m, initial, state)?;
    let stats = json!({ "states": m.n_states(), "closure": closure(&phi.uniquify_binders()).len() });
    match mode {
        McMode::Fixed => {
            if !m.has_interp {
                return Err("the model has no move interpretations; use --mode open".into());
            }
            let ext = match engine {
                Engine::Naive => mc::eval(&phi, &m, &Valuation::new()),
                Engine::Game => mc::game_check(&phi, &m),
                Engine::Onestep => mc::eval_one_step(&phi, &m, &Valuation::new()),
            }
            .map_err(|e| e.to_string())?;
            let mut out = Outcome::new(if ext.contains(&w) { "true" } else { "false" }, stats);
            out.detail = json!({ "state": m.names[w], "holds_at": ext.iter().map(|&v| &m.names[v]).collect::<Vec<_>>() });
            Ok(out)
        }
        McMode::Open => {
            let found = mc::open_check(&phi, &m, w).map_err(|e| e.to_string())?;
            let mut out = Outcome::new(if found.is_some() { "true" } else { "false" }, stats);
            out.detail = json!({ "state": m.names[w] });
            if let (Some(witness), Some(path)) = (found, emit) {
                out.witness = Some(write(path, &witness.to_json_with_initial(Some(w)))?);
            }
            Ok(out)
        }
    }
}

fn cmd_sat(agents: &[String], text: &str, emit: Option<&Path>) -> Result<Outcome> {
    let mut sig = base_signature(agents);
    let phi = parse_infer(text, &mut sig).map_err(|e| e.to_string())?;
    sat_outcome(&phi, &sig, emit)
}

fn sat_outcome(phi: &Formula, sig: &Signature, emit: Option<&Path>) -> Result<Outcome> {
    let report = satisfiable(phi, sig).map_err(|e| e.to_string())?;
    let s = &report.stats;
    let stats = json!({
        "closure": s.closure,
        "game_nodes": s.game_nodes,
        "automaton_states": s.automaton_states,
        "model_states": s.model_states,
    });
    Ok(match report.verdict {
        Verdict::Sat { model, initial } => {
            let mut out = Outcome::new("sat", stats);
            if let Some(path) = emit {
                out.witness = Some(write(path, &model.to_json_with_initial(Some(initial)))?);
            }
            out
        }
        Verdict::Unsat => Outcome::new("unsat", stats),
        Verdict::BudgetExceeded(msg) => {
            let mut out = Outcome::new("budget-exceeded", stats);
            out.detail = json!({ "reason": msg });
            out
        }
    })
}

fn cmd_onestep(file: &Path) -> Result<Outcome> {
    let p = OneStepProblem::parse(&read(file)?).map_err(|e| e.to_string())?;
    let stats = json!({ "atoms": p.atoms.len(), "carrier": p.carrier });
    if !one_step_sat(&p) {
        return Ok(Outcome::new("unsat", stats));
    }
    let g = extract_one_step_model(&p).map_err(|e| e.to_string())?;
    let mut out = Outcome::new("sat", stats);
    out.detail = json!({ "k": g.k, "outcome": g.f, "interp": g.interp });
    Ok(out)
}

fn cmd_resolve(file: &Path, mode: ResolveMode, cap: usize, trace: bool) -> Result<Outcome> {
    let p = OneStepProblem::parse(&read(file)?).map_err(|e| e.to_string())?;
    let phi = clauses_from_atoms(&p.sig, &p.atoms, &p.tau);
    let mode = match mode {
        ResolveMode::Sr => Mode::SR,
        ResolveMode::Lsr => Mode::LSR,
        ResolveMode::SrPlus => Mode::SRPlus,
    };
    let input: Vec<String> = phi.iter().map(|c| c.to_string()).collect();
    Ok(match saturate(&phi, mode, cap) {
        Saturation::Consistent(all) => {
            let mut out = Outcome::new("sat", json!({ "input_clauses": phi.len(), "clauses": all.len() }));
            out.detail = json!({ "mode": mode.to_string(), "input": input });
            out
        }
        Saturation::Inconsistent(d) => {
            let mut out = Outcome::new("unsat", json!({ "input_clauses": phi.len(), "clauses": d.clauses.len() }));
            out.detail = json!({ "mode": mode.to_string(), "input": input });
            if trace {
                out.detail["derivation"] = json!(d.dump().lines().collect::<Vec<_>>());
            }
            out
        }
        Saturation::CapExceeded(n) => {
            Outcome::new("budget-exceeded", json!({ "input_clauses": phi.len(), "clauses": n }))
        }
    })
}

fn cmd_corpus(dir: &Path, jobs: Option<usize>) -> Result<Outcome> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| format!("{}: {e}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "txt"))
        .collect();
    files.sort();
    let mut entries: Vec<(String, Entry)> = Vec::new();
    for f in &files {
        let corpus = parse_corpus(&read(f)?).map_err(|e| format!("{}: {e}", f.display()))?;
        entries.extend(corpus.into_iter().map(|e| (f.display().to_string(), e)));
    }
    let jobs = jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())).max(1);
    let chunk = entries.len().div_ceil(jobs).max(1);
    let results: Vec<(&'static str, f64)> = std::thread::scope(|s| {
        let handles: Vec<_> = entries
            .chunks(chunk)
            .map(|part| {
                s.spawn(move || {
                    part.iter()
                        .map(|(_, e)| {
                            let t = Instant::now();
                            let v = sat_outcome(&e.formula, &e.sig, None).map_or("error", |o| o.verdict);
                            (v, t.elapsed().as_secs_f64() * 1e3)
                        })
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().unwrap()).collect()
    });
    let count = |v: &str| results.iter().filter(|r| r.0 == v).count();
    let (sat, unsat, budget, errors) = (count("sat"), count("unsat"), count("budget-exceeded"), count("error"));
    let verdict = if errors > 0 {
        "error"
    } else if budget > 0 {
        "budget-exceeded"
    } else {
        "true"
    };
    let mut out = Outcome::new(
        verdict,
        json!({ "files": files.len(), "formulas": entries.len(), "sat": sat, "unsat": unsat, "budget_exceeded": budget, "errors": errors }),
    );
    out.detail = json!(entries
        .iter()
        .zip(&results)
        .map(|((file, e), (v, ms))| json!({ "file": file, "line": e.line, "verdict": v, "ms": ms }))
        .collect::<Vec<_>>());
    Ok(out)
}

fn cmd_solve_game(file: &Path) -> Result<Outcome> {
    let g = ParityGame::from_pgsolver(&read(file)?)?;
    let sol = g.solve();
    g.verify(&sol)?;
    let won = |p| sol.region(p);
    let verdict = if sol.winner.first() == Some(&amcdes::Owner::Eloise) { "true" } else { "false" };
    let mut out = Outcome::new(verdict, json!({ "nodes": g.len() }));
    out.detail = json!({
        "even": won(amcdes::Owner::Eloise),
        "odd": won(amcdes::Owner::Abelard),
        "strategy": sol.strategy,
    });
    Ok(out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let (name, result) = match &cli.command {
        Command::Parse { formula } => ("parse", cmd_parse(&cli.agents, formula)),
        Command::Mc { model, formula, state, mode, engine, emit_model } => {
            ("mc", cmd_mc(model, formula, state.as_deref(), *mode, *engine, emit_model.as_deref()))
        }
        Command::Sat { formula, emit_model } => ("sat", cmd_sat(&cli.agents, formula, emit_model.as_deref())),
        Command::Onestep { file } => ("onestep", cmd_onestep(file)),
        Command::Resolve { file, mode, cap, trace } => ("resolve", cmd_resolve(file, *mode, *cap, *trace)),
        Command::Corpus { dir, jobs } => ("corpus", cmd_corpus(dir, *jobs)),
        Command::SolveGame { file } => ("solve-game", cmd_solve_game(file)),
    };
    let out = result.unwrap_or_else(|e| {
        eprintln!("amcdes {name}: {e}");
        let mut o = Outcome::new("error", Value::Null);
        o.detail = json!({ "error": e });
        o
    });
    let report = RunReport {
        command: name,
        verdict: out.verdict,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
        stats: out.stats,
        witness: out.witness,
        detail: out.detail,
    };
    let text = if cli.pretty { serde_json::to_string_pretty(&report) } else { serde_json::to_string(&report) };
    println!("{}", text.expect("reports serialize"));
    ExitCode::from(report.exit_code())
}
