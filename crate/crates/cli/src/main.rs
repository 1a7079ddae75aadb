use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Deserialize;
use serde_json::{json, Value};

use fixsize_core::gadgets::{
    accepted_by_conditions, accepted_set_in, all_functions, by_name, standalone, CandidateFunction, GadgetError,
    GadgetParams, Harness, PortKind,
};
use fixsize_core::index_coding::{solvable_at_k, IndexError, IndexInstance};
use fixsize_core::network::{canonicalize, deserialize, serialize, to_dot, validate, Network};
use fixsize_core::solver::{solve_at_k, sweep, SolveError, SolveOptions, SolveOutcome, SweepError};
use fixsize_core::tiling::{reduce_with_layout, torus_bruteforce, ConditionProgram, TilingError};

/// Largest candidate family `verify-checker` builds by default.
const MAX_FAMILY: usize = 1 << 16;

#[derive(Parser)]
#[command(name = "fixsize", version, about = "Exact tools for partially fixed-size network coding")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct SearchFlags {
    /// Stop after this many value trials (exit 2 when hit).
    #[arg(long)]
    budget: Option<u64>,
    /// Search every table instead of one per relabelling class.
    #[arg(long)]
    no_symmetry: bool,
    /// Return the witness a single worker would find.
    #[arg(long)]
    deterministic: bool,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

impl SearchFlags {
    fn options(&self) -> SolveOptions {
        SolveOptions {
            symmetry_breaking: !self.no_symmetry,
            node_budget: self.budget,
            deterministic: self.deterministic,
            jobs: self.jobs.max(1),
            ..SolveOptions::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check a network file for structural violations.
    Validate { net: PathBuf },
    /// Decide solvability at one default size.
    Solve {
        net: PathBuf,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        search: SearchFlags,
    },
    /// Try k = 1, 2, ... up to a bound.
    Sweep {
        net: PathBuf,
        #[arg(long)]
        k_max: usize,
        #[command(flatten)]
        search: SearchFlags,
    },
    /// Write a catalog gadget as a self-contained network.
    GadgetBuild {
        name: String,
        #[arg(long)]
        b: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        /// JSON list of allowed switch-state patterns.
        #[arg(long)]
        theta: Option<PathBuf>,
        #[arg(long)]
        w: Option<usize>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Accepted candidates of a checker, by network search and by its conditions.
    VerifyChecker {
        name: String,
        #[arg(long)]
        k: usize,
        /// JSON list of candidate vectors; defaults to every function.
        #[arg(long)]
        family: Option<PathBuf>,
        #[arg(long)]
        b: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        theta: Option<PathBuf>,
        #[arg(long)]
        w: Option<usize>,
    },
    /// Compile a torus condition program into a network.
    Reduce {
        program: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Search for a coloring of one torus size.
    Torus {
        program: PathBuf,
        #[arg(long)]
        width: usize,
        #[arg(long)]
        height: usize,
    },
    /// Decide an index-coding instance at one default size.
    Index {
        instance: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Render a network as Graphviz DOT.
    ExportDot {
        net: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

enum Failure {
    /// No answer within the configured bounds.
    Exhausted(String),
    Input(String),
}

type Outcome = Result<(Value, u8), Failure>;

fn input(e: impl ToString) -> Failure {
    Failure::Input(e.to_string())
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_net(path: &Path) -> Result<Network, Failure> {
    deserialize(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn searchable(net: &Network) -> Result<Network, Failure> {
    let report = validate(net);
    if !report.ok {
        return Err(Failure::Input(format!("invalid network: {}", json!(report))));
    }
    canonicalize(net).map_err(input)
}

fn solve_error(e: SolveError) -> Failure {
    match e {
        SolveError::BudgetExhausted => Failure::Exhausted("search budget exhausted".into()),
        SolveError::TooLarge(m) => Failure::Exhausted(format!("too large: {m}")),
        e => input(e),
    }
}

fn gadget_error(e: GadgetError) -> Failure {
    match e {
        GadgetError::Candidate(m) => Failure::Exhausted(m),
        GadgetError::Solve(s) => solve_error(s),
        e => input(e),
    }
}

fn outcome_json(k: usize, out: &SolveOutcome) -> Value {
    let mut v = json!({ "k": k, "status": out.status() });
    if let Some(s) = out.witness() {
        v["scheme"] = json!(s);
    }
    v
}

fn exit_for(out: &SolveOutcome) -> u8 {
    match out {
        SolveOutcome::Solvable(_) => 0,
        SolveOutcome::UnsolvableAtK => 1,
        SolveOutcome::BudgetExhausted => 2,
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Pattern {
    Bools(Vec<bool>),
    Bits(Vec<u8>),
}

fn load_theta(path: &Path) -> Result<Vec<Vec<bool>>, Failure> {
    let raw: Vec<Pattern> = serde_json::from_str(&read(path)?).map_err(input)?;
    raw.into_iter()
        .map(|p| match p {
            Pattern::Bools(b) => Ok(b),
            Pattern::Bits(b) if b.iter().all(|&x| x <= 1) => Ok(b.into_iter().map(|x| x == 1).collect()),
            Pattern::Bits(_) => Err(Failure::Input("theta entries must be 0 or 1".into())),
        })
        .collect()
}

fn params(b: Option<usize>, n: Option<usize>, w: Option<usize>, theta: Option<&Path>) -> Result<GadgetParams, Failure> {
    Ok(GadgetParams { b, n, w, theta: theta.map(load_theta).transpose()? })
}

fn cmd_solve(net: &Path, k: usize, search: &SearchFlags) -> Outcome {
    if k == 0 {
        return Err(Failure::Input("--k must be positive".into()));
    }
    let raw = load_net(net)?;
    let net = searchable(&raw)?;
    let out = solve_at_k(&net, k, &search.options()).map_err(solve_error)?;
    let mut v = outcome_json(k, &out);
    // Witness tables refer to the canonical form's edge ids.
    v["canonicalized"] = json!(net != raw);
    Ok((v, exit_for(&out)))
}

fn cmd_sweep(net: &Path, k_max: usize, search: &SearchFlags) -> Outcome {
    if k_max == 0 {
        return Err(Failure::Input("--k-max must be positive".into()));
    }
    let net = searchable(&load_net(net)?)?;
    let runs = match sweep(&net, k_max, &search.options()) {
        Ok(r) => r,
        Err(SweepError::BudgetExhausted { k }) => return Err(Failure::Exhausted(format!("budget exhausted at k = {k}"))),
        Err(SweepError::Solve { k, source }) => {
            return Err(match solve_error(source) {
                Failure::Exhausted(m) => Failure::Exhausted(format!("k = {k}: {m}")),
                Failure::Input(m) => Failure::Input(format!("k = {k}: {m}")),
            })
        }
    };
    let found = runs.iter().find(|(_, o)| o.is_solvable()).map(|(k, _)| *k);
    let exhausted = runs.iter().any(|(_, o)| *o == SolveOutcome::BudgetExhausted);
    let results: Vec<Value> = runs.iter().map(|(k, o)| outcome_json(*k, o)).collect();
    let mut v = json!({ "k_max": k_max, "results": results, "found": found });
    if found.is_none() {
        let note = format!("not found for k <= {k_max}; this does not show the network is unsolvable");
        eprintln!("{note}");
        v["note"] = json!(note);
    }
    let code = if found.is_some() {
        0
    } else if exhausted {
        2
    } else {
        1
    };
    Ok((v, code))
}

fn cmd_gadget_build(name: &str, p: GadgetParams, output: &Path) -> Outcome {
    let g = by_name(name, &p).map_err(gadget_error)?;
    let net = standalone(&g).map_err(gadget_error)?;
    write(output, &serialize(&net).map_err(input)?)?;
    let ports: Vec<Value> = g.ports.iter().map(|p| json!({ "name": p.name, "kind": p.kind, "size": p.size })).collect();
    let v = json!({
        "gadget": g.name,
        "checker": g.is_checker(),
        "ports": ports,
        "nodes": net.nodes.len(),
        "edges": net.edges.len(),
        "output": output.display().to_string(),
    });
    Ok((v, 0))
}

fn cmd_verify_checker(name: &str, p: GadgetParams, k: usize, family: Option<&Path>) -> Outcome {
    if k == 0 {
        return Err(Failure::Input("--k must be positive".into()));
    }
    let g = by_name(name, &p).map_err(gadget_error)?;
    if !g.is_checker() {
        return Err(Failure::Input(format!("{} has outputs; pass a checker", g.name)));
    }
    let h = Harness::for_checker(&g);
    let family: Vec<Vec<CandidateFunction>> = match family {
        Some(path) => serde_json::from_str(&read(path)?).map_err(input)?,
        None => {
            let mut fam = vec![Vec::new()];
            for port in g.ports.iter().filter(|p| p.kind == PortKind::SignalIn) {
                let alphabet = port.size.resolve(k).unwrap_or(2);
                let fs = all_functions(&h, k, &port.name, alphabet).map_err(gadget_error)?;
                if fam.len().saturating_mul(fs.len()) > MAX_FAMILY {
                    return Err(Failure::Exhausted(format!("candidate family exceeds {MAX_FAMILY}")));
                }
                fam = fam.into_iter().flat_map(|c| fs.iter().map(move |f| [c.clone(), vec![f.clone()]].concat())).collect();
            }
            fam
        }
    };
    let net = accepted_set_in(&g, &h, &family, k).map_err(gadget_error)?;
    let ent = accepted_by_conditions(&g, &h, &family, k).map_err(gadget_error)?;
    let agree = net == ent;
    let tables: Vec<Value> = net
        .iter()
        .map(|&i| family[i].iter().map(|f| (f.output.clone(), json!(f.table))).collect::<serde_json::Map<_, _>>().into())
        .collect();
    let v = json!({
        "checker": g.name,
        "k": k,
        "candidates": family.len(),
        "accepted": net,
        "accepted_tables": tables,
        "condition_accepted": ent,
        "oracles_agree": agree,
    });
    Ok((v, if agree { 0 } else { 1 }))
}

fn tiling_error(e: TilingError) -> Failure {
    match e {
        TilingError::Cap(..) => Failure::Exhausted(e.to_string()),
        e => input(e),
    }
}

fn cmd_reduce(program: &Path, output: &Path) -> Outcome {
    let program = ConditionProgram::from_json(&read(program)?).map_err(tiling_error)?;
    let (net, layout) = reduce_with_layout(&program).map_err(tiling_error)?;
    write(output, &serialize(&net).map_err(input)?)?;
    let v = json!({
        "colors": program.colors,
        "conditions": program.conditions.len(),
        "switches": layout.switches.len(),
        "nodes": net.nodes.len(),
        "edges": net.edges.len(),
        "layout": layout,
        "output": output.display().to_string(),
    });
    Ok((v, 0))
}

fn cmd_torus(program: &Path, width: usize, height: usize) -> Outcome {
    let program = ConditionProgram::from_json(&read(program)?).map_err(tiling_error)?;
    let found = torus_bruteforce(&program, width, height).map_err(tiling_error)?;
    let code = if found.is_some() { 0 } else { 1 };
    Ok((json!({ "width": width, "height": height, "found": found.is_some(), "coloring": found }), code))
}

fn cmd_index(instance: &Path, k: usize) -> Outcome {
    let inst = IndexInstance::from_json(&read(instance)?).map_err(input)?;
    let out = solvable_at_k(&inst, k).map_err(|e| match e {
        IndexError::Cap(_) => Failure::Exhausted(e.to_string()),
        e => input(e),
    })?;
    let code = if out.solvable { 0 } else { 1 };
    Ok((json!(out), code))
}

fn cmd_export_dot(net: &Path, output: Option<&Path>) -> Outcome {
    let dot = to_dot(&load_net(net)?);
    if let Some(path) = output {
        write(path, &dot)?;
    }
    Ok((json!({ "format": "dot", "dot": dot }), 0))
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Validate { net } => {
            let report = validate(&load_net(&net)?);
            let code = if report.ok { 0 } else { 1 };
            Ok((json!(report), code))
        }
        Command::Solve { net, k, search } => cmd_solve(&net, k, &search),
        Command::Sweep { net, k_max, search } => cmd_sweep(&net, k_max, &search),
        Command::GadgetBuild { name, b, n, theta, w, output } => {
            cmd_gadget_build(&name, params(b, n, w, theta.as_deref())?, &output)
        }
        Command::VerifyChecker { name, k, family, b, n, theta, w } => {
            cmd_verify_checker(&name, params(b, n, w, theta.as_deref())?, k, family.as_deref())
        }
        Command::Reduce { program, output } => cmd_reduce(&program, &output),
        Command::Torus { program, width, height } => cmd_torus(&program, width, height),
        Command::Index { instance, k } => cmd_index(&instance, k),
        Command::ExportDot { net, output } => cmd_export_dot(&net, output.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    let (value, code) = match run(cli) {
        Ok(r) => r,
        Err(Failure::Exhausted(m)) => {
            eprintln!("error: {m}");
            (json!({ "status": "exhausted", "error": m }), 2)
        }
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            (json!({ "status": "input_error", "error": m }), 3)
        }
    };
    let text = serde_json::to_string_pretty(&value).expect("json values serialize");
    // A closed stdout (e.g. piped into `head`) is not an error of the command.
    let _ = writeln!(std::io::stdout().lock(), "{text}");
    ExitCode::from(code)
}
