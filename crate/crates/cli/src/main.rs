//! `dqgraph`: reproducible experiments in the graph calculus of universal
//! star-products. Every run writes one JSON report embedding the tool version
//! and the full configuration; identical configurations give identical bytes.
//!
//! Exit codes: 0 solved / verified, 2 obstructed / not verified, 1 error.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use dqgraph::eval::{apply_graph, monomial_tuples, oracle_bracket, oracle_compose, oracle_delta};
use dqgraph::graph::enumerate_graphs;
use dqgraph::homological::{graph_compose, graph_delta, graph_gerstenhaber, leibniz_generators};
use dqgraph::mc::{cocycle_kernel, named_series, residual_on_triples, solve_series, verify_order, SolverConfig, StarSeries, Status};
use dqgraph::poisson::parse_preset;
use dqgraph::{canonical_form, parse_graph, Error, GraphFilter, GraphSum, Poly};

const TOOL: &str = "dqgraph";
const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Serialize, Debug)]
#[command(name = "dqgraph", version, about = "Exact graph calculus for universal star-products")]
struct Cli {
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Seed for every randomized choice.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    /// Worker threads (results do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

/// A graph sum given as inline graph text (coefficient 1) or as a path to a
/// GraphSum file.
#[derive(Args, Serialize, Debug)]
struct SumArg {
    /// Graph encoding `n m ; v: a b / ...` or path to a GraphSum file.
    input: String,
}

#[derive(Args, Serialize, Debug)]
struct Evaluation {
    /// Poisson preset, e.g. `so3` or `jacobian(x1*x2*x3)`.
    #[arg(long)]
    preset: Option<String>,
    /// Arguments separated by `;`, e.g. `x1^2;x2;x3`.
    #[arg(long)]
    args: Option<String>,
}

#[derive(Subcommand, Serialize, Debug)]
#[serde(rename_all = "kebab-case", tag = "subcommand")]
enum Command {
    /// Canonical classes of K_{n,m} with labeled counts.
    Enumerate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        /// all | wheel_free | wheels_only | arg_indegree_exactly_one
        #[arg(long, default_value = "all")]
        filter: String,
    },
    /// Canonicalize a graph or graph sum.
    Reduce(SumArg),
    /// Wheel detection for each class of a graph or graph sum.
    Wheels(SumArg),
    /// Apply a graph sum to polynomial arguments on a Poisson preset.
    Eval {
        #[command(flatten)]
        sum: SumArg,
        #[arg(long)]
        preset: String,
        #[arg(long)]
        args: String,
    },
    /// Hochschild differential of a graph sum.
    Delta {
        #[command(flatten)]
        sum: SumArg,
        /// Compare against the operator-level differential on a preset.
        #[command(flatten)]
        check: Evaluation,
    },
    /// Insertion composition `left ∘ right` of graph sums.
    Compose {
        left: String,
        right: String,
        #[command(flatten)]
        check: Evaluation,
    },
    /// Gerstenhaber bracket `[left, right]` of graph sums.
    Bracket {
        left: String,
        right: String,
        #[command(flatten)]
        check: Evaluation,
    },
    /// Leibniz generators with `n` vertices in total and `m` arguments.
    Leibniz {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        m: usize,
        /// Keep only generators whose expansion has no wheel.
        #[arg(long)]
        wheel_free: bool,
    },
    /// Solve the Maurer–Cartan equations order by order.
    SolveMc {
        #[arg(long, default_value_t = 4)]
        max_order: usize,
        /// Restrict unknowns to wheel-free graphs (the default).
        #[arg(long, conflicts_with = "all_graphs")]
        wheel_free: bool,
        /// Allow graphs with wheels.
        #[arg(long)]
        all_graphs: bool,
        #[arg(long, default_value_t = 200_000)]
        max_nonzeros: usize,
        #[arg(long, default_value_t = 16)]
        max_degree_cap: u32,
    },
    /// Check associativity of a series at one order on a preset.
    VerifyAssoc {
        /// Named series (`kontsevich-k2`) or path to a series file.
        #[arg(long)]
        series: String,
        #[arg(long)]
        order: usize,
        #[arg(long)]
        preset: String,
        /// Degree cap for the monomial argument triples.
        #[arg(long, default_value_t = 3)]
        degree: u32,
    },
    /// Kernel of the differential on bidifferential graphs with n vertices.
    CocycleKernel {
        #[arg(long)]
        n: usize,
        /// Allow graphs with wheels.
        #[arg(long)]
        all_graphs: bool,
        #[arg(long)]
        modulo_leibniz: bool,
    },
}

/// The computed part of a report and its exit code.
struct Outcome {
    result: Value,
    code: u8,
}

impl Outcome {
    fn ok(result: Value) -> Self {
        Outcome { result, code: 0 }
    }
}

fn read_sum(source: &str) -> Result<GraphSum, Error> {
    if source.contains(';') && fs::metadata(source).is_err() {
        return Ok(GraphSum::from_graph(&parse_graph(source)?));
    }
    let text = fs::read_to_string(source)
        .map_err(|e| Error::InvalidParameter(format!("cannot read `{source}`: {e}")))?;
    GraphSum::parse(&text, None)
}

fn read_series(source: &str) -> Result<StarSeries, Error> {
    match named_series(source) {
        Ok(s) => Ok(s),
        Err(_) if fs::metadata(source).is_ok() => {
            let text = fs::read_to_string(source)
                .map_err(|e| Error::InvalidParameter(format!("cannot read `{source}`: {e}")))?;
            StarSeries::parse(&text)
        }
        Err(e) => Err(e),
    }
}

fn parse_args(text: &str, d: usize) -> Result<Vec<Poly>, Error> {
    text.split(';').map(|a| Poly::parse(a.trim(), d)).collect()
}

fn sum_json(sum: &GraphSum) -> Value {
    json!({ "terms": sum.len(), "sum": sum.to_string() })
}

/// Evaluates both sides of an identity when `--preset` and `--args` are set.
fn check_json(
    check: &Evaluation,
    graph_side: &GraphSum,
    oracle: impl Fn(&dqgraph::poisson::PoissonStructure, &[Poly]) -> Result<Poly, Error>,
) -> Result<Option<Value>, Error> {
    let (Some(preset), Some(args)) = (&check.preset, &check.args) else {
        if check.preset.is_some() || check.args.is_some() {
            return Err(Error::InvalidParameter("--preset and --args go together".into()));
        }
        return Ok(None);
    };
    let p = parse_preset(preset)?;
    let args = parse_args(args, p.dim())?;
    let graph_value = apply_graph(graph_side, &p, &args)?;
    let oracle_value = oracle(&p, &args)?;
    Ok(Some(json!({
        "preset": p.name(),
        "graph_value": graph_value.to_string(),
        "oracle_value": oracle_value.to_string(),
        "agrees": graph_value == oracle_value,
    })))
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    match &cli.command {
        Command::Enumerate { n, m, filter } => {
            let filter: GraphFilter = filter.parse()?;
            let e = enumerate_graphs(*n, *m, filter)?;
            Ok(Outcome::ok(json!({
                "n": n,
                "m": m,
                "filter": filter,
                "labeled_count": e.labeled_count,
                "class_count": e.classes.len(),
                "classes": e.classes.iter().map(ToString::to_string).collect::<Vec<_>>(),
            })))
        }
        Command::Reduce(arg) => {
            let sum = read_sum(&arg.input)?;
            let mut out = sum_json(&sum);
            if let Ok(g) = parse_graph(&arg.input) {
                let class = canonical_form(&g);
                out["input"] = json!(g.to_string());
                out["representative"] = json!(class.rep.to_string());
                out["sign"] = json!(class.sign);
            }
            Ok(Outcome::ok(out))
        }
        Command::Wheels(arg) => {
            let sum = read_sum(&arg.input)?;
            let classes: Vec<Value> =
                sum.terms().map(|(g, _)| json!({ "graph": g.to_string(), "has_wheel": g.has_wheel() })).collect();
            Ok(Outcome::ok(json!({ "wheel_free": sum.is_wheel_free(), "classes": classes })))
        }
        Command::Eval { sum, preset, args } => {
            let s = read_sum(&sum.input)?;
            let p = parse_preset(preset)?;
            let args = parse_args(args, p.dim())?;
            let value = apply_graph(&s, &p, &args)?;
            Ok(Outcome::ok(json!({ "preset": p.name(), "value": value.to_string() })))
        }
        Command::Delta { sum, check } => {
            let s = read_sum(&sum.input)?;
            let d = graph_delta(&s);
            let mut out = sum_json(&d);
            if let Some(c) = check_json(check, &d, |p, a| oracle_delta(&s, p, a))? {
                out["check"] = c;
            }
            Ok(Outcome::ok(out))
        }
        Command::Compose { left, right, check } => {
            let (l, r) = (read_sum(left)?, read_sum(right)?);
            let c = graph_compose(&l, &r);
            let mut out = sum_json(&c);
            if let Some(v) = check_json(check, &c, |p, a| oracle_compose(&l, &r, p, a))? {
                out["check"] = v;
            }
            Ok(Outcome::ok(out))
        }
        Command::Bracket { left, right, check } => {
            let (l, r) = (read_sum(left)?, read_sum(right)?);
            let b = graph_gerstenhaber(&l, &r);
            let mut out = sum_json(&b);
            if let Some(v) = check_json(check, &b, |p, a| oracle_bracket(&l, &r, p, a))? {
                out["check"] = v;
            }
            Ok(Outcome::ok(out))
        }
        Command::Leibniz { n, m, wheel_free } => {
            let gens = leibniz_generators(*n, *m, *wheel_free)?;
            let list: Vec<Value> = gens
                .iter()
                .map(|g| json!({ "skeleton": g.skeleton.to_string(), "expansion": g.expansion.to_string() }))
                .collect();
            Ok(Outcome::ok(json!({ "count": gens.len(), "generators": list })))
        }
        Command::SolveMc { max_order, all_graphs, max_nonzeros, max_degree_cap, .. } => {
            let config = SolverConfig {
                wheel_free: !all_graphs,
                max_nonzeros: *max_nonzeros,
                max_order: *max_order,
                seed: cli.seed,
                max_degree_cap: *max_degree_cap,
            };
            let (series, reports) = solve_series(*max_order, &config)?;
            let obstructed = reports.iter().any(|r| r.status == Status::Obstructed);
            Ok(Outcome {
                result: json!({
                    "solver": config,
                    "status": if obstructed { "obstructed" } else { "solved" },
                    "reports": reports,
                    "series": series.to_string(),
                }),
                code: if obstructed { 2 } else { 0 },
            })
        }
        Command::VerifyAssoc { series, order, preset, degree } => {
            let s = read_series(series)?;
            let p = parse_preset(preset)?;
            let failing = residual_on_triples(&s, *order, &p, *degree)?;
            let graph_level = verify_order(&s, *order)?;
            let checked = monomial_tuples(p.dim(), 3, *degree).len();
            let verified = failing.is_empty() && graph_level;
            let examples: Vec<Vec<String>> =
                failing.iter().take(5).map(|t| t.iter().map(ToString::to_string).collect()).collect();
            Ok(Outcome {
                result: json!({
                    "order": order,
                    "preset": p.name(),
                    "degree": degree,
                    "triples_checked": checked,
                    "failing_triples": failing.len(),
                    "failing_examples": examples,
                    "graph_level_verified": graph_level,
                    "verified": verified,
                }),
                code: if verified { 0 } else { 2 },
            })
        }
        Command::CocycleKernel { n, all_graphs, modulo_leibniz } => {
            let basis = cocycle_kernel(*n, !all_graphs, *modulo_leibniz)?;
            Ok(Outcome::ok(json!({
                "n": n,
                "wheel_free": !all_graphs,
                "modulo_leibniz": modulo_leibniz,
                "dimension": basis.len(),
                "basis": basis.iter().map(ToString::to_string).collect::<Vec<_>>(),
            })))
        }
    }
}

fn emit(report: &Value, output: Option<&PathBuf>) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(report).expect("reports serialize");
    text.push('\n');
    match output {
        Some(path) => fs::write(path, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    }
}

fn error_record(kind: &str, message: String) -> Value {
    json!({ "kind": kind, "message": message })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let report = json!({
                "tool": TOOL,
                "version": VERSION,
                "error": error_record("usage", e.render().to_string().trim().to_string()),
            });
            let _ = emit(&report, None);
            return ExitCode::from(1);
        }
    };
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("dqgraph: cannot configure threads: {e}");
        }
    }
    let config = serde_json::to_value(&cli).expect("config serializes");
    let (report, code) = match run(&cli) {
        Ok(outcome) => {
            (json!({ "tool": TOOL, "version": VERSION, "config": config, "result": outcome.result }), outcome.code)
        }
        Err(e) => (
            json!({ "tool": TOOL, "version": VERSION, "config": config, "error": error_record(e.kind(), e.to_string()) }),
            1,
        ),
    };
    if let Err(e) = emit(&report, cli.output.as_ref()) {
        eprintln!("dqgraph: cannot write report: {e}");
        return ExitCode::from(1);
    }
    ExitCode::from(code)
}
