//! Front end for the `gonality` library. [`run`] parses arguments, dispatches to one
//! library operation per subcommand and returns the process exit code:
//! 0 on success, 1 when a verification fails, 2 on usage or input errors.

mod dot;
mod io;

use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use gonality::banana::{
    build_qb, cp_witness, recognize_qb, verify_attach_lemma, verify_theorem_b, AttachOptions, TheoremBOptions,
};
use gonality::chipfire::{equivalent, reduce};
use gonality::explore::{hex_code, subdivision_study, survey, test_conjecture, SearchSpec, TightOutcome};
use gonality::multigraph::complete_graph;
use gonality::ranks::strategy::DEFAULT_STRATEGY;
use gonality::ranks::{gonality_from, gonality_sequence, RankEngine, RankStrategy, StrategyRegistry};
use gonality::{Divisor, Error, Multigraph};
use serde_json::{json, Value};

pub use dot::{emit_dot, MAX_DRAWN_PARALLEL};
pub use io::{graph_from_str, parse_divisor, parse_graph_file, ParseError, ParseErrorKind};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] Error),
    /// The command ran, and what it checked does not hold.
    #[error("{0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Parse(_) | CliError::Io(_) => 2,
            CliError::Core(
                Error::InvalidArgument(_)
                | Error::IndexOutOfRange(_)
                | Error::UnknownEndpoint(_)
                | Error::NonPositiveLayer
                | Error::TooLarge { .. },
            ) => 2,
            CliError::Core(_) | CliError::Verification(_) => 1,
        }
    }
}

type CliResult = Result<Report, CliError>;

/// What a command produced: machine-readable JSON, a human summary, and whether it passed.
pub struct Report {
    json: Value,
    text: String,
    ok: bool,
}

impl Report {
    fn new(json: Value, text: impl Into<String>) -> Self {
        Report { json, text: text.into(), ok: true }
    }

    fn failed_if(mut self, failed: bool) -> Self {
        self.ok = !failed;
        self
    }
}

#[derive(Debug, Parser)]
#[command(name = "gonality", version, about = "Divisors, ranks and gonality sequences on multigraphs")]
pub struct Cli {
    /// Emit machine-readable JSON instead of a summary.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for parallel searches.
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,
    /// Rank strategy by name (see `strategies`).
    #[arg(long, global = true, default_value = DEFAULT_STRATEGY, value_name = "NAME")]
    rank_strategy: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Vertex and edge counts, genus, spanning trees, canonical code.
    Info { graph: PathBuf },
    /// Reduced form of a divisor and the firing script reaching it.
    Reduce {
        graph: PathBuf,
        divisor: String,
        /// Base vertex label (default: first vertex).
        #[arg(long)]
        base: Option<String>,
    },
    /// Baker-Norine rank.
    Rank { graph: PathBuf, divisor: String },
    /// Linear equivalence of two divisors.
    Equiv { graph: PathBuf, first: String, second: String },
    /// Whether the divisor is equivalent to an effective one.
    Winnable { graph: PathBuf, divisor: String },
    /// The r-th gonality with a lexicographically smallest witness.
    Gonality {
        graph: PathBuf,
        #[arg(long, default_value_t = 1)]
        r: i64,
        #[arg(long)]
        max_degree: Option<i64>,
    },
    /// gon_1, ..., gon_R.
    Gonseq {
        graph: PathBuf,
        #[arg(long)]
        up_to: i64,
    },
    /// Quasi-banana graphs.
    #[command(subcommand)]
    Qb(QbCommand),
    /// Enumerate small multigraphs and test the gonality-tight conjecture on each tight one.
    Search(SearchArgs),
    /// Subdivide a quasi-banana graph and report its first two gonalities.
    StudySubdivision {
        graph: PathBuf,
        #[arg(long)]
        times: usize,
    },
    /// Graphviz rendering, optionally with a divisor overlay.
    ExportDot {
        graph: PathBuf,
        #[arg(long)]
        divisor: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Registered rank strategies.
    Strategies,
}

#[derive(Debug, Subcommand)]
enum QbCommand {
    /// Build QB_m(q_1, ..., q_m).
    Build {
        layers: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recover the layer sizes of a quasi-banana graph.
    Recognize { graph: PathBuf },
    /// Check genus, gonality sequence, uniqueness and powers of the second-gonality divisor.
    Verify {
        graph: PathBuf,
        /// Largest r below the genus whose gonality is searched.
        #[arg(long, default_value_t = 5)]
        depth: i64,
    },
    /// Attach K_n at a vertex and check the resulting genus, canonical class and rank bounds.
    Attach {
        graph: PathBuf,
        #[arg(long)]
        at: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: i64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rank obstruction on K_n by firing v1.
    CpWitness {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        l: i64,
        #[arg(long)]
        divisor: String,
    },
}

#[derive(Debug, Args)]
struct SearchArgs {
    #[arg(long, default_value_t = 4)]
    max_vertices: usize,
    #[arg(long, default_value_t = 4)]
    max_mult: u32,
    #[arg(long, default_value_t = 8)]
    max_edges: u64,
    #[arg(long, default_value_t = 5)]
    rank_budget: i64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Runs with the process's standard streams.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run_with(argv, &mut std::io::stdout(), &mut std::io::stderr())
}

pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    let result = match cli.jobs {
        Some(0) => Err(CliError::Usage("--jobs must be at least 1".into())),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(&cli)),
            Err(e) => Err(CliError::Io(e.to_string())),
        },
        None => dispatch(&cli),
    };
    match result {
        Ok(report) => {
            let written = if cli.json {
                writeln!(out, "{}", serde_json::to_string_pretty(&report.json).expect("reports serialise"))
            } else {
                writeln!(out, "{}", report.text.trim_end())
            };
            if written.is_err() {
                return 2;
            }
            if report.ok {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn strategy(cli: &Cli) -> Result<Arc<dyn RankStrategy>, CliError> {
    let registry = StrategyRegistry::builtin();
    registry.get(&cli.rank_strategy).ok_or_else(|| {
        CliError::Usage(format!("unknown rank strategy `{}`; known: {}", cli.rank_strategy, registry.names().join(", ")))
    })
}

fn write_file(path: &PathBuf, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn millis(start: Instant) -> u64 {
    start.elapsed().as_millis() as u64
}

fn labels_json(g: &Multigraph, d: &Divisor) -> Value {
    json!(d.to_label_map(g))
}

fn dispatch(cli: &Cli) -> CliResult {
    match &cli.command {
        Command::Info { graph } => info(&parse_graph_file(graph)?),
        Command::Reduce { graph, divisor, base } => {
            let g = parse_graph_file(graph)?;
            let d = parse_divisor(&g, divisor)?;
            let q = match base {
                Some(label) => g.vertex(label)?,
                None => 0,
            };
            let (r, script) = reduce(&g, &d, q)?;
            let times: std::collections::BTreeMap<&str, i64> = script
                .times_fired()
                .iter()
                .enumerate()
                .filter(|(_, &t)| t != 0)
                .map(|(v, &t)| (g.label(v), t))
                .collect();
            Ok(Report::new(
                json!({
                    "base": g.label(q),
                    "degree": d.degree(),
                    "input": labels_json(&g, &d),
                    "reduced": labels_json(&g, &r),
                    "script": times,
                }),
                r.display(&g),
            ))
        }
        Command::Rank { graph, divisor } => {
            let g = parse_graph_file(graph)?;
            let d = parse_divisor(&g, divisor)?;
            let start = Instant::now();
            let engine = RankEngine::new(&g, strategy(cli)?)?;
            let rank = engine.rank(&d)?;
            Ok(Report::new(
                json!({
                    "divisor": labels_json(&g, &d),
                    "degree": d.degree(),
                    "rank": rank,
                    "strategy": engine.strategy().name(),
                    "elapsed_ms": millis(start),
                }),
                rank.to_string(),
            ))
        }
        Command::Equiv { graph, first, second } => {
            let g = parse_graph_file(graph)?;
            let (a, b) = (parse_divisor(&g, first)?, parse_divisor(&g, second)?);
            let same = equivalent(&g, &a, &b)?;
            Ok(Report::new(json!({ "equivalent": same }), same.to_string()))
        }
        Command::Winnable { graph, divisor } => {
            let g = parse_graph_file(graph)?;
            let d = parse_divisor(&g, divisor)?;
            let (r, _) = reduce(&g, &d, 0)?;
            let winnable = r.get(0) >= 0;
            Ok(Report::new(
                json!({ "winnable": winnable, "base": g.label(0), "reduced": labels_json(&g, &r) }),
                winnable.to_string(),
            ))
        }
        Command::Gonality { graph, r, max_degree } => {
            let g = parse_graph_file(graph)?;
            let start = Instant::now();
            let engine = RankEngine::new(&g, strategy(cli)?)?;
            let w = gonality_from(&engine, *r, 1, *max_degree)?;
            Ok(Report::new(
                json!({
                    "r": w.r,
                    "degree": w.degree,
                    "witness": labels_json(&g, &w.divisor),
                    "verified": w.verified,
                    "strategy": engine.strategy().name(),
                    "elapsed_ms": millis(start),
                }),
                format!("gon_{} = {} (witness {})", w.r, w.degree, w.divisor.display(&g)),
            ))
        }
        Command::Gonseq { graph, up_to } => {
            let g = parse_graph_file(graph)?;
            let start = Instant::now();
            let engine = RankEngine::new(&g, strategy(cli)?)?;
            let seq = gonality_sequence(&engine, *up_to)?;
            let witnesses: Vec<Value> = seq.entries.iter().map(|w| json!(w.to_json(&g))).collect();
            let values = seq.values();
            Ok(Report::new(
                json!({
                    "values": values,
                    "witnesses": witnesses,
                    "strategy": engine.strategy().name(),
                    "elapsed_ms": millis(start),
                }),
                format!("{values:?}"),
            ))
        }
        Command::Qb(cmd) => qb(cmd),
        Command::Search(args) => search(args),
        Command::StudySubdivision { graph, times } => {
            let g = parse_graph_file(graph)?;
            let r = subdivision_study(&g, *times)?;
            let text = format!(
                "subdivided {} times: {} vertices, genus {}, gon_1 {}, gon_2 {}, tight {}, original divisor still realises gon_2: {}",
                r.times, r.vertices, r.genus, r.gon1, r.gon2, r.tight, r.still_realises_gon2
            );
            Ok(Report::new(json!(r), text))
        }
        Command::ExportDot { graph, divisor, out } => {
            let g = parse_graph_file(graph)?;
            let d = divisor.as_deref().map(|s| parse_divisor(&g, s)).transpose()?;
            let dot = emit_dot(&g, d.as_ref());
            if let Some(path) = out {
                write_file(path, &dot)?;
            }
            Ok(Report::new(json!({ "dot": dot }), dot))
        }
        Command::Strategies => {
            let registry = StrategyRegistry::builtin();
            let list: Vec<Value> =
                registry.iter().map(|s| json!({ "name": s.name(), "description": s.description() })).collect();
            let text = registry.iter().map(|s| format!("{}: {}", s.name(), s.description())).collect::<Vec<_>>();
            Ok(Report::new(json!({ "default": DEFAULT_STRATEGY, "strategies": list }), text.join("\n")))
        }
    }
}

fn info(g: &Multigraph) -> CliResult {
    let genus = g.genus().ok();
    let trees = if g.is_connected() { Some(g.spanning_tree_count()?.to_string()) } else { None };
    let code = hex_code(g).ok();
    let qb = recognize_qb(g).map(|p| json!({ "layers": p.layers, "labeling": p.labels(g) }));
    let text = format!(
        "{} vertices, {} edges, connected {}, genus {}, spanning trees {}, quasi-banana {}",
        g.vertex_count(),
        g.edge_count(),
        g.is_connected(),
        genus.map_or("-".into(), |x| x.to_string()),
        trees.clone().unwrap_or_else(|| "0".into()),
        qb.as_ref().map_or("no".into(), |q| format!("{}", q["layers"])),
    );
    Ok(Report::new(
        json!({
            "vertices": g.labels(),
            "vertex_count": g.vertex_count(),
            "edge_count": g.edge_count(),
            "connected": g.is_connected(),
            "genus": genus,
            "spanning_trees": trees,
            "canonical_code": code,
            "quasi_banana": qb,
        }),
        text,
    ))
}

fn qb(cmd: &QbCommand) -> CliResult {
    match cmd {
        QbCommand::Build { layers, out } => {
            let (g, _) = build_qb(layers)?;
            let graph = io::graph_json(&g);
            if let Some(path) = out {
                write_file(path, &serde_json::to_string_pretty(&graph).expect("graph files serialise"))?;
            }
            let text = format!("QB_{}{:?}: {} vertices, {} edges", layers.len(), layers, g.vertex_count(), g.edge_count());
            Ok(Report::new(graph, text))
        }
        QbCommand::Recognize { graph } => {
            let g = parse_graph_file(graph)?;
            match recognize_qb(&g) {
                Some(p) => Ok(Report::new(
                    json!({ "quasi_banana": true, "layers": p.layers, "labeling": p.labels(&g) }),
                    format!("quasi-banana with layers {:?}", p.layers),
                )),
                None => Ok(Report::new(
                    json!({ "quasi_banana": false, "layers": null, "labeling": null }),
                    "not a quasi-banana graph",
                )
                .failed_if(true)),
            }
        }
        QbCommand::Verify { graph, depth } => {
            let g = parse_graph_file(graph)?;
            let opts = TheoremBOptions { depth: *depth, ..TheoremBOptions::default() };
            let r = verify_theorem_b(&g, opts)?;
            let mut value = json!(r);
            value["params"] = json!({ "layers": r.params.layers, "labeling": r.params.labels(&g) });
            value["passes"] = json!(r.passes());
            let text = format!(
                "k = {}: genus {} [{}], sequence {:?} [{}], uniqueness [{}], powers [{}], (k-2)D ~ K [{}]",
                r.k,
                r.genus,
                verdict(r.genus_ok),
                r.sequence.iter().map(|s| s.actual).collect::<Vec<_>>(),
                verdict(r.sequence_ok),
                if r.uniqueness.skipped { "skipped for k = 2" } else { verdict(r.uniqueness_ok) },
                verdict(r.powers_ok),
                verdict(r.canonical_ok),
            );
            Ok(Report::new(value, text).failed_if(!r.passes()))
        }
        QbCommand::Attach { graph, at, n, k, out } => {
            let gp = parse_graph_file(graph)?;
            let r = verify_attach_lemma(&gp, at, *n, *k, AttachOptions::default())?;
            let graph_value = io::graph_json(&r.graph);
            if let Some(path) = out {
                write_file(path, &serde_json::to_string_pretty(&graph_value).expect("graph files serialise"))?;
            }
            let canonical: Vec<Value> =
                r.canonical.iter().map(|(v, ok)| json!({ "vertex": v, "equivalent": ok })).collect();
            let checked = r.ranks.iter().filter(|x| x.rank.is_some()).count();
            let text = format!(
                "genus {} [{}], canonical class [{}], rank bounds [{}] ({} of {} checked)",
                r.genus,
                verdict(r.genus_ok),
                verdict(r.canonical_ok),
                verdict(r.ranks_ok),
                checked,
                r.ranks.len()
            );
            Ok(Report::new(
                json!({
                    "graph": graph_value,
                    "genus": r.genus,
                    "genus_ok": r.genus_ok,
                    "canonical": canonical,
                    "canonical_ok": r.canonical_ok,
                    "ranks": r.ranks,
                    "ranks_ok": r.ranks_ok,
                    "passes": r.passes(),
                }),
                text,
            )
            .failed_if(!r.passes()))
        }
        QbCommand::CpWitness { n, l, divisor } => {
            if *n == 0 {
                return Err(CliError::Usage("--n must be positive".into()));
            }
            let g = complete_graph(*n);
            let d = parse_divisor(&g, divisor)?;
            let bound = l * (l + 1) / 2;
            match cp_witness(&g, &d, *l) {
                Ok(w) => {
                    let validated = w.validate(&g, &d, *l)?;
                    let order: Vec<&str> = w.order.iter().map(|&v| g.label(v)).collect();
                    Ok(Report::new(
                        json!({
                            "n": n,
                            "l": l,
                            "divisor": labels_json(&g, &d),
                            "witness": {
                                "d": w.d,
                                "d_prime": labels_json(&g, &w.d_prime),
                                "e": labels_json(&g, &w.e),
                                "deficiency": w.deficiency,
                                "order": order,
                            },
                            "bound": bound,
                            "validated": validated,
                        }),
                        format!(
                            "d = {}, E = {}, rank(D) < {} <= {bound} [{}]",
                            w.d,
                            w.e.display(&g),
                            w.deficiency,
                            verdict(validated)
                        ),
                    )
                    .failed_if(!validated))
                }
                Err(Error::NoWitness(limit)) => Ok(Report::new(
                    json!({
                        "n": n,
                        "l": l,
                        "divisor": labels_json(&g, &d),
                        "witness": null,
                        "searched_up_to": limit,
                        "bound": bound,
                        "validated": false,
                    }),
                    format!("no witness for d <= {limit}"),
                )
                .failed_if(true)),
                Err(e) => Err(e.into()),
            }
        }
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAILED"
    }
}

fn search(args: &SearchArgs) -> CliResult {
    let spec = SearchSpec {
        max_vertices: args.max_vertices,
        max_multiplicity: args.max_mult,
        max_edges: args.max_edges,
        rank_budget: args.rank_budget,
    };
    let start = Instant::now();
    let entries = survey(&spec)?;
    let mut tight = Vec::new();
    let mut budget = Vec::new();
    let mut counterexamples = Vec::new();
    let mut question = Vec::new();
    let mut not_tight = 0;
    for e in &entries {
        match &e.outcome {
            TightOutcome::Tight { gon1, .. } => {
                let r = test_conjecture(&e.graph, spec.rank_budget)?;
                if r.counterexample() {
                    counterexamples.push(r.code.clone());
                }
                if *gon1 == e.graph.vertex_count() as i64 && !r.is_qb {
                    question.push(r.code.clone());
                }
                tight.push(json!({ "graph": io::graph_json(&e.graph), "report": r }));
            }
            TightOutcome::NotTight { .. } => not_tight += 1,
            TightOutcome::BudgetExceeded { message } => {
                budget.push(json!({ "code": hex_code(&e.graph)?, "message": message }))
            }
        }
    }
    let report = json!({
        "spec": spec,
        "graphs": entries.len(),
        "not_tight": not_tight,
        "tight": tight,
        "budget_exceeded": budget,
        "counterexamples": counterexamples,
        "question_violations": question,
        "elapsed_ms": millis(start),
    });
    if let Some(path) = &args.out {
        write_file(path, &serde_json::to_string_pretty(&report).expect("reports serialise"))?;
    }
    let mut text = format!(
        "{} graphs, {} gonality-tight, {} budget-exceeded, {} conjecture counterexamples, {} tight graphs with gon_1 = |V| that are not quasi-banana",
        entries.len(),
        tight.len(),
        budget.len(),
        counterexamples.len(),
        question.len()
    );
    for code in counterexamples.iter().chain(&question) {
        text.push_str(&format!("\n  flagged: {code}"));
    }
    let failed = !counterexamples.is_empty() || !question.is_empty();
    Ok(Report::new(report, text).failed_if(failed))
}
