//! rooted-grid: generate instances, extract rooted grid minors and check
//! the certificates.
//!
//! Exit codes: 0 success, 1 validation failure, 2 hypothesis violated,
//! 3 internal invariant broken, 64 malformed input.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use rooted_grid::bundle::{InstanceBundle, ResultBundle};
use rooted_grid::extract::{
    extract_with, full_rows, trace_to_jsonl, BoundPolicy, ExtractError, ExtractionProblem,
};
use rooted_grid::graph::{Graph, VertexId};
use rooted_grid::grid::{grid_graph, GridSpec};
use rooted_grid::instance::{generate_instance, GenerateError, InstanceKind, InstanceRecipe};
use rooted_grid::model::{
    check_augmentation, identity_grid_model, root_free_report, validate_model,
    validate_pseudomodel, ModelFile, Pseudomodel,
};
use rooted_grid::oracle::{
    brute_force_grid_model, enumerate_separations, enumerate_tangles, verify_output_row_property,
    EnumerationBudget,
};
use rooted_grid::par::Execution;
use rooted_grid::report::ValidationReport;
use rooted_grid::separation::{
    check_tangle_axioms, find_row_blocking_separation, grid_tangle_members, menger,
};

#[derive(Parser)]
#[command(
    name = "rooted-grid",
    version,
    about = "Rooted grid minors with checkable certificates"
)]
struct Cli {
    /// Run every data-parallel loop on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the n x n grid graph.
    GenGrid {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the identity model of the grid here.
        #[arg(long)]
        model_out: Option<PathBuf>,
    },
    /// Generate a seeded instance bundle (graph, roots, model).
    GenInstance(GenInstanceArgs),
    /// Check a model file, or the models in a result bundle.
    ValidateModel {
        #[arg(long)]
        graph: PathBuf,
        /// A model file or a result bundle written by `extract`.
        #[arg(long)]
        model: PathBuf,
        /// Require connected branches (the default).
        #[arg(long, conflicts_with = "pseudo")]
        strict_model: bool,
        /// Allow disconnected branches.
        #[arg(long)]
        pseudo: bool,
        /// Roots that must avoid the base branches of a result bundle.
        #[arg(long, value_delimiter = ',')]
        roots: Vec<VertexId>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Look for a separation of order at most `max-order` cutting the roots
    /// from a full row image.
    FindSeparation {
        #[command(flatten)]
        input: InstanceInput,
        #[arg(long)]
        max_order: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// k disjoint paths between two vertex sets, or a smaller cut.
    Menger {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        sources: Vec<VertexId>,
        #[arg(long, value_delimiter = ',', required = true)]
        targets: Vec<VertexId>,
        #[arg(long)]
        k: usize,
        #[arg(long, value_delimiter = ',')]
        forbidden: Vec<VertexId>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Extract a g x g grid model with the roots attached.
    Extract {
        #[command(flatten)]
        input: InstanceInput,
        #[arg(long)]
        g: u32,
        #[arg(long)]
        k: u32,
        #[arg(long, value_enum, default_value_t = Bound::Tight)]
        bound: Bound,
        /// Result bundle, or the certificate when the hypothesis fails.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Reduction trace as JSON lines. Defaults to `<out>.trace.jsonl`.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Check the tangle axioms by exhaustive enumeration.
    CheckTangle {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        order: usize,
        /// Check the tangle induced by this grid model instead of
        /// enumerating all tangles.
        #[arg(long)]
        grid_model: Option<PathBuf>,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exhaustive reference computations for small graphs.
    #[command(subcommand)]
    Oracle(OracleCommand),
}

#[derive(Subcommand)]
enum OracleCommand {
    Separations {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        max_order: usize,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Tangles {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        order: usize,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    GridModel {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        side: u32,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check that no output row image sits in the small side of a tangle
    /// separation of order below g.
    RowProperty {
        #[arg(long)]
        graph: PathBuf,
        /// The input model the result was extracted from.
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        result: PathBuf,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct InstanceInput {
    /// Instance bundle; replaces --graph, --roots and --model.
    #[arg(long, conflicts_with_all = ["graph", "roots", "model"])]
    instance: Option<PathBuf>,
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    roots: Vec<VertexId>,
    #[arg(long)]
    model: Option<PathBuf>,
}

#[derive(Args)]
struct BudgetArgs {
    #[arg(long, default_value_t = EnumerationBudget::default().max_vertices)]
    max_vertices: usize,
    #[arg(long, default_value_t = EnumerationBudget::default().max_steps)]
    max_steps: u64,
}

impl BudgetArgs {
    fn budget(&self) -> EnumerationBudget {
        EnumerationBudget {
            max_vertices: self.max_vertices,
            max_steps: self.max_steps,
            ..EnumerationBudget::default()
        }
    }
}

#[derive(Args)]
struct GenInstanceArgs {
    /// Recipe file; flags given alongside override its fields.
    #[arg(long)]
    recipe: Option<PathBuf>,
    #[arg(long)]
    kind: Option<String>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    g: Option<u32>,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long, env = "SEED")]
    seed: Option<u64>,
    #[arg(long)]
    degree: Option<u32>,
    #[arg(long)]
    extra_edges: Option<u32>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Bound {
    Tight,
    Safe,
}

enum Failure {
    Malformed(String),
    Validation(Value),
    Hypothesis(Value),
    Internal(Value),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Malformed(_) => 64,
            Failure::Validation(_) => 1,
            Failure::Hypothesis(_) => 2,
            Failure::Internal(_) => 3,
        }
    }
}

type Outcome = Result<(), Failure>;

fn malformed(e: impl std::fmt::Display) -> Failure {
    Failure::Malformed(e.to_string())
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text =
        fs::read_to_string(path).map_err(|e| malformed(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| malformed(format!("{}: {e}", path.display())))
}

fn to_text<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serialisable");
    s.push('\n');
    s
}

fn emit_text(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| malformed(format!("{}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(malformed)
        }
    }
}

fn emit<T: Serialize>(out: Option<&Path>, value: &T) -> Outcome {
    emit_text(out, &to_text(value))
}

fn report_outcome(out: Option<&Path>, report: &ValidationReport) -> Outcome {
    let value = json!({ "valid": report.is_valid(), "violations": report.violations });
    emit(out, &value)?;
    if report.is_valid() {
        Ok(())
    } else {
        Err(Failure::Validation(
            json!({ "violations": report.violations.len() }),
        ))
    }
}

struct Loaded {
    host: Graph,
    roots: BTreeSet<VertexId>,
    spec: GridSpec,
    model: Pseudomodel,
}

impl InstanceInput {
    fn load(&self) -> Result<Loaded, Failure> {
        if let Some(path) = &self.instance {
            let bundle: InstanceBundle = read_json(path)?;
            let inst = bundle.to_instance().map_err(malformed)?;
            return Ok(Loaded {
                host: inst.host,
                roots: inst.roots,
                spec: inst.spec,
                model: inst.model,
            });
        }
        let (Some(graph), Some(model)) = (&self.graph, &self.model) else {
            return Err(malformed(
                "give --instance, or --graph, --roots and --model",
            ));
        };
        if self.roots.is_empty() {
            return Err(malformed("no roots given"));
        }
        let host: Graph = read_json(graph)?;
        let file: ModelFile = read_json(model)?;
        let (spec, model) = file.to_grid_model().map_err(malformed)?;
        Ok(Loaded {
            host,
            roots: self.roots.iter().copied().collect(),
            spec,
            model,
        })
    }
}

fn gen_instance(a: &GenInstanceArgs) -> Outcome {
    let mut recipe = match &a.recipe {
        Some(p) => read_json::<InstanceRecipe>(p)?,
        None => {
            let (Some(kind), Some(n), Some(g), Some(k)) = (&a.kind, a.n, a.g, a.k) else {
                return Err(malformed("give --recipe, or --kind, --n, --g and --k"));
            };
            let kind: InstanceKind =
                serde_json::from_value(Value::String(kind.clone())).map_err(malformed)?;
            InstanceRecipe::new(kind, n, g, k, 0)
        }
    };
    if a.recipe.is_some() {
        if let Some(kind) = &a.kind {
            recipe.kind = serde_json::from_value(Value::String(kind.clone())).map_err(malformed)?;
        }
        recipe.n = a.n.unwrap_or(recipe.n);
        recipe.g = a.g.unwrap_or(recipe.g);
        recipe.k = a.k.unwrap_or(recipe.k);
    }
    recipe.seed = a.seed.unwrap_or(recipe.seed);
    recipe.degree = a.degree.unwrap_or(recipe.degree);
    recipe.extra_edges = a.extra_edges.unwrap_or(recipe.extra_edges);
    let inst = match generate_instance(&recipe) {
        Ok(inst) => inst,
        Err(GenerateError::InvalidRecipe(m)) => return Err(malformed(m)),
        Err(GenerateError::RetriesExhausted {
            attempts,
            last_certificate,
        }) => {
            return Err(Failure::Hypothesis(json!({
                "attempts": attempts,
                "certificate": last_certificate,
            })))
        }
    };
    let bundle = InstanceBundle::from_instance(&inst, Some(recipe)).map_err(malformed)?;
    emit(a.out.as_deref(), &bundle)
}

fn validate(
    graph: &Path,
    model: &Path,
    pseudo: bool,
    roots: &[VertexId],
    out: Option<&Path>,
) -> Outcome {
    let host: Graph = read_json(graph)?;
    let value: Value = read_json(model)?;
    let check = |p: &Pseudomodel| {
        if pseudo {
            validate_pseudomodel(p, &host)
        } else {
            validate_model(p, &host)
        }
    };
    let report = if value.get("augmented").is_some() {
        let bundle: ResultBundle = serde_json::from_value(value).map_err(malformed)?;
        let w = bundle.witness().map_err(malformed)?;
        let mut report = check(&w.augmented);
        report.extend(check_augmentation(&w, &host));
        let mut roots: BTreeSet<VertexId> = roots.iter().copied().collect();
        roots.extend(&w.roots);
        report.extend(root_free_report(&w.base, &roots));
        report
    } else {
        let file: ModelFile = serde_json::from_value(value).map_err(malformed)?;
        let (_, p) = file.to_grid_model().map_err(malformed)?;
        let mut report = check(&p);
        if !roots.is_empty() {
            report.extend(root_free_report(&p, &roots.iter().copied().collect()));
        }
        report
    };
    report_outcome(out, &report)
}

fn run_extract(
    input: &InstanceInput,
    g: u32,
    k: u32,
    bound: Bound,
    out: Option<&Path>,
    trace: Option<&Path>,
    exec: Execution,
) -> Outcome {
    let l = input.load()?;
    let problem = ExtractionProblem {
        host: l.host,
        roots: l.roots,
        spec: l.spec,
        model: l.model,
        g,
        k,
        bound: match bound {
            Bound::Tight => BoundPolicy::Tight,
            Bound::Safe => BoundPolicy::Safe,
        },
    };
    let trace_path = trace.map(Path::to_path_buf).or_else(|| {
        out.map(|o| {
            let mut name = o.as_os_str().to_owned();
            name.push(".trace.jsonl");
            PathBuf::from(name)
        })
    });
    let write_trace = |records: &[rooted_grid::extract::ReductionRecord]| -> Outcome {
        match &trace_path {
            Some(p) => fs::write(p, trace_to_jsonl(records))
                .map_err(|e| malformed(format!("{}: {e}", p.display()))),
            None => Ok(()),
        }
    };
    match extract_with(&problem, exec) {
        Ok(result) => {
            write_trace(&result.trace)?;
            let bundle = ResultBundle::from_result(&result)
                .map_err(|e| Failure::Internal(json!({ "reason": e.to_string() })))?;
            emit(out, &bundle)
        }
        Err(ExtractError::HypothesisViolated(cert)) => {
            let value = json!({ "status": "violated", "certificate": cert });
            emit(out, &value)?;
            Err(Failure::Hypothesis(
                json!({ "order": cert.order(), "row": cert.row }),
            ))
        }
        Err(ExtractError::MalformedInput(m)) => Err(Failure::Malformed(m)),
        Err(e) => {
            if let Some(t) = e.trace() {
                write_trace(t)?;
            }
            Err(Failure::Internal(json!({ "reason": e.to_string() })))
        }
    }
}

fn check_tangle(
    graph: &Path,
    order: usize,
    grid_model: Option<&Path>,
    budget: &EnumerationBudget,
    out: Option<&Path>,
    exec: Execution,
) -> Outcome {
    let host: Graph = read_json(graph)?;
    if order == 0 {
        return Err(malformed("tangle order must be at least 1"));
    }
    let seps = enumerate_separations(&host, order - 1, budget, exec).map_err(malformed)?;
    match grid_model {
        Some(p) => {
            let file: ModelFile = read_json(p)?;
            let (spec, m) = file.to_grid_model().map_err(malformed)?;
            let t = grid_tangle_members(&m, spec, order, &seps, exec).map_err(malformed)?;
            let report = check_tangle_axioms(&t, &host, &seps, exec);
            let value = json!({
                "separations": seps.len(),
                "members": t.members.len(),
                "valid": report.is_valid(),
                "violations": report.violations,
            });
            emit(out, &value)?;
            if report.is_valid() {
                Ok(())
            } else {
                Err(Failure::Validation(
                    json!({ "violations": report.violations.len() }),
                ))
            }
        }
        None => {
            let tangles = enumerate_tangles(&host, order, budget, exec).map_err(malformed)?;
            let reports: Vec<ValidationReport> = tangles
                .iter()
                .map(|t| check_tangle_axioms(t, &host, &seps, exec))
                .collect();
            let all_valid = reports.iter().all(ValidationReport::is_valid);
            let value = json!({
                "separations": seps.len(),
                "tangles": tangles.len(),
                "valid": all_valid,
                "violations": reports.iter().map(|r| &r.violations).collect::<Vec<_>>(),
            });
            emit(out, &value)?;
            if all_valid {
                Ok(())
            } else {
                Err(Failure::Validation(
                    json!({ "invalid-tangles": reports.iter().filter(|r| !r.is_valid()).count() }),
                ))
            }
        }
    }
}

fn oracle(cmd: &OracleCommand, exec: Execution) -> Outcome {
    match cmd {
        OracleCommand::Separations {
            graph,
            max_order,
            budget,
            out,
        } => {
            let host: Graph = read_json(graph)?;
            let seps = enumerate_separations(&host, *max_order, &budget.budget(), exec)
                .map_err(malformed)?;
            emit(
                out.as_deref(),
                &json!({ "count": seps.len(), "separations": seps }),
            )
        }
        OracleCommand::Tangles {
            graph,
            order,
            budget,
            out,
        } => {
            let host: Graph = read_json(graph)?;
            let tangles =
                enumerate_tangles(&host, *order, &budget.budget(), exec).map_err(malformed)?;
            emit(
                out.as_deref(),
                &json!({ "count": tangles.len(), "tangles": tangles }),
            )
        }
        OracleCommand::GridModel {
            graph,
            side,
            budget,
            out,
        } => {
            let host: Graph = read_json(graph)?;
            let spec = GridSpec::new(*side).map_err(malformed)?;
            match brute_force_grid_model(&host, *side, &budget.budget()).map_err(malformed)? {
                Some(m) => emit(
                    out.as_deref(),
                    &ModelFile::from_grid_model(spec, &m).map_err(malformed)?,
                ),
                None => emit(out.as_deref(), &Value::String("none".into())),
            }
        }
        OracleCommand::RowProperty {
            graph,
            model,
            result,
            budget,
            out,
        } => {
            let host: Graph = read_json(graph)?;
            let file: ModelFile = read_json(model)?;
            let (spec, input) = file.to_grid_model().map_err(malformed)?;
            let bundle: ResultBundle = read_json(result)?;
            let result = bundle.to_result().map_err(malformed)?;
            let order = result.atlas.g as usize - 1;
            let seps =
                enumerate_separations(&host, order, &budget.budget(), exec).map_err(malformed)?;
            let report = verify_output_row_property(&result, &input, spec, &seps, exec);
            report_outcome(out.as_deref(), &report)
        }
    }
}

fn run(cli: Cli) -> Outcome {
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    };
    match &cli.command {
        Command::GenGrid { n, out, model_out } => {
            let spec = GridSpec::new(*n).map_err(malformed)?;
            emit(out.as_deref(), &grid_graph(spec))?;
            if let Some(p) = model_out {
                let (_, m) = identity_grid_model(spec);
                emit(
                    Some(p),
                    &ModelFile::from_grid_model(spec, &m).map_err(malformed)?,
                )?;
            }
            Ok(())
        }
        Command::GenInstance(a) => gen_instance(a),
        Command::ValidateModel {
            graph,
            model,
            strict_model: _,
            pseudo,
            roots,
            out,
        } => validate(graph, model, *pseudo, roots, out.as_deref()),
        Command::FindSeparation {
            input,
            max_order,
            out,
        } => {
            let l = input.load()?;
            let rows = full_rows(l.spec, &l.model.pattern);
            let found =
                find_row_blocking_separation(&l.host, &l.roots, &l.model, &rows, *max_order, exec)
                    .map_err(malformed)?;
            match found {
                Some(cert) => emit(out.as_deref(), &cert),
                None => emit(out.as_deref(), &Value::String("none".into())),
            }
        }
        Command::Menger {
            graph,
            sources,
            targets,
            k,
            forbidden,
            out,
        } => {
            let host: Graph = read_json(graph)?;
            let set = |v: &[VertexId]| v.iter().copied().collect::<BTreeSet<_>>();
            let r = menger(&host, &set(sources), &set(targets), *k, &set(forbidden))
                .map_err(malformed)?;
            emit(out.as_deref(), &r)
        }
        Command::Extract {
            input,
            g,
            k,
            bound,
            out,
            trace,
        } => run_extract(
            input,
            *g,
            *k,
            *bound,
            out.as_deref(),
            trace.as_deref(),
            exec,
        ),
        Command::CheckTangle {
            graph,
            order,
            grid_model,
            budget,
            out,
        } => check_tangle(
            graph,
            *order,
            grid_model.as_deref(),
            &budget.budget(),
            out.as_deref(),
            exec,
        ),
        Command::Oracle(cmd) => oracle(cmd, exec),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(64);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let code = f.code();
            let diagnostic = match f {
                Failure::Malformed(message) => {
                    json!({ "error": "malformed-input", "message": message })
                }
                Failure::Validation(detail) => {
                    json!({ "error": "validation-failed", "detail": detail })
                }
                Failure::Hypothesis(detail) => {
                    json!({ "error": "hypothesis-violated", "detail": detail })
                }
                Failure::Internal(detail) => {
                    json!({ "error": "internal-invariant", "detail": detail })
                }
            };
            eprintln!("{diagnostic}");
            ExitCode::from(code)
        }
    }
}
