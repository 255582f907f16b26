use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use ptfreeze::alignment::{optimal_alignment_with, SearchOptions};
use ptfreeze::eventlog::import_path;
use ptfreeze::freezing::FreezeError;
use ptfreeze::ipda::{IpdaError, IpdaOptions};
use ptfreeze::metrics::{quality, QualityReport};
use ptfreeze::scenario::{run_scenario, write_outcome, Scenario, ScenarioError};
use ptfreeze::semantics::language_bounded;
use ptfreeze::{parse_tree, AlignmentError, ProcessTree, Trace};

#[derive(Parser)]
#[command(name = "ptfreeze", version, about = "Process trees, alignments and incremental discovery with frozen subtrees")]
struct Cli {
    /// Loop unrolling bound for language enumeration.
    #[arg(long, global = true, default_value_t = 2)]
    loop_bound: usize,
    /// Node-expansion budget of each alignment search.
    #[arg(long, global = true, default_value_t = ptfreeze::alignment::DEFAULT_MAX_EXPANSIONS)]
    search_budget: usize,
    /// Discovery algorithm, overriding the one named in a scenario.
    #[arg(long, global = true)]
    ipda: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a tree and print it in canonical form.
    Parse {
        /// Tree text, or @file.
        #[arg(allow_hyphen_values = true)]
        tree: String,
        /// Also list the traces up to the loop bound.
        #[arg(long)]
        language: bool,
    },
    /// Optimal alignment of a trace (comma separated) against a tree.
    Align {
        #[arg(allow_hyphen_values = true)]
        tree: String,
        trace: String,
    },
    /// Fitness, precision and F-measure of a tree on a log.
    Metrics {
        #[arg(allow_hyphen_values = true)]
        tree: String,
        log: PathBuf,
    },
    /// Replay a scenario file and write its artifacts.
    Run {
        scenario: PathBuf,
        /// Output directory; defaults to the scenario's own setting.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Graphviz rendering of a tree.
    ExportDot {
        #[arg(allow_hyphen_values = true)]
        tree: String,
    },
    /// Start the HTTP session service.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: String,
    },
}

struct Failure {
    code: u8,
    message: String,
}

fn input(message: impl ToString) -> Failure {
    Failure { code: 2, message: message.to_string() }
}

fn from_alignment(e: &AlignmentError) -> u8 {
    match e {
        AlignmentError::BudgetExceeded { .. } => 3,
        AlignmentError::NotInLanguage { .. } => 4,
    }
}

fn from_ipda(e: &IpdaError) -> u8 {
    match e {
        IpdaError::Precondition { .. } | IpdaError::Postcondition { .. } => 4,
        IpdaError::Unknown(_) => 2,
        IpdaError::Alignment(a) => from_alignment(a),
    }
}

fn from_scenario(e: ScenarioError) -> Failure {
    let code = match &e {
        ScenarioError::Ipda(i) => from_ipda(i),
        ScenarioError::Metrics { source, .. } => from_alignment(source),
        ScenarioError::Step { source, .. } => match source {
            FreezeError::Precondition { .. } | FreezeError::Postcondition(_) | FreezeError::Infeasible(_) => 4,
            FreezeError::Ipda(i) => from_ipda(i),
            FreezeError::Alignment(a) => from_alignment(a),
            _ => 2,
        },
        _ => 2,
    };
    Failure { code, message: e.to_string() }
}

fn read_tree(arg: &str) -> Result<ProcessTree, Failure> {
    let text = match arg.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).map_err(|e| input(format!("{path}: {e}")))?,
        None => arg.to_string(),
    };
    parse_tree(text.trim()).map_err(input)
}

fn json(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("json value")
}

fn run(cli: Cli) -> Result<String, Failure> {
    let search = SearchOptions { max_expansions: cli.search_budget };
    match cli.command {
        Command::Parse { tree, language } => {
            let t = read_tree(&tree)?;
            let traces = match language {
                true => Some(language_bounded(&t, cli.loop_bound).map_err(input)?),
                false => None,
            };
            Ok(match cli.format {
                Format::Json => json(&serde_json::json!({
                    "tree": t.to_string(),
                    "nodes": t.len(),
                    "language": traces.map(|l| l.iter().map(|x| x.iter().map(|a| a.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>()),
                })),
                Format::Csv => {
                    let mut out = t.to_string();
                    for x in traces.iter().flatten() {
                        out.push('\n');
                        out.push_str(&x.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(","));
                    }
                    out
                }
            })
        }
        Command::Align { tree, trace } => {
            let t = read_tree(&tree)?;
            let trace = Trace::parse(&trace);
            let al = optimal_alignment_with(&t, &trace, &search)
                .map_err(|e| Failure { code: from_alignment(&e), message: e.to_string() })?;
            Ok(match cli.format {
                Format::Json => json(&serde_json::json!({
                    "cost": al.cost,
                    "moves": al.moves.iter().map(|m| serde_json::json!({
                        "log": m.log.as_ref().map(|a| a.to_string()),
                        "model": m.model.as_ref().map(|s| s.to_string()),
                        "kind": m.kind(),
                    })).collect::<Vec<_>>(),
                })),
                Format::Csv => al.to_table(),
            })
        }
        Command::Metrics { tree, log } => {
            let t = read_tree(&tree)?;
            let log = import_path(&log).map_err(input)?;
            let r = quality(&log, &t, &search).map_err(|e| Failure { code: from_alignment(&e), message: e.to_string() })?;
            Ok(match cli.format {
                Format::Json => json(&serde_json::to_value(&r).expect("report")),
                Format::Csv => format!("{}\n{}", QualityReport::CSV_HEADER, r.csv_row(0)),
            })
        }
        Command::Run { scenario, out } => {
            let mut s = Scenario::load(&scenario).map_err(from_scenario)?;
            if let Some(name) = cli.ipda {
                s.ipda = name;
            }
            let dir = out
                .or_else(|| s.output_dir.clone())
                .ok_or_else(|| input("no output directory: pass --out or set output_dir"))?;
            let opts = IpdaOptions { search, ..IpdaOptions::default() };
            let outcome = run_scenario(&s, &opts).map_err(from_scenario)?;
            write_outcome(&outcome, &dir).map_err(from_scenario)?;
            Ok(match cli.format {
                Format::Json => json(&serde_json::to_value(&outcome.summary).expect("summary")),
                Format::Csv => outcome.metrics_csv.trim_end().to_string(),
            })
        }
        Command::ExportDot { tree } => Ok(read_tree(&tree)?.to_dot().trim_end().to_string()),
        Command::Serve { addr } => {
            let rt = tokio::runtime::Runtime::new().map_err(input)?;
            rt.block_on(async {
                let listener = tokio::net::TcpListener::bind(&addr).await.map_err(input)?;
                eprintln!("listening on {addr}");
                let state = ptfreeze_service::AppState::new(IpdaOptions { search, ..Default::default() });
                ptfreeze_service::serve(listener, state).await.map_err(input)
            })?;
            Ok(String::new())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(out) => {
            if !out.is_empty() {
                println!("{out}");
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
