//! `fuzzyshell` command-line front end.
//!
//! Exit status: 0 success, 1 diagnostics or a failed consultation,
//! 2 usage error, 3 runtime failure (unreadable file, port in use).

mod input;

use std::fs;
use std::io::{self, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use fuzzyshell::engine::{render_summary, render_trace, ConsultError};
use fuzzyshell::fuzzy::DEFAULT_RESOLUTION;
use fuzzyshell::lang::has_errors;
use fuzzyshell::{parse_kb, validate, Diagnostic, Engine, Execution, KnowledgeBase};
use fuzzyshell_service::{Config, TherapyService};

#[derive(Debug, Parser)]
#[command(name = "fuzzyshell", version, about = "Fuzzy expert-system shell")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a knowledge base and print its diagnostics.
    Validate { kb: PathBuf },
    /// Print a knowledge base in canonical form.
    Fmt { kb: PathBuf },
    /// Run one consultation, or one per line of an inputs file.
    Consult(ConsultArgs),
    /// Run the HTTP service.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
struct ConsultArgs {
    kb: PathBuf,
    /// Crisp input, repeatable.
    #[arg(long = "set", value_name = "VAR=VALUE", value_parser = input::parse_assignment)]
    set: Vec<(String, f64)>,
    /// Batch file with one `var=value, ...` consultation per line.
    #[arg(long, value_name = "FILE", conflicts_with_all = ["set", "degrees"])]
    inputs: Option<PathBuf>,
    /// Fuzzified inputs in printed trace notation, skipping fuzzification.
    #[arg(long, value_name = "FILE", conflicts_with = "set")]
    degrees: Option<PathBuf>,
    /// Print fuzzification, rule firings and aggregation.
    #[arg(long, conflicts_with = "inputs")]
    trace: bool,
    /// Samples taken across the output universe.
    #[arg(long, default_value_t = DEFAULT_RESOLUTION, value_parser = clap::value_parser!(usize))]
    resolution: usize,
    /// Spread a batch over all cores; output is unchanged.
    #[arg(long, requires = "inputs")]
    parallel: bool,
}

#[derive(Debug, Args)]
struct ServeArgs {
    #[arg(long, env = "FUZZYSHELL_LISTEN", default_value = "127.0.0.1:8080")]
    listen: SocketAddr,
    /// Knowledge base that seeds an empty data directory.
    #[arg(long, env = "FUZZYSHELL_KB")]
    kb: Option<PathBuf>,
    /// Persistent state; kept in memory when omitted.
    #[arg(long, env = "FUZZYSHELL_DATA_DIR")]
    data_dir: Option<PathBuf>,
    #[arg(long, env = "FUZZYSHELL_RESOLUTION", default_value_t = DEFAULT_RESOLUTION)]
    resolution: usize,
}

enum Failure {
    Diagnostics,
    Runtime,
}

impl From<Failure> for ExitCode {
    fn from(f: Failure) -> Self {
        match f {
            Failure::Diagnostics => ExitCode::from(1),
            Failure::Runtime => ExitCode::from(3),
        }
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let default_filter = match cli.command {
        Command::Serve(_) => "info",
        _ => "warn",
    };
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env()
                .unwrap_or_else(|_| default_filter.into()),
        )
        .with_writer(io::stderr)
        .init();
    let outcome = match cli.command {
        Command::Validate { kb } => cmd_validate(&kb),
        Command::Fmt { kb } => cmd_fmt(&kb),
        Command::Consult(args) => cmd_consult(&args),
        Command::Serve(args) => cmd_serve(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => f.into(),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| {
        eprintln!("{}: {e}", path.display());
        Failure::Runtime
    })
}

fn report(path: &Path, diagnostics: &[Diagnostic]) {
    let mut err = io::stderr().lock();
    for d in diagnostics {
        let _ = writeln!(err, "{}:{d}", path.display());
    }
}

/// Parses and validates; prints every diagnostic.
fn load(path: &Path) -> Result<KnowledgeBase, Failure> {
    let text = read(path)?;
    let kb = parse_kb(&text).map_err(|d| {
        report(path, &d);
        Failure::Diagnostics
    })?;
    let diagnostics = validate(&kb);
    report(path, &diagnostics);
    if has_errors(&diagnostics) {
        return Err(Failure::Diagnostics);
    }
    Ok(kb)
}

fn cmd_validate(path: &Path) -> Outcome {
    load(path).map(drop)
}

fn cmd_fmt(path: &Path) -> Outcome {
    let kb = load(path)?;
    print!("{}", kb.to_document());
    Ok(())
}

fn consult_failed(e: &ConsultError) -> Failure {
    if e.is_no_rule_fired() {
        eprintln!("error: {e}; no recommendation can be made for these inputs");
    } else {
        eprintln!("error: {e}");
    }
    Failure::Diagnostics
}

fn cmd_consult(args: &ConsultArgs) -> Outcome {
    let kb = load(&args.kb)?;
    let engine = Engine::new(&kb)
        .and_then(|e| e.with_resolution(args.resolution))
        .map_err(|e| consult_failed(&e))?;
    if let Some(batch) = &args.inputs {
        return consult_batch(&engine, batch, args.parallel);
    }
    let result = match &args.degrees {
        Some(path) => {
            let table = input::parse_degree_table(&read(path)?, &kb).map_err(|(line, m)| {
                eprintln!("{}:{line}: {m}", path.display());
                Failure::Diagnostics
            })?;
            engine.infer_fuzzified(table)
        }
        None => {
            let inputs = input::collect_inputs(args.set.iter().cloned()).map_err(|m| {
                eprintln!("error: {m}");
                Failure::Diagnostics
            })?;
            engine.infer(&inputs)
        }
    }
    .map_err(|e| consult_failed(&e))?;
    let text = if args.trace {
        render_trace(&result)
    } else {
        render_summary(&result)
    };
    print!("{text}");
    Ok(())
}

/// One line per consultation: `N: output = X, note` or `N: error: ...`,
/// where `N` is the line number in the inputs file.
fn consult_batch(engine: &Engine<'_>, path: &Path, parallel: bool) -> Outcome {
    let text = read(path)?;
    let mut lines = Vec::new();
    let mut batch = Vec::new();
    let mut failed = false;
    let mut out = String::new();
    for (i, line) in text.lines().enumerate() {
        match input::parse_batch_line(line) {
            None => {}
            Some(Ok(inputs)) => {
                lines.push((i + 1, None));
                batch.push(inputs);
            }
            Some(Err(m)) => lines.push((i + 1, Some(m))),
        }
    }
    let execution = if parallel {
        Execution::Parallel
    } else {
        Execution::Sequential
    };
    let mut results = engine.infer_batch(&batch, execution).into_iter();
    for (line, parse_error) in lines {
        let entry = match parse_error {
            Some(m) => Err(m),
            None => results
                .next()
                .expect("one result per parsed line")
                .map_err(|e| e.to_string()),
        };
        match entry {
            Ok(r) => {
                out.push_str(&format!("{line}: output = {:.2}", r.crisp_output));
                if let Some(rec) = &r.recommendation {
                    out.push_str(&format!(", {}", rec.note));
                }
                out.push('\n');
            }
            Err(m) => {
                failed = true;
                out.push_str(&format!("{line}: error: {m}\n"));
            }
        }
    }
    print!("{out}");
    if failed {
        Err(Failure::Diagnostics)
    } else {
        Ok(())
    }
}

fn cmd_serve(args: ServeArgs) -> Outcome {
    let config = Config {
        listen: args.listen,
        kb_path: args.kb,
        data_dir: args.data_dir,
        default_resolution: args.resolution,
    };
    let service = TherapyService::open(&config).map_err(|e| {
        match (e.diagnostics(), &config.kb_path) {
            (Some(d), Some(path)) => report(path, d),
            (Some(d), None) => report(Path::new("<kb>"), d),
            _ => eprintln!("error: {e}"),
        }
        if e.diagnostics().is_some() {
            Failure::Diagnostics
        } else {
            Failure::Runtime
        }
    })?;
    let runtime = tokio::runtime::Runtime::new().map_err(|e| {
        eprintln!("error: {e}");
        Failure::Runtime
    })?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(config.listen)
            .await
            .map_err(|e| {
                eprintln!("error: cannot listen on {}: {e}", config.listen);
                Failure::Runtime
            })?;
        if let Ok(addr) = listener.local_addr() {
            eprintln!("listening on http://{addr}");
        }
        fuzzyshell_service::serve(
            listener,
            Arc::new(service),
            fuzzyshell_service::shutdown_signal(),
        )
        .await
        .map_err(|e| {
            eprintln!("error: {e}");
            Failure::Runtime
        })
    })
}
