//! Command-line orchestration for `trfeas`.
//!
//! Exit codes: 0 when the analysis ran and every checked property holds,
//! 1 when the analysis ran and found a violation, 2 on input or usage errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use trfeas_core::analysis::{self, AnalysisReport, CommandEcho, QueryResult};
use trfeas_core::random::{random_scenario, RandomParams, ScheduleKind};
use trfeas_core::{
    fixtures, parse_scenario, serialize_scenario, validate_scenario, Depth, Exec, Query,
    ValidatedScenario,
};

mod render;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "trfeas",
    version,
    about = "Feasibility analysis for truncated retrieval"
)]
struct Cli {
    /// Emit the JSON analysis report instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and validate a scenario file.
    Validate { file: PathBuf },
    /// Feasibility of one query at one depth.
    Feas {
        file: PathBuf,
        #[arg(long)]
        query: String,
        #[arg(long)]
        depth: usize,
    },
    /// Smallest feasible depth of one query, by scan and by the constructive bound.
    MinDepth {
        file: PathBuf,
        #[arg(long)]
        query: String,
    },
    /// Noetherian retrieval check for one or all queries.
    Nr {
        file: PathBuf,
        #[arg(long)]
        query: Option<String>,
    },
    /// Uniform depth over the whole query class.
    Uniform { file: PathBuf },
    /// Validate supplied certificates or extract them.
    Certify {
        file: PathBuf,
        /// Write the scenario with the resulting certificates.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Slot coverage versus joint feasibility at one depth.
    Diagnose {
        file: PathBuf,
        #[arg(long)]
        query: String,
        #[arg(long)]
        depth: usize,
    },
    /// Replace the schedule by its monotone closure.
    Closure {
        file: PathBuf,
        #[arg(long)]
        emit: PathBuf,
    },
    /// Run the full analysis on a built-in scenario: prop1, prop2:N or prop3.
    Demo {
        name: String,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Generate a seeded random scenario and run the full analysis on it.
    Random {
        #[arg(long)]
        seed: u64,
        #[arg(long, value_enum, default_value = "cumulative")]
        kind: KindArg,
        #[arg(long, default_value_t = 10)]
        universe: usize,
        #[arg(long, default_value_t = 3)]
        slots: usize,
        #[arg(long, default_value_t = 4)]
        queries: usize,
        #[arg(long, default_value_t = 0.3)]
        density: f64,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum KindArg {
    Cumulative,
    Ascending,
    Stabilizing,
    Cycle,
}

impl From<KindArg> for ScheduleKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Cumulative => ScheduleKind::Cumulative,
            KindArg::Ascending => ScheduleKind::Ascending,
            KindArg::Stabilizing => ScheduleKind::Stabilizing,
            KindArg::Cycle => ScheduleKind::Cycle,
        }
    }
}

#[derive(Debug)]
struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

fn load(path: &Path) -> Result<ValidatedScenario, UsageError> {
    let text =
        fs::read_to_string(path).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
    let doc = parse_scenario(&text).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
    validate_scenario(&doc).map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

fn emit(path: &Path, sc: &ValidatedScenario) -> Result<(), UsageError> {
    fs::write(path, serialize_scenario(&sc.to_document()))
        .map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

fn query<'a>(sc: &'a ValidatedScenario, id: &str) -> Result<&'a Query, UsageError> {
    sc.class
        .get(id)
        .ok_or_else(|| UsageError(format!("unknown query `{id}`")))
}

fn depth(k: usize) -> Result<Depth, UsageError> {
    Depth::new(k).ok_or_else(|| UsageError("depth must be at least 1".into()))
}

fn echo(argv: &[OsString]) -> CommandEcho {
    let args: Vec<String> = argv
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .filter(|a| a != "--json")
        .collect();
    CommandEcho {
        name: args.first().cloned().unwrap_or_default(),
        args: args.into_iter().skip(1).collect(),
    }
}

fn execute(command: Command, echo: CommandEcho) -> Result<AnalysisReport, UsageError> {
    let report = match command {
        Command::Validate { file } => {
            let sc = load(&file)?;
            let mut r = AnalysisReport::new(echo, &sc.schedule);
            r.queries = sc
                .class
                .queries()
                .iter()
                .map(|q| QueryResult::new(q.id()))
                .collect();
            r
        }
        Command::Feas {
            file,
            query: id,
            depth: k,
        } => {
            let sc = load(&file)?;
            let q = query(&sc, &id)?;
            let mut r = AnalysisReport::new(echo, &sc.schedule);
            r.queries = vec![analysis::feasibility_at(q, &sc.schedule, depth(k)?)];
            r
        }
        Command::MinDepth { file, query: id } => {
            let sc = load(&file)?;
            let q = query(&sc, &id)?;
            let mut r = AnalysisReport::new(echo, &sc.schedule);
            let mut res = QueryResult::new(q.id());
            res.limit = Some(trfeas_core::feasibility::is_feasible_limit(q, &sc.schedule));
            res.min_depth = Some(analysis::min_depth(q, &sc.schedule));
            let limit_feasible = res.limit.as_ref().is_some_and(|l| l.feasible);
            let m = res.min_depth.as_ref().unwrap();
            if limit_feasible && m.scan.is_none() {
                r.violations.push(format!(
                    "query `{id}` is feasible in the limit but at no finite depth"
                ));
            }
            if m.constructive_applicable && m.constructive != m.scan {
                r.violations.push(format!(
                    "query `{id}`: constructive bound disagrees with scan"
                ));
            }
            r.queries = vec![res];
            r
        }
        Command::Nr { file, query: id } => {
            let sc = load(&file)?;
            let only = id.as_deref().map(|id| query(&sc, id)).transpose()?;
            let mut r = AnalysisReport::new(echo, &sc.schedule);
            analysis::nr_all(&sc, &mut r, only, Exec::default());
            r
        }
        Command::Uniform { file } => {
            let sc = load(&file)?;
            let mut r = AnalysisReport::new(echo, &sc.schedule);
            analysis::uniform(&sc, &mut r);
            r
        }
        Command::Certify { file, emit: out } => {
            let sc = load(&file)?;
            let mut r = AnalysisReport::new(echo, &sc.schedule);
            let certs = analysis::certify(&sc, &mut r);
            if let Some(out) = out {
                let with = ValidatedScenario {
                    certificates: Some(certs),
                    ..sc
                };
                emit(&out, &with)?;
            }
            r
        }
        Command::Diagnose {
            file,
            query: id,
            depth: k,
        } => {
            let sc = load(&file)?;
            let q = query(&sc, &id)?;
            let mut r = AnalysisReport::new(echo, &sc.schedule);
            let mut res = QueryResult::new(q.id());
            res.diagnosis = Some(trfeas_core::feasibility::diagnose(
                q,
                &sc.schedule,
                depth(k)?,
            ));
            r.queries = vec![res];
            r
        }
        Command::Closure { file, emit: out } => {
            let sc = load(&file)?;
            let closed = ValidatedScenario {
                schedule: sc.schedule.monotone_closure(),
                ..sc
            };
            emit(&out, &closed)?;
            let mut r = AnalysisReport::new(echo, &closed.schedule);
            analysis::nr_all(&closed, &mut r, None, Exec::default());
            r
        }
        Command::Demo { name, emit: out } => {
            let sc = fixtures::by_name(&name).ok_or_else(|| {
                UsageError(format!(
                    "unknown demo `{name}` (expected prop1, prop2:N with N >= 1, or prop3)"
                ))
            })?;
            if let Some(out) = out {
                emit(&out, &sc)?;
            }
            analysis::analyze(&sc, echo, Exec::default())
        }
        Command::Random {
            seed,
            kind,
            universe,
            slots,
            queries,
            density,
            emit: out,
        } => {
            let params = RandomParams {
                universe_size: universe,
                slots,
                queries,
                relation_density: density,
                schedule_kind: kind.into(),
            };
            let sc = random_scenario(seed, &params)?;
            if let Some(out) = out {
                emit(&out, &sc)?;
            }
            analysis::analyze(&sc, echo, Exec::default())
        }
    };
    Ok(report)
}

/// Runs one invocation, writing the report to `out` and errors to `err`.
/// Returns the process exit code.
pub fn run_cli<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    let json = cli.json;
    match execute(cli.command, echo(&argv)) {
        Ok(report) => {
            let text = if json {
                report.to_json()
            } else {
                render::text(&report)
            };
            let _ = out.write_all(text.as_bytes());
            if report.holds() {
                EXIT_OK
            } else {
                EXIT_VIOLATION
            }
        }
        Err(UsageError(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
    }
}
