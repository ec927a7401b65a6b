use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use qvtop_core::axioms::{Analyzer, Axiom, AxiomError, Method, Space};
use qvtop_core::harness::{run_sweep, write_findings, Class, SweepConfig};
use qvtop_core::io::{document_of, load, print_document, serialize_report, verdicts_json, verdicts_text, Format, LoadError, Loaded};
use qvtop_core::transitions::{
    distance_to_gauge, distance_to_system, gauge_to_distance, system_to_distance, system_to_gauge, Mode,
    TransitionError,
};
use qvtop_core::Limits;

const PARSE: u8 = 2;
const INVALID: u8 = 3;
const GUARD: u8 = 4;
const VIOLATION: u8 = 5;

#[derive(Parser)]
#[command(name = "qvtop", version, about = "Separation and connectedness in quantale-valued approach spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum AxiomArg {
    T0,
    T1,
    Closed,
    Dconn,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Char,
    Oracle,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Gauge,
    Distance,
    System,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Base,
    Oracle,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a document.
    Validate { file: PathBuf },
    /// Decide one axiom, at one point or at all of them.
    Check {
        file: PathBuf,
        #[arg(long, value_enum)]
        axiom: AxiomArg,
        #[arg(long)]
        point: Option<String>,
        #[arg(long, value_enum, default_value = "char")]
        method: MethodArg,
        /// Wedge copies for the closedness oracle.
        #[arg(long, default_value_t = 3)]
        copies: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: FormatArg,
    },
    /// Convert to another presentation and print the document.
    Transition {
        file: PathBuf,
        #[arg(long, value_enum)]
        to: Target,
        #[arg(long, value_enum, default_value = "base")]
        mode: ModeArg,
    },
    /// Every axiom at every point, by characterization and, with
    /// `--oracle`, by the oracles.
    Report {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: FormatArg,
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value_t = 3)]
        copies: usize,
    },
    /// Run a sweep and write its findings.
    Sweep {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides the output directory of the config.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

impl From<LoadError> for Failure {
    fn from(e: LoadError) -> Self {
        fail(e.exit_code() as u8, e.to_string())
    }
}

impl From<AxiomError> for Failure {
    fn from(e: AxiomError) -> Self {
        match e {
            AxiomError::UnknownPoint(_) => fail(PARSE, e.to_string()),
            e if e.is_size_guard() => fail(GUARD, e.to_string()),
            e => fail(INVALID, e.to_string()),
        }
    }
}

impl From<TransitionError> for Failure {
    fn from(e: TransitionError) -> Self {
        match e {
            TransitionError::SizeGuard(_) => fail(GUARD, e.to_string()),
            TransitionError::Invalid(_) => fail(INVALID, e.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| fail(PARSE, format!("{}: {e}", path.display())))
}

fn open(path: &Path) -> Result<Loaded, Failure> {
    let text = read(path)?;
    load(&text, &Limits::default()).map_err(|e| {
        let mut f = Failure::from(e);
        f.message = f
            .message
            .lines()
            .map(|l| format!("{}:{l}", path.display()))
            .collect::<Vec<_>>()
            .join("\n");
        f
    })
}

fn format_of(f: FormatArg) -> Format {
    match f {
        FormatArg::Text => Format::Text,
        FormatArg::Json => Format::Json,
    }
}

fn run(cli: Cli) -> Result<String, Failure> {
    let limits = Limits::default();
    match cli.command {
        Command::Validate { file } => {
            let loaded = open(&file)?;
            let s = &loaded.space;
            Ok(format!(
                "ok: {} on {} points over a {}-element quantale\n",
                match s {
                    Space::Gauge(g) => format!("gauge base of {} metrics", g.metrics().len()),
                    Space::Distance(_) => "approach distance".into(),
                    Space::System(_) => "approach system base".into(),
                },
                s.carrier().len(),
                s.quantale().len()
            ))
        }
        Command::Check {
            file,
            axiom,
            point,
            method,
            copies,
            format,
        } => {
            let loaded = open(&file)?;
            let a = Analyzer::new(loaded.space, limits);
            let axiom = match axiom {
                AxiomArg::T0 => Axiom::T0,
                AxiomArg::T1 => Axiom::T1,
                AxiomArg::Closed => Axiom::Closed,
                AxiomArg::Dconn => Axiom::DConnected,
            };
            let method = match method {
                MethodArg::Char => Method::Characterization,
                MethodArg::Oracle => Method::Oracle,
            };
            let point = point.map(|p| a.point(&p)).transpose()?;
            let verdicts = a.check(axiom, point, method, copies)?;
            Ok(match format_of(format) {
                Format::Text => verdicts_text(&verdicts),
                Format::Json => verdicts_json(&verdicts),
            })
        }
        Command::Transition { file, to, mode } => {
            let loaded = open(&file)?;
            let mode = match mode {
                ModeArg::Base => Mode::Base,
                ModeArg::Oracle => Mode::Oracle,
            };
            let space = match (&loaded.space, to) {
                (Space::Gauge(_), Target::Gauge) | (Space::Distance(_), Target::Distance) | (Space::System(_), Target::System) => {
                    loaded.space.clone()
                }
                (Space::Gauge(g), Target::Distance) => Space::Distance(gauge_to_distance(g, mode, &limits)?),
                (Space::Gauge(g), Target::System) => {
                    Space::System(distance_to_system(&gauge_to_distance(g, mode, &limits)?, &limits)?)
                }
                (Space::Distance(d), Target::Gauge) => Space::Gauge(distance_to_gauge(d, &limits)?),
                (Space::Distance(d), Target::System) => Space::System(distance_to_system(d, &limits)?),
                (Space::System(s), Target::Distance) => Space::Distance(system_to_distance(s, mode, &limits)?),
                (Space::System(s), Target::Gauge) => Space::Gauge(system_to_gauge(s, &limits)?),
            };
            Ok(print_document(&document_of(&space)))
        }
        Command::Report {
            file,
            format,
            oracle,
            copies,
        } => {
            let loaded = open(&file)?;
            let p = loaded.space.presentation();
            let a = Analyzer::new(loaded.space, limits);
            let report = a.full_report(oracle, copies)?;
            let mut out = serialize_report(p, &report, format_of(format));
            if oracle && report.oracle.is_none() {
                eprintln!("note: oracle verdicts skipped, a size guard was hit");
                if matches!(format, FormatArg::Text) {
                    out.push_str("# oracle skipped: size guard\n");
                }
            }
            Ok(out)
        }
        Command::Sweep { config, output } => {
            let mut cfg = match config {
                Some(path) => {
                    let text = read(&path)?;
                    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
                    SweepConfig::from_toml(&text, &dir).map_err(|e| fail(PARSE, format!("{}: {e}", path.display())))?
                }
                None => SweepConfig::default(),
            };
            if let Some(o) = output {
                cfg.output = o;
            }
            let result = run_sweep(&cfg);
            write_findings(&cfg.output, &result)
                .map_err(|e| fail(INVALID, format!("{}: {e}", cfg.output.display())))?;
            let mut out = String::new();
            for f in result.findings.iter().filter(|f| f.class == Class::Summary) {
                out.push_str(&format!("{:<22} {:<4} {}\n", f.suite.name(), f.actual, f.subject));
            }
            out.push_str(&format!(
                "{} instances; findings in {}\n",
                result.instances,
                cfg.output.display()
            ));
            if result.violations() > 0 {
                print!("{out}");
                return Err(fail(VIOLATION, format!("{} violations", result.violations())));
            }
            Ok(out)
        }
    }
}


fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("{}", f.message);
            ExitCode::from(f.code)
        }
    }
}
