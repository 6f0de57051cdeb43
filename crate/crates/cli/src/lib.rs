//! Command-line surface for carve-core.
//!
//! Every command reads and writes canonical JSON. Failures print a single
//! JSON error document on stderr: exit 1 for invalid input, exit 2 for I/O.

pub mod repl;

use std::fs;
use std::io::{self, IsTerminal, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use carve_core::canonical::hash;
use carve_core::diagram::{to_canonical_json, Presentation};
use carve_core::fixtures;
use carve_core::invariants::{check_grading, detect_loose};
use carve_core::morse::MooreSpaceSpec;
use carve_core::pipelines::{carve, construct_ploose, CarveInput, CarveReport, PipelineError};
use carve_core::trace::{replay_with, MoveTrace, ReplayError, StandardRules};
use carve_core::validate::validate;

#[derive(Debug, Parser)]
#[command(name = "carve", version, about = "Rewrite Weinstein handle presentations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Carve the CarvePlus disk out of INPUT and write the report to OUTPUT.
    Carve { input: PathBuf, output: PathBuf },
    /// Build a P-loose Legendrian; repeat --p for several Moore entries.
    Ploose {
        #[arg(long = "p", required = true)]
        p: Vec<u32>,
        #[arg(long, default_value_t = fixtures::DEFAULT_N)]
        n: u32,
        output: PathBuf,
    },
    /// Replay a trace (or a report's trace) and list every violation.
    Check { trace: PathBuf },
    /// Replay a trace and print each step's hashes.
    Replay { trace: PathBuf },
    /// Apply moves one line at a time from stdin.
    Repl {
        input: PathBuf,
        /// Where to write the session trace [default: INPUT with .trace.json]
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Emit a built-in input presentation.
    Fixtures {
        #[arg(value_enum)]
        name: FixtureName,
        #[arg(long, default_value_t = fixtures::DEFAULT_N)]
        n: u32,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FixtureName {
    Ex1,
    Ex2,
    Ex3,
    Cor13,
}

impl FixtureName {
    fn as_str(self) -> &'static str {
        match self {
            FixtureName::Ex1 => "ex1",
            FixtureName::Ex2 => "ex2",
            FixtureName::Ex3 => "ex3",
            FixtureName::Cor13 => "cor13",
        }
    }
}

/// A failed command, rendered as the stderr error document.
#[derive(Debug)]
pub enum CliError {
    Invalid {
        kind: &'static str,
        message: String,
        details: Vec<serde_json::Value>,
    },
    Io {
        path: PathBuf,
        source: io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid { .. } => 1,
            CliError::Io { .. } => 2,
        }
    }

    pub fn document(&self) -> serde_json::Value {
        match self {
            CliError::Invalid {
                kind,
                message,
                details,
            } => json!({ "error": kind, "message": message, "details": details }),
            CliError::Io { path, source } => json!({
                "error": "io",
                "message": source.to_string(),
                "details": [path.display().to_string()],
            }),
        }
    }

    fn invalid(kind: &'static str, message: impl Into<String>) -> Self {
        CliError::Invalid {
            kind,
            message: message.into(),
            details: Vec::new(),
        }
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        let details = match &e {
            PipelineError::Invalid(vs) => vs.iter().map(|v| json!(v)).collect(),
            PipelineError::Unprocessable(os) => os.iter().map(|o| json!(o.to_string())).collect(),
            _ => Vec::new(),
        };
        CliError::Invalid {
            kind: e.kind(),
            message: e.to_string(),
            details,
        }
    }
}

impl From<ReplayError> for CliError {
    fn from(e: ReplayError) -> Self {
        CliError::invalid("replay_failed", e.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Style {
    pub color: bool,
}

impl Style {
    /// Reads CARVE_COLOR (auto, never, always). Auto colors a terminal.
    pub fn from_env() -> Self {
        let color = match std::env::var("CARVE_COLOR").as_deref() {
            Ok("always") => true,
            Ok("never") => false,
            _ => io::stdout().is_terminal(),
        };
        Style { color }
    }

    fn paint(self, code: &str, text: &str) -> String {
        if self.color {
            format!("\x1b[{code}m{text}\x1b[0m")
        } else {
            text.to_string()
        }
    }

    fn bad(self, text: &str) -> String {
        self.paint("31", text)
    }

    fn good(self, text: &str) -> String {
        self.paint("32", text)
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn check_readable(path: &Path) -> Result<(), CliError> {
    fs::metadata(path).map(|_| ()).map_err(io_err(path))
}

fn check_writable(path: &Path) -> Result<(), CliError> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => {
            let meta = fs::metadata(dir).map_err(io_err(path))?;
            if meta.is_dir() {
                Ok(())
            } else {
                Err(io_err(path)(io::Error::new(
                    io::ErrorKind::NotFound,
                    "parent is not a directory",
                )))
            }
        }
        _ => Ok(()),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(io_err(path))
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = to_canonical_json(value);
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}

fn parse<T: serde::de::DeserializeOwned>(path: &Path, text: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Invalid {
        kind: "parse_error",
        message: e.to_string(),
        details: vec![json!(path.display().to_string())],
    })
}

/// Reads a trace file, or the `trace` member of a report file.
pub fn load_trace(path: &Path) -> Result<MoveTrace, CliError> {
    let value: serde_json::Value = parse(path, &read(path)?)?;
    let value = match value {
        serde_json::Value::Object(mut map) if map.contains_key("trace") => {
            map.remove("trace").expect("checked")
        }
        other => other,
    };
    serde_json::from_value(value).map_err(|e| CliError::Invalid {
        kind: "parse_error",
        message: e.to_string(),
        details: vec![json!(path.display().to_string())],
    })
}

fn invalid_input(p: &Presentation) -> Result<(), CliError> {
    let violations = validate(p);
    if violations.is_empty() {
        Ok(())
    } else {
        Err(PipelineError::Invalid(violations).into())
    }
}

fn write_report(path: &Path, report: &CarveReport, out: &mut dyn Write) -> Result<(), CliError> {
    write_json(path, report)?;
    writeln!(
        out,
        "wrote {} ({} steps, result {})",
        path.display(),
        report.trace.steps.len(),
        hash(&report.result)
    )
    .map_err(io_err(Path::new("<stdout>")))?;
    for w in &report.stats.warnings {
        writeln!(out, "warning: {w}").map_err(io_err(Path::new("<stdout>")))?;
    }
    Ok(())
}

/// Line report for `check`. Returns whether the trace is clean.
pub fn check_report(trace: &MoveTrace, style: Style, out: &mut dyn Write) -> Result<bool, CliError> {
    let stdout = |e| io_err(Path::new("<stdout>"))(e);
    let mut clean = true;
    for v in validate(&trace.initial) {
        clean = false;
        writeln!(out, "{} initial: {v}", style.bad("violation")).map_err(stdout)?;
    }
    for v in check_grading(trace)? {
        clean = false;
        writeln!(out, "{} {v}", style.bad("violation")).map_err(stdout)?;
    }
    let end = replay_with(trace, &StandardRules, |_, _, _| {})?;
    for v in validate(&end) {
        clean = false;
        writeln!(out, "{} final: {v}", style.bad("violation")).map_err(stdout)?;
    }
    for l in end.legendrians.values() {
        writeln!(out, "loose {} {}: {}", l.id, l.name, detect_loose(&end, l.id)).map_err(stdout)?;
    }
    let verdict = if clean {
        style.good("clean")
    } else {
        style.bad("violations found")
    };
    writeln!(out, "{verdict} ({} steps, final {})", trace.steps.len(), hash(&end)).map_err(stdout)?;
    Ok(clean)
}

/// Runs one command. `stdin` only feeds the REPL.
pub fn run(
    cmd: Command,
    stdin: &mut dyn io::BufRead,
    out: &mut dyn Write,
    style: Style,
) -> Result<i32, CliError> {
    let stdout = |e| io_err(Path::new("<stdout>"))(e);
    match cmd {
        Command::Carve { input, output } => {
            check_readable(&input)?;
            check_writable(&output)?;
            let input_doc: CarveInput = parse(&input, &read(&input)?)?;
            invalid_input(&input_doc.presentation)?;
            let report = carve(&input_doc)?;
            write_report(&output, &report, out)?;
            Ok(0)
        }
        Command::Ploose { p, n, output } => {
            check_writable(&output)?;
            let report = construct_ploose(&MooreSpaceSpec { p }, n)?;
            write_report(&output, &report, out)?;
            Ok(0)
        }
        Command::Check { trace } => {
            check_readable(&trace)?;
            let t = load_trace(&trace)?;
            Ok(if check_report(&t, style, out)? { 0 } else { 1 })
        }
        Command::Replay { trace } => {
            check_readable(&trace)?;
            let t = load_trace(&trace)?;
            let end = replay_with(&t, &StandardRules, |i, _, _| {
                let s = &t.steps[i];
                // Write errors surface again on the final line below.
                let _ = writeln!(out, "{i:>4} {} {} -> {}", s.mv, s.pre_hash, s.post_hash);
            })?;
            writeln!(out, "{} final {}", style.good("ok"), hash(&end)).map_err(stdout)?;
            Ok(0)
        }
        Command::Repl { input, trace } => {
            check_readable(&input)?;
            let trace_path = trace.unwrap_or_else(|| input.with_extension("trace.json"));
            check_writable(&trace_path)?;
            let input_doc: CarveInput = parse(&input, &read(&input)?)?;
            invalid_input(&input_doc.presentation)?;
            let t = repl::run(input_doc.presentation, stdin, out).map_err(stdout)?;
            write_json(&trace_path, &t)?;
            writeln!(out, "trace written to {} ({} steps)", trace_path.display(), t.steps.len())
                .map_err(stdout)?;
            Ok(0)
        }
        Command::Fixtures { name, n, output } => {
            if output.as_deref().is_some_and(|o| o.as_os_str() != "-") {
                check_writable(output.as_deref().expect("some"))?;
            }
            if n < 3 {
                return Err(PipelineError::InvalidDimension(n).into());
            }
            let doc = fixtures::by_name(name.as_str(), n).expect("known fixture name");
            match output.filter(|o| o.as_os_str() != "-") {
                Some(path) => write_json(&path, &doc)?,
                None => writeln!(out, "{}", to_canonical_json(&doc)).map_err(stdout)?,
            }
            Ok(0)
        }
    }
}
