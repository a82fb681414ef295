//! The `scatterscore` command line.
//!
//! Exit codes: 0 success, 1 parse/validation/script failure, 2 I/O failure,
//! 3 derivation stuck, 4 step budget exhausted.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::derive::{DerivationStatus, DerivationTrace, EmbeddingChoice, Engine, OccurrencePolicy};
use crate::dsl::{load_system, parse_system, ParseDiagnostic};
use crate::grammar::{classify_system, GrammarSystem, SyncTuple, ValidationPolicy};
use crate::music::score_from_mstring;
use crate::render::{export_trace, render_midi, render_text};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_STUCK: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "scatterscore", version, about = "Synchronized scattered-context grammar systems for multi-track scores")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and validate a system file.
    Validate {
        path: PathBuf,
        #[arg(long)]
        allow_erasing: bool,
    },
    /// Print the rule and system classification.
    Classify { path: PathBuf },
    /// Run one derivation and print the terminal m-string.
    Derive {
        #[command(flatten)]
        run: RunArgs,
        /// Write the trace report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print every terminal m-string reachable within the step bound.
    Enumerate {
        path: PathBuf,
        #[arg(long, default_value_t = 256)]
        max_steps: usize,
        #[arg(long, default_value_t = 10000)]
        max_results: usize,
        #[arg(long)]
        allow_erasing: bool,
    },
    /// Derive, then write the score as text and/or MIDI.
    Render {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum, default_value_t = Format::Midi)]
        format: Format,
        /// Output path; the extension is replaced by `.txt` or `.mid`.
        /// Defaults to the input file name in the current directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct RunArgs {
    pub path: PathBuf,
    /// Rule-label tuples separated by `;`, e.g. "2,2;3,3".
    #[arg(long)]
    pub script: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 256)]
    pub max_steps: usize,
    #[arg(long, value_enum, default_value_t = Policy::Leftmost)]
    pub policy: Policy,
    #[arg(long)]
    pub allow_erasing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Policy {
    Leftmost,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Midi,
    Both,
}

/// Parses `"2,2;3,3"` into tuples. Empty segments are ignored.
pub fn parse_script(script: &str) -> Result<Vec<SyncTuple>, String> {
    script
        .split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|seg| {
            seg.split(',')
                .map(|l| l.trim().parse::<u32>().map_err(|_| format!("bad rule label `{}` in script", l.trim())))
                .collect::<Result<Vec<_>, _>>()
                .map(SyncTuple)
        })
        .collect()
}

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(rendered.as_bytes()) } else { stdout.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    let mut ctx = Ctx { out: stdout, err: stderr };
    match cli.command {
        Command::Validate { path, allow_erasing } => ctx.validate(&path, allow_erasing),
        Command::Classify { path } => ctx.classify(&path),
        Command::Derive { run, out } => ctx.derive(&run, out.as_deref()),
        Command::Enumerate { path, max_steps, max_results, allow_erasing } => {
            ctx.enumerate(&path, max_steps, max_results, allow_erasing)
        }
        Command::Render { run, format, out } => ctx.render(&run, format, out.as_deref()),
    }
}

struct Ctx<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

type Outcome<T> = Result<T, i32>;

impl Ctx<'_> {
    fn error(&mut self, message: impl std::fmt::Display) {
        let _ = writeln!(self.err, "error: {message}");
    }

    fn report(&mut self, path: &Path, diags: &[ParseDiagnostic]) {
        for d in diags {
            let _ = writeln!(
                self.err,
                "{}:{}:{}: {}: {}",
                path.display(),
                d.span.line,
                d.span.column,
                d.severity,
                d.message
            );
        }
    }

    fn read(&mut self, path: &Path) -> Outcome<String> {
        fs::read_to_string(path).map_err(|e| {
            self.error(format_args!("cannot read {}: {e}", path.display()));
            EXIT_IO
        })
    }

    fn write(&mut self, path: &Path, bytes: &[u8]) -> Outcome<()> {
        fs::write(path, bytes).map_err(|e| {
            self.error(format_args!("cannot write {}: {e}", path.display()));
            EXIT_IO
        })
    }

    fn load(&mut self, path: &Path, allow_erasing: bool) -> Outcome<GrammarSystem> {
        let text = self.read(path)?;
        match load_system(&text, ValidationPolicy { allow_erasing }) {
            Ok(loaded) => {
                self.report(path, &loaded.warnings);
                Ok(loaded.system)
            }
            Err(diags) => {
                self.report(path, &diags);
                Err(EXIT_INVALID)
            }
        }
    }

    fn validate(&mut self, path: &Path, allow_erasing: bool) -> i32 {
        match self.load(path, allow_erasing) {
            Ok(_) => EXIT_OK,
            Err(code) => code,
        }
    }

    fn classify(&mut self, path: &Path) -> i32 {
        let text = match self.read(path) {
            Ok(t) => t,
            Err(code) => return code,
        };
        let system = match parse_system(&text) {
            Ok(s) => s,
            Err(diags) => {
                self.report(path, &diags);
                return EXIT_INVALID;
            }
        };
        let class = classify_system(&system);
        let yn = |b: bool| if b { "y" } else { "n" };
        let yes_no = |b: bool| if b { "yes" } else { "no" };
        for (i, comp) in class.components.iter().enumerate() {
            for (label, r) in &comp.rules {
                let _ = writeln!(
                    self.out,
                    "G{} rule {label}: cf={} simple={} linear={} erasing={}",
                    i + 1,
                    yn(r.is_context_free),
                    yn(r.is_simple),
                    yn(r.is_linear),
                    yn(r.is_erasing)
                );
            }
        }
        let _ = writeln!(self.out, "context-free-restricted: {}", yes_no(class.context_free_restricted));
        let _ = writeln!(self.out, "linear-restricted: {}", yes_no(class.linear_restricted));
        let _ = writeln!(self.out, "non-erasing: {}", yes_no(class.non_erasing));
        EXIT_OK
    }

    fn run_derivation(&mut self, system: &GrammarSystem, args: &RunArgs) -> Outcome<DerivationTrace> {
        let engine = Engine::new(system);
        match &args.script {
            Some(script) => {
                let script = parse_script(script).map_err(|m| {
                    self.error(m);
                    EXIT_INVALID
                })?;
                let policy = match args.policy {
                    Policy::Leftmost => OccurrencePolicy::Leftmost,
                    Policy::Random => OccurrencePolicy::Random(args.seed),
                };
                engine.derive_scripted(&script, &policy).map_err(|e| {
                    self.error(e);
                    EXIT_INVALID
                })
            }
            None => {
                let choice = match args.policy {
                    Policy::Leftmost => EmbeddingChoice::Leftmost,
                    Policy::Random => EmbeddingChoice::Random,
                };
                Ok(engine.derive_random_with(args.seed, args.max_steps, choice))
            }
        }
    }

    fn status_code(&mut self, trace: &DerivationTrace) -> i32 {
        match trace.status {
            DerivationStatus::Terminal => EXIT_OK,
            DerivationStatus::Stuck => {
                self.error(format_args!("derivation stuck after {} step(s)", trace.steps.len()));
                EXIT_STUCK
            }
            DerivationStatus::BudgetExhausted => {
                self.error(format_args!("step budget exhausted after {} step(s)", trace.steps.len()));
                EXIT_BUDGET
            }
        }
    }

    fn derive(&mut self, args: &RunArgs, out: Option<&Path>) -> i32 {
        let result = (|| {
            let system = self.load(&args.path, args.allow_erasing)?;
            let trace = self.run_derivation(&system, args)?;
            if let Some(out) = out {
                self.write(out, export_trace(&trace).as_bytes())?;
            }
            let code = self.status_code(&trace);
            if code == EXIT_OK {
                let _ = writeln!(self.out, "{}", join_components(trace.last_form().forms()));
            }
            Ok(code)
        })();
        result.unwrap_or_else(|code| code)
    }

    fn enumerate(&mut self, path: &Path, max_steps: usize, max_results: usize, allow_erasing: bool) -> i32 {
        let system = match self.load(path, allow_erasing) {
            Ok(s) => s,
            Err(code) => return code,
        };
        let found = Engine::new(&system).enumerate(max_steps, max_results);
        let mut lines: Vec<String> = found.strings.iter().map(|mf| join_components(mf.forms())).collect();
        lines.sort();
        for line in lines {
            let _ = writeln!(self.out, "{line}");
        }
        if found.truncated {
            let _ = writeln!(self.err, "note: output truncated at {max_results} result(s)");
        }
        EXIT_OK
    }

    fn render(&mut self, args: &RunArgs, format: Format, out: Option<&Path>) -> i32 {
        let result = (|| {
            let system = self.load(&args.path, args.allow_erasing)?;
            let trace = self.run_derivation(&system, args)?;
            let code = self.status_code(&trace);
            if code != EXIT_OK {
                return Ok(code);
            }
            let score = score_from_mstring(&system, trace.last_form()).map_err(|e| {
                self.error(e);
                EXIT_INVALID
            })?;
            let base = match out {
                Some(p) => p.to_path_buf(),
                None => PathBuf::from(args.path.file_name().unwrap_or_default()),
            };
            if matches!(format, Format::Text | Format::Both) {
                self.write(&base.with_extension("txt"), render_text(&score).as_bytes())?;
            }
            if matches!(format, Format::Midi | Format::Both) {
                let bytes = render_midi(&score).map_err(|e| {
                    self.error(e);
                    EXIT_INVALID
                })?;
                self.write(&base.with_extension("mid"), &bytes)?;
            }
            Ok(EXIT_OK)
        })();
        result.unwrap_or_else(|code| code)
    }
}

fn join_components(forms: &[Vec<crate::grammar::Symbol>]) -> String {
    let parts: Vec<String> = forms
        .iter()
        .map(|f| f.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(" "))
        .collect();
    parts.join(" | ")
}
