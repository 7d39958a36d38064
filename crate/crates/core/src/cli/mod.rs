//! `momrep` command line: config parsing, mode runners and export.

pub mod config;
mod run;
pub mod validate;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::Parser;

pub use config::{parse_config, ConfigError, Format, Mode, RunConfig};
pub use run::{execute, Outcome, Provenance};

#[derive(Debug, Parser)]
#[command(name = "momrep", version, about = "Momentum distributions of quantum fluids and crystals")]
pub struct Args {
    /// What to compute.
    #[arg(value_enum)]
    pub mode: Mode,
    /// TOML run configuration. Optional for `validate`.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Also write a Gaussian-broadened copy of condensate peaks (visualization only).
    #[arg(long)]
    pub broaden: Option<f64>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{message}")]
    Usage { key: String, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Library(#[from] crate::Error),
    #[error("{0} validation suite(s) failed")]
    ValidationFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Library(e) if e.is_numerical() => 3,
            CliError::ValidationFailed(_) => 4,
            _ => 2,
        }
    }

    /// Single `key=value` line for stderr.
    pub fn report(&self) -> String {
        let (kind, key, line, message) = match self {
            CliError::Config(e) => ("config", e.key().to_string(), e.line(), e.message().to_string()),
            CliError::Usage { key, message } => ("usage", key.clone(), None, message.clone()),
            CliError::Io { path, source } => ("io", path.clone(), None, source.to_string()),
            CliError::Library(e) if e.is_numerical() => ("numerical", String::new(), None, e.to_string()),
            CliError::Library(e) => ("input", String::new(), None, e.to_string()),
            CliError::ValidationFailed(_) => ("validation", String::new(), None, self.to_string()),
        };
        let mut out = format!("momrep: error kind={kind}");
        if !key.is_empty() {
            out.push_str(&format!(" key={key}"));
        }
        if let Some(l) = line {
            out.push_str(&format!(" line={l}"));
        }
        out.push_str(&format!(" message={message:?}"));
        out
    }
}

fn io_err(path: &Path, source: std::io::Error) -> CliError {
    CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Write `contents` to `path` through a temporary sibling and a rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = path.with_file_name(format!(".{name}.{}.tmp", std::process::id()));
    let result = std::fs::File::create(&tmp)
        .and_then(|mut f| f.write_all(contents).and_then(|_| f.sync_all()))
        .and_then(|_| std::fs::rename(&tmp, path));
    if let Err(e) = result {
        let _ = std::fs::remove_file(&tmp);
        return Err(io_err(path, e));
    }
    Ok(())
}

/// Parse the config, apply command-line overrides and run the mode.
pub fn run(args: &Args) -> Result<(), CliError> {
    let text = match &args.config {
        Some(path) => std::fs::read_to_string(path).map_err(|e| io_err(path, e))?,
        None if args.mode == Mode::Validate => String::new(),
        None => {
            return Err(CliError::Usage {
                key: "config".into(),
                message: format!("--config is required in {} mode", args.mode.name()),
            })
        }
    };
    let mut cfg = parse_config(&text, args.mode)?;
    if let Some(f) = args.format {
        if f == Format::Csv && !matches!(cfg.mode, Mode::Fluid | Mode::Crystal) {
            return Err(CliError::Usage {
                key: "format".into(),
                message: format!("{} output is json only", cfg.mode.name()),
            });
        }
        cfg.output.format = f;
    }
    if let Some(out) = &args.out {
        cfg.output.path = Some(out.display().to_string());
    }
    if args.broaden.is_some() && cfg.mode != Mode::Condensate {
        return Err(CliError::Usage {
            key: "broaden".into(),
            message: "--broaden applies to condensate mode only".into(),
        });
    }
    let provenance = Provenance::new(&cfg, text.as_bytes());
    let outcome = execute(&cfg, &provenance, args.broaden)?;
    match &cfg.output.path {
        Some(p) => write_atomic(Path::new(p), outcome.main.as_bytes())?,
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(outcome.main.as_bytes())
                .and_then(|_| lock.flush())
                .map_err(|e| io_err(Path::new("<stdout>"), e))?;
        }
    }
    for (path, contents) in &outcome.extra {
        write_atomic(path, contents.as_bytes())?;
    }
    match outcome.failed_suites {
        0 => Ok(()),
        n => Err(CliError::ValidationFailed(n)),
    }
}

/// Entry point for the binary; returns the process exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&args) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", e.report());
            e.exit_code()
        }
    }
}
