//! Batch front end: every command resolves its options (flags over an
//! optional JSON config), writes one CSV and a `<output>.manifest.json`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod commands;
pub mod config;
pub mod output;

use std::fmt;

/// Exit-code contract: 2 for configuration problems, 3 for numerical failures.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

/// Core errors raised while validating inputs are configuration errors.
pub fn config_err(e: cavityj::Error) -> CliError {
    CliError::Config(e.to_string())
}

pub type CliResult<T> = std::result::Result<T, CliError>;

use args::{Cli, Command};
use output::{Manifest, PointRecord};
use std::path::PathBuf;

/// Overlay flags on the config file values, keeping the command variant.
fn resolve(command: Command, file: serde_json::Map<String, serde_json::Value>) -> CliResult<(Command, config::GlobalKeys)> {
    Ok(match command {
        Command::Pdos(a) => config::merge(&a, file).map(|(a, g)| (Command::Pdos(a), g))?,
        Command::Exchange(a) => config::merge(&a, file).map(|(a, g)| (Command::Exchange(a), g))?,
        Command::SingleMode(a) => config::merge(&a, file).map(|(a, g)| (Command::SingleMode(a), g))?,
        Command::Variational(a) => config::merge(&a, file).map(|(a, g)| (Command::Variational(a), g))?,
        Command::Raman(a) => config::merge(&a, file).map(|(a, g)| (Command::Raman(a), g))?,
        Command::Sqw(a) => config::merge(&a, file).map(|(a, g)| (Command::Sqw(a), g))?,
    })
}

fn dispatch(command: Command) -> CliResult<commands::Outcome> {
    match command {
        Command::Pdos(a) => commands::pdos(a),
        Command::Exchange(a) => commands::exchange_cmd(a),
        Command::SingleMode(a) => commands::single_mode_cmd(a),
        Command::Variational(a) => commands::variational_cmd(a),
        Command::Raman(a) => commands::raman_cmd(a),
        Command::Sqw(a) => commands::sqw_cmd(a),
    }
}

/// Run one command end to end and return the process exit code.
pub fn execute(cli: Cli) -> u8 {
    let start = std::time::Instant::now();
    let name = cli.command.name();
    let mut output = cli.output.clone().unwrap_or_else(|| PathBuf::from(format!("{name}.csv")));
    let mut manifest = Manifest {
        tool: "cavityj",
        version: env!("CARGO_PKG_VERSION"),
        command: name.to_string(),
        status: "error".into(),
        exit_code: 0,
        config: serde_json::Value::Null,
        wall_time_s: 0.0,
        points: Vec::new(),
        outputs: Vec::new(),
        results: serde_json::Value::Null,
        error: None,
    };
    let Cli { config: cfg, output: out_flag, threads, command } = cli;
    let run = || -> CliResult<commands::Outcome> {
        let file = config::read_config(cfg.as_deref())?;
        let (command, globals) = resolve(command, file)?;
        if out_flag.is_none() {
            if let Some(o) = globals.output {
                output = o;
            }
        }
        if let Some(n) = threads.or(globals.threads) {
            if n == 0 {
                return Err(CliError::Config("threads must be positive".into()));
            }
            // a pool built earlier in the same process is kept
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
        dispatch(command)
    };
    let result = run().and_then(|o| {
        let resolved = serde_json::to_string(&o.resolved).map_err(|e| CliError::Io(e.to_string()))?;
        let comments = vec![
            format!("cavityj {}", env!("CARGO_PKG_VERSION")),
            format!("command: {name}"),
            format!("config: {resolved}"),
        ];
        let rec = output::write_output(&output, &o.table.to_csv(&comments)?)?;
        Ok((o, rec))
    });
    let code = match result {
        Ok((o, rec)) => {
            let failed = o.points.iter().filter(|p: &&PointRecord| p.flag == "failed").count();
            manifest.status = if failed == 0 { "ok".into() } else { "partial_failure".into() };
            manifest.exit_code = if failed == 0 { 0 } else { 3 };
            if failed > 0 {
                manifest.error = Some(format!("{failed} point(s) failed"));
            }
            manifest.config = o.resolved;
            manifest.points = o.points;
            manifest.results = o.results;
            manifest.outputs.push(rec);
            manifest.exit_code
        }
        Err(e) => {
            eprintln!("cavityj: {e}");
            manifest.exit_code = e.exit_code();
            manifest.error = Some(e.to_string());
            manifest.exit_code
        }
    };
    manifest.wall_time_s = start.elapsed().as_secs_f64();
    if let Err(e) = output::write_manifest(&output, &manifest) {
        eprintln!("cavityj: {e}");
        return if code == 0 { 1 } else { code };
    }
    code
}
