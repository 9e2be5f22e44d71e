mod commands;
mod config;

use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use clap::{Arg, ArgAction, ArgMatches};
use thiserror::Error;

use commands::{Command, COMMANDS};
use config::RunConfig;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Config(#[from] config::ConfigError),
    #[error(transparent)]
    Core(#[from] okstab::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_numerical() => 2,
            _ => 1,
        }
    }
}

fn cli() -> clap::Command {
    let subs = COMMANDS.iter().map(|c| {
        let mut sub = clap::Command::new(c.name).about(c.about).arg(
            Arg::new("config")
                .long("config")
                .value_name("FILE")
                .help("TOML file with a section named after the subcommand"),
        );
        for p in c.params {
            let help = match p.default {
                Some(d) => format!("{} [default: {d}]", p.help),
                None => p.help.to_string(),
            };
            sub = sub.arg(
                Arg::new(p.name)
                    .long(p.name)
                    .value_name(p.kind.placeholder())
                    .allow_negative_numbers(true)
                    .action(ArgAction::Set)
                    .help(help),
            );
        }
        sub
    });
    clap::Command::new("okstab")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Stability of lamellar and droplet critical sets of the Ohta-Kawasaki energy")
        .subcommand_required(true)
        .subcommands(subs)
}

fn build_config(cmd: &Command, m: &ArgMatches) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::defaults(cmd.name, cmd.params)?;
    if let Some(path) = m.get_one::<String>("config") {
        let text =
            std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read config {path}: {e}")))?;
        if text.starts_with('#') {
            // the provenance block of an earlier output
            let prior = RunConfig::from_provenance(&text, cmd.name, cmd.params)?;
            cfg.params.extend(prior.params);
        } else {
            cfg.merge_toml(&text, cmd.params)?;
        }
    }
    for p in cmd.params {
        if let Some(raw) = m.get_one::<String>(p.name) {
            cfg.set(p, raw)?;
        }
    }
    Ok(cfg)
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("OKSTAB_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("OKSTAB_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))
}

fn run(cmd: &Command, m: &ArgMatches) -> Result<Option<String>, CliError> {
    configure_threads()?;
    let cfg = build_config(cmd, m)?;
    let out = (cmd.run)(&cfg)?;
    let mut bytes = cfg.provenance().into_bytes();
    bytes.extend_from_slice(&out.csv);
    match cfg.opt_str("output")? {
        Some(path) => std::fs::write(Path::new(path), bytes)?,
        None => std::io::stdout().lock().write_all(&bytes)?,
    }
    if !out.summary.is_empty() {
        eprintln!("{}", out.summary);
    }
    Ok(out.failure)
}

fn main() -> ExitCode {
    let matches = match cli().try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (name, sub) = matches.subcommand().expect("subcommand is required");
    let cmd = COMMANDS.iter().find(|c| c.name == name).expect("registered subcommand");
    match run(cmd, sub) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, CliError::Usage(_) | CliError::Config(_)) {
                eprintln!("run `okstab {name} --help` for the parameters");
            }
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn command_definition_is_consistent() {
        cli().debug_assert();
        for c in COMMANDS {
            RunConfig::defaults(c.name, c.params).unwrap();
        }
    }
}
