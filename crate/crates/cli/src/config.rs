use std::path::{Path, PathBuf};

use serde::Deserialize;
use serde_json::{Map, Value};

use crate::cli::{Cli, Command};
use crate::error::{CliError, CliResult};
use crate::output::Format;

pub const DEFAULT_SEED: u64 = 0;

/// Run configuration as stored on disk. Every field is optional; flags on
/// the command line override whatever is given here.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    command: Option<String>,
    #[serde(default, alias = "overrides")]
    args: Value,
    output: Option<PathBuf>,
    seed: Option<u64>,
    precision: Option<usize>,
}

/// Fully resolved invocation.
#[derive(Debug)]
pub struct Run {
    pub command: Command,
    pub output: Option<PathBuf>,
    pub seed: u64,
    pub format: Format,
}

fn read_file_config(path: &Path) -> CliResult<FileConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read run config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::usage(format!("invalid run config {}: {e}", path.display())))
}

/// Copies every value of `top` that was actually set onto `base`. Null,
/// `false` and empty arrays count as "not given".
fn overlay(base: &mut Map<String, Value>, top: Map<String, Value>) {
    for (key, value) in top {
        match value {
            Value::Null | Value::Bool(false) => {}
            Value::Array(ref a) if a.is_empty() => {}
            Value::Object(inner) => match base.get_mut(&key) {
                Some(Value::Object(existing)) => overlay(existing, inner),
                _ => {
                    base.insert(key, Value::Object(inner));
                }
            },
            other => {
                base.insert(key, other);
            }
        }
    }
}

fn command_args(command: &Command) -> Map<String, Value> {
    match serde_json::to_value(command) {
        Ok(Value::Object(mut tagged)) => match tagged.remove("args") {
            Some(Value::Object(args)) => args,
            _ => Map::new(),
        },
        _ => Map::new(),
    }
}

pub fn resolve(cli: Cli) -> CliResult<Run> {
    let file = match &cli.run_config {
        Some(path) => read_file_config(path)?,
        None => FileConfig::default(),
    };

    let command = match (file.command.as_deref(), cli.command) {
        (None, None) => {
            return Err(CliError::usage(
                "no subcommand given (on the command line or in the run config)",
            ))
        }
        (None, Some(cmd)) if file.args.is_null() => cmd,
        (file_name, cli_cmd) => {
            let name = match (&cli_cmd, file_name) {
                (Some(cmd), Some(f)) if cmd.name() != f => {
                    return Err(CliError::usage(format!(
                        "run config is for '{f}' but '{}' was requested",
                        cmd.name()
                    )))
                }
                (Some(cmd), _) => cmd.name().to_string(),
                (None, Some(f)) => f.to_string(),
                (None, None) => unreachable!(),
            };
            let mut args = match file.args {
                Value::Object(m) => m,
                Value::Null => Map::new(),
                _ => return Err(CliError::usage("run config 'args' must be an object")),
            };
            if let Some(cmd) = &cli_cmd {
                overlay(&mut args, command_args(cmd));
            }
            let mut tagged = Map::new();
            tagged.insert("command".into(), Value::String(name));
            tagged.insert("args".into(), Value::Object(args));
            serde_json::from_value(Value::Object(tagged))
                .map_err(|e| CliError::usage(format!("invalid run config: {e}")))?
        }
    };

    Ok(Run {
        command,
        output: cli.output.or(file.output),
        seed: cli.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
        format: Format {
            precision: cli
                .precision
                .or(file.precision)
                .unwrap_or(Format::DEFAULT_PRECISION),
        },
    })
}
