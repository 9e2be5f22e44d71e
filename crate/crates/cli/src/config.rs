//! Run configuration: typed parameter tables per subcommand, merged from
//! defaults, an optional TOML file and command-line flags.
//!
//! A config file holds one section named after the subcommand:
//!
//! ```toml
//! [energy]
//! shape = "lamella"
//! k = 2
//! gamma = 1.5
//! ```
//!
//! Every CSV starts with the same block commented out with `# `, so the
//! header of an output file is itself a valid config.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;
use toml::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Int,
    Float,
    Str,
    FloatList,
    IntList,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Kind::Int => "integer",
            Kind::Float => "number",
            Kind::Str => "string",
            Kind::FloatList => "list of numbers",
            Kind::IntList => "list of integers",
        };
        f.write_str(s)
    }
}

impl Kind {
    pub fn placeholder(self) -> &'static str {
        match self {
            Kind::Int => "INT",
            Kind::Float => "NUM",
            Kind::Str => "TEXT",
            Kind::FloatList => "NUM,..",
            Kind::IntList => "INT,..",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Param {
    pub name: &'static str,
    pub kind: Kind,
    pub default: Option<&'static str>,
    pub help: &'static str,
}

pub const fn p(name: &'static str, kind: Kind, default: Option<&'static str>, help: &'static str) -> Param {
    Param {
        name,
        kind,
        default,
        help,
    }
}

#[derive(Debug, Error)]
#[error("{0}")]
pub struct ConfigError(pub String);

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

/// Parses a command-line string into the parameter's type.
pub fn parse_value(param: &Param, raw: &str) -> Result<Value, ConfigError> {
    let bad = || ConfigError(format!("--{}: expected {}, got `{raw}`", param.name, param.kind));
    let float = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
    let int = |s: &str| s.trim().parse::<i64>().map_err(|_| bad());
    Ok(match param.kind {
        Kind::Int => Value::Integer(int(raw)?),
        Kind::Float => Value::Float(float(raw)?),
        Kind::Str => Value::String(raw.to_string()),
        Kind::FloatList => Value::Array(
            raw.split(',')
                .map(|s| float(s).map(Value::Float))
                .collect::<Result<_, _>>()?,
        ),
        Kind::IntList => Value::Array(
            raw.split(',')
                .map(|s| int(s).map(Value::Integer))
                .collect::<Result<_, _>>()?,
        ),
    })
}

/// Checks a TOML value against the parameter type; integers are accepted
/// where numbers are expected and stored as floats.
fn coerce(param: &Param, v: Value) -> Result<Value, ConfigError> {
    let bad = |v: &Value| ConfigError(format!("`{}`: expected {}, got {v}", param.name, param.kind));
    let as_float = |v: Value| match v {
        Value::Float(f) => Ok(Value::Float(f)),
        Value::Integer(i) => Ok(Value::Float(i as f64)),
        other => Err(bad(&other)),
    };
    match (param.kind, v) {
        (Kind::Int, Value::Integer(i)) => Ok(Value::Integer(i)),
        (Kind::Float, v) => as_float(v),
        (Kind::Str, Value::String(s)) => Ok(Value::String(s)),
        (Kind::FloatList, Value::Array(a)) => Ok(Value::Array(a.into_iter().map(as_float).collect::<Result<_, _>>()?)),
        (Kind::IntList, Value::Array(a)) => Ok(Value::Array(
            a.into_iter()
                .map(|v| match v {
                    Value::Integer(i) => Ok(Value::Integer(i)),
                    other => Err(bad(&other)),
                })
                .collect::<Result<_, _>>()?,
        )),
        (_, v) => Err(bad(&v)),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: String,
    pub params: BTreeMap<String, Value>,
}

/// Where results go rather than what was computed; left out of provenance so
/// that replaying a CSV never overwrites it.
const DESTINATIONS: &[&str] = &["output", "checkpoint"];

impl RunConfig {
    /// Defaults of every parameter that has one.
    pub fn defaults(command: &str, table: &[Param]) -> Result<Self, ConfigError> {
        let mut params = BTreeMap::new();
        for p in table {
            if let Some(d) = p.default {
                params.insert(p.name.to_string(), parse_value(p, d)?);
            }
        }
        Ok(Self {
            command: command.to_string(),
            params,
        })
    }

    /// Overlays the `[command]` section of a TOML document. A top-level
    /// `tool` string (written by the echo) is ignored; anything else that
    /// is not a known key of this command is rejected.
    pub fn merge_toml(&mut self, text: &str, table: &[Param]) -> Result<(), ConfigError> {
        let doc: toml::Table = toml::from_str(text).map_err(|e| ConfigError(format!("config: {e}")))?;
        for (key, value) in doc {
            if key == "tool" && value.is_str() {
                continue;
            }
            if key != self.command {
                return err(format!(
                    "config: unexpected key or section `{key}` for `{}`",
                    self.command
                ));
            }
            let Value::Table(section) = value else {
                return err(format!("config: `{key}` must be a section"));
            };
            for (k, v) in section {
                let Some(param) = table.iter().find(|p| p.name == k) else {
                    return err(format!("config: unknown key `{k}` for `{}`", self.command));
                };
                self.params.insert(k, coerce(param, v)?);
            }
        }
        Ok(())
    }

    pub fn set(&mut self, param: &Param, raw: &str) -> Result<(), ConfigError> {
        self.params.insert(param.name.to_string(), parse_value(param, raw)?);
        Ok(())
    }

    /// The config as TOML: a `tool` line and the command section.
    pub fn to_toml(&self) -> String {
        let mut section = toml::Table::new();
        for (k, v) in self.params.iter().filter(|(k, _)| !DESTINATIONS.contains(&k.as_str())) {
            section.insert(k.clone(), v.clone());
        }
        let mut doc = toml::Table::new();
        doc.insert("tool".into(), Value::String(tool_version()));
        doc.insert(self.command.clone(), Value::Table(section));
        toml::to_string(&doc).expect("config tables serialize")
    }

    /// `#`-prefixed provenance block for the top of a CSV.
    pub fn provenance(&self) -> String {
        self.to_toml()
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| format!("# {l}\n"))
            .collect()
    }

    /// Recovers a config from the leading `#` lines of a CSV.
    pub fn from_provenance(text: &str, command: &str, table: &[Param]) -> Result<Self, ConfigError> {
        let body: String = text
            .lines()
            .take_while(|l| l.starts_with('#'))
            .map(|l| format!("{}\n", l.trim_start_matches('#').trim_start()))
            .collect();
        let mut cfg = RunConfig {
            command: command.to_string(),
            params: BTreeMap::new(),
        };
        cfg.merge_toml(&body, table)?;
        Ok(cfg)
    }

    fn get(&self, key: &str) -> Result<&Value, ConfigError> {
        self.params
            .get(key)
            .ok_or_else(|| ConfigError(format!("missing required parameter --{key}")))
    }

    pub fn has(&self, key: &str) -> bool {
        self.params.contains_key(key)
    }

    pub fn f64(&self, key: &str) -> Result<f64, ConfigError> {
        match self.get(key)? {
            Value::Float(f) => Ok(*f),
            Value::Integer(i) => Ok(*i as f64),
            v => err(format!("--{key}: expected a number, got {v}")),
        }
    }

    pub fn opt_f64(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        if self.has(key) {
            self.f64(key).map(Some)
        } else {
            Ok(None)
        }
    }

    pub fn usize(&self, key: &str) -> Result<usize, ConfigError> {
        match self.get(key)? {
            Value::Integer(i) if *i >= 0 => Ok(*i as usize),
            v => err(format!("--{key}: expected a nonnegative integer, got {v}")),
        }
    }

    pub fn opt_usize(&self, key: &str) -> Result<Option<usize>, ConfigError> {
        if self.has(key) {
            self.usize(key).map(Some)
        } else {
            Ok(None)
        }
    }

    pub fn u64(&self, key: &str) -> Result<u64, ConfigError> {
        self.usize(key).map(|v| v as u64)
    }

    pub fn str(&self, key: &str) -> Result<&str, ConfigError> {
        match self.get(key)? {
            Value::String(s) => Ok(s),
            v => err(format!("--{key}: expected a string, got {v}")),
        }
    }

    pub fn opt_str(&self, key: &str) -> Result<Option<&str>, ConfigError> {
        if self.has(key) {
            self.str(key).map(Some)
        } else {
            Ok(None)
        }
    }

    pub fn f64_list(&self, key: &str) -> Result<Vec<f64>, ConfigError> {
        match self.get(key)? {
            Value::Array(a) => a
                .iter()
                .map(|v| match v {
                    Value::Float(f) => Ok(*f),
                    Value::Integer(i) => Ok(*i as f64),
                    v => err(format!("--{key}: expected numbers, got {v}")),
                })
                .collect(),
            v => err(format!("--{key}: expected a list, got {v}")),
        }
    }

    pub fn usize_list(&self, key: &str) -> Result<Vec<usize>, ConfigError> {
        match self.get(key)? {
            Value::Array(a) => a
                .iter()
                .map(|v| match v {
                    Value::Integer(i) if *i >= 0 => Ok(*i as usize),
                    v => err(format!("--{key}: expected nonnegative integers, got {v}")),
                })
                .collect(),
            v => err(format!("--{key}: expected a list, got {v}")),
        }
    }
}

pub fn tool_version() -> String {
    format!("okstab {}", env!("CARGO_PKG_VERSION"))
}
