//! Resolution of the run configuration: built-in defaults for the command,
//! then the `--config` file, then `--key=value` overrides.
//!
//! Model sections (`units`, `frame`, `[system]`, `[channel]`, `[bath]`) from a
//! file replace the defaults wholesale when the file has a `[system]` table;
//! command sections are merged key by key. Setting `system.J` drops a default
//! `[channel]` and setting any `channel.*` key drops `system.J`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use magnonq_core::config::ModelConfig;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Evolve,
    SweepJt,
    SweepRq,
    Open,
    Fiber,
}

impl Command {
    pub const ALL: [Command; 5] = [
        Command::Evolve,
        Command::SweepJt,
        Command::SweepRq,
        Command::Open,
        Command::Fiber,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Evolve => "evolve",
            Command::SweepJt => "sweep-jt",
            Command::SweepRq => "sweep-rq",
            Command::Open => "open",
            Command::Fiber => "fiber",
        }
    }

    /// Config section holding the command's own settings.
    pub fn section(self) -> &'static str {
        match self {
            Command::Evolve => "evolve",
            Command::SweepJt => "sweep_jt",
            Command::SweepRq => "sweep_rq",
            Command::Open => "open",
            Command::Fiber => "fiber",
        }
    }

    fn defaults(self) -> &'static str {
        match self {
            Command::Evolve => concat!(
                include_str!("defaults/si_detuned.toml"),
                include_str!("defaults/evolve.toml")
            ),
            Command::Open => concat!(
                include_str!("defaults/si_detuned.toml"),
                include_str!("defaults/open.toml")
            ),
            Command::Fiber => concat!(
                include_str!("defaults/si_detuned.toml"),
                include_str!("defaults/fiber.toml")
            ),
            Command::SweepJt => concat!(
                include_str!("defaults/resonant.toml"),
                include_str!("defaults/sweep_jt.toml")
            ),
            Command::SweepRq => concat!(
                include_str!("defaults/resonant.toml"),
                include_str!("defaults/sweep_rq.toml")
            ),
        }
    }

    fn section_keys(self) -> &'static [&'static str] {
        match self {
            Command::Evolve => &["t_start", "t_end", "points", "initial", "pairs"],
            Command::SweepJt => &[
                "j_min", "j_max", "j_points", "t_min", "t_max", "t_points", "pair", "initial",
            ],
            Command::SweepRq => &["r_min", "r_max", "points", "log", "extras", "simulate"],
            Command::Open => &[
                "t_start",
                "t_end",
                "points",
                "pair",
                "initial",
                "trajectories",
                "seed",
                "depth",
                "max_step",
                "batches",
                "probes",
            ],
            Command::Fiber => &["lengths_m"],
        }
    }

    /// Every dotted key accepted for this command.
    pub fn schema(self) -> Vec<String> {
        let mut keys: Vec<String> = MODEL_KEYS.iter().map(|s| s.to_string()).collect();
        keys.extend(
            self.section_keys()
                .iter()
                .map(|k| format!("{}.{k}", self.section())),
        );
        keys
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| CliError::config(format!("unknown command '{s}'")))
    }
}

const MODEL_KEYS: &[&str] = &[
    "units",
    "frame",
    "system.omega_c",
    "system.omega_m",
    "system.omega_q",
    "system.g_m",
    "system.g_q",
    "system.J",
    "system.gamma_c",
    "channel.xi",
    "channel.length_m",
    "bath.gamma",
    "bath.gamma_unit",
    "bath.convention",
];

const MODEL_SECTIONS: &[&str] = &["units", "frame", "system", "channel", "bath"];

fn parse_doc(text: &str, origin: &str) -> CliResult<Table> {
    text.parse::<Table>()
        .map_err(|e| CliError::config(format!("{origin}: {e}")))
}

/// `--key=value` with the leading dashes removed.
#[derive(Debug, Clone, PartialEq)]
pub struct Override {
    pub key: String,
    pub raw: String,
}

impl FromStr for Override {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        let s = s.trim_start_matches('-');
        let (k, v) = s.split_once('=').ok_or_else(|| {
            CliError::config(format!("override '{s}' is not of the form key=value"))
        })?;
        Ok(Override {
            key: k.trim().to_string(),
            raw: v.trim().to_string(),
        })
    }
}

fn parse_value(raw: &str) -> Value {
    format!("v = {raw}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()))
}

/// Full dotted path for `key`, which may be a unique leaf name.
fn resolve_key(cmd: Command, key: &str) -> CliResult<String> {
    let schema = cmd.schema();
    if schema.iter().any(|k| k == key) {
        return Ok(key.to_string());
    }
    let hits: Vec<&String> = schema
        .iter()
        .filter(|k| k.rsplit('.').next() == Some(key))
        .collect();
    match hits.as_slice() {
        [one] => Ok((*one).clone()),
        [] => Err(CliError::config(format!(
            "unknown key '{key}' for {cmd}; valid keys: {}",
            schema.join(", ")
        ))),
        many => Err(CliError::config(format!(
            "key '{key}' is ambiguous: {}",
            many.iter()
                .map(|s| s.as_str())
                .collect::<Vec<_>>()
                .join(", ")
        ))),
    }
}

fn set_path(doc: &mut Table, path: &str, value: Value) {
    let mut parts: Vec<&str> = path.split('.').collect();
    let leaf = parts.pop().expect("non-empty path");
    let mut t = doc;
    for p in parts {
        t = t
            .entry(p.to_string())
            .or_insert_with(|| Value::Table(Table::new()))
            .as_table_mut()
            .expect("schema paths go through tables");
    }
    t.insert(leaf.to_string(), value);
}

fn drop_conflicts(doc: &mut Table, path: &str) {
    if path == "system.J" {
        doc.remove("channel");
    } else if path.starts_with("channel.") {
        if let Some(Value::Table(s)) = doc.get_mut("system") {
            s.remove("J");
        }
    }
}

fn merge(base: &mut Table, top: Table) {
    for (k, v) in top {
        match (base.get_mut(&k), v) {
            (Some(Value::Table(b)), Value::Table(t)) => merge(b, t),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

/// Resolved document for `cmd`.
pub fn resolve(cmd: Command, file: Option<&str>, overrides: &[Override]) -> CliResult<Table> {
    let mut doc = parse_doc(cmd.defaults(), "built-in defaults")?;
    if let Some(text) = file {
        let user = parse_doc(text, "config file")?;
        for k in user.keys() {
            let known = MODEL_SECTIONS.contains(&k.as_str())
                || Command::ALL.iter().any(|c| c.section() == k);
            if !known {
                return Err(CliError::config(format!(
                    "unknown top-level key '{k}' in config file"
                )));
            }
        }
        if user.contains_key("system") {
            for s in MODEL_SECTIONS {
                doc.remove(*s);
            }
        }
        let has_j = user.get("system").and_then(|s| s.get("J")).is_some();
        if has_j && !user.contains_key("channel") {
            doc.remove("channel");
        }
        // sections of other commands are allowed in a shared file and ignored
        let user: Table = user
            .into_iter()
            .filter(|(k, _)| MODEL_SECTIONS.contains(&k.as_str()) || k == cmd.section())
            .collect();
        merge(&mut doc, user);
    }
    for o in overrides {
        let path = resolve_key(cmd, &o.key)?;
        drop_conflicts(&mut doc, &path);
        set_path(&mut doc, &path, parse_value(&o.raw));
    }
    Ok(doc)
}

/// Model part of a resolved document.
pub fn model(doc: &Table) -> CliResult<ModelConfig> {
    let t: Table = doc
        .iter()
        .filter(|(k, _)| MODEL_SECTIONS.contains(&k.as_str()))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    ModelConfig::deserialize(t).map_err(|e| CliError::config(e.to_string()))
}

/// Typed command section of a resolved document.
pub fn section<T: for<'de> Deserialize<'de>>(doc: &Table, cmd: Command) -> CliResult<T> {
    let v = doc
        .get(cmd.section())
        .cloned()
        .unwrap_or(Value::Table(Table::new()));
    T::deserialize(v).map_err(|e| CliError::config(format!("[{}]: {e}", cmd.section())))
}

pub fn to_toml(doc: &Table) -> CliResult<String> {
    toml::to_string(doc).map_err(|e| CliError::config(e.to_string()))
}

/// `path = value` for every leaf, in document order.
pub fn flatten(doc: &Table) -> Vec<(String, String)> {
    fn walk(prefix: &str, t: &Table, out: &mut Vec<(String, String)>) {
        for (k, v) in t {
            let path = if prefix.is_empty() {
                k.clone()
            } else {
                format!("{prefix}.{k}")
            };
            match v {
                Value::Table(inner) => walk(&path, inner, out),
                other => out.push((path, other.to_string())),
            }
        }
    }
    let mut out = Vec::new();
    walk("", doc, &mut out);
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveSection {
    pub t_start: f64,
    pub t_end: f64,
    pub points: usize,
    pub initial: String,
    pub pairs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepJtSection {
    pub j_min: f64,
    pub j_max: f64,
    pub j_points: usize,
    pub t_min: f64,
    pub t_max: f64,
    pub t_points: usize,
    pub pair: String,
    pub initial: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepRqSection {
    pub r_min: f64,
    pub r_max: f64,
    pub points: usize,
    pub log: bool,
    pub extras: Vec<f64>,
    pub simulate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpenSection {
    pub t_start: f64,
    pub t_end: f64,
    pub points: usize,
    pub pair: String,
    pub initial: String,
    pub trajectories: usize,
    pub seed: u64,
    pub depth: usize,
    #[serde(default)]
    pub max_step: Option<f64>,
    pub batches: usize,
    pub probes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiberSection {
    pub lengths_m: Vec<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ov(s: &str) -> Override {
        s.parse().unwrap()
    }

    #[test]
    fn defaults_parse_for_every_command() {
        for c in Command::ALL {
            let doc = resolve(c, None, &[]).unwrap();
            let m = model(&doc).unwrap();
            m.params().unwrap();
            for key in flatten(&doc).into_iter().map(|(k, _)| k) {
                assert!(c.schema().contains(&key), "{c}: {key} missing from schema");
            }
        }
        let doc = resolve(Command::Open, None, &[]).unwrap();
        section::<OpenSection>(&doc, Command::Open).unwrap();
    }

    #[test]
    fn leaf_and_dotted_overrides() {
        let doc = resolve(
            Command::Evolve,
            None,
            &[ov("--g_q=30"), ov("--evolve.points=11")],
        )
        .unwrap();
        assert_eq!(doc["system"]["g_q"].as_integer(), Some(30));
        assert_eq!(doc["evolve"]["points"].as_integer(), Some(11));
    }

    #[test]
    fn unknown_and_ambiguous_keys() {
        let e = resolve(Command::Evolve, None, &[ov("--nope=1")]).unwrap_err();
        assert!(e.to_string().contains("valid keys"));
        let e = resolve(Command::Evolve, None, &[ov("--evolve.nope=1")]).unwrap_err();
        assert!(matches!(e, CliError::Config(_)));
    }

    #[test]
    fn setting_j_drops_default_channel() {
        let doc = resolve(Command::Evolve, None, &[ov("--J=14.7")]).unwrap();
        assert!(doc.get("channel").is_none());
        model(&doc).unwrap().params().unwrap();
    }

    #[test]
    fn file_system_replaces_default_model() {
        let file = "units = \"dimensionless\"\n[system]\nomega_c = 0\nomega_m = 0\nomega_q = 0\ng_m = 0.4\ng_q = 0.3\nJ = 0.35\n[evolve]\nt_end = 5.0\n";
        let doc = resolve(Command::Evolve, Some(file), &[]).unwrap();
        let p = model(&doc).unwrap().params().unwrap();
        assert_eq!(p.g_m(), 0.4);
        let s: EvolveSection = section(&doc, Command::Evolve).unwrap();
        assert_eq!(s.t_end, 5.0);
        assert_eq!(s.points, 2001);
    }

    #[test]
    fn unknown_file_keys_rejected() {
        assert!(resolve(Command::Evolve, Some("[plot]\nx = 1\n"), &[]).is_err());
        let doc = resolve(Command::Evolve, Some("[evolve]\nbogus = 1\n"), &[]).unwrap();
        assert!(section::<EvolveSection>(&doc, Command::Evolve).is_err());
    }

    #[test]
    fn resolved_document_round_trips() {
        let doc = resolve(Command::Open, None, &[ov("--trajectories=10")]).unwrap();
        let again = resolve(Command::Open, Some(&to_toml(&doc).unwrap()), &[]).unwrap();
        assert_eq!(doc, again);
    }
}
