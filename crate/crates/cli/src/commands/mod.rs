//! One function per subcommand; each returns tables ready for emission.

mod analytic;
mod evolve;
mod open;
mod sweep;

use toml::Table;

use magnonq_core::analytics::PeakPair;
use magnonq_core::hilbert::{Mode, TimeGrid};
use magnonq_core::params::{UnitMode, ValidatedParams};
use magnonq_core::Execution;

use crate::error::{CliError, CliResult, ExitStatus};
use crate::plot::PlotKind;
use crate::settings::{self, Command};
use crate::table::ResultTable;

pub use analytic::{analytic, fiber_query, ANALYTIC_NAMES};
pub use evolve::{evolve, fiber};
pub use open::open;
pub use sweep::{sweep_jt, sweep_rq};

#[derive(Debug, Clone)]
pub struct Outcome {
    pub command: &'static str,
    /// Resolved configuration, written next to the outputs when present.
    pub resolved: Option<Table>,
    /// Primary table first; the others carry a file-name suffix.
    pub tables: Vec<(Option<&'static str>, ResultTable)>,
    pub plot: Option<PlotKind>,
    pub status: ExitStatus,
    pub summary: Vec<String>,
}

impl Outcome {
    pub fn primary(&self) -> &ResultTable {
        &self.tables[0].1
    }

    pub fn table(&self, suffix: &str) -> Option<&ResultTable> {
        self.tables
            .iter()
            .find(|(s, _)| *s == Some(suffix))
            .map(|(_, t)| t)
    }
}

/// Run a configurable command on a resolved document.
pub fn run(cmd: Command, doc: Table, exec: Execution) -> CliResult<Outcome> {
    match cmd {
        Command::Evolve => evolve(doc),
        Command::SweepJt => sweep_jt(doc, exec),
        Command::SweepRq => sweep_rq(doc, exec),
        Command::Open => open(doc, exec),
        Command::Fiber => fiber(doc),
    }
}

/// Two mode labels run together, e.g. `m1m2` or `q1-c2`.
pub fn parse_pair(s: &str) -> CliResult<(Mode, Mode)> {
    let key: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect();
    if key.len() != 4 {
        return Err(CliError::config(format!(
            "pair '{s}' must name two modes, e.g. m1m2"
        )));
    }
    let a: Mode = key[..2].parse()?;
    let b: Mode = key[2..].parse()?;
    if a == b {
        return Err(CliError::config(format!("pair '{s}' repeats a mode")));
    }
    Ok((a, b))
}

pub fn pair_label(a: Mode, b: Mode) -> String {
    format!("{}{}", a.label(), b.label())
}

/// The closed-form family a pair belongs to, if any.
pub fn peak_pair(a: Mode, b: Mode) -> Option<PeakPair> {
    PeakPair::ALL.into_iter().find(|p| p.modes() == (a, b))
}

pub fn time_column(unit: UnitMode) -> &'static str {
    match unit {
        UnitMode::Dimensionless => "t",
        UnitMode::SiMhz => "t_us",
    }
}

/// Grid in internal time units from user-facing bounds.
pub fn time_grid(unit: UnitMode, start: f64, end: f64, points: usize) -> CliResult<TimeGrid> {
    if points < 2 || !(end > start) {
        return Err(CliError::config(format!(
            "time range [{start}, {end}] with {points} points must be non-empty with at least 2 points"
        )));
    }
    let s = unit.time_scale();
    Ok(TimeGrid::linspace(start * s, end * s, points)?)
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            if i + 1 == n {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

/// Metadata shared by every table: tool, command and the resolved config.
pub fn stamp(table: &mut ResultTable, command: &str, doc: Option<&Table>) {
    table.meta("tool", concat!("magnonq ", env!("CARGO_PKG_VERSION")));
    table.meta("command", command);
    if let Some(doc) = doc {
        for (k, v) in settings::flatten(doc) {
            table.meta(format!("config.{k}"), v);
        }
    }
}

pub fn stamp_params(table: &mut ResultTable, p: &ValidatedParams) {
    table.meta_num("derived.J_rad_per_s", p.j());
    if p.unit_mode() == UnitMode::SiMhz {
        table.meta_num("derived.J_over_2pi_mhz", p.unit_mode().from_angular(p.j()));
    }
}
