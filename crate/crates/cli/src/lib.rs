//! Command-line front end: config resolution, subcommands and output files.

// NaN-rejecting `!(x > 0.0)` guards and index loops over fixed-size arrays are deliberate.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod commands;
pub mod error;
pub mod plot;
pub mod settings;
pub mod table;

use std::fs;
use std::path::{Path, PathBuf};

use crate::commands::Outcome;
use crate::error::CliResult;
use crate::table::write_file;

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "MAGNONQ_OUT";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
    Both,
}

/// Write every table of `outcome` under `dir` and return the paths written.
///
/// The primary table is `stem.csv`/`stem.json`; secondary tables add their
/// suffix (`stem.ridge.csv`). The resolved config goes to `stem.config.toml`
/// and, when requested, a gnuplot script to `stem.gp`.
pub fn emit(
    outcome: &Outcome,
    dir: &Path,
    stem: &str,
    format: Format,
    plot: bool,
) -> CliResult<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for (suffix, table) in &outcome.tables {
        let base = match suffix {
            Some(s) => format!("{stem}.{s}"),
            None => stem.to_string(),
        };
        if format != Format::Json {
            let p = dir.join(format!("{base}.csv"));
            table.write_csv(&p)?;
            written.push(p);
        }
        if format != Format::Csv {
            let p = dir.join(format!("{base}.json"));
            table.write_json(&p)?;
            written.push(p);
        }
    }
    if let Some(doc) = &outcome.resolved {
        let p = dir.join(format!("{stem}.config.toml"));
        write_file(&p, &settings::to_toml(doc)?)?;
        written.push(p);
    }
    if let (true, Some(kind)) = (plot, outcome.plot) {
        let p = dir.join(format!("{stem}.gp"));
        write_file(
            &p,
            &plot::script(kind, outcome.primary(), &format!("{stem}.csv"), stem),
        )?;
        written.push(p);
    }
    Ok(written)
}
