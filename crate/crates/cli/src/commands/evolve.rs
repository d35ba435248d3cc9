use toml::Table;

use magnonq_core::entanglement::concurrence_series;
use magnonq_core::hilbert::{build_hamiltonian, initial_state, propagate, Mode};
use magnonq_core::params::{ChannelSpec, UnitMode};

use super::{pair_label, parse_pair, stamp, stamp_params, time_column, time_grid, Outcome};
use crate::error::{CliError, CliResult, ExitStatus};
use crate::plot::PlotKind;
use crate::settings::{self, Command, EvolveSection, FiberSection};
use crate::table::ResultTable;

pub fn evolve(doc: Table) -> CliResult<Outcome> {
    let model = settings::model(&doc)?;
    let sec: EvolveSection = settings::section(&doc, Command::Evolve)?;
    let params = model.params()?;
    let unit = params.unit_mode();
    let grid = time_grid(unit, sec.t_start, sec.t_end, sec.points)?;
    let initial: Mode = sec.initial.parse()?;
    let pairs = sec
        .pairs
        .iter()
        .map(|s| parse_pair(s))
        .collect::<CliResult<Vec<_>>>()?;
    if pairs.is_empty() {
        return Err(CliError::config("evolve.pairs is empty"));
    }
    let traj = propagate(
        &build_hamiltonian(&params, model.frame()),
        &initial_state(initial),
        &grid,
    )?;

    let mut columns = vec![time_column(unit).to_string()];
    columns.extend(
        pairs
            .iter()
            .map(|&(a, b)| format!("C_{}", pair_label(a, b))),
    );
    columns.push("sector_norm".into());
    let mut table = ResultTable::new(columns);
    stamp(&mut table, Command::Evolve.name(), Some(&doc));
    stamp_params(&mut table, &params);

    let series = pairs
        .iter()
        .map(|&(a, b)| concurrence_series(&traj, a, b))
        .collect::<magnonq_core::Result<Vec<_>>>()?;
    let mut summary = Vec::new();
    for s in &series {
        let (k, c) = s
            .values
            .iter()
            .enumerate()
            .fold(
                (0, f64::NEG_INFINITY),
                |b, (i, &v)| if v > b.1 { (i, v) } else { b },
            );
        table.meta_num(format!("max.C_{}", pair_label(s.a, s.b)), c);
        table.meta_num(
            format!("argmax.C_{}", pair_label(s.a, s.b)),
            s.times[k] / unit.time_scale(),
        );
        summary.push(format!(
            "max C_{} = {c:.6} at {} = {:.6}",
            pair_label(s.a, s.b),
            time_column(unit),
            s.times[k] / unit.time_scale()
        ));
    }
    for (k, (t, psi)) in traj.iter().enumerate() {
        let mut row = vec![t / unit.time_scale()];
        row.extend(series.iter().map(|s| s.values[k]));
        row.push(psi.sector_norm());
        table.push_numbers(&row)?;
    }
    Ok(Outcome {
        command: Command::Evolve.name(),
        resolved: Some(doc),
        tables: vec![(None, table)],
        plot: Some(PlotKind::TimeSeries),
        status: ExitStatus::Success,
        summary,
    })
}

/// Fiber coupling estimate over a list of lengths.
pub fn fiber(doc: Table) -> CliResult<Outcome> {
    let model = settings::model(&doc)?;
    let sec: FiberSection = settings::section(&doc, Command::Fiber)?;
    if model.units != UnitMode::SiMhz {
        return Err(CliError::config("fiber needs units = \"si_mhz\""));
    }
    let params = model.params()?;
    let xi = model.channel.map(|c| c.xi).unwrap_or(1.0);
    let mut table =
        ResultTable::new(["length_m", "J_f_rad_per_s", "J_rad_per_s", "J_over_2pi_mhz"]);
    stamp(&mut table, Command::Fiber.name(), Some(&doc));
    table.meta_num("derived.gamma_c_rad_per_s", params.gamma_c());
    let mut summary = Vec::new();
    for &l in &sec.lengths_m {
        let ch = ChannelSpec::new(xi, l)?;
        let jf = magnonq_core::params::fiber_coupling_rate(l, params.gamma_c())?;
        let j = ch.coupling(params.gamma_c())?;
        table.push_numbers(&[l, jf, j, UnitMode::SiMhz.from_angular(j)])?;
        summary.push(format!("L = {l} m: J = {:.4} x 10^6 rad/s", j / 1e6));
    }
    Ok(Outcome {
        command: Command::Fiber.name(),
        resolved: Some(doc),
        tables: vec![(None, table)],
        plot: None,
        status: ExitStatus::Success,
        summary,
    })
}
