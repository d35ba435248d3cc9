use toml::Table;

use magnonq_core::entanglement::concurrence_series;
use magnonq_core::hilbert::{build_hamiltonian, initial_state, propagate, Frame, Mode};
use magnonq_core::open::{lindblad_solve, pseudomode_solve, qsd_ensemble, EnsembleOptions};
use magnonq_core::Execution;

use super::{pair_label, parse_pair, stamp, stamp_params, time_column, time_grid, Outcome};
use crate::error::{CliError, CliResult, ExitStatus};
use crate::plot::PlotKind;
use crate::settings::{self, Command, OpenSection};
use crate::table::ResultTable;

/// Smallest allowance for RK4 error in the ensemble-versus-pseudomode check.
///
/// The single-excitation block of every trajectory is noise-free (standard
/// error exactly 0), so its deviation from the pseudomode is pure integrator
/// error; that deviation, if larger, becomes the floor for the noisy entries.
pub const INTEGRATOR_FLOOR: f64 = 1e-8;

pub fn open(doc: Table, exec: Execution) -> CliResult<Outcome> {
    let model = settings::model(&doc)?;
    let sec: OpenSection = settings::section(&doc, Command::Open)?;
    let params = model.params()?;
    let bath = model
        .bath_config(&params)?
        .ok_or_else(|| CliError::config("open needs a [bath] section"))?;
    let unit = params.unit_mode();
    let grid = time_grid(unit, sec.t_start, sec.t_end, sec.points)?;
    let (a, b) = parse_pair(&sec.pair)?;
    let initial: Mode = sec.initial.parse()?;
    let psi0 = initial_state(initial);
    let label = pair_label(a, b);

    let closed = propagate(
        &build_hamiltonian(&params, Frame::RotatingAtOmegaQ),
        &psi0,
        &grid,
    )?;
    let pm = pseudomode_solve(&params, &bath, &grid, &psi0)?;
    let markov = bath.markov_rate();
    let lb = lindblad_solve(&params, markov, &grid, &psi0)?;
    let c_closed = concurrence_series(&closed, a, b)?.values;
    let c_pm = concurrence_series(&pm, a, b)?.values;
    let c_lb = concurrence_series(&lb, a, b)?.values;

    let mut columns: Vec<String> = vec![
        time_column(unit).into(),
        format!("C_{label}_closed"),
        format!("C_{label}_pseudomode"),
        format!("C_{label}_lindblad"),
        "norm_pseudomode".into(),
    ];
    let ensemble = if sec.trajectories > 0 {
        let opts = EnsembleOptions {
            trajectories: sec.trajectories,
            seed: sec.seed,
            depth: sec.depth,
            max_step: sec.max_step,
            batches: sec.batches,
            probes: sec.probes,
            exec,
        };
        columns.extend([
            format!("C_{label}_qsd"),
            format!("C_{label}_qsd_se"),
            "norm_qsd".into(),
            "trace_qsd".into(),
            "rho_se_max".into(),
            "rho_dev_max".into(),
        ]);
        Some(qsd_ensemble(&params, &bath, &grid, &psi0, opts)?)
    } else {
        None
    };

    let mut table = ResultTable::new(columns);
    stamp(&mut table, Command::Open.name(), Some(&doc));
    stamp_params(&mut table, &params);
    table.meta_num("bath.gamma_rad_per_s", bath.gamma());
    table.meta("bath.convention", bath.convention().name());
    table.meta_num("bath.operator_coefficient", bath.operator_coefficient());
    table.meta_num("bath.markov_rate", markov);
    table.meta(
        "lindblad.rate_note",
        "matched rate k^2/gamma of the same kernel",
    );

    let mut status = ExitStatus::Success;
    let mut summary = Vec::new();
    let qsd = match &ensemble {
        Some(ens) => {
            let (c, se) = ens.concurrence(a, b)?;
            let se_max = ens.max_std_error();
            let errs = ens
                .density
                .std_error
                .as_ref()
                .expect("ensemble reports errors");
            let mut dev_max = Vec::with_capacity(grid.len());
            let mut sector_dev = 0.0_f64;
            for k in 0..grid.len() {
                let d = ens.density.states[k].rho - pm.states[k].rho;
                dev_max.push(d.map(|z| z.norm()).max());
                sector_dev = sector_dev.max(d.fixed_view::<6, 6>(0, 0).map(|z| z.norm()).max());
            }
            let floor = INTEGRATOR_FLOOR.max(sector_dev);
            // per time: largest entry deviation against the largest reported entry SE
            let excess = (0..grid.len())
                .map(|k| dev_max[k] - 3.0 * se_max[k] - floor)
                .fold(f64::NEG_INFINITY, f64::max);
            let mut over = 0;
            for k in 0..grid.len() {
                let d = ens.density.states[k].rho - pm.states[k].rho;
                over += d
                    .iter()
                    .zip(errs[k].iter())
                    .filter(|(z, e)| **e > 0.0 && z.norm() > 3.0 * **e)
                    .count();
            }
            table.meta("qsd.trajectories", sec.trajectories);
            table.meta("qsd.seed", sec.seed);
            table.meta("qsd.depth", sec.depth);
            table.meta("qsd.batches", ens.batch_means.len());
            table.meta_num("qsd.step", ens.setup.step / unit.time_scale());
            table.meta("qsd.substeps", ens.setup.substeps);
            if let Some(cv) = ens.convergence {
                table.meta("qsd.convergence.probes", cv.probes);
                table.meta_num("qsd.convergence.max_difference", cv.max_difference);
                table.meta_num("qsd.convergence.tolerance", cv.tolerance);
                table.meta("qsd.convergence.converged", cv.converged);
                if !cv.converged {
                    status = ExitStatus::Numeric;
                    summary.push(format!(
                        "hierarchy NOT converged at depth {}: |psi_d - psi_(d+1)| = {:.3e}",
                        cv.depth, cv.max_difference
                    ));
                }
            }
            table.meta_num("oracle.sector_deviation", sector_dev);
            table.meta_num("oracle.integrator_floor", floor);
            table.meta_num("oracle.max_excess_over_3se", excess);
            table.meta("oracle.qsd_within_3se", excess <= 0.0);
            table.meta("oracle.entries_beyond_3se", over);
            summary.push(format!(
                "QSD vs pseudomode: max |drho| - 3 SE - floor = {excess:.3e} ({}); sector deviation {sector_dev:.3e} (integrator)",
                if excess <= 0.0 { "ok" } else { "outside" }
            ));
            Some((c, se, ens, se_max, dev_max))
        }
        None => None,
    };

    for k in 0..grid.len() {
        let mut row = vec![
            grid.time(k) / unit.time_scale(),
            c_closed[k],
            c_pm[k],
            c_lb[k],
            pm.states[k].sector_norm(),
        ];
        if let Some((c, se, ens, se_max, dev)) = &qsd {
            let s = &ens.density.states[k];
            row.extend([c[k], se[k], s.sector_norm(), s.trace(), se_max[k], dev[k]]);
        }
        table.push_numbers(&row)?;
    }
    let peak = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
    summary.push(format!(
        "max C_{label}: closed {:.6}, pseudomode {:.6}, lindblad {:.6}",
        peak(&c_closed),
        peak(&c_pm),
        peak(&c_lb)
    ));
    Ok(Outcome {
        command: Command::Open.name(),
        resolved: Some(doc),
        tables: vec![(None, table)],
        plot: Some(PlotKind::TimeSeries),
        status,
        summary,
    })
}
