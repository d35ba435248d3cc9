use std::f64::consts::PI;

use toml::Table;

use magnonq_core::analytics::{
    g0, maximize_over_rq, numeric_peak_search_from, optimize_coupling, peak_curve,
    resonant_optimum, simulated_peak, PeakPair, TimeWindow,
};
use magnonq_core::exec::map_indexed;
use magnonq_core::hilbert::{build_hamiltonian, initial_state, spectrum, Frame, Mode};
use magnonq_core::{Error, Execution};

use super::{linspace, pair_label, parse_pair, peak_pair, stamp, stamp_params, Outcome};
use crate::error::{CliError, CliResult, ExitStatus};
use crate::plot::PlotKind;
use crate::settings::{self, Command, SweepJtSection, SweepRqSection};
use crate::table::ResultTable;

fn check_range(name: &str, lo: f64, hi: f64, n: usize) -> CliResult<()> {
    if !(hi > lo) || n < 2 {
        return Err(CliError::config(format!(
            "{name} range [{lo}, {hi}] with {n} points must be non-empty with at least 2 points"
        )));
    }
    Ok(())
}

/// Concurrence over the `(J, t)` plane, the ridge of first peaks and the
/// refined optimum.
pub fn sweep_jt(doc: Table, exec: Execution) -> CliResult<Outcome> {
    let model = settings::model(&doc)?;
    let sec: SweepJtSection = settings::section(&doc, Command::SweepJt)?;
    check_range("J", sec.j_min, sec.j_max, sec.j_points)?;
    check_range("t", sec.t_min, sec.t_max, sec.t_points)?;
    if sec.j_min < 0.0 {
        return Err(CliError::config("sweep_jt.j_min must be >= 0"));
    }
    let params = model.params()?;
    if !params.is_resonant() {
        return Err(CliError::config(
            "sweep-jt expects resonant parameters (omega_c = omega_m = omega_q)",
        ));
    }
    let unit = params.unit_mode();
    let (a, b) = parse_pair(&sec.pair)?;
    let initial: Mode = sec.initial.parse()?;
    let label = pair_label(a, b);
    let js = linspace(sec.j_min, sec.j_max, sec.j_points);
    let ts = linspace(sec.t_min, sec.t_max, sec.t_points);

    let rows = map_indexed(
        js.len(),
        exec,
        |i| -> magnonq_core::Result<(Vec<f64>, (f64, f64))> {
            let p = params.with_j_angular(unit.to_angular(js[i]))?;
            let prop = spectrum(&build_hamiltonian(&p, Frame::RotatingAtOmegaQ))?
                .propagator(&initial_state(initial));
            let cs = ts
                .iter()
                .map(|&t| {
                    let (za, zb) = prop.pair_amplitudes(a, b, t * unit.time_scale());
                    2.0 * za.norm() * zb.norm()
                })
                .collect();
            let w = TimeWindow::first_period(p.g_m(), p.g_q(), p.j())?;
            let peak = numeric_peak_search_from(&p, initial, a, b, w)?;
            Ok((cs, (peak.t, peak.c)))
        },
    );

    let mut grid = ResultTable::new(vec!["J".to_string(), "t".to_string(), format!("C_{label}")]);
    let mut ridge = ResultTable::new(["J", "t_peak", "C_peak", "t_first_period_formula"]);
    stamp(&mut grid, Command::SweepJt.name(), Some(&doc));
    stamp(&mut ridge, Command::SweepJt.name(), Some(&doc));
    stamp_params(&mut grid, &params);
    for (i, r) in rows.into_iter().enumerate() {
        let (cs, (tp, cp)) = r?;
        for (t, c) in ts.iter().zip(cs) {
            grid.push_numbers(&[js[i], *t, c])?;
        }
        let j = unit.to_angular(js[i]);
        let t_formula = 2.0 * PI / g0(params.g_m(), params.g_q(), j).sqrt();
        ridge.push_numbers(&[
            js[i],
            tp / unit.time_scale(),
            cp,
            t_formula / unit.time_scale(),
        ])?;
    }

    let mut summary = Vec::new();
    if initial == Mode::Q1 {
        if let Some(pp) = peak_pair(a, b) {
            let opt = optimize_coupling(&params, pp)?;
            let (j, t) = (unit.from_angular(opt.j), opt.t / unit.time_scale());
            for table in [&mut grid, &mut ridge] {
                table.meta_num("refined.J", j);
                table.meta_num("refined.t", t);
                table.meta_num("refined.C", opt.c);
            }
            summary.push(format!(
                "refined optimum: J = {j:.6}, t = {t:.6}, C_{label} = {:.6}",
                opt.c
            ));
            if let Ok(f) = resonant_optimum(params.g_m(), params.g_q(), params.j(), 1) {
                let r = params.g_q() / params.g_m();
                for table in [&mut grid, &mut ridge] {
                    table.meta_num("formula.J_opt", unit.from_angular(f.j_opt));
                    table.meta_num("formula.t_opt", f.t_opt / unit.time_scale());
                    if pp == PeakPair::Mm {
                        table.meta_num("formula.C_mm_peak", peak_curve(PeakPair::Mm, r)?);
                    }
                }
                summary.push(format!(
                    "formula: J_opt = {:.6}, t_opt = {:.6}",
                    unit.from_angular(f.j_opt),
                    f.t_opt / unit.time_scale()
                ));
            }
        }
    }
    Ok(Outcome {
        command: Command::SweepJt.name(),
        resolved: Some(doc),
        tables: vec![(None, grid), (Some("ridge"), ridge)],
        plot: Some(PlotKind::Heatmap),
        status: ExitStatus::Success,
        summary,
    })
}

fn ratio_grid(sec: &SweepRqSection) -> CliResult<Vec<f64>> {
    check_range("r_q", sec.r_min, sec.r_max, sec.points)?;
    if sec.r_min <= 0.0 {
        return Err(CliError::config("sweep_rq.r_min must be > 0"));
    }
    let mut rs: Vec<f64> = if sec.log {
        linspace(sec.r_min.ln(), sec.r_max.ln(), sec.points)
            .into_iter()
            .map(f64::exp)
            .collect()
    } else {
        linspace(sec.r_min, sec.r_max, sec.points)
    };
    if let Some(bad) = sec.extras.iter().find(|&&r| !(r > 0.0)) {
        return Err(CliError::config(format!(
            "sweep_rq.extras must be > 0 (got {bad})"
        )));
    }
    rs.extend(&sec.extras);
    rs.sort_by(f64::total_cmp);
    rs.dedup();
    Ok(rs)
}

/// Peak concurrence of the four pairs against `r_q = g_q / g_m`.
pub fn sweep_rq(doc: Table, exec: Execution) -> CliResult<Outcome> {
    let model = settings::model(&doc)?;
    let sec: SweepRqSection = settings::section(&doc, Command::SweepRq)?;
    let params = model.params()?;
    if !params.is_resonant() {
        return Err(CliError::config(
            "sweep-rq expects resonant parameters (omega_c = omega_m = omega_q)",
        ));
    }
    if !(params.g_m() > 0.0) {
        return Err(CliError::config("sweep-rq needs system.g_m > 0"));
    }
    let rs = ratio_grid(&sec)?;
    let mut columns: Vec<String> = PeakPair::ALL
        .iter()
        .map(|p| format!("C_{p}_formula"))
        .collect();
    if sec.simulate {
        columns.extend(PeakPair::ALL.iter().map(|p| format!("C_{p}_sim")));
    }
    columns.insert(0, "r_q".into());
    let mut table = ResultTable::new(columns);
    stamp(&mut table, Command::SweepRq.name(), Some(&doc));

    let g_m = params.g_m();
    let rows = map_indexed(rs.len(), exec, |i| -> magnonq_core::Result<Vec<f64>> {
        let r = rs[i];
        let mut row = vec![r];
        for p in PeakPair::ALL {
            row.push(peak_curve(p, r)?);
        }
        if sec.simulate {
            let q = params.with_couplings_angular(g_m, r * g_m)?;
            for p in PeakPair::ALL {
                row.push(simulated_peak(&q, p)?.c);
            }
        }
        Ok(row)
    });
    for r in rows {
        table.push_numbers(&r?)?;
    }

    let mut summary = Vec::new();
    for p in [PeakPair::M1q2, PeakPair::Q1m2, PeakPair::Mm, PeakPair::Qq] {
        match maximize_over_rq(p, (sec.r_min, sec.r_max)) {
            Ok((r, c)) => {
                table.meta_num(format!("max.{p}.r_q"), r);
                table.meta_num(format!("max.{p}.C"), c);
                summary.push(format!("C_{p} max {c:.6} at r_q = {r:.6}"));
            }
            Err(Error::NoInteriorMaximum(..)) => {
                table.meta(format!("max.{p}"), "none inside range (monotone)");
                summary.push(format!("C_{p}: no interior maximum in range"));
            }
            Err(e) => return Err(e.into()),
        }
    }
    let qq = table.column("C_qq_formula").unwrap_or_default();
    let monotone = qq.windows(2).all(|w| w[1] >= w[0]);
    table.meta("check.qq_formula_nondecreasing", monotone);
    Ok(Outcome {
        command: Command::SweepRq.name(),
        resolved: Some(doc),
        tables: vec![(None, table)],
        plot: Some(PlotKind::Curves),
        status: ExitStatus::Success,
        summary,
    })
}
