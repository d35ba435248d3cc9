//! Closed-form queries: `name key=value ...`.

use std::collections::BTreeMap;

use magnonq_core::analytics::{eta, g0, maximize_over_rq, peak_curve, resonant_optimum, PeakPair};
use magnonq_core::params::{channel_coupling, fiber_coupling_rate, ANGULAR_PER_MHZ};

use super::{stamp, Outcome};
use crate::error::{CliError, CliResult, ExitStatus};
use crate::table::{Cell, ResultTable};

pub const ANALYTIC_NAMES: &[&str] = &[
    "jopt",
    "topt",
    "tpeak",
    "g0",
    "eta",
    "cpeak-mm",
    "cpeak-qq",
    "cpeak-q1m2",
    "cpeak-m1q2",
    "rqmax-m1q2",
    "rqmax-q1m2",
    "fiber",
];

struct Args {
    name: String,
    values: BTreeMap<String, f64>,
}

impl Args {
    fn parse(query: &[String]) -> CliResult<Self> {
        let (name, rest) = query.split_first().ok_or_else(|| {
            CliError::config(format!(
                "analytic needs a quantity name; valid names: {}",
                ANALYTIC_NAMES.join(", ")
            ))
        })?;
        let mut values = BTreeMap::new();
        for tok in rest {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| CliError::config(format!("argument '{tok}' is not key=value")))?;
            let x: f64 = v.parse().map_err(|_| {
                CliError::config(format!("argument '{k}' has non-numeric value '{v}'"))
            })?;
            values.insert(k.to_string(), x);
        }
        Ok(Self {
            name: name.to_ascii_lowercase(),
            values,
        })
    }

    fn get(&self, key: &str) -> CliResult<f64> {
        self.values
            .get(key)
            .copied()
            .ok_or_else(|| CliError::config(format!("{} needs {key}=<value>", self.name)))
    }

    fn get_or(&self, key: &str, default: f64) -> f64 {
        self.values.get(key).copied().unwrap_or(default)
    }

    fn allow(&self, keys: &[&str]) -> CliResult<()> {
        for k in self.values.keys() {
            if !keys.contains(&k.as_str()) {
                return Err(CliError::config(format!(
                    "{} does not take '{k}' (accepted: {})",
                    self.name,
                    keys.join(", ")
                )));
            }
        }
        Ok(())
    }
}

fn pair_of(name: &str) -> Option<PeakPair> {
    name.split_once('-').and_then(|(_, p)| p.parse().ok())
}

/// Evaluate a named closed form. Returns `(quantity, value)` rows.
pub fn analytic(query: &[String]) -> CliResult<Outcome> {
    let args = Args::parse(query)?;
    let n = args.name.as_str();
    let rows: Vec<(String, f64)> = match n {
        "jopt" | "topt" => {
            args.allow(&["g_m", "g_q"])?;
            let o = resonant_optimum(args.get("g_m")?, args.get("g_q")?, 0.0, 1)?;
            vec![(n.into(), if n == "jopt" { o.j_opt } else { o.t_opt })]
        }
        "tpeak" => {
            args.allow(&["g_m", "g_q", "J", "n"])?;
            let k = args.get_or("n", 1.0);
            if k < 1.0 || k.fract() != 0.0 {
                return Err(CliError::config("n must be a positive integer"));
            }
            let o = resonant_optimum(args.get("g_m")?, args.get("g_q")?, args.get("J")?, k as u32)?;
            vec![("tpeak".into(), o.t_peak)]
        }
        "g0" => {
            args.allow(&["g_m", "g_q", "J"])?;
            vec![(
                "g0".into(),
                g0(args.get("g_m")?, args.get("g_q")?, args.get("J")?),
            )]
        }
        "eta" => {
            args.allow(&["r_q"])?;
            vec![("eta".into(), eta(args.get("r_q")?))]
        }
        _ if n.starts_with("cpeak-") && pair_of(n).is_some() => {
            args.allow(&["r_q"])?;
            vec![(
                n.into(),
                peak_curve(pair_of(n).expect("checked"), args.get("r_q")?)?,
            )]
        }
        "rqmax-m1q2" | "rqmax-q1m2" => {
            args.allow(&["r_min", "r_max"])?;
            let bracket = (args.get_or("r_min", 0.1), args.get_or("r_max", 10.0));
            let (r, c) = maximize_over_rq(pair_of(n).expect("known pair"), bracket)?;
            vec![("r_q".into(), r), ("c_peak".into(), c)]
        }
        "fiber" => {
            args.allow(&["L", "Gamma_c_mhz", "xi"])?;
            return fiber_query(
                args.get("L")?,
                args.get("Gamma_c_mhz")?,
                args.get_or("xi", 1.0),
            );
        }
        _ => {
            return Err(CliError::config(format!(
                "unknown quantity '{n}'; valid names: {}",
                ANALYTIC_NAMES.join(", ")
            )))
        }
    };
    finish(query, rows)
}

/// `J = xi^2 sqrt(8 pi c Gamma_c / L)` with `Gamma_c / 2pi` in MHz.
pub fn fiber_query(length_m: f64, gamma_c_mhz: f64, xi: f64) -> CliResult<Outcome> {
    let jf = fiber_coupling_rate(length_m, gamma_c_mhz * ANGULAR_PER_MHZ)?;
    let j = channel_coupling(xi, jf)?;
    let rows = vec![
        ("J_f_rad_per_s".to_string(), jf),
        ("J_rad_per_s".to_string(), j),
        ("J_1e6_rad_per_s".to_string(), j / 1e6),
    ];
    finish(
        &[format!(
            "fiber L={length_m} Gamma_c_mhz={gamma_c_mhz} xi={xi}"
        )],
        rows,
    )
}

fn finish(query: &[String], rows: Vec<(String, f64)>) -> CliResult<Outcome> {
    let mut table = ResultTable::new(["quantity", "value"]);
    stamp(&mut table, "analytic", None);
    table.meta("query", query.join(" "));
    let mut summary = Vec::new();
    for (k, v) in rows {
        summary.push(format!("{k} = {v}"));
        table.push(vec![Cell::Text(k), Cell::Num(v)])?;
    }
    Ok(Outcome {
        command: "analytic",
        resolved: None,
        tables: vec![(None, table)],
        plot: None,
        status: ExitStatus::Success,
        summary,
    })
}
