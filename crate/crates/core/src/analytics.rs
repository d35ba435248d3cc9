//! Closed-form optima of the resonant problem and numeric searches that
//! cross-check them against simulated dynamics.
//!
//! All peak curves refer to the excitation starting in `q1`. With `r = g_q/g_m`:
//!
//! * magnon-magnon: `3 sqrt(3) r^2 / (2 (r^2 + 1)^2)`
//! * qubit-qubit: `sqrt((eta - 1)(eta + 3)^3) / (8 (r^2 + 1)^2)`, `eta = sqrt(8 r^4 + 1)`
//! * `q1-m2` is qubit-qubit divided by `r`, `m1-q2` is magnon-magnon times `r`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::hilbert::{build_hamiltonian, initial_state, spectrum, Frame, Mode, SpectralPropagator};
use crate::params::ValidatedParams;

const GOLDEN: f64 = 0.618_033_988_749_894_8;

/// Grid density of the coarse scan, per fastest oscillation period.
pub const POINTS_PER_PERIOD: usize = 1000;

/// Peaks closer than this in value are treated as ties; the earliest wins.
const TIE_TOL: f64 = 1e-9;

/// The four remote pairings shown in the peak-versus-ratio curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PeakPair {
    Mm,
    Qq,
    Q1m2,
    M1q2,
}

impl PeakPair {
    pub const ALL: [PeakPair; 4] = [PeakPair::Mm, PeakPair::Qq, PeakPair::Q1m2, PeakPair::M1q2];

    pub fn modes(self) -> (Mode, Mode) {
        match self {
            PeakPair::Mm => (Mode::M1, Mode::M2),
            PeakPair::Qq => (Mode::Q1, Mode::Q2),
            PeakPair::Q1m2 => (Mode::Q1, Mode::M2),
            PeakPair::M1q2 => (Mode::M1, Mode::Q2),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            PeakPair::Mm => "mm",
            PeakPair::Qq => "qq",
            PeakPair::Q1m2 => "q1m2",
            PeakPair::M1q2 => "m1q2",
        }
    }
}

impl fmt::Display for PeakPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for PeakPair {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        match key.as_str() {
            "mm" | "m1m2" => Ok(PeakPair::Mm),
            "qq" | "q1q2" => Ok(PeakPair::Qq),
            "q1m2" => Ok(PeakPair::Q1m2),
            "m1q2" => Ok(PeakPair::M1q2),
            _ => Err(Error::Config(format!(
                "unknown pair '{s}' (expected mm, qq, q1m2, m1q2)"
            ))),
        }
    }
}

/// Timing and coupling optimum for resonant dynamics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonantOptimum {
    /// `4 (g_m^2 + g_q^2) + J^2` at the requested `J`.
    pub g0: f64,
    pub n: u32,
    /// `2 n pi / sqrt(G0)`.
    pub t_peak: f64,
    /// `sqrt((g_m^2 + g_q^2) / 2)`.
    pub j_opt: f64,
    /// `2 pi / (3 J_opt)`.
    pub t_opt: f64,
}

pub fn g0(g_m: f64, g_q: f64, j: f64) -> f64 {
    4.0 * (g_m * g_m + g_q * g_q) + j * j
}

pub fn resonant_optimum(g_m: f64, g_q: f64, j: f64, n: u32) -> Result<ResonantOptimum> {
    let s = g_m * g_m + g_q * g_q;
    if !(s > 0.0) {
        return Err(Error::Domain("g_m and g_q cannot both vanish".into()));
    }
    if n == 0 {
        return Err(Error::Domain("peak index n must be >= 1".into()));
    }
    let g0 = g0(g_m, g_q, j);
    let j_opt = (s / 2.0).sqrt();
    Ok(ResonantOptimum {
        g0,
        n,
        t_peak: 2.0 * n as f64 * PI / g0.sqrt(),
        j_opt,
        t_opt: 2.0 * PI / (3.0 * j_opt),
    })
}

pub fn eta(r_q: f64) -> f64 {
    (8.0 * r_q.powi(4) + 1.0).sqrt()
}

pub fn peak_concurrence_mm(r_q: f64) -> f64 {
    let r2 = r_q * r_q;
    3.0 * 3.0_f64.sqrt() * r2 / (2.0 * (r2 + 1.0).powi(2))
}

pub fn peak_concurrence_qq(r_q: f64) -> f64 {
    let e = eta(r_q);
    ((e - 1.0) * (e + 3.0).powi(3)).sqrt() / (8.0 * (r_q * r_q + 1.0).powi(2))
}

pub fn peak_concurrence_q1m2(r_q: f64) -> Result<f64> {
    if !(r_q > 0.0) {
        return Err(Error::Domain(format!(
            "q1-m2 peak needs r_q > 0 (got {r_q})"
        )));
    }
    Ok(peak_concurrence_qq(r_q) / r_q)
}

pub fn peak_concurrence_m1q2(r_q: f64) -> f64 {
    r_q * peak_concurrence_mm(r_q)
}

pub fn peak_curve(pair: PeakPair, r_q: f64) -> Result<f64> {
    if !(r_q >= 0.0) {
        return Err(Error::Domain(format!("r_q must be >= 0 (got {r_q})")));
    }
    match pair {
        PeakPair::Mm => Ok(peak_concurrence_mm(r_q)),
        PeakPair::Qq => Ok(peak_concurrence_qq(r_q)),
        PeakPair::Q1m2 => peak_concurrence_q1m2(r_q),
        PeakPair::M1q2 => Ok(peak_concurrence_m1q2(r_q)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakCurvePoint {
    pub r_q: f64,
    pub pair: PeakPair,
    pub c_peak: f64,
    pub eta: f64,
}

pub fn peak_curve_point(pair: PeakPair, r_q: f64) -> Result<PeakCurvePoint> {
    Ok(PeakCurvePoint {
        r_q,
        pair,
        c_peak: peak_curve(pair, r_q)?,
        eta: eta(r_q),
    })
}

/// Golden-section maximisation of a unimodal `f` on `[lo, hi]`.
pub fn golden_section_max<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    tol: f64,
) -> (f64, f64) {
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - GOLDEN * (b - a);
    let mut x2 = a + GOLDEN * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while b - a > tol {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + GOLDEN * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - GOLDEN * (b - a);
            f1 = f(x1);
        }
    }
    // include the endpoints so monotone functions report the edge
    [(lo, f(lo)), (x1, f1), (x2, f2), (hi, f(hi))]
        .into_iter()
        .fold((x1, f1), |best, c| if c.1 > best.1 { c } else { best })
}

/// Maximise a closed-form peak curve over `r_q` in `bracket`.
///
/// Returns [`Error::NoInteriorMaximum`] when the optimum sits on the bracket
/// edge, which is always the case for the monotone qubit-qubit curve.
pub fn maximize_over_rq(pair: PeakPair, bracket: (f64, f64)) -> Result<(f64, f64)> {
    let (lo, hi) = bracket;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::Domain(format!("bad r_q bracket [{lo}, {hi}]")));
    }
    let (r, c) = golden_section_max(
        |r| peak_curve(pair, r).unwrap_or(f64::NEG_INFINITY),
        lo,
        hi,
        1e-12,
    );
    let edge = 1e-7 * (hi - lo);
    if r - lo <= edge || hi - r <= edge {
        return Err(Error::NoInteriorMaximum(lo, hi));
    }
    Ok((r, c))
}

/// Time window `[t0, t1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeWindow {
    pub start: f64,
    pub end: f64,
}

impl TimeWindow {
    pub fn new(start: f64, end: f64) -> Result<Self> {
        if !(end > start) || !start.is_finite() || !end.is_finite() {
            return Err(Error::Domain(format!(
                "time window [{start}, {end}] is empty"
            )));
        }
        Ok(Self { start, end })
    }

    /// `[0, 1.25 * 2 pi / sqrt(G0)]`: the first resonant peak plus margin.
    pub fn first_period(g_m: f64, g_q: f64, j: f64) -> Result<Self> {
        Self::new(0.0, 1.25 * 2.0 * PI / g0(g_m, g_q, j).sqrt())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakSearchResult {
    pub t: f64,
    pub c: f64,
}

/// Earliest global maximum of the pair concurrence in `window`, starting
/// from an excitation in `q1`.
pub fn numeric_peak_search(
    params: &ValidatedParams,
    a: Mode,
    b: Mode,
    window: TimeWindow,
) -> Result<PeakSearchResult> {
    numeric_peak_search_from(params, Mode::Q1, a, b, window)
}

pub fn numeric_peak_search_from(
    params: &ValidatedParams,
    initial: Mode,
    a: Mode,
    b: Mode,
    window: TimeWindow,
) -> Result<PeakSearchResult> {
    if a == b {
        return Err(Error::SameMode(a.label()));
    }
    let spec = spectrum(&build_hamiltonian(params, Frame::RotatingAtOmegaQ))?;
    let spread = spec.energies[5] - spec.energies[0];
    let prop = spec.propagator(&initial_state(initial));
    let width = window.end - window.start;
    let n = if spread > 0.0 {
        let periods = width * spread / (2.0 * PI);
        ((periods * POINTS_PER_PERIOD as f64).ceil() as usize).clamp(POINTS_PER_PERIOD, 4_000_000)
    } else {
        POINTS_PER_PERIOD
    };
    Ok(scan_and_refine(&prop, a, b, window, n))
}

fn pair_concurrence(prop: &SpectralPropagator, a: Mode, b: Mode, t: f64) -> f64 {
    let (za, zb) = prop.pair_amplitudes(a, b, t);
    2.0 * za.norm() * zb.norm()
}

fn scan_and_refine(
    prop: &SpectralPropagator,
    a: Mode,
    b: Mode,
    w: TimeWindow,
    n: usize,
) -> PeakSearchResult {
    let dt = (w.end - w.start) / n as f64;
    let ts: Vec<f64> = (0..=n)
        .map(|i| {
            if i == n {
                w.end
            } else {
                w.start + i as f64 * dt
            }
        })
        .collect();
    let cs: Vec<f64> = ts
        .iter()
        .map(|&t| pair_concurrence(prop, a, b, t))
        .collect();
    let best_grid = cs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let slack = cs
        .windows(2)
        .map(|p| (p[1] - p[0]).abs())
        .fold(0.0, f64::max);

    let tol = 1e-12 * (w.end - w.start).max(f64::MIN_POSITIVE);
    let mut candidates = Vec::new();
    for i in 0..=n {
        let left = if i == 0 { f64::NEG_INFINITY } else { cs[i - 1] };
        let right = if i == n { f64::NEG_INFINITY } else { cs[i + 1] };
        if cs[i] >= left && cs[i] >= right && cs[i] >= best_grid - slack {
            let lo = ts[i.saturating_sub(1)];
            let hi = ts[(i + 1).min(n)];
            let (t, c) = golden_section_max(|t| pair_concurrence(prop, a, b, t), lo, hi, tol);
            candidates.push(PeakSearchResult { t, c });
        }
    }
    let best = candidates
        .iter()
        .map(|p| p.c)
        .fold(f64::NEG_INFINITY, f64::max);
    candidates
        .into_iter()
        .filter(|p| p.c >= best - TIE_TOL)
        .min_by(|x, y| x.t.total_cmp(&y.t))
        .unwrap_or(PeakSearchResult {
            t: w.start,
            c: cs[0],
        })
}

/// Best fiber coupling for a pair: the `(J, t)` maximising the first-period
/// peak concurrence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingOptimum {
    pub j: f64,
    pub t: f64,
    pub c: f64,
}

/// Number of coarse `J` samples in [`optimize_coupling`].
pub const J_GRID: usize = 64;

/// Nested search: outer scan + golden refinement over `J in (0, 4 g_m (1 + r_q)]`,
/// inner [`numeric_peak_search`] over the first period.
pub fn optimize_coupling(params: &ValidatedParams, pair: PeakPair) -> Result<CouplingOptimum> {
    let (g_m, g_q) = (params.g_m(), params.g_q());
    if !(g_m > 0.0) {
        return Err(Error::Domain("coupling search needs g_m > 0".into()));
    }
    let (a, b) = pair.modes();
    let j_max = 4.0 * g_m * (1.0 + g_q / g_m);
    let eval = |j: f64| -> Result<PeakSearchResult> {
        let p = params.with_j_angular(j)?;
        numeric_peak_search(&p, a, b, TimeWindow::first_period(g_m, g_q, j)?)
    };
    let js: Vec<f64> = (1..=J_GRID)
        .map(|k| j_max * k as f64 / J_GRID as f64)
        .collect();
    let mut coarse = Vec::with_capacity(J_GRID);
    for &j in &js {
        coarse.push(eval(j)?.c);
    }
    let k = (0..J_GRID).fold(0, |best, i| if coarse[i] > coarse[best] { i } else { best });
    let lo = if k == 0 { js[0] * 1e-3 } else { js[k - 1] };
    let hi = js[(k + 1).min(J_GRID - 1)];
    let (j, _) = golden_section_max(
        |j| eval(j).map(|r| r.c).unwrap_or(f64::NEG_INFINITY),
        lo,
        hi,
        1e-10 * j_max,
    );
    let r = eval(j)?;
    Ok(CouplingOptimum { j, t: r.t, c: r.c })
}

/// Simulated peak for one point of the peak-versus-ratio curves.
///
/// The magnon-magnon pair is evaluated at the closed-form `J_opt`; the other
/// pairs at the numerically optimised coupling.
pub fn simulated_peak(params: &ValidatedParams, pair: PeakPair) -> Result<CouplingOptimum> {
    match pair {
        PeakPair::Mm => {
            let opt = resonant_optimum(params.g_m(), params.g_q(), params.j(), 1)?;
            let p = params.with_j_angular(opt.j_opt)?;
            let (a, b) = pair.modes();
            let r = numeric_peak_search(
                &p,
                a,
                b,
                TimeWindow::first_period(p.g_m(), p.g_q(), opt.j_opt)?,
            )?;
            Ok(CouplingOptimum {
                j: opt.j_opt,
                t: r.t,
                c: r.c,
            })
        }
        _ => optimize_coupling(params, pair),
    }
}
