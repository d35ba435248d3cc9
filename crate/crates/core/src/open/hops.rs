//! Linear non-Markovian trajectories through the exponential-kernel hierarchy.
//!
//! For `alpha(t, s) = exp(-gamma |t - s|) / 2` the memory integral is carried by
//! auxiliary states `psi^(k1, k2)`:
//!
//! ```text
//! d/dt psi^(k) = (-i H - |k| gamma + sum_j z_j^*(t) L_j) psi^(k)
//!              + sum_j k_j / 2 L_j psi^(k - e_j)
//!              - sum_j L_j^dag psi^(k + e_j)
//! ```
//!
//! with `L_j = k a_j` acting as `c_j -> vacuum`. States live in the 7-dim
//! space (six sector amplitudes plus vacuum). Integration is classical RK4
//! on a fixed step; the noise is sampled at half steps so the midpoint stages
//! see the same path.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::hilbert::{
    build_hamiltonian, Frame, Mode, PureState, StateTrajectory, TimeGrid, DIM, VACUUM,
};
use crate::params::ValidatedParams;
use crate::C64;

use super::noise::{ou_noise_path, NoisePath, NoiseSeed};
use super::BathConfig;

pub const DEFAULT_DEPTH: usize = 4;
pub const PROBE_TRAJECTORIES: usize = 10;
pub const CONVERGENCE_TOL: f64 = 1e-8;

const BATHS: usize = 2;
const EXT: usize = DIM + 1;

type Vec7 = [C64; EXT];

const ZERO7: Vec7 = [C64::new(0.0, 0.0); EXT];

/// Output grid, integration step and hierarchy depth for one parameter set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QsdSetup {
    pub grid: TimeGrid,
    pub depth: usize,
    /// RK4 steps between consecutive output times.
    pub substeps: usize,
    pub step: f64,
}

impl QsdSetup {
    /// Step chosen as the largest `h <= min(1 / (20 R), 1 / (20 gamma), max_step)`
    /// that divides the output spacing; `R` is the largest rate in `H` and `L`.
    pub fn new(
        params: &ValidatedParams,
        bath: &BathConfig,
        grid: TimeGrid,
        depth: usize,
        max_step: Option<f64>,
    ) -> Result<Self> {
        let rate = params.max_rate().max(bath.operator_coefficient());
        let mut h = 1.0 / (20.0 * bath.gamma());
        if rate > 0.0 {
            h = h.min(1.0 / (20.0 * rate));
        }
        if let Some(m) = max_step {
            if !(m > 0.0) {
                return Err(Error::Domain(format!("max_step must be > 0 (got {m})")));
            }
            h = h.min(m);
        }
        let (substeps, step) = if grid.len() > 1 {
            let m = (grid.dt() / h).ceil().max(1.0) as usize;
            (m, grid.dt() / m as f64)
        } else {
            (1, 0.0)
        };
        Ok(Self {
            grid,
            depth,
            substeps,
            step,
        })
    }

    /// Grid the noise must be sampled on: half steps over the output window.
    pub fn noise_grid(&self) -> TimeGrid {
        let n = 2 * self.substeps * (self.grid.len() - 1) + 1;
        let dt = if n > 1 { self.step / 2.0 } else { 0.0 };
        TimeGrid::uniform(self.grid.t0(), dt, n).expect("non-empty grid")
    }

    pub fn noise(&self, bath: &BathConfig, seed: NoiseSeed) -> Result<NoisePath> {
        ou_noise_path(bath.gamma(), &self.noise_grid(), BATHS, seed)
    }

    fn with_depth(mut self, depth: usize) -> Self {
        self.depth = depth;
        self
    }
}

/// Multi-indices `(k1, k2)` with `k1 + k2 <= depth` and their neighbour table.
struct Hierarchy {
    orders: Vec<usize>,
    /// `[j]` -> index of `k - e_j`.
    lower: Vec<[Option<usize>; BATHS]>,
    /// `[j]` -> index of `k + e_j`.
    upper: Vec<[Option<usize>; BATHS]>,
    counts: Vec<[usize; BATHS]>,
}

impl Hierarchy {
    fn new(depth: usize) -> Self {
        let mut keys = Vec::new();
        for total in 0..=depth {
            for k1 in (0..=total).rev() {
                keys.push([k1, total - k1]);
            }
        }
        let lookup: HashMap<[usize; BATHS], usize> =
            keys.iter().enumerate().map(|(i, k)| (*k, i)).collect();
        let shift = |k: [usize; BATHS], j: usize, up: bool| {
            let mut q = k;
            if up {
                q[j] += 1;
            } else if q[j] == 0 {
                return None;
            } else {
                q[j] -= 1;
            }
            lookup.get(&q).copied()
        };
        Self {
            orders: keys.iter().map(|k| k[0] + k[1]).collect(),
            lower: keys
                .iter()
                .map(|&k| [shift(k, 0, false), shift(k, 1, false)])
                .collect(),
            upper: keys
                .iter()
                .map(|&k| [shift(k, 0, true), shift(k, 1, true)])
                .collect(),
            counts: keys,
        }
    }

    fn len(&self) -> usize {
        self.orders.len()
    }
}

struct Generator {
    h: [[f64; DIM]; DIM],
    k: f64,
    gamma: f64,
    cavities: [usize; BATHS],
    tree: Hierarchy,
}

impl Generator {
    fn new(params: &ValidatedParams, bath: &BathConfig, depth: usize) -> Self {
        let hm = build_hamiltonian(params, Frame::RotatingAtOmegaQ);
        let mut h = [[0.0; DIM]; DIM];
        for (r, row) in h.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = hm.matrix()[(r, c)].re;
            }
        }
        Self {
            h,
            k: bath.operator_coefficient(),
            gamma: bath.gamma(),
            cavities: [Mode::cavity(0).index(), Mode::cavity(1).index()],
            tree: Hierarchy::new(depth),
        }
    }

    fn rhs(&self, psi: &[Vec7], z: [C64; BATHS], out: &mut [Vec7]) {
        let minus_i = C64::new(0.0, -1.0);
        for (n, o) in out.iter_mut().enumerate() {
            let p = &psi[n];
            let damp = -(self.tree.orders[n] as f64) * self.gamma;
            for r in 0..DIM {
                let mut acc = C64::new(0.0, 0.0);
                for c in 0..DIM {
                    acc += p[c] * self.h[r][c];
                }
                o[r] = minus_i * acc + p[r] * damp;
            }
            o[VACUUM] = p[VACUUM] * damp;
            for j in 0..BATHS {
                let cj = self.cavities[j];
                // z_j^* L_j psi^(k)
                o[VACUUM] += z[j].conj() * self.k * p[cj];
                if let Some(lo) = self.tree.lower[n][j] {
                    o[VACUUM] += 0.5 * self.tree.counts[n][j] as f64 * self.k * psi[lo][cj];
                }
                if let Some(up) = self.tree.upper[n][j] {
                    o[cj] -= self.k * psi[up][VACUUM];
                }
            }
        }
    }
}

fn axpy(y: &mut [Vec7], x: &[Vec7], a: f64, base: &[Vec7]) {
    for ((yi, xi), bi) in y.iter_mut().zip(x).zip(base) {
        for e in 0..EXT {
            yi[e] = bi[e] + xi[e] * a;
        }
    }
}

fn to_pure(v: &Vec7) -> PureState {
    let mut psi = PureState::from_amplitudes(nalgebra::Vector6::from_fn(|i, _| v[i]));
    psi.vacuum = v[VACUUM];
    psi
}

/// One realisation of the linear stochastic evolution; returns the
/// physical state `psi^(0)` on the output grid.
pub fn qsd_trajectory(
    params: &ValidatedParams,
    bath: &BathConfig,
    setup: &QsdSetup,
    noise: &NoisePath,
    psi0: &PureState,
) -> Result<StateTrajectory> {
    let ng = setup.noise_grid();
    if noise.values.len() != BATHS
        || noise.values.iter().any(|v| v.len() != ng.len())
        || (noise.grid.dt() - ng.dt()).abs() > 1e-12 * ng.dt().abs().max(f64::MIN_POSITIVE)
        || noise.grid.t0() != ng.t0()
    {
        return Err(Error::GridMismatch);
    }
    let gen = Generator::new(params, bath, setup.depth);
    let na = gen.tree.len();
    let mut psi = vec![ZERO7; na];
    for i in 0..DIM {
        psi[0][i] = psi0.amps[i];
    }
    psi[0][VACUUM] = psi0.vacuum;

    let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (
        vec![ZERO7; na],
        vec![ZERO7; na],
        vec![ZERO7; na],
        vec![ZERO7; na],
        vec![ZERO7; na],
    );
    let h = setup.step;
    let z_at = |i: usize| [noise.values[0][i], noise.values[1][i]];

    let mut states = Vec::with_capacity(setup.grid.len());
    states.push(to_pure(&psi[0]));
    let mut s = 0;
    for _ in 1..setup.grid.len() {
        for _ in 0..setup.substeps {
            let (z0, zm, z1) = (z_at(2 * s), z_at(2 * s + 1), z_at(2 * s + 2));
            gen.rhs(&psi, z0, &mut k1);
            axpy(&mut tmp, &k1, h / 2.0, &psi);
            gen.rhs(&tmp, zm, &mut k2);
            axpy(&mut tmp, &k2, h / 2.0, &psi);
            gen.rhs(&tmp, zm, &mut k3);
            axpy(&mut tmp, &k3, h, &psi);
            gen.rhs(&tmp, z1, &mut k4);
            for n in 0..na {
                for e in 0..EXT {
                    psi[n][e] += (k1[n][e] + (k2[n][e] + k3[n][e]) * 2.0 + k4[n][e]) * (h / 6.0);
                }
            }
            s += 1;
        }
        states.push(to_pure(&psi[0]));
    }
    StateTrajectory::new(setup.grid, states)
}

/// Outcome of comparing depth `d` against `d + 1` on probe trajectories.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceReport {
    pub depth: usize,
    pub probes: usize,
    /// Largest `|psi_d - psi_{d+1}|` over probes and output times.
    pub max_difference: f64,
    pub tolerance: f64,
    pub converged: bool,
}

/// Run `probes` trajectories at `setup.depth` and `setup.depth + 1` with
/// identical noise. Probe streams start at `u64::MAX` and count down so they
/// never coincide with ensemble streams.
pub fn hierarchy_convergence(
    params: &ValidatedParams,
    bath: &BathConfig,
    setup: &QsdSetup,
    psi0: &PureState,
    master_seed: u64,
    probes: usize,
) -> Result<ConvergenceReport> {
    let deeper = setup.with_depth(setup.depth + 1);
    let mut worst = 0.0_f64;
    for p in 0..probes {
        let noise = setup.noise(bath, NoiseSeed::new(master_seed, u64::MAX - p as u64))?;
        let a = qsd_trajectory(params, bath, setup, &noise, psi0)?;
        let b = qsd_trajectory(params, bath, &deeper, &noise, psi0)?;
        for (x, y) in a.states.iter().zip(&b.states) {
            let d = (x.amps - y.amps).norm_squared() + (x.vacuum - y.vacuum).norm_sqr();
            worst = worst.max(d.sqrt());
        }
    }
    Ok(ConvergenceReport {
        depth: setup.depth,
        probes,
        max_difference: worst,
        tolerance: CONVERGENCE_TOL,
        converged: worst <= CONVERGENCE_TOL,
    })
}
