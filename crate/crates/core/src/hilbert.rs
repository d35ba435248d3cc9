//! Single-excitation basis, the two-cavity Hamiltonian and exact closed-system
//! evolution by spectral decomposition.
//!
//! Basis order is fixed: `c1, m1, q1, c2, m2, q2`, i.e. the state with the
//! excitation in mode `k` is the k-th unit vector. The vacuum amplitude of a
//! [`PureState`] is carried separately and is only populated by open-system
//! solvers.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix6, SMatrix, SVector, Vector6};

use crate::error::{Error, Result};
use crate::params::ValidatedParams;
use crate::C64;

/// Number of single-excitation basis states.
pub const DIM: usize = 6;

pub type Amplitudes = Vector6<C64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    C1,
    M1,
    Q1,
    C2,
    M2,
    Q2,
}

impl Mode {
    pub const ALL: [Mode; DIM] = [Mode::C1, Mode::M1, Mode::Q1, Mode::C2, Mode::M2, Mode::Q2];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            Mode::C1 => "c1",
            Mode::M1 => "m1",
            Mode::Q1 => "q1",
            Mode::C2 => "c2",
            Mode::M2 => "m2",
            Mode::Q2 => "q2",
        }
    }

    /// Cavity of the given side (0 or 1).
    pub fn cavity(side: usize) -> Mode {
        if side == 0 {
            Mode::C1
        } else {
            Mode::C2
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Mode::ALL
            .into_iter()
            .find(|m| m.label().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown mode '{s}' (expected c1, m1, q1, c2, m2, q2)"
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Frame {
    Lab,
    #[default]
    RotatingAtOmegaQ,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianMatrix {
    matrix: Matrix6<C64>,
    frame: Frame,
}

impl HamiltonianMatrix {
    /// Wrap an arbitrary matrix; Hermiticity is checked by [`spectrum`].
    pub fn from_matrix(matrix: Matrix6<C64>, frame: Frame) -> Self {
        Self { matrix, frame }
    }

    pub fn matrix(&self) -> &Matrix6<C64> {
        &self.matrix
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    /// `max |H - H^dagger|` over all entries.
    pub fn hermiticity_error(&self) -> f64 {
        (self.matrix - self.matrix.adjoint())
            .iter()
            .fold(0.0_f64, |m, z| m.max(z.norm()))
    }

    fn scale(&self) -> f64 {
        self.matrix.iter().fold(1.0_f64, |m, z| m.max(z.norm()))
    }
}

/// Hamiltonian restricted to the single-excitation manifold.
///
/// In the rotating frame the diagonal holds detunings from `omega_q`, so the
/// resonant case has an all-zero diagonal.
pub fn build_hamiltonian(params: &ValidatedParams, frame: Frame) -> HamiltonianMatrix {
    let shift = match frame {
        Frame::Lab => 0.0,
        Frame::RotatingAtOmegaQ => params.omega_q(),
    };
    let mut h = Matrix6::<C64>::zeros();
    for side in 0..2 {
        let (c, m, q) = (3 * side, 3 * side + 1, 3 * side + 2);
        h[(c, c)] = C64::from(params.omega_c() - shift);
        h[(m, m)] = C64::from(params.omega_m() - shift);
        h[(q, q)] = C64::from(params.omega_q() - shift);
        h[(c, m)] = C64::from(params.g_m());
        h[(m, c)] = C64::from(params.g_m());
        h[(c, q)] = C64::from(params.g_q());
        h[(q, c)] = C64::from(params.g_q());
    }
    h[(0, 3)] = C64::from(params.j());
    h[(3, 0)] = C64::from(params.j());
    HamiltonianMatrix { matrix: h, frame }
}

/// Eigenvalues in ascending order with matching orthonormal eigenvectors
/// (columns). Within degenerate subspaces the basis is arbitrary.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub energies: Vector6<f64>,
    pub vectors: Matrix6<C64>,
}

impl Spectrum {
    pub fn reconstruct(&self) -> Matrix6<C64> {
        let lambda = Matrix6::from_diagonal(&self.energies.map(C64::from));
        self.vectors * lambda * self.vectors.adjoint()
    }

    /// Precompute the expansion of `psi0` for repeated evaluation.
    pub fn propagator(&self, psi0: &PureState) -> SpectralPropagator {
        SpectralPropagator {
            energies: self.energies,
            vectors: self.vectors,
            coeffs: self.vectors.adjoint() * psi0.amps,
            vacuum: psi0.vacuum,
        }
    }
}

pub fn spectrum(h: &HamiltonianMatrix) -> Result<Spectrum> {
    let err = h.hermiticity_error();
    if err > 1e-12 * h.scale() {
        return Err(Error::NotHermitian(err));
    }
    let herm = (h.matrix + h.matrix.adjoint()) * C64::from(0.5);
    let eig = herm.symmetric_eigen();
    let mut order: Vec<usize> = (0..DIM).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let energies = Vector6::from_iterator(order.iter().map(|&k| eig.eigenvalues[k]));
    let mut vectors = Matrix6::<C64>::zeros();
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(Spectrum { energies, vectors })
}

/// `psi(t) = sum_k exp(-i lambda_k t) v_k <v_k|psi0>`.
#[derive(Debug, Clone)]
pub struct SpectralPropagator {
    energies: Vector6<f64>,
    vectors: Matrix6<C64>,
    coeffs: Vector6<C64>,
    vacuum: C64,
}

impl SpectralPropagator {
    pub fn state_at(&self, t: f64) -> PureState {
        let phased =
            Vector6::from_fn(|k, _| self.coeffs[k] * C64::from_polar(1.0, -self.energies[k] * t));
        PureState {
            amps: self.vectors * phased,
            vacuum: self.vacuum,
        }
    }

    /// Amplitudes of two modes only; the hot path of the peak searches.
    pub fn pair_amplitudes(&self, a: Mode, b: Mode, t: f64) -> (C64, C64) {
        let (ia, ib) = (a.index(), b.index());
        let mut za = C64::new(0.0, 0.0);
        let mut zb = C64::new(0.0, 0.0);
        for k in 0..DIM {
            let w = self.coeffs[k] * C64::from_polar(1.0, -self.energies[k] * t);
            za += self.vectors[(ia, k)] * w;
            zb += self.vectors[(ib, k)] * w;
        }
        (za, zb)
    }
}

/// Amplitudes on the six single-excitation states plus a vacuum amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureState {
    pub amps: Amplitudes,
    pub vacuum: C64,
}

impl PureState {
    pub fn from_amplitudes(amps: Amplitudes) -> Self {
        Self {
            amps,
            vacuum: C64::new(0.0, 0.0),
        }
    }

    pub fn amplitude(&self, mode: Mode) -> C64 {
        self.amps[mode.index()]
    }

    /// Probability mass in the single-excitation sector.
    pub fn sector_norm(&self) -> f64 {
        self.amps.norm_squared()
    }

    /// Population outside the sector for a unit-trace state.
    pub fn vacuum_weight(&self) -> f64 {
        (1.0 - self.sector_norm()).max(0.0)
    }
}

/// Index of the global vacuum in the extended (sector + vacuum) space.
pub const VACUUM: usize = DIM;

pub type DensityMatrix = SMatrix<C64, 7, 7>;

/// Reduced system state on the single-excitation sector plus the vacuum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityState {
    pub rho: DensityMatrix,
}

impl DensityState {
    /// `|psi><psi|` on the extended space, vacuum amplitude included.
    pub fn from_pure(psi: &PureState) -> Self {
        let v = extended(psi);
        Self {
            rho: v * v.adjoint(),
        }
    }

    /// Sector block `a a^dagger`; the missing norm is put on the vacuum
    /// population with no coherence.
    pub fn from_sector(amps: &Amplitudes) -> Self {
        let mut rho = DensityMatrix::zeros();
        for i in 0..DIM {
            for j in 0..DIM {
                rho[(i, j)] = amps[i] * amps[j].conj();
            }
        }
        rho[(VACUUM, VACUUM)] = C64::from(1.0 - amps.norm_squared());
        Self { rho }
    }

    pub fn trace(&self) -> f64 {
        self.rho.trace().re
    }

    pub fn population(&self, mode: Mode) -> f64 {
        self.rho[(mode.index(), mode.index())].re
    }

    pub fn sector_norm(&self) -> f64 {
        (0..DIM).map(|i| self.rho[(i, i)].re).sum()
    }

    pub fn vacuum_weight(&self) -> f64 {
        self.rho[(VACUUM, VACUUM)].re
    }
}

/// Sector amplitudes followed by the vacuum amplitude.
pub fn extended(psi: &PureState) -> SVector<C64, 7> {
    SVector::<C64, 7>::from_fn(|i, _| if i < DIM { psi.amps[i] } else { psi.vacuum })
}

/// Unit excitation in `excited`, everything else empty.
pub fn initial_state(excited: Mode) -> PureState {
    let mut amps = Amplitudes::zeros();
    amps[excited.index()] = C64::new(1.0, 0.0);
    PureState::from_amplitudes(amps)
}

/// Single-excitation sector norm.
pub fn total_excitation(psi: &PureState) -> f64 {
    psi.sector_norm()
}

/// Uniform time grid `t0 + i*dt`, `i < n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t0: f64,
    dt: f64,
    n: usize,
}

impl TimeGrid {
    pub fn uniform(t0: f64, dt: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGrid);
        }
        if !t0.is_finite() || !dt.is_finite() || (n > 1 && dt <= 0.0) {
            return Err(Error::Domain(format!("bad time grid t0={t0} dt={dt}")));
        }
        Ok(Self { t0, dt, n })
    }

    /// `n` points from `t0` to `t1` inclusive.
    pub fn linspace(t0: f64, t1: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGrid);
        }
        if n == 1 {
            return Self::uniform(t0, 0.0, 1);
        }
        if !(t1 > t0) {
            return Err(Error::Domain(format!("time window [{t0}, {t1}] is empty")));
        }
        Self::uniform(t0, (t1 - t0) / (n - 1) as f64, n)
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }
    pub fn dt(&self) -> f64 {
        self.dt
    }
    pub fn len(&self) -> usize {
        self.n
    }
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }
    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }
    pub fn t_end(&self) -> f64 {
        self.time(self.n - 1)
    }
    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|i| self.time(i))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateTrajectory {
    pub grid: TimeGrid,
    pub states: Vec<PureState>,
}

impl StateTrajectory {
    pub fn new(grid: TimeGrid, states: Vec<PureState>) -> Result<Self> {
        if states.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        Ok(Self { grid, states })
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &PureState)> {
        self.grid.times().zip(self.states.iter())
    }
}

/// Exact closed-system evolution on `grid`.
pub fn propagate(
    h: &HamiltonianMatrix,
    psi0: &PureState,
    grid: &TimeGrid,
) -> Result<StateTrajectory> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let spec = spectrum(h)?;
    let prop = spec.propagator(psi0);
    let states = grid
        .times()
        .map(|t| if t == 0.0 { *psi0 } else { prop.state_at(t) })
        .collect();
    StateTrajectory::new(*grid, states)
}
