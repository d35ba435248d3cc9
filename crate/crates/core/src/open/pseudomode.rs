//! Exact embedding of the exponential kernel: each cavity couples to one
//! auxiliary mode with strength `sqrt(1/2) k` whose amplitude decays at `gamma`
//! (population at `2 gamma`). In the single-excitation sector the enlarged
//! system evolves under an 8x8 non-Hermitian generator.

use nalgebra::{SMatrix, SVector};

use crate::error::Result;
use crate::hilbert::{
    build_hamiltonian, DensityState, Frame, Mode, PureState, TimeGrid, DIM, VACUUM,
};
use crate::params::ValidatedParams;
use crate::C64;

use super::{BathConfig, DensityTrajectory};

pub const PSEUDO_DIM: usize = DIM + 2;

pub type PseudoVector = SVector<C64, PSEUDO_DIM>;
pub type PseudoMatrix = SMatrix<C64, PSEUDO_DIM, PSEUDO_DIM>;

/// `H - i gamma (p1^dag p1 + p2^dag p2)` plus cavity-pseudomode exchange,
/// in the frame rotating at `omega_q`.
pub fn pseudomode_generator(params: &ValidatedParams, bath: &BathConfig) -> PseudoMatrix {
    let h = build_hamiltonian(params, Frame::RotatingAtOmegaQ);
    let mut m = PseudoMatrix::zeros();
    m.fixed_view_mut::<DIM, DIM>(0, 0).copy_from(h.matrix());
    let g = C64::from(bath.pseudomode_coupling());
    for side in 0..2 {
        let (c, p) = (Mode::cavity(side).index(), DIM + side);
        m[(c, p)] = g;
        m[(p, c)] = g;
        m[(p, p)] = C64::new(0.0, -bath.gamma());
    }
    m
}

/// Sector amplitudes of system and pseudomodes at each grid time.
pub fn pseudomode_amplitudes(
    params: &ValidatedParams,
    bath: &BathConfig,
    grid: &TimeGrid,
    psi0: &PureState,
) -> Result<Vec<PseudoVector>> {
    let gen = pseudomode_generator(params, bath) * C64::new(0.0, -1.0);
    let v0 = PseudoVector::from_fn(|i, _| {
        if i < DIM {
            psi0.amps[i]
        } else {
            C64::new(0.0, 0.0)
        }
    });
    Ok(grid
        .times()
        .map(|t| {
            if t == grid.t0() {
                v0
            } else {
                (gen * C64::from(t - grid.t0())).exp() * v0
            }
        })
        .collect())
}

/// System density from the sector amplitudes `a(t)` with the initial vacuum
/// amplitude `v0` carried along unchanged.
pub(crate) fn density_from_sector(a: &[C64], v0: C64, total: f64) -> DensityState {
    let mut rho = DensityState::from_sector(&nalgebra::Vector6::from_fn(|i, _| a[i])).rho;
    let sector: f64 = a.iter().map(|x| x.norm_sqr()).sum();
    rho[(VACUUM, VACUUM)] = C64::from(total - sector);
    for i in 0..DIM {
        rho[(i, VACUUM)] = a[i] * v0.conj();
        rho[(VACUUM, i)] = v0 * a[i].conj();
    }
    DensityState { rho }
}

pub fn pseudomode_solve(
    params: &ValidatedParams,
    bath: &BathConfig,
    grid: &TimeGrid,
    psi0: &PureState,
) -> Result<DensityTrajectory> {
    let total = psi0.sector_norm() + psi0.vacuum.norm_sqr();
    let states = pseudomode_amplitudes(params, bath, grid, psi0)?
        .iter()
        .map(|v| density_from_sector(&v.as_slice()[..DIM], psi0.vacuum, total))
        .collect();
    DensityTrajectory::new(*grid, states)
}
