//! Markovian reference: each cavity decays at `gamma_eff` into the vacuum.
//! The sector evolves under `H - (i/2) gamma_eff (c1^dag c1 + c2^dag c2)`.

use nalgebra::Matrix6;

use crate::error::{Error, Result};
use crate::hilbert::{build_hamiltonian, Frame, Mode, PureState, TimeGrid, DIM};
use crate::params::ValidatedParams;
use crate::C64;

use super::pseudomode::density_from_sector;
use super::DensityTrajectory;

pub fn effective_hamiltonian(params: &ValidatedParams, gamma_eff: f64) -> Matrix6<C64> {
    let mut h = *build_hamiltonian(params, Frame::RotatingAtOmegaQ).matrix();
    for side in 0..2 {
        let c = Mode::cavity(side).index();
        h[(c, c)] -= C64::new(0.0, 0.5 * gamma_eff);
    }
    h
}

pub fn lindblad_solve(
    params: &ValidatedParams,
    gamma_eff: f64,
    grid: &TimeGrid,
    psi0: &PureState,
) -> Result<DensityTrajectory> {
    if !(gamma_eff >= 0.0) || !gamma_eff.is_finite() {
        return Err(Error::Domain(format!(
            "effective decay rate must be >= 0 (got {gamma_eff})"
        )));
    }
    let gen = effective_hamiltonian(params, gamma_eff) * C64::new(0.0, -1.0);
    let total = psi0.sector_norm() + psi0.vacuum.norm_sqr();
    let states = grid
        .times()
        .map(|t| {
            let a = if t == grid.t0() {
                psi0.amps
            } else {
                (gen * C64::from(t - grid.t0())).exp() * psi0.amps
            };
            density_from_sector(&a.as_slice()[..DIM], psi0.vacuum, total)
        })
        .collect();
    DensityTrajectory::new(*grid, states)
}
