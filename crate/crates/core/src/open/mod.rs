//! Cavity leakage into local zero-temperature baths with memory kernel
//! `alpha(t, s) = exp(-gamma |t - s|) / 2`.
//!
//! Three solvers share the same bath description:
//!
//! * [`hops`]: linear non-Markovian stochastic trajectories driven by OU
//!   noise, integrated through the exponential-kernel hierarchy;
//! * [`pseudomode`]: exact deterministic embedding of the same kernel into
//!   one damped auxiliary mode per bath;
//! * [`lindblad`]: Markovian reference with an explicit decay rate.
//!
//! All three work in the frame rotating at `omega_q`, where the kernel is
//! centred at zero frequency.

pub mod ensemble;
pub mod hops;
pub mod lindblad;
pub mod noise;
pub mod pseudomode;

use nalgebra::SMatrix;

use crate::entanglement::{concurrence_wootters, reduce_two_mode, ConcurrenceSource};
use crate::error::{Error, Result};
use crate::hilbert::{DensityState, Mode, TimeGrid};

pub use ensemble::{ensemble_density, qsd_ensemble, EnsembleOptions, EnsembleResult};
pub use hops::{hierarchy_convergence, qsd_trajectory, ConvergenceReport, QsdSetup};
pub use lindblad::lindblad_solve;
pub use noise::{ou_noise_path, NoisePath, NoiseSeed};
pub use pseudomode::{pseudomode_amplitudes, pseudomode_solve};

/// Prefactor of the bath memory kernel.
pub const KERNEL_AMPLITUDE: f64 = 0.5;

/// How the cavity rate enters the coupling operator `L_j = k a_j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CouplingConvention {
    /// `k = Gamma_c`.
    #[default]
    Linear,
    /// `k = sqrt(Gamma_c)`.
    Sqrt,
}

impl std::str::FromStr for CouplingConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "linear" => Ok(Self::Linear),
            "sqrt" => Ok(Self::Sqrt),
            _ => Err(Error::Config(format!(
                "unknown coupling convention '{s}' (expected linear or sqrt)"
            ))),
        }
    }
}

impl CouplingConvention {
    pub fn name(self) -> &'static str {
        match self {
            Self::Linear => "linear",
            Self::Sqrt => "sqrt",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathConfig {
    gamma: f64,
    coupling_rate: f64,
    convention: CouplingConvention,
}

impl BathConfig {
    /// `gamma` and `coupling_rate` in the same angular units as the Hamiltonian.
    pub fn new(gamma: f64, coupling_rate: f64, convention: CouplingConvention) -> Result<Self> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::Domain(format!(
                "bath memory rate gamma must be > 0 (got {gamma})"
            )));
        }
        if !(coupling_rate >= 0.0) || !coupling_rate.is_finite() {
            return Err(Error::Domain(format!(
                "coupling rate must be >= 0 (got {coupling_rate})"
            )));
        }
        Ok(Self {
            gamma,
            coupling_rate,
            convention,
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn coupling_rate(&self) -> f64 {
        self.coupling_rate
    }

    pub fn convention(&self) -> CouplingConvention {
        self.convention
    }

    /// The `k` in `L_j = k a_j`.
    pub fn operator_coefficient(&self) -> f64 {
        match self.convention {
            CouplingConvention::Linear => self.coupling_rate,
            CouplingConvention::Sqrt => self.coupling_rate.sqrt(),
        }
    }

    /// Cavity-pseudomode exchange rate `sqrt(1/2) k`.
    pub fn pseudomode_coupling(&self) -> f64 {
        (KERNEL_AMPLITUDE).sqrt() * self.operator_coefficient()
    }

    /// Lindblad rate with the same integrated kernel: `k^2 / gamma`.
    pub fn markov_rate(&self) -> f64 {
        let k = self.operator_coefficient();
        k * k / self.gamma
    }

    /// `alpha(t, s)`.
    pub fn kernel(&self, tau: f64) -> f64 {
        KERNEL_AMPLITUDE * (-self.gamma * tau.abs()).exp()
    }
}

/// Real 7x7 matrix of per-entry standard errors.
pub type ErrorMatrix = SMatrix<f64, 7, 7>;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityTrajectory {
    pub grid: TimeGrid,
    pub states: Vec<DensityState>,
    /// Per-entry standard error, present for Monte Carlo estimates.
    pub std_error: Option<Vec<ErrorMatrix>>,
}

impl DensityTrajectory {
    pub fn new(grid: TimeGrid, states: Vec<DensityState>) -> Result<Self> {
        if states.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            grid,
            states,
            std_error: None,
        })
    }

    pub fn sector_norms(&self) -> Vec<f64> {
        self.states.iter().map(DensityState::sector_norm).collect()
    }

    pub fn traces(&self) -> Vec<f64> {
        self.states.iter().map(DensityState::trace).collect()
    }
}

impl ConcurrenceSource for DensityTrajectory {
    fn pair_concurrence(&self, a: Mode, b: Mode) -> Result<(Vec<f64>, Vec<f64>)> {
        let times = self.grid.times().collect();
        let values = self
            .states
            .iter()
            .map(|s| concurrence_wootters(&reduce_two_mode(s, a, b)?))
            .collect::<Result<Vec<_>>>()?;
        Ok((times, values))
    }
}
