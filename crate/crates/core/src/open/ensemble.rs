//! Ensemble averages of stochastic trajectories.
//!
//! Trajectory `i` draws its noise from stream `i` of the master seed. The
//! index range is cut into a fixed number of contiguous batches; batches may
//! run on any thread but are folded in index order, so the result is
//! bit-identical between sequential and parallel execution.

use crate::entanglement::{concurrence_wootters, reduce_two_mode};
use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::hilbert::{DensityMatrix, DensityState, Mode, PureState, StateTrajectory, TimeGrid};
use crate::params::ValidatedParams;

use super::hops::{
    hierarchy_convergence, qsd_trajectory, ConvergenceReport, QsdSetup, DEFAULT_DEPTH,
    PROBE_TRAJECTORIES,
};
use super::noise::NoiseSeed;
use super::{BathConfig, DensityTrajectory, ErrorMatrix};

pub const DEFAULT_BATCHES: usize = 20;

/// Streaming per-entry mean and sum of squared deviations.
#[derive(Debug, Clone)]
struct Moments {
    n: usize,
    mean: Vec<DensityMatrix>,
    m2: Vec<ErrorMatrix>,
}

impl Moments {
    fn new(len: usize) -> Self {
        Self {
            n: 0,
            mean: vec![DensityMatrix::zeros(); len],
            m2: vec![ErrorMatrix::zeros(); len],
        }
    }

    fn add(&mut self, traj: &StateTrajectory) {
        self.n += 1;
        let inv = 1.0 / self.n as f64;
        for ((mean, m2), psi) in self.mean.iter_mut().zip(&mut self.m2).zip(&traj.states) {
            let x = DensityState::from_pure(psi).rho;
            let delta = x - *mean;
            *mean += delta * crate::C64::from(inv);
            let after = x - *mean;
            *m2 += delta.zip_map(&after, |d, a| (d * a.conj()).re);
        }
    }

    fn merge(mut self, other: Moments) -> Self {
        if other.n == 0 {
            return self;
        }
        if self.n == 0 {
            return other;
        }
        let n = self.n + other.n;
        let (wa, wb) = (self.n as f64, other.n as f64);
        for i in 0..self.mean.len() {
            let delta = other.mean[i] - self.mean[i];
            self.mean[i] += delta * crate::C64::from(wb / n as f64);
            self.m2[i] += other.m2[i] + delta.map(|d| d.norm_sqr() * wa * wb / n as f64);
        }
        self.n = n;
        self
    }

    fn std_error(&self) -> Vec<ErrorMatrix> {
        let n = self.n as f64;
        self.m2
            .iter()
            .map(|m| {
                if self.n > 1 {
                    m.map(|v| (v.max(0.0) / (n * (n - 1.0))).sqrt())
                } else {
                    ErrorMatrix::zeros()
                }
            })
            .collect()
    }

    fn hermitized(&self) -> Vec<DensityState> {
        self.mean
            .iter()
            .map(|m| DensityState {
                rho: (m + m.adjoint()) * crate::C64::from(0.5),
            })
            .collect()
    }
}

/// `rho(t) = (1/N) sum_i |psi_i(t)><psi_i(t)|` with per-entry standard errors.
pub fn ensemble_density(trajectories: &[StateTrajectory]) -> Result<DensityTrajectory> {
    let first = trajectories.first().ok_or(Error::Domain(
        "ensemble needs at least one trajectory".into(),
    ))?;
    let mut acc = Moments::new(first.grid.len());
    for t in trajectories {
        if t.grid != first.grid {
            return Err(Error::GridMismatch);
        }
        acc.add(t);
    }
    let mut out = DensityTrajectory::new(first.grid, acc.hermitized())?;
    out.std_error = Some(acc.std_error());
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleOptions {
    pub trajectories: usize,
    pub seed: u64,
    pub depth: usize,
    pub max_step: Option<f64>,
    pub batches: usize,
    /// Probe trajectories for the depth check; 0 disables it.
    pub probes: usize,
    pub exec: Execution,
}

impl Default for EnsembleOptions {
    fn default() -> Self {
        Self {
            trajectories: 2000,
            seed: 2020,
            depth: DEFAULT_DEPTH,
            max_step: None,
            batches: DEFAULT_BATCHES,
            probes: PROBE_TRAJECTORIES,
            exec: Execution::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct EnsembleResult {
    pub density: DensityTrajectory,
    /// Mean density of each batch, `[batch][time]`.
    pub batch_means: Vec<Vec<DensityMatrix>>,
    pub setup: QsdSetup,
    pub convergence: Option<ConvergenceReport>,
    pub options: EnsembleOptions,
}

impl EnsembleResult {
    /// Concurrence of the averaged state and its batch-means standard error.
    pub fn concurrence(&self, a: Mode, b: Mode) -> Result<(Vec<f64>, Vec<f64>)> {
        let c = self
            .density
            .states
            .iter()
            .map(|s| concurrence_wootters(&reduce_two_mode(s, a, b)?))
            .collect::<Result<Vec<_>>>()?;
        let nb = self.batch_means.len();
        let mut se = vec![0.0; c.len()];
        if nb > 1 {
            for (i, s) in se.iter_mut().enumerate() {
                let vals = self
                    .batch_means
                    .iter()
                    .map(|bm| {
                        let m = bm[i];
                        let st = DensityState {
                            rho: (m + m.adjoint()) * crate::C64::from(0.5),
                        };
                        concurrence_wootters(&reduce_two_mode(&st, a, b)?)
                    })
                    .collect::<Result<Vec<_>>>()?;
                let mean = vals.iter().sum::<f64>() / nb as f64;
                let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (nb as f64 - 1.0);
                *s = (var / nb as f64).sqrt();
            }
        }
        Ok((c, se))
    }

    /// Largest per-entry standard error at each output time.
    pub fn max_std_error(&self) -> Vec<f64> {
        self.density
            .std_error
            .as_ref()
            .map(|v| v.iter().map(|m| m.max()).collect())
            .unwrap_or_else(|| vec![0.0; self.density.grid.len()])
    }
}

/// Run `options.trajectories` stochastic trajectories and average them.
pub fn qsd_ensemble(
    params: &ValidatedParams,
    bath: &BathConfig,
    grid: &TimeGrid,
    psi0: &PureState,
    options: EnsembleOptions,
) -> Result<EnsembleResult> {
    let n = options.trajectories;
    if n == 0 {
        return Err(Error::Domain(
            "ensemble needs at least one trajectory".into(),
        ));
    }
    let setup = QsdSetup::new(params, bath, *grid, options.depth, options.max_step)?;
    let nb = options.batches.clamp(1, n);
    let batches = map_indexed(nb, options.exec, |b| -> Result<Moments> {
        let mut acc = Moments::new(grid.len());
        for i in (b * n / nb)..((b + 1) * n / nb) {
            let noise = setup.noise(bath, NoiseSeed::new(options.seed, i as u64))?;
            acc.add(&qsd_trajectory(params, bath, &setup, &noise, psi0)?);
        }
        Ok(acc)
    });
    let mut total = Moments::new(grid.len());
    let mut batch_means = Vec::with_capacity(nb);
    for b in batches {
        let b = b?;
        batch_means.push(b.mean.clone());
        total = total.merge(b);
    }
    let mut density = DensityTrajectory::new(*grid, total.hermitized())?;
    density.std_error = Some(total.std_error());
    let convergence = if options.probes > 0 {
        Some(hierarchy_convergence(
            params,
            bath,
            &setup,
            psi0,
            options.seed,
            options.probes,
        )?)
    } else {
        None
    };
    Ok(EnsembleResult {
        density,
        batch_means,
        setup,
        convergence,
        options,
    })
}
