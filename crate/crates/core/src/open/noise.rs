//! Complex Ornstein-Uhlenbeck noise with covariance
//! `M[z_t z_s^*] = exp(-gamma |t - s|) / 2` and `M[z_t z_s] = 0`.
//!
//! Paths are sampled with the exact one-step transition of the process, so
//! the statistics do not depend on the grid spacing. Randomness comes from a
//! ChaCha20 stream keyed by `(master, stream)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::hilbert::TimeGrid;
use crate::C64;

use super::KERNEL_AMPLITUDE;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NoiseSeed {
    pub master: u64,
    pub stream: u64,
}

impl NoiseSeed {
    pub fn new(master: u64, stream: u64) -> Self {
        Self { master, stream }
    }

    pub fn rng(&self) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.master);
        rng.set_stream(self.stream);
        rng
    }
}

/// One realisation `z_j(t_n)` per bath on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisePath {
    pub grid: TimeGrid,
    pub gamma: f64,
    pub seed: NoiseSeed,
    /// `values[j][n]` is `z_j(t_n)`; equations of motion use the conjugate.
    pub values: Vec<Vec<C64>>,
}

/// Circular complex Gaussian with `E|z|^2 = variance`.
fn complex_normal<R: Rng>(rng: &mut R, variance: f64) -> C64 {
    let s = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(s * re, s * im)
}

pub fn ou_noise_path(
    gamma: f64,
    grid: &TimeGrid,
    baths: usize,
    seed: NoiseSeed,
) -> Result<NoisePath> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::Domain(format!(
            "noise memory rate must be > 0 (got {gamma})"
        )));
    }
    let decay = (-gamma * grid.dt()).exp();
    let kick = KERNEL_AMPLITUDE * (1.0 - decay * decay);
    let mut rng = seed.rng();
    let values = (0..baths)
        .map(|_| {
            let mut path = Vec::with_capacity(grid.len());
            let mut z = complex_normal(&mut rng, KERNEL_AMPLITUDE);
            path.push(z);
            for _ in 1..grid.len() {
                z = z * decay + complex_normal(&mut rng, kick);
                path.push(z);
            }
            path
        })
        .collect();
    Ok(NoisePath {
        grid: *grid,
        gamma,
        seed,
        values,
    })
}
