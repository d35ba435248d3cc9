//! Two-mode reduced states and concurrence.
//!
//! Each mode is truncated to a qubit (empty / one excitation). A pair `(A, B)`
//! is reduced onto the basis `|00>, |01>, |10>, |11>` with `A` as the left
//! tensor factor, so `|10>` means "A excited".

use nalgebra::{Matrix4, Vector4};

use crate::error::{Error, Result};
use crate::hilbert::{DensityState, Mode, PureState, StateTrajectory, VACUUM};
use crate::C64;

const PSD_TOL: f64 = 1e-10;

/// Index of `|ab>` in the two-qubit basis.
pub const fn basis_index(a_excited: bool, b_excited: bool) -> usize {
    2 * (a_excited as usize) + b_excited as usize
}

const S00: usize = basis_index(false, false);
const S01: usize = basis_index(false, true);
const S10: usize = basis_index(true, false);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitDensity {
    pub matrix: Matrix4<C64>,
    pub a: Mode,
    pub b: Mode,
}

impl TwoQubitDensity {
    pub fn new(matrix: Matrix4<C64>, a: Mode, b: Mode) -> Self {
        Self { matrix, a, b }
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_part(&self.matrix).symmetric_eigenvalues().min()
    }

    /// True if only diagonal and anti-diagonal entries exceed `tol`.
    pub fn is_x_shaped(&self, tol: f64) -> bool {
        (0..4).all(|i| (0..4).all(|j| i == j || i + j == 3 || self.matrix[(i, j)].norm() <= tol))
    }
}

fn hermitian_part(m: &Matrix4<C64>) -> Matrix4<C64> {
    (m + m.adjoint()) * C64::from(0.5)
}

/// Anything that can be reduced onto a pair of modes.
pub trait Reducible {
    fn reduce(&self, a: Mode, b: Mode) -> Result<TwoQubitDensity>;
}

impl Reducible for PureState {
    /// Assumes unit total weight; population not in A or B is put on `|00>`.
    fn reduce(&self, a: Mode, b: Mode) -> Result<TwoQubitDensity> {
        if a == b {
            return Err(Error::SameMode(a.label()));
        }
        let (za, zb) = (self.amplitude(a), self.amplitude(b));
        let mut m = Matrix4::<C64>::zeros();
        m[(S10, S10)] = C64::from(za.norm_sqr());
        m[(S01, S01)] = C64::from(zb.norm_sqr());
        m[(S10, S01)] = za * zb.conj();
        m[(S01, S10)] = zb * za.conj();
        m[(S00, S00)] = C64::from(1.0 - za.norm_sqr() - zb.norm_sqr());
        m[(S00, S10)] = self.vacuum * za.conj();
        m[(S10, S00)] = za * self.vacuum.conj();
        m[(S00, S01)] = self.vacuum * zb.conj();
        m[(S01, S00)] = zb * self.vacuum.conj();
        Ok(TwoQubitDensity::new(m, a, b))
    }
}

impl Reducible for DensityState {
    /// Partial trace, normalised by the trace of the extended state.
    fn reduce(&self, a: Mode, b: Mode) -> Result<TwoQubitDensity> {
        if a == b {
            return Err(Error::SameMode(a.label()));
        }
        let tr = self.trace();
        if !(tr > 0.0) {
            return Err(Error::Domain(format!("density trace {tr} is not positive")));
        }
        let r = |i: usize, j: usize| self.rho[(i, j)];
        let (ia, ib, v) = (a.index(), b.index(), VACUUM);
        let mut m = Matrix4::<C64>::zeros();
        m[(S10, S10)] = r(ia, ia);
        m[(S01, S01)] = r(ib, ib);
        m[(S10, S01)] = r(ia, ib);
        m[(S01, S10)] = r(ib, ia);
        m[(S00, S00)] = C64::from(tr - r(ia, ia).re - r(ib, ib).re);
        m[(S00, S10)] = r(v, ia);
        m[(S10, S00)] = r(ia, v);
        m[(S00, S01)] = r(v, ib);
        m[(S01, S00)] = r(ib, v);
        Ok(TwoQubitDensity::new(m / C64::from(tr), a, b))
    }
}

pub fn reduce_two_mode<S: Reducible + ?Sized>(
    state: &S,
    a: Mode,
    b: Mode,
) -> Result<TwoQubitDensity> {
    state.reduce(a, b)
}

/// Wootters concurrence `max(0, l1 - l2 - l3 - l4)`.
///
/// The `l_i` are computed as singular values of `W^T (sy x sy) W` where
/// `rho = W W^dagger`; these coincide with the square roots of the
/// eigenvalues of `rho (sy x sy) rho^* (sy x sy)` but avoid taking square
/// roots of rounding-level eigenvalues.
pub fn concurrence_wootters(rho: &TwoQubitDensity) -> Result<f64> {
    let herm = hermitian_part(&rho.matrix);
    let eig = herm.symmetric_eigen();
    let min = eig.eigenvalues.min();
    if min < -PSD_TOL {
        return Err(Error::NotPositive(min));
    }
    let mut w = eig.eigenvectors;
    for k in 0..4 {
        let s = eig.eigenvalues[k].max(0.0).sqrt();
        w.column_mut(k).scale_mut(s);
    }
    let tau = w.transpose() * spin_flip() * w;
    let mut sv: Vec<f64> = tau.singular_values().iter().copied().collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    Ok((sv[0] - sv[1] - sv[2] - sv[3]).clamp(0.0, 1.0))
}

/// `sigma_y (x) sigma_y` in the `|00>, |01>, |10>, |11>` basis.
pub fn spin_flip() -> Matrix4<C64> {
    let mut y = Matrix4::<C64>::zeros();
    y[(3, 0)] = C64::from(-1.0);
    y[(2, 1)] = C64::from(1.0);
    y[(1, 2)] = C64::from(1.0);
    y[(0, 3)] = C64::from(-1.0);
    y
}

/// `2 |a_A| |a_B|`: the concurrence of any state whose reduction has no
/// `|11>` component, which covers every single-excitation state.
pub fn concurrence_single_excitation(psi: &PureState, a: Mode, b: Mode) -> f64 {
    if a == b {
        return 0.0;
    }
    (2.0 * psi.amplitude(a).norm() * psi.amplitude(b).norm()).min(1.0)
}

/// Concurrence of an X-state, `2 max(0, |r_{01,10}| - sqrt(r00 r11), |r_{00,11}| - sqrt(r01 r10))`.
pub fn concurrence_x_state(rho: &TwoQubitDensity) -> f64 {
    let m = &rho.matrix;
    let p = |i: usize| m[(i, i)].re.max(0.0);
    let c1 = m[(S01, S10)].norm() - (p(0) * p(3)).sqrt();
    let c2 = m[(0, 3)].norm() - (p(1) * p(2)).sqrt();
    (2.0 * c1.max(c2).max(0.0)).min(1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConcurrenceSeries {
    pub a: Mode,
    pub b: Mode,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl ConcurrenceSeries {
    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// First interior local maximum above `floor`, as `(t, C)`.
    pub fn first_peak(&self, floor: f64) -> Option<(f64, f64)> {
        let v = &self.values;
        (1..v.len().saturating_sub(1))
            .find(|&i| v[i] > floor && v[i] > v[i - 1] && v[i] >= v[i + 1])
            .map(|i| (self.times[i], v[i]))
    }
}

/// Trajectories that yield a pair concurrence per sample.
pub trait ConcurrenceSource {
    fn pair_concurrence(&self, a: Mode, b: Mode) -> Result<(Vec<f64>, Vec<f64>)>;
}

impl ConcurrenceSource for StateTrajectory {
    fn pair_concurrence(&self, a: Mode, b: Mode) -> Result<(Vec<f64>, Vec<f64>)> {
        if a == b {
            return Err(Error::SameMode(a.label()));
        }
        let times = self.grid.times().collect();
        let values = self
            .states
            .iter()
            .map(|s| concurrence_single_excitation(s, a, b))
            .collect();
        Ok((times, values))
    }
}

pub fn concurrence_series<T: ConcurrenceSource + ?Sized>(
    traj: &T,
    a: Mode,
    b: Mode,
) -> Result<ConcurrenceSeries> {
    let (times, values) = traj.pair_concurrence(a, b)?;
    Ok(ConcurrenceSeries {
        a,
        b,
        times,
        values,
    })
}

/// Reduced pure state of a two-qubit vector, for tests and examples.
pub fn pure_two_qubit(v: &Vector4<C64>, a: Mode, b: Mode) -> TwoQubitDensity {
    TwoQubitDensity::new(v * v.adjoint(), a, b)
}
