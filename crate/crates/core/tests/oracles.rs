//! Independent oracles for the reduction and concurrence routes.

use magnonq_core::entanglement::{
    concurrence_single_excitation, concurrence_wootters, reduce_two_mode, spin_flip,
    TwoQubitDensity,
};
use magnonq_core::hilbert::{Amplitudes, DensityState, Mode, PureState};
use magnonq_core::C64;
use nalgebra::{DMatrix, DVector, Matrix4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Embed sector + vacuum amplitudes into the 2^6 occupation basis; mode `k`
/// is bit `5 - k` so the first mode is the most significant.
fn embed(psi: &PureState) -> DVector<C64> {
    let mut v = DVector::zeros(64);
    v[0] = psi.vacuum;
    for k in 0..6 {
        v[1 << (5 - k)] = psi.amps[k];
    }
    v
}

/// Trace out everything except modes `a` and `b` of a 64x64 density.
fn brute_partial_trace(rho: &DMatrix<C64>, a: usize, b: usize) -> Matrix4<C64> {
    let bit = |s: usize, k: usize| (s >> (5 - k)) & 1;
    let mut out = Matrix4::zeros();
    for i in 0..64 {
        for j in 0..64 {
            let same_rest = (0..6)
                .filter(|&k| k != a && k != b)
                .all(|k| bit(i, k) == bit(j, k));
            if same_rest {
                let r = 2 * bit(i, a) + bit(i, b);
                let c = 2 * bit(j, a) + bit(j, b);
                out[(r, c)] += rho[(i, j)];
            }
        }
    }
    out
}

fn random_state(rng: &mut ChaCha8Rng, vacuum: bool) -> PureState {
    let mut amps = Amplitudes::from_fn(|_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let mut vac = if vacuum {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    } else {
        C64::new(0.0, 0.0)
    };
    let n = (amps.norm_squared() + vac.norm_sqr()).sqrt();
    amps /= C64::from(n);
    vac /= n;
    let mut psi = PureState::from_amplitudes(amps);
    psi.vacuum = vac;
    psi
}

fn max_diff(a: &Matrix4<C64>, b: &Matrix4<C64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[test]
fn reduction_matches_brute_force_partial_trace() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for trial in 0..200 {
        let psi = random_state(&mut rng, trial % 2 == 0);
        let v = embed(&psi);
        let full = &v * v.adjoint();
        for a in Mode::ALL {
            for b in Mode::ALL {
                if a == b {
                    continue;
                }
                let oracle = brute_partial_trace(&full, a.index(), b.index());
                let pure = reduce_two_mode(&psi, a, b).unwrap();
                let dens = reduce_two_mode(&DensityState::from_pure(&psi), a, b).unwrap();
                assert!(max_diff(&pure.matrix, &oracle) <= 1e-12);
                assert!(max_diff(&dens.matrix, &oracle) <= 1e-12);
            }
        }
    }
}

#[test]
fn mixed_reduction_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..50 {
        let states: Vec<_> = (0..4).map(|_| random_state(&mut rng, true)).collect();
        let w: Vec<f64> = (0..4).map(|_| rng.random_range(0.1..1.0)).collect();
        let total: f64 = w.iter().sum();
        let mut full = DMatrix::<C64>::zeros(64, 64);
        let mut rho = DensityState::from_pure(&states[0]).rho * C64::from(0.0);
        for (s, wi) in states.iter().zip(&w) {
            let v = embed(s);
            full += &v * v.adjoint() * C64::from(wi / total);
            rho += DensityState::from_pure(s).rho * C64::from(wi / total);
        }
        let d = DensityState { rho };
        for (a, b) in [
            (Mode::M1, Mode::M2),
            (Mode::Q1, Mode::C2),
            (Mode::Q2, Mode::M1),
        ] {
            let oracle = brute_partial_trace(&full, a.index(), b.index());
            assert!(max_diff(&reduce_two_mode(&d, a, b).unwrap().matrix, &oracle) <= 1e-12);
        }
    }
}

/// `sqrt` of the eigenvalues of `rho (sy sy) rho^* (sy sy)`, via a complex Schur form.
fn concurrence_from_r_eigenvalues(rho: &Matrix4<C64>) -> f64 {
    let y = spin_flip();
    let r = rho * y * rho.conjugate() * y;
    let ev = nalgebra::Schur::new(r)
        .eigenvalues()
        .expect("complex Schur is triangular");
    let mut l: Vec<f64> = ev.iter().map(|z| z.re.max(0.0).sqrt()).collect();
    l.sort_by(|a, b| b.total_cmp(a));
    (l[0] - l[1] - l[2] - l[3]).max(0.0)
}

fn random_full_rank(rng: &mut ChaCha8Rng) -> Matrix4<C64> {
    let g = Matrix4::<C64>::from_fn(|_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let mut m = g * g.adjoint() + Matrix4::identity() * C64::from(0.05);
    let tr = m.trace();
    m /= tr;
    m
}

#[test]
fn wootters_matches_r_matrix_eigenvalues_on_full_rank_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut entangled = 0;
    for _ in 0..500 {
        // mix toward a Bell state so both zero and non-zero concurrence occur
        let p: f64 = rng.random_range(0.0..1.0);
        let mut bell = Matrix4::<C64>::zeros();
        for (i, j) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
            bell[(i, j)] = C64::from(0.5);
        }
        let rho = random_full_rank(&mut rng) * C64::from(1.0 - p) + bell * C64::from(p);
        let prod = concurrence_wootters(&TwoQubitDensity::new(rho, Mode::M1, Mode::M2)).unwrap();
        let oracle = concurrence_from_r_eigenvalues(&rho);
        assert!((prod - oracle).abs() < 1e-9, "{prod} vs {oracle}");
        if oracle > 0.0 {
            entangled += 1;
        }
    }
    assert!(entangled > 50 && entangled < 450, "{entangled}");
}

#[test]
fn pure_single_excitation_overlap_formula() {
    // for a pure two-qubit vector, C = |<psi| sy sy |psi^*>|
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..1000 {
        let psi = random_state(&mut rng, false);
        let (a, b) = (Mode::Q1, Mode::M2);
        let v = nalgebra::Vector4::new(
            psi.vacuum,
            psi.amplitude(b),
            psi.amplitude(a),
            C64::new(0.0, 0.0),
        );
        let rest = 1.0 - v.norm_squared();
        // rest of the sector adds |00><00| only, which does not change C here
        let overlap = (v.adjoint() * spin_flip() * v.conjugate())[(0, 0)].norm();
        let c = concurrence_wootters(&reduce_two_mode(&psi, a, b).unwrap()).unwrap();
        assert!((c - overlap).abs() <= 1e-12, "{c} {overlap} rest={rest}");
    }
}

#[test]
fn fast_path_equals_wootters_on_random_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0_f64;
    for trial in 0..1000 {
        let psi = random_state(&mut rng, trial % 3 == 0);
        for (a, b) in [
            (Mode::M1, Mode::M2),
            (Mode::Q1, Mode::Q2),
            (Mode::C1, Mode::Q2),
        ] {
            let fast = concurrence_single_excitation(&psi, a, b);
            let full = concurrence_wootters(&reduce_two_mode(&psi, a, b).unwrap()).unwrap();
            worst = worst.max((fast - full).abs());
        }
    }
    assert!(worst <= 1e-12, "{worst}");
}
