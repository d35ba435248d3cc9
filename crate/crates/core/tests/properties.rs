use magnonq_core::entanglement::{
    concurrence_series, concurrence_single_excitation, concurrence_wootters, reduce_two_mode,
};
use magnonq_core::hilbert::{
    build_hamiltonian, initial_state, propagate, spectrum, Amplitudes, Frame, Mode, PureState,
    TimeGrid,
};
use magnonq_core::params::{
    channel_coupling, fiber_coupling_rate, validate_params, SystemParams, UnitMode, ValidatedParams,
};
use magnonq_core::C64;
use proptest::prelude::*;

fn params(w: (f64, f64, f64), g_m: f64, g_q: f64, j: f64) -> ValidatedParams {
    validate_params(
        &SystemParams::resonant(UnitMode::Dimensionless, 0.0, g_m, g_q, j)
            .with_frequencies(w.0, w.1, w.2),
    )
    .unwrap()
}

fn rate() -> impl Strategy<Value = f64> {
    0.0..2.0
}

fn amplitudes() -> impl Strategy<Value = PureState> {
    (
        prop::array::uniform6((-1.0..1.0f64, -1.0..1.0f64)),
        -1.0..1.0f64,
        -1.0..1.0f64,
    )
        .prop_filter_map("non-zero", |(a, vr, vi)| {
            let amps = Amplitudes::from_fn(|i, _| C64::new(a[i].0, a[i].1));
            let vac = C64::new(vr, vi);
            let n = (amps.norm_squared() + vac.norm_sqr()).sqrt();
            (n > 1e-3).then(|| {
                let mut psi = PureState::from_amplitudes(amps / C64::from(n));
                psi.vacuum = vac / n;
                psi
            })
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn fast_path_agrees_with_wootters(psi in amplitudes(), ia in 0usize..6, ib in 0usize..6) {
        prop_assume!(ia != ib);
        let (a, b) = (Mode::ALL[ia], Mode::ALL[ib]);
        let full = concurrence_wootters(&reduce_two_mode(&psi, a, b).unwrap()).unwrap();
        prop_assert!((concurrence_single_excitation(&psi, a, b) - full).abs() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hamiltonian_is_hermitian_with_real_spectrum(
        wc in -3.0..3.0f64, wm in -3.0..3.0f64, wq in -3.0..3.0f64,
        gm in rate(), gq in rate(), j in rate(),
    ) {
        let p = params((wc, wm, wq), gm, gq, j);
        for frame in [Frame::Lab, Frame::RotatingAtOmegaQ] {
            let h = build_hamiltonian(&p, frame);
            prop_assert!(h.hermiticity_error() == 0.0);
            let s = spectrum(&h).unwrap();
            prop_assert!((s.reconstruct() - h.matrix()).iter().all(|z| z.norm() < 1e-12));
            let trace: f64 = (0..6).map(|i| h.matrix()[(i, i)].re).sum();
            prop_assert!((s.energies.sum() - trace).abs() < 1e-11);
        }
    }

    #[test]
    fn closed_evolution_is_unitary_and_composes(
        gm in rate(), gq in rate(), j in rate(), t1 in 0.0..20.0f64, t2 in 0.0..20.0f64, start in 0usize..6,
    ) {
        let p = params((0.3, -0.2, 0.1), gm, gq, j);
        let h = build_hamiltonian(&p, Frame::RotatingAtOmegaQ);
        let psi0 = initial_state(Mode::ALL[start]);
        let g = |t: f64| TimeGrid::uniform(0.0, t.max(1e-9), 2).unwrap();
        let mid = propagate(&h, &psi0, &g(t1)).unwrap().states[1];
        let two_step = propagate(&h, &mid, &g(t2)).unwrap().states[1];
        let one_step = propagate(&h, &psi0, &g(t1.max(1e-9) + t2.max(1e-9))).unwrap().states[1];
        prop_assert!((two_step.amps - one_step.amps).norm() < 1e-10);
        prop_assert!((one_step.sector_norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn equal_couplings_give_arithmetic_spectrum(j in 0.01..5.0f64) {
        let s = spectrum(&build_hamiltonian(&params((0.0, 0.0, 0.0), j, j, j), Frame::RotatingAtOmegaQ)).unwrap();
        let expected = [-2.0 * j, -j, 0.0, 0.0, j, 2.0 * j];
        for (e, x) in s.energies.iter().zip(expected) {
            prop_assert!((e - x).abs() < 1e-10);
        }
    }

    #[test]
    fn cross_pair_relations_hold_pointwise(gm in 0.1..2.0f64, gq in 0.1..2.0f64, j in 0.05..2.0f64) {
        let p = params((0.0, 0.0, 0.0), gm, gq, j);
        let r = gq / gm;
        let grid = TimeGrid::linspace(0.0, 30.0, 301).unwrap();
        let traj = propagate(&build_hamiltonian(&p, Frame::RotatingAtOmegaQ), &initial_state(Mode::Q1), &grid).unwrap();
        let c = |a, b| concurrence_series(&traj, a, b).unwrap().values;
        let (q1m2, qq, m1q2, mm) = (c(Mode::Q1, Mode::M2), c(Mode::Q1, Mode::Q2), c(Mode::M1, Mode::Q2), c(Mode::M1, Mode::M2));
        for k in 0..grid.len() {
            prop_assert!((q1m2[k] * r - qq[k]).abs() < 1e-10);
            prop_assert!((m1q2[k] - r * mm[k]).abs() < 1e-10);
        }
    }

    #[test]
    fn fiber_rate_scaling(l in 0.1..1e4f64, k in 0.01..100.0f64, g in 1.0..1e8f64) {
        let a = fiber_coupling_rate(l, g).unwrap();
        let b = fiber_coupling_rate(l * k, g).unwrap();
        prop_assert!((b * k.sqrt() / a - 1.0).abs() < 1e-12);
        prop_assert!(fiber_coupling_rate(l, 2.0 * g).unwrap() > a);
        prop_assert_eq!(channel_coupling(1.0, a).unwrap(), a);
        prop_assert_eq!(channel_coupling(0.0, a).unwrap(), 0.0);
    }
}
