use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use proptest::prelude::*;
use raqsim::atomic::{steady_state, FourLevelSystem, SolverOptions};
use raqsim::constants::{angular, ATOMIC_DIPOLE_UNIT};
use raqsim::frontend::Diagonal;
use raqsim::linalg::apply_diagonal;
use raqsim::link::{combiner, sinr_per_user};
use raqsim::output::{read_csv_from, write_csv_to};
use raqsim::rates::{
    asymptotic_limit, gap_raq_vs_mmimo, gap_zf_vs_mrc, lower_bound, Asymptote, BoundInputs, Scheme,
    System,
};
use raqsim::sweep::{Axis, SweepRow};

fn complex() -> impl Strategy<Value = Complex64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| Complex64::new(a, b))
}

fn channel(m: usize, k: usize) -> impl Strategy<Value = (Diagonal, DMatrix<Complex64>)> {
    (
        prop::collection::vec((0.2f64..2.0, 0.0f64..6.3), m),
        prop::collection::vec(complex(), m * k),
    )
        .prop_map(move |(t, h)| {
            let theta = Diagonal(DVector::from_iterator(
                m,
                t.into_iter().map(|(r, p)| Complex64::from_polar(r, p)),
            ));
            (theta, DMatrix::from_vec(m, k, h))
        })
}

fn bounds(system: System, scheme: Scheme) -> impl Strategy<Value = BoundInputs> {
    (
        3usize..200,
        prop::collection::vec(1e-14f64..1e-9, 2..12),
        1e-3f64..10.0,
        1e-5f64..1e-3,
        0.5f64..2e3,
        0.1f64..1.0,
        1e-18f64..1e-12,
    )
        .prop_map(
            move |(extra, beta, ps, ap, gain, cos2, noise)| BoundInputs {
                system,
                scheme,
                elements: beta.len() + extra,
                beta,
                transmit_power: ps,
                aperture: ap,
                gain,
                cos2_phase: if system == System::Mmimo { 1.0 } else { cos2 },
                noise_power: noise,
            },
        )
}

fn any_bounds() -> impl Strategy<Value = BoundInputs> {
    prop_oneof![
        bounds(System::Raq, Scheme::Mrc),
        bounds(System::Raq, Scheme::Zf),
        bounds(System::Mmimo, Scheme::Mrc),
        bounds(System::Mmimo, Scheme::Zf),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn zf_nulls_interference((theta, h) in channel(24, 5)) {
        let c = combiner(Scheme::Zf, &theta, &h).unwrap();
        let eye = c.adjoint() * apply_diagonal(theta.entries(), &h);
        prop_assert!((eye - DMatrix::identity(5, 5)).camax() < 1e-9);
    }

    #[test]
    fn sinr_ignores_combiner_scaling((theta, h) in channel(12, 4), s in complex(), col in 0usize..4, zf in any::<bool>()) {
        prop_assume!(s.norm() > 1e-3);
        let scheme = if zf { Scheme::Zf } else { Scheme::Mrc };
        let mut c = combiner(scheme, &theta, &h).unwrap();
        let before = sinr_per_user(&c, &theta, &h, 1.5, 0.2, 0.3).unwrap();
        for x in c.column_mut(col).iter_mut() {
            *x *= s;
        }
        let after = sinr_per_user(&c, &theta, &h, 1.5, 0.2, 0.3).unwrap();
        for (a, b) in before.iter().zip(&after) {
            prop_assert!((a - b).abs() <= 1e-10 * a.abs());
        }
    }

    #[test]
    fn single_user_combiners_agree((theta, h) in channel(10, 1), ps in 0.01f64..10.0) {
        let a = sinr_per_user(&combiner(Scheme::Mrc, &theta, &h).unwrap(), &theta, &h, ps, 1.0, 0.1).unwrap();
        let b = sinr_per_user(&combiner(Scheme::Zf, &theta, &h).unwrap(), &theta, &h, ps, 1.0, 0.1).unwrap();
        prop_assert!((a[0] - b[0]).abs() <= 1e-10 * a[0]);
    }

    #[test]
    fn bounds_are_monotone(inputs in any_bounds(), k in 0usize..12, f in 1.01f64..10.0) {
        let k = k % inputs.users();
        let base = lower_bound(&inputs, k).unwrap();
        prop_assert!(base >= 0.0);
        prop_assert!(lower_bound(&inputs.with_power(inputs.transmit_power * f), k).unwrap() >= base);
        let mut more = inputs.clone();
        more.elements += 1;
        prop_assert!(lower_bound(&more, k).unwrap() >= base);
        let mut stronger = inputs.clone();
        stronger.beta[k] *= f;
        prop_assert!(lower_bound(&stronger, k).unwrap() >= base);
    }

    #[test]
    fn zf_mrc_gap_is_log_ratio(inputs in bounds(System::Raq, Scheme::Zf), k in 0usize..12) {
        let k = k % inputs.users();
        let g = gap_zf_vs_mrc(&inputs, k).unwrap();
        prop_assert!((g.delta_rate - g.ratio.log2()).abs() < 1e-12 * g.ratio.log2().abs().max(1.0));
        prop_assert!(g.array_penalty <= 0.0);
    }

    #[test]
    fn array_penalty_vanishes_for_large_arrays(inputs in bounds(System::Raq, Scheme::Zf)) {
        let mut big = inputs.clone();
        big.elements = 10_000_000;
        let g = gap_zf_vs_mrc(&big, 0).unwrap();
        prop_assert!(g.array_penalty.abs() < 1e-5);
        prop_assert!((g.delta_rate - g.delta_rate_large_array).abs() < 1e-5);
    }

    #[test]
    fn raq_gain_matches_bound_difference_at_high_sinr(raq in bounds(System::Raq, Scheme::Zf), rho0 in 1.0f64..1e4, a0 in 1e-5f64..1e-3, n0 in 1e-15f64..1e-12, k in 0usize..12) {
        let k = k % raq.users();
        let mut raq = raq;
        raq.cos2_phase = 1.0;
        let mut mm = raq.clone();
        mm.system = System::Mmimo;
        mm.gain = rho0;
        mm.aperture = a0;
        mm.noise_power = n0;
        // push both SINRs above 10³
        let sinr = |b: &BoundInputs| b.snr_coefficient() * b.transmit_power * (b.elements - b.users()) as f64 * b.beta[k];
        let need = 1e4 / sinr(&raq).min(sinr(&mm));
        let (raq, mm) = (raq.with_power(raq.transmit_power * need.max(1.0)), mm.with_power(mm.transmit_power * need.max(1.0)));
        prop_assert!(sinr(&raq) > 1e3 && sinr(&mm) > 1e3);
        let g = gap_raq_vs_mmimo(&raq, &mm, k).unwrap();
        let diff = lower_bound(&raq, k).unwrap() - lower_bound(&mm, k).unwrap();
        prop_assert!((g.delta_rate - diff).abs() < 0.01, "{} vs {}", g.delta_rate, diff);
    }

    #[test]
    fn mrc_bounds_saturate(inputs in prop_oneof![bounds(System::Raq, Scheme::Mrc), bounds(System::Mmimo, Scheme::Mrc)], k in 0usize..12) {
        let k = k % inputs.users();
        let c1 = asymptotic_limit(&inputs, k, Asymptote::InterferenceLimited).unwrap();
        let loud = inputs.with_power(inputs.transmit_power * 1e12);
        let lb = lower_bound(&loud, k).unwrap();
        prop_assert!(lb <= c1 + 1e-12);
        prop_assert!((c1 - lb) <= 0.01 * c1, "{} vs {}", lb, c1);
    }

    #[test]
    fn steady_state_is_a_density_matrix(dp in -3.0f64..3.0, dc in -3.0f64..3.0, dl in -1.0f64..1.0, oc in 0.0f64..3.0, ol in 0.0f64..2.0, op in 0.01f64..0.9) {
        let g = angular(5.234e6);
        let sys = FourLevelSystem {
            probe_rabi: op * g,
            coupling_rabi: oc * g,
            probe_detuning: dp * g,
            coupling_detuning: dc * g,
            rf_detuning: dl * g,
            gamma2: g,
            gamma3: 0.0,
            gamma4: 0.0,
            atomic_density: 3e16,
            population_fraction: 1e-3,
            mu12: 3.7971e-29,
            mu34: 1443.45 * ATOMIC_DIPOLE_UNIT,
            t2: 1e-6,
        };
        let rho = steady_state(&sys, ol * g, &SolverOptions::default()).unwrap();
        prop_assert!((rho.trace() - Complex64::new(1.0, 0.0)).norm() < 1e-10);
        prop_assert!((rho - rho.adjoint()).camax() < 1e-10);
        let eig = rho.map(|z| z).symmetric_eigenvalues();
        prop_assert!(eig.iter().all(|e| *e > -1e-9));
    }

    #[test]
    fn csv_round_trips(values in prop::collection::vec((-50.0f64..500.0, 0.0f64..30.0, 0.0f64..30.0, 0.0f64..1.0), 1..20)) {
        let rows: Vec<SweepRow> = values
            .iter()
            .enumerate()
            .map(|(i, (v, a, b, c))| SweepRow {
                axis: Axis::Power,
                value: *v,
                system: System::ALL[i % 2],
                scheme: Scheme::ALL[(i / 2) % 2],
                rate_mc: *a,
                rate_lb: *b,
                ci: *c,
                err: String::new(),
            })
            .collect();
        let mut buf = Vec::new();
        write_csv_to(&rows, &mut buf).unwrap();
        prop_assert_eq!(read_csv_from(&buf[..]).unwrap(), rows);
    }
}
