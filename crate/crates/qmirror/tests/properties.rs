//! Randomized structural properties of the amplitude, the state map and the
//! metric machinery.

use num_complex::Complex64;
use proptest::prelude::*;
use qmirror::amplitude::{amplitude_series, AmplitudeTrace};
use qmirror::geometry::{mc_c, metric_speed, MCFunction};
use qmirror::model::{derive_frame, PhysicalParams};
use qmirror::qstate::{evolve_state, spectral_decompose, Matrix2c, QubitState};

fn arb_params() -> impl Strategy<Value = PhysicalParams<f64>> {
    (
        0.5f64..2.0,
        0.0f64..1.5,
        -1.0f64..1.0,
        0.0f64..std::f64::consts::TAU,
        0.1f64..3.0,
    )
        .prop_map(|(gamma, omega, delta, phi, t_delay)| PhysicalParams {
            gamma,
            omega,
            delta,
            phi,
            t_delay,
            beta: 1.0,
            tau: 8.0,
        })
}

/// A density matrix off the degenerate shell, plus a traceless Hermitian
/// tangent, both from the Bloch picture.
fn arb_state_tangent() -> impl Strategy<Value = (QubitState<f64>, Matrix2c<f64>)> {
    (
        0.1f64..0.9,
        0.0f64..std::f64::consts::PI,
        0.0f64..std::f64::consts::TAU,
        -1.0f64..1.0,
        -1.0f64..1.0,
        -1.0f64..1.0,
    )
        .prop_map(|(r, theta, az, bx, by, bz)| {
            let (x, y, z) = (
                r * theta.sin() * az.cos(),
                r * theta.sin() * az.sin(),
                r * theta.cos(),
            );
            let half = 0.5;
            let rho = [
                [
                    Complex64::new(half * (1.0 + z), 0.0),
                    Complex64::new(half * x, -half * y),
                ],
                [
                    Complex64::new(half * x, half * y),
                    Complex64::new(half * (1.0 - z), 0.0),
                ],
            ];
            let tangent = [
                [Complex64::new(bz, 0.0), Complex64::new(bx, -by)],
                [Complex64::new(bx, by), Complex64::new(-bz, 0.0)],
            ];
            (QubitState { rho, time: 0.0 }, tangent)
        })
}

fn rotate(m: &Matrix2c<f64>, theta: f64) -> Matrix2c<f64> {
    // Conjugation by the diagonal unitary diag(e^{i theta}, 1).
    let u = Complex64::from_polar(1.0, theta);
    [
        [m[0][0], m[0][1] * u],
        [m[1][0] * u.conj(), m[1][1]],
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Measuring times in different units leaves the amplitude unchanged:
    /// rates scale down exactly as durations scale up.
    #[test]
    fn amplitude_is_scale_invariant(p in arb_params(), s in 0.25f64..4.0, t in 0.0f64..6.0) {
        let base = derive_frame(p);
        let scaled = derive_frame(PhysicalParams {
            gamma: p.gamma / s,
            omega: p.omega / s,
            delta: p.delta / s,
            t_delay: p.t_delay * s,
            ..p
        });
        let a = amplitude_series(&base, t);
        let b = amplitude_series(&scaled, t * s);
        prop_assert!((a - b).norm() < 1e-10, "{a} vs {b}");
    }

    /// No excitation is ever gained: |c| stays inside the unit disc.
    #[test]
    fn amplitude_is_contractive(p in arb_params(), t in 0.0f64..12.0) {
        let f = derive_frame(p);
        let c = amplitude_series(&f, t);
        prop_assert!(c.norm() <= 1.0 + 1e-12, "|c({t})| = {}", c.norm());
    }

    /// Kernel symmetry, the diagonal value, and the pointwise ordering
    /// inherited from f_min <= f <= f_max.
    #[test]
    fn kernels_are_symmetric_and_ordered(x in 1e-8f64..1.0, y in 1e-8f64..1.0) {
        let wy = MCFunction::wigner_yanase();
        let lo = MCFunction::f_max();
        let hi = MCFunction::f_min();
        for m in [&wy, &lo, &hi] {
            let a = mc_c(m, x, y).unwrap();
            let b = mc_c(m, y, x).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * a.abs());
            prop_assert!((mc_c(m, x, x).unwrap() - 1.0 / x).abs() <= 1e-12 / x);
        }
        let a = mc_c(&lo, x, y).unwrap();
        let b = mc_c(&wy, x, y).unwrap();
        let c = mc_c(&hi, x, y).unwrap();
        prop_assert!(a <= b * (1.0 + 1e-12) && b <= c * (1.0 + 1e-12), "{a} {b} {c}");
    }

    /// Evolved states stay physical: unit trace, Hermitian, nonnegative.
    #[test]
    fn evolved_states_stay_physical(p in arb_params(), beta in 0.0f64..1.0, t in 0.0f64..8.0) {
        let f = derive_frame(p);
        let c = amplitude_series(&f, t);
        let s = evolve_state(beta, c);
        let tr = s.rho[0][0].re + s.rho[1][1].re;
        prop_assert!((tr - 1.0).abs() < 1e-12);
        prop_assert!((s.rho[0][1] - s.rho[1][0].conj()).norm() < 1e-15);
        let d = spectral_decompose(&s);
        prop_assert!(d.p_minus >= -1e-12, "negative eigenvalue {}", d.p_minus);
        prop_assert!(d.p_plus <= 1.0 + 1e-12);
    }

    /// The decomposition reproduces the state and yields an orthonormal pair.
    #[test]
    fn decomposition_reconstructs((s, _) in arb_state_tangent()) {
        let d = spectral_decompose(&s);
        let mut dot = Complex64::default();
        for i in 0..2 {
            dot += d.v_plus[i].conj() * d.v_minus[i];
            let norm: f64 = d.v_plus[i].norm_sqr() + d.v_minus[i].norm_sqr();
            prop_assert!(norm.is_finite());
        }
        prop_assert!(dot.norm() < 1e-13, "eigenvectors not orthogonal: {dot}");
        for i in 0..2 {
            for j in 0..2 {
                let back = d.p_plus * d.v_plus[i] * d.v_plus[j].conj()
                    + d.p_minus * d.v_minus[i] * d.v_minus[j].conj();
                prop_assert!((back - s.rho[i][j]).norm() < 1e-12);
            }
        }
    }

    /// The speed is a function of the state path, not of the basis phase
    /// used to write it down.
    #[test]
    fn speed_is_gauge_invariant((s, dm) in arb_state_tangent(), theta in 0.0f64..std::f64::consts::TAU) {
        let wy = MCFunction::wigner_yanase();
        let v1 = metric_speed(&spectral_decompose(&s), &dm, &wy);
        let rotated = QubitState { rho: rotate(&s.rho, theta), time: s.time };
        let v2 = metric_speed(&spectral_decompose(&rotated), &rotate(&dm, theta), &wy);
        prop_assert!((v1 - v2).abs() <= 1e-10 * v1.max(1.0), "{v1} vs {v2}");
    }

    /// Larger f means smaller kernel: the f_max metric bounds the
    /// Wigner-Yanase speed from below and f_min from above.
    #[test]
    fn speeds_are_ordered_by_metric((s, dm) in arb_state_tangent()) {
        let d = spectral_decompose(&s);
        let lo = metric_speed(&d, &dm, &MCFunction::f_max());
        let mid = metric_speed(&d, &dm, &MCFunction::wigner_yanase());
        let hi = metric_speed(&d, &dm, &MCFunction::f_min());
        prop_assert!(lo <= mid * (1.0 + 1e-12) && mid <= hi * (1.0 + 1e-12), "{lo} {mid} {hi}");
    }

    /// With the full initial weight on the decaying level the state is
    /// diagonal and its spectrum is {P, 1 - P} on the nose.
    #[test]
    fn full_weight_spectrum_is_population(p in arb_params(), t in 0.0f64..8.0) {
        let f = derive_frame(p);
        let c = amplitude_series(&f, t);
        let pop = c.norm_sqr();
        let d = spectral_decompose(&evolve_state(1.0, c));
        let hi = pop.max(1.0 - pop);
        let lo = pop.min(1.0 - pop);
        prop_assert!((d.p_plus - hi).abs() <= 1e-15);
        prop_assert!((d.p_minus - lo).abs() <= 1e-15);
    }

    /// Distinguishability of the optimal pair never exceeds its initial
    /// value along any trace.
    #[test]
    fn distinguishability_starts_maximal(p in arb_params()) {
        let f = derive_frame(p);
        let trace = AmplitudeTrace::series(&f, 100, 8.0).unwrap();
        let d = qmirror::infoflow::optimal_pair_distance(&trace);
        prop_assert!((d[0] - 1.0).abs() < 1e-15);
        for &x in &d {
            prop_assert!(x <= 1.0 + 1e-12 && x >= -1e-15);
        }
    }
}
