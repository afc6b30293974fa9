//! Monotone Riemannian metrics on the qubit state space: representing
//! functions, the induced kernel c(x, y), instantaneous evolution speed, and
//! its kink- and singularity-aware time average.

use crate::amplitude::AmplitudeTrace;
use crate::numeric::{adaptive_simpson, KahanSum};
use crate::qstate::{
    evolve_state_with, spectral_decompose, state_derivative_with, Coherence, Matrix2c,
    SpectralDecomp,
};
use crate::real::Real;
use crate::{Error, Result};
use num_complex::Complex;
use std::fmt;
use std::sync::Arc;

/// Eigenvalue clip applied inside the metric kernel only.
const EIGEN_CLIP: f64 = 1e-15;

/// Relative tolerance for the average-speed quadrature.
const QUAD_REL_TOL: f64 = 1e-6;

/// Representing function of a monotone Riemannian metric, with the induced
/// symmetric kernel c(x, y) = 1 / (y f(x/y)).
#[derive(Clone)]
pub struct MCFunction<T: Real> {
    kind: Kind<T>,
}

#[derive(Clone)]
enum Kind<T: Real> {
    WignerYanase,
    FMin,
    FMax,
    Custom {
        name: String,
        f: Arc<dyn Fn(T) -> T + Send + Sync>,
    },
}

impl<T: Real> fmt::Debug for MCFunction<T> {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "MCFunction({})", self.name())
    }
}

impl<T: Real> MCFunction<T> {
    /// f(t) = (1 + sqrt t)^2 / 4, the Wigner-Yanase choice.
    pub fn wigner_yanase() -> Self {
        Self { kind: Kind::WignerYanase }
    }

    /// f(t) = 2t / (1 + t), the smallest admissible representing function.
    pub fn f_min() -> Self {
        Self { kind: Kind::FMin }
    }

    /// f(t) = (1 + t) / 2, the largest admissible representing function.
    pub fn f_max() -> Self {
        Self { kind: Kind::FMax }
    }

    /// Look up a built-in by its user-facing name.
    pub fn from_name(name: &str) -> Result<Self> {
        match name.trim().to_ascii_lowercase().as_str() {
            "wigner-yanase" | "wy" => Ok(Self::wigner_yanase()),
            "min" => Ok(Self::f_min()),
            "max" => Ok(Self::f_max()),
            other => Err(Error::InvalidMetric(format!(
                "unknown metric '{other}' (expected wigner-yanase, min, or max)"
            ))),
        }
    }

    /// Register a custom representing function after checking admissibility:
    /// f(1) = 1, the symmetry f(t) = t f(1/t), and the min/max envelope, all
    /// sampled on a log grid over [0.1, 10].
    pub fn custom(
        name: impl Into<String>,
        f: impl Fn(T) -> T + Send + Sync + 'static,
    ) -> Result<Self> {
        let name = name.into();
        let tol = T::lit(1e-12);
        let one = f(T::one());
        if !one.is_finite() || (one - T::one()).abs() > tol {
            return Err(Error::InvalidMetric(format!(
                "metric '{name}': f(1) must equal 1, got {one}"
            )));
        }
        let lo = T::lit(0.1).ln();
        let hi = T::lit(10.0).ln();
        let steps = 32usize;
        for k in 0..=steps {
            let t = (lo + (hi - lo) * T::of_usize(k) / T::of_usize(steps)).exp();
            let ft = f(t);
            if !ft.is_finite() {
                return Err(Error::InvalidMetric(format!(
                    "metric '{name}': f({t}) is not finite"
                )));
            }
            let mirrored = t * f(t.recip());
            if (ft - mirrored).abs() > tol * ft.abs().max(T::one()) {
                return Err(Error::InvalidMetric(format!(
                    "metric '{name}': f(t) = t f(1/t) fails at t = {t}"
                )));
            }
            let fmin = T::lit(2.0) * t / (T::one() + t);
            let fmax = (T::one() + t) / T::lit(2.0);
            if ft < fmin - tol || ft > fmax + tol {
                return Err(Error::InvalidMetric(format!(
                    "metric '{name}': f({t}) = {ft} leaves the admissible envelope"
                )));
            }
        }
        Ok(Self {
            kind: Kind::Custom { name, f: Arc::new(f) },
        })
    }

    pub fn name(&self) -> &str {
        match &self.kind {
            Kind::WignerYanase => "wigner-yanase",
            Kind::FMin => "min",
            Kind::FMax => "max",
            Kind::Custom { name, .. } => name,
        }
    }

    /// Evaluate the representing function.
    pub fn f(&self, t: T) -> T {
        match &self.kind {
            Kind::WignerYanase => {
                let s = T::one() + t.sqrt();
                s * s / T::lit(4.0)
            }
            Kind::FMin => T::lit(2.0) * t / (T::one() + t),
            Kind::FMax => (T::one() + t) / T::lit(2.0),
            Kind::Custom { f, .. } => f(t),
        }
    }

    // Kernel without argument checks; positive inputs assumed.
    fn c_value(&self, x: T, y: T) -> T {
        match &self.kind {
            Kind::WignerYanase => {
                if x == y {
                    x.recip()
                } else {
                    let s = x.sqrt() + y.sqrt();
                    T::lit(4.0) / (s * s)
                }
            }
            Kind::FMin => {
                if x == y {
                    x.recip()
                } else {
                    (x + y) / (T::lit(2.0) * x * y)
                }
            }
            Kind::FMax => {
                if x == y {
                    x.recip()
                } else {
                    T::lit(2.0) / (x + y)
                }
            }
            Kind::Custom { f, .. } => (y * f(x / y)).recip(),
        }
    }
}

/// Metric kernel c(x, y) = 1 / (y f(x/y)) for positive weights.
pub fn mc_c<T: Real>(metric: &MCFunction<T>, x: T, y: T) -> Result<T> {
    if !(x > T::zero()) || !x.is_finite() || !(y > T::zero()) || !y.is_finite() {
        return Err(Error::InvalidParam(format!(
            "metric kernel needs positive weights, got ({x}, {y})"
        )));
    }
    Ok(metric.c_value(x, y))
}

/// Instantaneous evolution speed
/// V = sqrt( (1/4) sum_{k,l} c(p_k, p_l) |<v_k| rhodot |v_l>|^2 ),
/// with eigenvalues clipped below at 1e-15 inside the kernel only. The
/// two-index sum is gauge-invariant and stays regular at degeneracy.
pub fn metric_speed<T: Real>(
    decomp: &SpectralDecomp<T>,
    rhodot: &Matrix2c<T>,
    metric: &MCFunction<T>,
) -> T {
    let eps = T::lit(EIGEN_CLIP);
    let p = [decomp.p_plus.max(eps), decomp.p_minus.max(eps)];
    let v = [decomp.v_plus, decomp.v_minus];
    let mut sum = T::zero();
    for k in 0..2 {
        for l in 0..2 {
            let w = sandwich(&v[k], rhodot, &v[l]).norm_sqr();
            if w > T::zero() {
                sum += metric.c_value(p[k], p[l]) * w;
            }
        }
    }
    (sum * T::lit(0.25)).max(T::zero()).sqrt()
}

fn sandwich<T: Real>(u: &[Complex<T>; 2], m: &Matrix2c<T>, w: &[Complex<T>; 2]) -> Complex<T> {
    let mut acc: Complex<T> = Complex::default();
    for i in 0..2 {
        for j in 0..2 {
            acc += u[i].conj() * m[i][j] * w[j];
        }
    }
    acc
}

/// Speed at one instant of an amplitude trace.
pub fn speed_at<T: Real>(
    trace: &AmplitudeTrace<T>,
    beta: T,
    metric: &MCFunction<T>,
    convention: Coherence,
    t: T,
) -> T {
    let (c, cdot) = trace.eval(t);
    let state = evolve_state_with(beta, c, convention, t);
    let decomp = spectral_decompose(&state);
    let rhodot = state_derivative_with(beta, c, cdot, convention);
    metric_speed(&decomp, &rhodot, metric)
}

/// Average speed (1/tau) integral of V over [0, tau].
///
/// The quadrature splits at every delay multiple (V inherits the derivative
/// kinks) and runs the first split under the substitution t = u^2, which
/// turns the integrable t^{-1/2} spike of a pure initial state into a
/// bounded integrand.
pub fn average_speed<T: Real>(
    trace: &AmplitudeTrace<T>,
    beta: T,
    metric: &MCFunction<T>,
    tau: T,
) -> Result<T> {
    average_speed_with(trace, beta, metric, tau, Coherence::Complex)
}

/// Average speed under an explicit coherence convention.
pub fn average_speed_with<T: Real>(
    trace: &AmplitudeTrace<T>,
    beta: T,
    metric: &MCFunction<T>,
    tau: T,
    convention: Coherence,
) -> Result<T> {
    if !(beta >= T::zero() && beta <= T::one()) {
        return Err(Error::InvalidParam(format!(
            "beta must lie in [0, 1], got {beta}"
        )));
    }
    if !(tau > T::zero()) || !tau.is_finite() {
        return Err(Error::InvalidParam(format!(
            "average window must be positive, got {tau}"
        )));
    }
    let horizon = trace.horizon();
    if tau > horizon * (T::one() + T::lit(1e-12)) {
        return Err(Error::OutOfRange(format!(
            "average window {tau} exceeds the trace horizon {horizon}"
        )));
    }
    let tau = tau.min(horizon);
    let tol = T::lit(QUAD_REL_TOL);
    let td = trace.frame().t_delay;
    let mut total = KahanSum::new();

    let first_end = td.min(tau);
    let ub = first_end.sqrt();
    total.add(adaptive_simpson(
        |u| {
            let t = u * u;
            T::lit(2.0) * u * speed_at(trace, beta, metric, convention, t)
        },
        T::zero(),
        ub,
        tol,
    ));

    let mut k = 1usize;
    while T::of_usize(k) * td < tau {
        let a = T::of_usize(k) * td;
        let b = (T::of_usize(k + 1) * td).min(tau);
        total.add(adaptive_simpson(
            |t| speed_at(trace, beta, metric, convention, t),
            a,
            b,
            tol,
        ));
        k += 1;
    }
    Ok(total.value() / tau)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amplitude::AmplitudeTrace;
    use crate::model::{derive_frame, PhysicalParams};
    use crate::qstate::{evolve_state, spectral_decompose, state_derivative};
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    fn resonant(phi: f64, t_delay: f64, tau: f64) -> AmplitudeTrace<f64> {
        let f = derive_frame(PhysicalParams {
            phi,
            t_delay,
            tau,
            ..PhysicalParams::default()
        });
        AmplitudeTrace::series(&f, 1000, tau).unwrap()
    }

    #[test]
    fn kernel_closed_forms() {
        let wy = MCFunction::<f64>::wigner_yanase();
        assert_eq!(mc_c(&wy, 0.25, 0.25).unwrap(), 4.0);
        assert_eq!(mc_c(&wy, 1.0, 1.0).unwrap(), 1.0);
        let got = mc_c(&wy, 0.25, 0.75).unwrap();
        let root = 0.5 + 0.75f64.sqrt();
        assert_relative_eq!(got, 4.0 / (root * root), max_relative = 1e-15);
        assert_relative_eq!(got, 2.1435935394489816, max_relative = 1e-14);

        let mn = MCFunction::<f64>::f_min();
        assert_eq!(mc_c(&mn, 0.2, 0.2).unwrap(), 5.0);
        assert_relative_eq!(mc_c(&mn, 0.2, 0.8).unwrap(), 1.0 / 0.32, max_relative = 1e-14);
        let mx = MCFunction::<f64>::f_max();
        assert_eq!(mc_c(&mx, 0.2, 0.2).unwrap(), 5.0);
        assert_relative_eq!(mc_c(&mx, 0.2, 0.8).unwrap(), 2.0, max_relative = 1e-15);

        assert!(mc_c(&wy, 0.0, 0.5).is_err());
        assert!(mc_c(&wy, 0.5, -0.1).is_err());
    }

    #[test]
    fn kernels_agree_with_their_representing_functions() {
        let metrics = [
            MCFunction::<f64>::wigner_yanase(),
            MCFunction::f_min(),
            MCFunction::f_max(),
        ];
        let grid = [0.05, 0.2, 0.37, 0.5, 0.81, 0.99];
        for m in &metrics {
            for &x in &grid {
                for &y in &grid {
                    let direct = mc_c(m, x, y).unwrap();
                    let via_f = 1.0 / (y * m.f(x / y));
                    assert_relative_eq!(direct, via_f, max_relative = 1e-12);
                    let flipped = mc_c(m, y, x).unwrap();
                    assert_relative_eq!(direct, flipped, max_relative = 1e-12);
                }
            }
        }
    }

    #[test]
    fn representing_function_identities() {
        let metrics = [
            MCFunction::<f64>::wigner_yanase(),
            MCFunction::f_min(),
            MCFunction::f_max(),
        ];
        for m in &metrics {
            assert_relative_eq!(m.f(1.0), 1.0, max_relative = 1e-15);
            for k in 0..=20 {
                let t = 0.1 * 10f64.powf(k as f64 / 10.0); // log grid 0.1..10
                assert_relative_eq!(m.f(t), t * m.f(1.0 / t), max_relative = 1e-12);
                let fmin = 2.0 * t / (1.0 + t);
                let fmax = (1.0 + t) / 2.0;
                assert!(m.f(t) >= fmin - 1e-12 && m.f(t) <= fmax + 1e-12);
            }
        }
    }

    #[test]
    fn custom_metric_acceptance() {
        // Geometric-mean metric: valid.
        let gm = MCFunction::custom("geometric-mean", |t: f64| t.sqrt()).unwrap();
        assert_eq!(gm.name(), "geometric-mean");
        assert_relative_eq!(
            mc_c(&gm, 0.25, 0.75).unwrap(),
            1.0 / (0.75 * (0.25f64 / 0.75).sqrt()),
            max_relative = 1e-13
        );

        // Violates the mirror symmetry.
        assert!(MCFunction::custom("linear", |t: f64| t).is_err());
        // Violates f(1) = 1.
        assert!(MCFunction::custom("scaled", |t: f64| 0.9 * (1.0 + t) / 2.0).is_err());
        // Leaves the envelope.
        assert!(MCFunction::custom("big", |t: f64| (1.0 + t) * 0.75).is_err());
        assert!(MCFunction::<f64>::from_name("wy").is_ok());
        assert!(MCFunction::<f64>::from_name("bures").is_err());
    }

    #[test]
    fn speed_of_population_flow() {
        // Diagonal path: V = |Pdot| / (2 sqrt(P (1-P))) independent of metric.
        let s = evolve_state(1.0, Complex64::new(0.5f64.sqrt(), 0.0)); // P = 1/2
        let dec = spectral_decompose(&s);
        let rhodot = state_derivative(1.0, Complex64::new(0.5f64.sqrt(), 0.0), {
            // Pick cdot so that Pdot = 2 Re(c* cdot) = -0.1.
            Complex64::new(-0.05 / 0.5f64.sqrt(), 0.0)
        });
        for m in [
            MCFunction::wigner_yanase(),
            MCFunction::f_min(),
            MCFunction::f_max(),
        ] {
            let v = metric_speed(&dec, &rhodot, &m);
            assert_relative_eq!(v, 0.1, max_relative = 1e-12);
        }
    }

    #[test]
    fn zero_tangent_zero_speed() {
        let s = evolve_state(0.7, Complex64::new(0.4, 0.2));
        let dec = spectral_decompose(&s);
        let zero: Matrix2c<f64> = Default::default();
        assert_eq!(metric_speed(&dec, &zero, &MCFunction::wigner_yanase()), 0.0);
    }

    #[test]
    fn coherence_tangent_against_brute_force() {
        // Diagonal state with purely off-diagonal tangent.
        let p = 0.3f64;
        let s = evolve_state(1.0, Complex64::new(p.sqrt(), 0.0));
        let dec = spectral_decompose(&s);
        let d = Complex64::new(0.02, -0.07);
        let rhodot = [
            [Complex64::default(), d],
            [d.conj(), Complex64::default()],
        ];
        let wy = MCFunction::wigner_yanase();
        let got = metric_speed(&dec, &rhodot, &wy);

        let vs = [dec.v_plus, dec.v_minus];
        let ps = [dec.p_plus, dec.p_minus];
        let mut brute = 0.0;
        for k in 0..2 {
            for l in 0..2 {
                let mut elt = Complex64::default();
                for i in 0..2 {
                    for j in 0..2 {
                        elt += vs[k][i].conj() * rhodot[i][j] * vs[l][j];
                    }
                }
                brute += mc_c(&wy, ps[k].max(1e-15), ps[l].max(1e-15)).unwrap() * elt.norm_sqr();
            }
        }
        assert_relative_eq!(got, (brute / 4.0).sqrt(), max_relative = 1e-13);
    }

    #[test]
    fn gauge_phases_do_not_move_the_speed() {
        let s = evolve_state(0.8, Complex64::new(0.5, 0.3));
        let mut dec = spectral_decompose(&s);
        let rhodot = state_derivative(0.8, Complex64::new(0.5, 0.3), Complex64::new(-0.2, 0.4));
        let wy = MCFunction::wigner_yanase();
        let v0 = metric_speed(&dec, &rhodot, &wy);
        for (a, b) in [(0.9, 2.2), (3.7, 5.1), (0.1, 4.4)] {
            let ra = Complex64::from_polar(1.0, a);
            let rb = Complex64::from_polar(1.0, b);
            dec.v_plus = [dec.v_plus[0] * ra, dec.v_plus[1] * ra];
            dec.v_minus = [dec.v_minus[0] * rb, dec.v_minus[1] * rb];
            let v = metric_speed(&dec, &rhodot, &wy);
            assert_relative_eq!(v, v0, max_relative = 1e-14);
        }
    }

    #[test]
    fn average_speed_of_pure_decay() {
        // Delay beyond the horizon: plain exponential decay, closed form
        // (1/tau)(pi/2 - arcsin(e^{-A tau})).
        let trace = resonant(0.0, 12.0, 10.0);
        let wy = MCFunction::wigner_yanase();
        let got = average_speed(&trace, 1.0, &wy, 10.0).unwrap();
        let want = (std::f64::consts::FRAC_PI_2 - (-5.0f64).exp().asin()) / 10.0;
        assert!((got - want).abs() < 1e-6, "got {got}, want {want}");
        assert_relative_eq!(want, 0.15640583288110493, max_relative = 1e-15);
    }

    #[test]
    fn average_speed_frozen_feedback_values() {
        let wy = MCFunction::wigner_yanase();
        let got = average_speed(&resonant(0.0, 2.0, 10.0), 1.0, &wy, 10.0).unwrap();
        assert!(
            (got - 0.14574676960153554).abs() < 3e-6,
            "constructive: {got}"
        );
        let got = average_speed(
            &resonant(std::f64::consts::FRAC_PI_2, 2.0, 10.0),
            1.0,
            &wy,
            10.0,
        )
        .unwrap();
        assert!((got - 0.14564030579505052).abs() < 3e-6, "quarter turn: {got}");
    }

    #[test]
    fn average_speed_is_metric_free_for_diagonal_paths() {
        let trace = resonant(0.0, 2.0, 6.0);
        let va: Vec<f64> = [
            MCFunction::wigner_yanase(),
            MCFunction::f_min(),
            MCFunction::f_max(),
        ]
        .iter()
        .map(|m| average_speed(&trace, 1.0, m, 6.0).unwrap())
        .collect();
        assert_relative_eq!(va[0], va[1], max_relative = 1e-9);
        assert_relative_eq!(va[0], va[2], max_relative = 1e-9);
    }

    #[test]
    fn average_speed_edge_cases() {
        let trace = resonant(0.0, 2.0, 6.0);
        let wy = MCFunction::wigner_yanase();
        assert_eq!(average_speed(&trace, 0.0, &wy, 6.0).unwrap(), 0.0);
        assert!(average_speed(&trace, 1.5, &wy, 6.0).is_err());
        assert!(average_speed(&trace, 1.0, &wy, 7.0).is_err());
        assert!(average_speed(&trace, 1.0, &wy, -1.0).is_err());
        // Averaging over a shorter window than the trace is fine.
        assert!(average_speed(&trace, 1.0, &wy, 3.0).unwrap() > 0.0);
    }
}
