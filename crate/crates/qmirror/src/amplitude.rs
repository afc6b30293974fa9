//! Excited-state amplitude under delayed mirror feedback.
//!
//! The amplitude obeys cdot = -A c(t) + A e^{i chi} c(t - t_d) Theta(t - t_d)
//! with c(0) = 1. Two independent routes are provided: an exact truncated
//! series and a method-of-steps Runge-Kutta integrator; each cross-checks
//! the other.

use crate::model::{wrap_2pi, DressedFrame};
use crate::numeric::{hermite, ComplexKahan};
use crate::real::Real;
use crate::{Error, Result};
use num_complex::Complex;
use num_traits::One;

/// Route that produced a trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceMethod {
    Series,
    Dde,
}

/// Amplitude and derivative sampled on a delay-aligned time grid.
///
/// The grid is the uniform lattice t_j = t_delay * j / N truncated at the
/// horizon, plus the horizon itself as the final point; every delay multiple
/// below the horizon is an exact lattice point, so derivative kinks never
/// fall between samples.
#[derive(Clone, Debug)]
pub struct AmplitudeTrace<T: Real> {
    frame: DressedFrame<T>,
    method: TraceMethod,
    steps_per_delay: usize,
    grid: Vec<T>,
    c: Vec<Complex<T>>,
    cdot: Vec<Complex<T>>,
}

/// Smallest admissible lattice density per delay interval.
pub const MIN_STEPS_PER_DELAY: usize = 100;

const MAX_GRID_POINTS: usize = 50_000_000;

impl<T: Real> AmplitudeTrace<T> {
    /// Evaluate the exact series on the delay-aligned grid.
    pub fn series(frame: &DressedFrame<T>, steps_per_delay: usize, horizon: T) -> Result<Self> {
        let grid = build_grid(frame, steps_per_delay, horizon)?;
        let c: Vec<Complex<T>> = grid.iter().map(|&t| amplitude_series(frame, t)).collect();
        let n = steps_per_delay;
        let last = grid.len() - 1;
        let cdot = grid
            .iter()
            .enumerate()
            .map(|(j, &t)| {
                let delayed = if t >= frame.t_delay {
                    if j < last {
                        c[j - n]
                    } else {
                        amplitude_series(frame, t - frame.t_delay)
                    }
                } else {
                    Complex::default()
                };
                amplitude_derivative(frame, c[j], delayed, t)
            })
            .collect();
        Ok(Self {
            frame: *frame,
            method: TraceMethod::Series,
            steps_per_delay,
            grid,
            c,
            cdot,
        })
    }

    /// Integrate the delay equation by the method of steps: classic
    /// fourth-order Runge-Kutta restarted at every delay multiple, with the
    /// delayed term read from cubic Hermite interpolation of the stored
    /// history (value plus slope at the bracketing lattice nodes).
    pub fn dde(frame: &DressedFrame<T>, steps_per_delay: usize, horizon: T) -> Result<Self> {
        let grid = build_grid(frame, steps_per_delay, horizon)?;
        let n = steps_per_delay;
        let a = frame.decay;
        let b = frame.feedback;
        let h_lattice = frame.t_delay / T::of_usize(n);
        let half = T::lit(0.5);
        let two = T::lit(2.0);
        let six = T::lit(6.0);

        let mut c: Vec<Complex<T>> = Vec::with_capacity(grid.len());
        c.push(Complex::one());

        for j in 1..grid.len() {
            let i_cur = j - 1;
            let h = grid[j] - grid[i_cur];
            // Feedback is gated per segment, not per stage time: interval
            // i_cur lies in segment i_cur / n, and the delayed term is active
            // from segment 1 onward. Gating by stage time instead would let
            // the last stage of the first segment peek across the kink.
            let gate = i_cur >= n;
            let (d0, dh, d1) = if gate {
                let i = i_cur - n;
                let (sh, sf) = if j == grid.len() - 1 {
                    let sf = h / h_lattice;
                    (half * sf, sf)
                } else {
                    (half, T::one())
                };
                (
                    c[i],
                    history(&grid, &c, frame, n, i, sh),
                    history(&grid, &c, frame, n, i, sf),
                )
            } else {
                Default::default()
            };
            let rhs = |y: Complex<T>, d: Complex<T>| -> Complex<T> {
                if gate {
                    -y * a + b * d
                } else {
                    -y * a
                }
            };
            let y0 = c[i_cur];
            let k1 = rhs(y0, d0);
            let k2 = rhs(y0 + k1 * (h * half), dh);
            let k3 = rhs(y0 + k2 * (h * half), dh);
            let k4 = rhs(y0 + k3 * h, d1);
            c.push(y0 + (k1 + (k2 + k3) * two + k4) * (h / six));
        }

        let last = grid.len() - 1;
        let cdot = grid
            .iter()
            .enumerate()
            .map(|(j, &t)| {
                let delayed = if t >= frame.t_delay {
                    if j < last {
                        c[j - n]
                    } else {
                        interp_lattice(&grid, &c, frame, n, t - frame.t_delay)
                    }
                } else {
                    Complex::default()
                };
                amplitude_derivative(frame, c[j], delayed, t)
            })
            .collect();
        Ok(Self {
            frame: *frame,
            method: TraceMethod::Dde,
            steps_per_delay,
            grid,
            c,
            cdot,
        })
    }

    pub fn frame(&self) -> &DressedFrame<T> {
        &self.frame
    }

    pub fn method(&self) -> TraceMethod {
        self.method
    }

    pub fn steps_per_delay(&self) -> usize {
        self.steps_per_delay
    }

    /// Sample times, starting at 0 and ending at the horizon.
    pub fn times(&self) -> &[T] {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.c
    }

    pub fn derivatives(&self) -> &[Complex<T>] {
        &self.cdot
    }

    pub fn horizon(&self) -> T {
        *self.grid.last().expect("grid is never empty")
    }

    /// Amplitude and derivative at an arbitrary time, clamped to
    /// [0, horizon]. Series traces re-evaluate the closed form; integrator
    /// traces interpolate the stored grid.
    pub fn eval(&self, t: T) -> (Complex<T>, Complex<T>) {
        let t = t.max(T::zero()).min(self.horizon());
        let c;
        let delayed;
        match self.method {
            TraceMethod::Series => {
                c = amplitude_series(&self.frame, t);
                delayed = if t >= self.frame.t_delay {
                    amplitude_series(&self.frame, t - self.frame.t_delay)
                } else {
                    Complex::default()
                };
            }
            TraceMethod::Dde => {
                c = interp_lattice(&self.grid, &self.c, &self.frame, self.steps_per_delay, t);
                delayed = if t >= self.frame.t_delay {
                    interp_lattice(
                        &self.grid,
                        &self.c,
                        &self.frame,
                        self.steps_per_delay,
                        t - self.frame.t_delay,
                    )
                } else {
                    Complex::default()
                };
            }
        }
        (c, amplitude_derivative(&self.frame, c, delayed, t))
    }
}

fn build_grid<T: Real>(
    frame: &DressedFrame<T>,
    steps_per_delay: usize,
    horizon: T,
) -> Result<Vec<T>> {
    if steps_per_delay < MIN_STEPS_PER_DELAY {
        return Err(Error::InvalidGrid(format!(
            "need at least {MIN_STEPS_PER_DELAY} steps per delay, got {steps_per_delay}"
        )));
    }
    if !(frame.t_delay > T::zero()) || !frame.t_delay.is_finite() {
        return Err(Error::InvalidParam(format!(
            "delay must be positive and finite, got {}",
            frame.t_delay
        )));
    }
    if !(horizon > T::zero()) || !horizon.is_finite() {
        return Err(Error::InvalidParam(format!(
            "horizon must be positive and finite, got {horizon}"
        )));
    }
    let per = horizon / frame.t_delay * T::of_usize(steps_per_delay);
    let Some(expected) = per.to_usize() else {
        return Err(Error::InvalidGrid(
            "horizon spans too many delay intervals for this grid density".into(),
        ));
    };
    if expected > MAX_GRID_POINTS {
        return Err(Error::InvalidGrid(
            "horizon spans too many delay intervals for this grid density".into(),
        ));
    }
    let n = T::of_usize(steps_per_delay);
    let mut grid = Vec::with_capacity(expected + 2);
    let mut j = 0usize;
    loop {
        // t_j = t_delay * (j / N): for j a multiple of N the float quotient
        // is an exact integer, so delay multiples land on exact grid values.
        let t = frame.t_delay * (T::of_usize(j) / n);
        if t >= horizon {
            break;
        }
        grid.push(t);
        j += 1;
    }
    grid.push(horizon);
    Ok(grid)
}

/// History lookup for the integrator: value at fraction `s` of lattice
/// interval `i`, using segment-consistent slopes at the interval endpoints.
fn history<T: Real>(
    grid: &[T],
    c: &[Complex<T>],
    frame: &DressedFrame<T>,
    n: usize,
    i: usize,
    s: T,
) -> Complex<T> {
    if s == T::zero() {
        return c[i];
    }
    if s == T::one() {
        return c[i + 1];
    }
    let h = grid[i + 1] - grid[i];
    let gate = i >= n;
    let m0 = node_slope(c, frame, n, i, gate);
    let m1 = node_slope(c, frame, n, i + 1, gate);
    hermite(
        T::zero(),
        T::one(),
        c[i],
        c[i + 1],
        m0 * h,
        m1 * h,
        s,
    )
}

/// Slope at lattice node `idx` seen from a specific segment. At segment
/// boundaries the stored trace keeps the right-limit slope; interpolation of
/// the segment to the LEFT of the boundary needs the left-limit one, which
/// this reconstructs by applying that segment's own feedback gate.
fn node_slope<T: Real>(
    c: &[Complex<T>],
    frame: &DressedFrame<T>,
    n: usize,
    idx: usize,
    gate: bool,
) -> Complex<T> {
    let local = -c[idx] * frame.decay;
    if gate {
        local + frame.feedback * c[idx - n]
    } else {
        local
    }
}

/// Hermite interpolation of a stored amplitude grid at an arbitrary time.
fn interp_lattice<T: Real>(
    grid: &[T],
    c: &[Complex<T>],
    frame: &DressedFrame<T>,
    n: usize,
    t: T,
) -> Complex<T> {
    let t = t.max(T::zero()).min(*grid.last().expect("nonempty grid"));
    let i = grid
        .partition_point(|&x| x <= t)
        .saturating_sub(1)
        .min(grid.len() - 2);
    let h = grid[i + 1] - grid[i];
    let s = (t - grid[i]) / h;
    if s == T::zero() {
        return c[i];
    }
    let gate = i >= n;
    let m0 = node_slope(c, frame, n, i, gate);
    let m1 = if i + 1 == grid.len() - 1 && gate {
        // The final grid point may sit off the lattice; its delayed value is
        // itself interpolated (one level deep, the delayed time always lands
        // on fully lattice-aligned intervals).
        let delayed = interp_lattice(grid, c, frame, n, grid[i + 1] - frame.t_delay);
        -c[i + 1] * frame.decay + frame.feedback * delayed
    } else {
        node_slope(c, frame, n, i + 1, gate)
    };
    hermite(T::zero(), T::one(), c[i], c[i + 1], m0 * h, m1 * h, s)
}

/// Exact amplitude at one time: e^{-A t} times the truncated feedback series
/// sum_n (A e^{i chi} e^{A t_d})^n (t - n t_d)^n / n!, each term evaluated in
/// log-magnitude/phase form and accumulated with compensated summation.
pub fn amplitude_series<T: Real>(frame: &DressedFrame<T>, t: T) -> Complex<T> {
    if t <= T::zero() {
        return Complex::one();
    }
    let a = frame.decay;
    if a == T::zero() {
        // No decay channel: the excitation never leaves.
        return Complex::one();
    }
    let n_max = (t / frame.t_delay)
        .floor()
        .to_usize()
        .expect("term count fits in usize for admissible delays");
    let log_gain = a.ln() + a * frame.t_delay;
    let mut acc = ComplexKahan::new();
    acc.add(Complex::from_polar((-a * t).exp(), T::zero()));
    let mut prev_l = T::infinity();
    for n in 1..=n_max {
        let nf = T::of_usize(n);
        let dt = t - nf * frame.t_delay;
        if dt <= T::zero() {
            continue; // the kink term enters with weight zero
        }
        let l = -a * t + nf * (log_gain + dt.ln()) - (nf + T::one()).ln_gamma();
        if l < T::lit(-760.0) && l < prev_l {
            break; // past the term-size peak and below underflow
        }
        prev_l = l;
        acc.add(Complex::from_polar(l.exp(), nf * frame.chi));
    }
    acc.value()
}

/// Right-hand side of the delay equation. At the kink t = t_delay exactly,
/// the right-limit convention Theta(0) = 1 applies.
pub fn amplitude_derivative<T: Real>(
    frame: &DressedFrame<T>,
    c_now: Complex<T>,
    c_delayed: Complex<T>,
    t: T,
) -> Complex<T> {
    let local = -c_now * frame.decay;
    if t >= frame.t_delay {
        local + frame.feedback * c_delayed
    } else {
        local
    }
}

/// Step-based integrator entry point: the step must divide the delay into an
/// integer number of intervals, at least `MIN_STEPS_PER_DELAY` of them.
pub fn amplitude_dde<T: Real>(
    frame: &DressedFrame<T>,
    step: T,
    horizon: T,
) -> Result<AmplitudeTrace<T>> {
    if !(step > T::zero()) || !step.is_finite() {
        return Err(Error::InvalidGrid(format!(
            "step must be positive and finite, got {step}"
        )));
    }
    let ratio = frame.t_delay / step;
    let Some(n) = ratio.round().to_usize() else {
        return Err(Error::InvalidGrid(format!(
            "step {step} is too small relative to the delay {}",
            frame.t_delay
        )));
    };
    if n == 0 || (T::of_usize(n) * step - frame.t_delay).abs() > T::lit(1e-9) * frame.t_delay {
        return Err(Error::InvalidGrid(format!(
            "step {step} does not divide the delay {} evenly",
            frame.t_delay
        )));
    }
    AmplitudeTrace::dde(frame, n, horizon)
}

/// Long-time excited population. The amplitude's Laplace image has a pole at
/// s = 0 only under constructive feedback (chi a multiple of 2pi), where the
/// residue 1/(1 + A t_d) traps that fraction of the amplitude forever; any
/// other phase leaves only decaying poles. With A = 0 nothing ever decays.
pub fn steady_population<T: Real>(frame: &DressedFrame<T>) -> T {
    if frame.decay == T::zero() {
        return T::one();
    }
    let chi = wrap_2pi(frame.chi);
    let tol = T::lit(1e-9);
    if chi < tol || T::TAU() - chi < tol {
        let r = (T::one() + frame.decay * frame.t_delay).recip();
        r * r
    } else {
        T::zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{derive_frame, PhysicalParams};
    use approx::assert_relative_eq;

    fn frame(decay2: f64, phi: f64, t_delay: f64) -> DressedFrame<f64> {
        // Undriven resonant frame: A = gamma / 2, chi = phi.
        derive_frame(PhysicalParams {
            gamma: decay2,
            phi,
            t_delay,
            ..PhysicalParams::default()
        })
    }

    #[test]
    fn series_starts_at_one() {
        for phi in [0.0, 1.0, std::f64::consts::PI] {
            let f = frame(1.0, phi, 2.0);
            assert_eq!(amplitude_series(&f, 0.0), num_complex::Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn series_is_pure_decay_before_the_delay() {
        let f = frame(1.0, 1.234, 2.0);
        let got = amplitude_series(&f, 1.0);
        assert_relative_eq!(got.re, (-0.5f64).exp(), max_relative = 1e-14);
        assert_eq!(got.im, 0.0);
    }

    #[test]
    fn series_two_term_value() {
        // One delay past: c(3) = e^{-1.5} (1 + 0.5 e) with A = 0.5, chi = 0.
        let f = frame(1.0, 0.0, 2.0);
        let got = amplitude_series(&f, 3.0);
        let want = (-1.5f64).exp() * (1.0 + 0.5 * 1.0f64.exp());
        assert_relative_eq!(got.re, want, max_relative = 1e-14);
        assert_relative_eq!(got.re, 0.5263954900047465, max_relative = 1e-13);
        assert!(got.im.abs() < 1e-16);
    }

    #[test]
    fn series_is_continuous_at_the_kink() {
        let f = frame(1.0, 0.0, 2.0);
        let eps = 1e-13;
        let below = amplitude_series(&f, 2.0 - eps);
        let above = amplitude_series(&f, 2.0 + eps);
        assert!((below - above).norm() < 1e-12);
    }

    #[test]
    fn frozen_dynamics_without_decay() {
        let f = derive_frame(PhysicalParams {
            gamma: 1.0,
            delta: -1.0, // eta = pi closes the channel up to rounding
            ..PhysicalParams::default()
        });
        assert!(f.decay < 1e-60);
        let g = DressedFrame { decay: 0.0, feedback: num_complex::Complex64::default(), ..f };
        assert_eq!(amplitude_series(&g, 7.5), num_complex::Complex64::new(1.0, 0.0));
        assert_eq!(steady_population(&g), 1.0);
    }

    #[test]
    fn derivative_examples() {
        let f = frame(1.0, 0.0, 2.0);
        let d = amplitude_derivative(&f, num_complex::Complex64::new(1.0, 0.0), Default::default(), 0.0);
        assert_relative_eq!(d.re, -0.5, max_relative = 1e-15);

        // Right-limit at the kink: -A e^{-A t_d} + A.
        let c_now = num_complex::Complex64::new((-1.0f64).exp(), 0.0);
        let d = amplitude_derivative(&f, c_now, num_complex::Complex64::new(1.0, 0.0), 2.0);
        assert_relative_eq!(d.re, 0.31606027941427883, max_relative = 1e-14);

        // Destructive feedback doubles the decay rate.
        let f = frame(1.0, std::f64::consts::PI, 2.0);
        let x = num_complex::Complex64::new(0.3, 0.0);
        let d = amplitude_derivative(&f, x, x, 5.0);
        assert_relative_eq!(d.re, -2.0 * 0.5 * 0.3, max_relative = 1e-12);
        assert!(d.im.abs() < 1e-16); // rounding of sin(pi) only
    }

    #[test]
    fn integrator_matches_pure_decay_before_the_delay() {
        let f = frame(1.0, 0.0, 2.0);
        let trace = AmplitudeTrace::dde(&f, 1000, 1.9).unwrap();
        for (&t, &c) in trace.times().iter().zip(trace.amplitudes()) {
            let want = (-0.5 * t).exp();
            assert!((c.re - want).abs() < 1e-10, "t={t}");
            assert_eq!(c.im, 0.0);
        }
    }

    #[test]
    fn integrator_matches_series_constructive() {
        let f = frame(1.0, 0.0, 2.0);
        let dde = AmplitudeTrace::dde(&f, 1000, 10.0).unwrap();
        let ser = AmplitudeTrace::series(&f, 1000, 10.0).unwrap();
        let worst = dde
            .amplitudes()
            .iter()
            .zip(ser.amplitudes())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0f64, f64::max);
        assert!(worst < 1e-8, "max deviation {worst}");
    }

    #[test]
    fn integrator_matches_series_destructive() {
        let f = frame(1.0, std::f64::consts::PI, 2.0);
        let dde = AmplitudeTrace::dde(&f, 1000, 10.0).unwrap();
        let ser = AmplitudeTrace::series(&f, 1000, 10.0).unwrap();
        let worst = dde
            .amplitudes()
            .iter()
            .zip(ser.amplitudes())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0f64, f64::max);
        assert!(worst < 1e-8, "max deviation {worst}");
    }

    #[test]
    fn integrator_derivatives_track_series() {
        let f = frame(1.0, std::f64::consts::FRAC_PI_2, 2.0);
        let dde = AmplitudeTrace::dde(&f, 1000, 10.0).unwrap();
        let ser = AmplitudeTrace::series(&f, 1000, 10.0).unwrap();
        let worst = dde
            .derivatives()
            .iter()
            .zip(ser.derivatives())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0f64, f64::max);
        assert!(worst < 1e-7, "max deviation {worst}");
    }

    #[test]
    fn interpolated_eval_tracks_series_off_grid() {
        let f = frame(1.0, 2.5, 2.0);
        let dde = AmplitudeTrace::dde(&f, 500, 10.0).unwrap();
        let ser = AmplitudeTrace::series(&f, 500, 10.0).unwrap();
        for k in 0..400 {
            let t = 10.0 * (k as f64 + 0.37) / 400.0;
            let (cd, dd) = dde.eval(t);
            let (cs, ds) = ser.eval(t);
            assert!((cd - cs).norm() < 1e-8, "c at t={t}");
            assert!((dd - ds).norm() < 1e-7, "cdot at t={t}");
        }
    }

    #[test]
    fn grid_contains_exact_delay_multiples() {
        let f = frame(1.0, 0.0, 0.2);
        let trace = AmplitudeTrace::series(&f, 250, 1.0).unwrap();
        for m in 1..=4usize {
            let want = 0.2 * m as f64;
            assert!(
                trace.times().iter().any(|&t| t == want),
                "missing multiple {m}"
            );
        }
        assert_eq!(trace.horizon(), 1.0);
        assert_eq!(trace.amplitudes()[0], num_complex::Complex64::new(1.0, 0.0));
    }

    #[test]
    fn amplitude_stays_contractive() {
        for phi in [0.0, 0.7, std::f64::consts::FRAC_PI_2, std::f64::consts::PI] {
            let f = frame(1.0, phi, 0.2);
            let trace = AmplitudeTrace::series(&f, 200, 8.0).unwrap();
            for (&t, c) in trace.times().iter().zip(trace.amplitudes()) {
                assert!(c.norm() <= 1.0 + 1e-12, "|c|>1 at t={t}, phi={phi}");
            }
        }
    }

    #[test]
    fn drive_period_leaves_trace_unchanged() {
        let td = 0.5;
        let base = PhysicalParams {
            gamma: 1.0,
            omega: 0.8,
            phi: 0.3,
            t_delay: td,
            ..PhysicalParams::default()
        };
        let shifted = PhysicalParams {
            omega: 0.8 + std::f64::consts::PI / td,
            ..base
        };
        let t1 = AmplitudeTrace::series(&derive_frame(base), 300, 5.0).unwrap();
        let t2 = AmplitudeTrace::series(&derive_frame(shifted), 300, 5.0).unwrap();
        let worst = t1
            .amplitudes()
            .iter()
            .zip(t2.amplitudes())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0f64, f64::max);
        assert!(worst < 1e-12, "max deviation {worst}");
    }

    #[test]
    fn step_entry_point_rejects_bad_grids() {
        let f = frame(1.0, 0.0, 2.0);
        assert!(amplitude_dde(&f, 0.0003, 5.0).is_err()); // not commensurate
        assert!(amplitude_dde(&f, 0.1, 5.0).is_err()); // only 20 per delay
        assert!(amplitude_dde(&f, -0.002, 5.0).is_err());
        assert!(amplitude_dde(&f, 0.002, 5.0).is_ok());
        assert!(AmplitudeTrace::dde(&f, 99, 5.0).is_err());
        assert!(AmplitudeTrace::series(&f, 100, 0.0).is_err());
    }

    #[test]
    fn trapping_population_values() {
        let f = frame(1.0, 0.0, 2.0);
        assert_relative_eq!(steady_population(&f), 0.25, max_relative = 1e-15);
        let f = frame(1.0, 0.0, 0.2);
        assert_relative_eq!(steady_population(&f), (1.0f64 / 1.1).powi(2), max_relative = 1e-14);
        let f = frame(1.0, std::f64::consts::FRAC_PI_2, 2.0);
        assert_eq!(steady_population(&f), 0.0);
        // A full phase turn counts as constructive.
        let f = frame(1.0, std::f64::consts::TAU - 1e-12, 2.0);
        assert_relative_eq!(steady_population(&f), 0.25, max_relative = 1e-15);
    }

    #[test]
    fn long_horizon_confirms_trapping_value() {
        let f = frame(1.0, 0.0, 2.0);
        let trace = AmplitudeTrace::series(&f, 100, 50.0).unwrap();
        let p_end = trace.amplitudes().last().unwrap().norm_sqr();
        assert!((p_end - 0.25).abs() < 1e-3, "P(50) = {p_end}");
        let f = frame(1.0, std::f64::consts::FRAC_PI_2, 2.0);
        let trace = AmplitudeTrace::series(&f, 100, 50.0).unwrap();
        let p_end = trace.amplitudes().last().unwrap().norm_sqr();
        assert!(p_end < 1e-3, "P(50) = {p_end}");
    }
}
