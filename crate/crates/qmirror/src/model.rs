//! Laboratory parameters and their reduction to the dressed frame.
//!
//! The classical drive (strength Ω, detuning Δ) dresses the qubit; emission
//! into the half-waveguide plus the mirror round trip collapse the dynamics
//! onto one complex amplitude governed by a decay rate A, a feedback phase χ
//! and the round-trip delay.

use crate::real::Real;
use crate::{Error, Result};
use num_complex::Complex;

/// Laboratory inputs. The emission rate gamma fixes the unit of time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysicalParams<T: Real> {
    /// Spontaneous emission rate into the waveguide, must be positive.
    pub gamma: T,
    /// Classical driving strength, nonnegative.
    pub omega: T,
    /// Drive-qubit detuning, may take either sign.
    pub delta: T,
    /// Mirror round-trip phase, stored reduced to [0, 2pi).
    pub phi: T,
    /// Photon round-trip delay, must be positive.
    pub t_delay: T,
    /// Initial superposition weight in [0, 1]: beta|+> + sqrt(1-beta^2)|->.
    pub beta: T,
    /// Observation horizon, must be positive.
    pub tau: T,
}

impl<T: Real> Default for PhysicalParams<T> {
    fn default() -> Self {
        Self {
            gamma: T::one(),
            omega: T::zero(),
            delta: T::zero(),
            phi: T::zero(),
            t_delay: T::one(),
            beta: T::one(),
            tau: T::lit(10.0),
        }
    }
}

impl<T: Real> PhysicalParams<T> {
    /// Range-check every field and reduce the phase modulo 2pi.
    pub fn validated(mut self) -> Result<Self> {
        fn bad<T>(msg: String) -> Result<T> {
            Err(Error::InvalidParam(msg))
        }
        if !(self.gamma > T::zero()) || !self.gamma.is_finite() {
            return bad(format!("gamma must be positive and finite, got {}", self.gamma));
        }
        if !(self.omega >= T::zero()) || !self.omega.is_finite() {
            return bad(format!("omega must be nonnegative and finite, got {}", self.omega));
        }
        if !self.delta.is_finite() {
            return bad(format!("delta must be finite, got {}", self.delta));
        }
        if !self.phi.is_finite() {
            return bad(format!("phi must be finite, got {}", self.phi));
        }
        if !(self.t_delay > T::zero()) || !self.t_delay.is_finite() {
            return bad(format!("t_delay must be positive and finite, got {}", self.t_delay));
        }
        if !(self.beta >= T::zero() && self.beta <= T::one()) {
            return bad(format!("beta must lie in [0, 1], got {}", self.beta));
        }
        if !(self.tau > T::zero()) || !self.tau.is_finite() {
            return bad(format!("tau must be positive and finite, got {}", self.tau));
        }
        self.phi = wrap_2pi(self.phi);
        Ok(self)
    }
}

/// Dressed-frame reduction: everything the delay equation needs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DressedFrame<T: Real> {
    /// Mixing angle eta = atan2(2 omega, delta) in [0, pi].
    pub eta: T,
    /// Dressed splitting omega_ef = sqrt(delta^2 + 4 omega^2).
    pub omega_ef: T,
    /// Feedback detuning omega_x = omega_ef - delta.
    pub omega_x: T,
    /// Effective decay rate A = cos^4(eta/2) * gamma / 2.
    pub decay: T,
    /// Feedback phase chi = omega_x * t_delay + phi, reduced to [0, 2pi).
    pub chi: T,
    /// Round-trip delay, copied from the parameters.
    pub t_delay: T,
    /// Complex feedback coefficient B = A * exp(i chi).
    pub feedback: Complex<T>,
}

/// Reduce laboratory parameters to the dressed frame.
pub fn derive_frame<T: Real>(p: PhysicalParams<T>) -> DressedFrame<T> {
    let two = T::lit(2.0);
    // atan2(0, 0) = 0, so the undriven resonant case lands on eta = 0.
    let eta = (two * p.omega.abs()).atan2(p.delta);
    let omega_ef = (p.delta * p.delta + T::lit(4.0) * p.omega * p.omega).sqrt();
    let omega_x = omega_ef - p.delta;
    let half_eta_cos = (eta / two).cos();
    let c2 = half_eta_cos * half_eta_cos;
    let decay = c2 * c2 * p.gamma / two;
    let chi = wrap_2pi(omega_x * p.t_delay + p.phi);
    DressedFrame {
        eta,
        omega_ef,
        omega_x,
        decay,
        chi,
        t_delay: p.t_delay,
        feedback: Complex::from_polar(decay, chi),
    }
}

/// Build parameters from mirror geometry: qubit-mirror distance x0, group
/// velocity v and carrier wavevector k0 give delay 2 x0 / v and phase 2 k0 x0.
pub fn from_geometry<T: Real>(
    x0: T,
    v: T,
    k0: T,
    base: PhysicalParams<T>,
) -> Result<PhysicalParams<T>> {
    if !(x0 > T::zero()) || !x0.is_finite() {
        return Err(Error::InvalidParam(format!(
            "mirror distance must be positive and finite, got {x0}"
        )));
    }
    if !(v > T::zero()) || !v.is_finite() {
        return Err(Error::InvalidParam(format!(
            "group velocity must be positive and finite, got {v}"
        )));
    }
    if !(k0 > T::zero()) || !k0.is_finite() {
        return Err(Error::InvalidParam(format!(
            "carrier wavevector must be positive and finite, got {k0}"
        )));
    }
    let two = T::lit(2.0);
    PhysicalParams {
        t_delay: two * x0 / v,
        phi: two * k0 * x0,
        ..base
    }
    .validated()
}

/// Reduce an angle to [0, 2pi).
pub fn wrap_2pi<T: Real>(x: T) -> T {
    let tau = T::TAU();
    let mut r = x % tau;
    if r < T::zero() {
        r += tau;
    }
    // A tiny negative remainder can round up to exactly 2pi.
    if r >= tau {
        r - tau
    } else {
        r
    }
}
