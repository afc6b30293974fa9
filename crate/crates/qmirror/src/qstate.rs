//! Reduced qubit state in the dressed basis, its time derivative, and a
//! numerically careful 2x2 spectral decomposition.

use crate::real::Real;
use num_complex::Complex;
use num_traits::One;

/// 2x2 complex matrix in the dressed basis {|+>, |->}.
pub type Matrix2c<T> = [[Complex<T>; 2]; 2];

/// Off-diagonal convention for the reduced state.
///
/// The single-excitation channel produces the complex amplitude itself in the
/// coherence; `RealMagnitude` replaces it by its modulus, which matters only
/// for superposition weights strictly between 0 and 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Coherence {
    #[default]
    Complex,
    RealMagnitude,
}

/// Reduced state of the qubit at one instant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitState<T: Real> {
    pub rho: Matrix2c<T>,
    pub time: T,
}

/// Spectral decomposition of a qubit state. Eigenvectors are orthonormal
/// with the gauge: first component carrying weight is real and positive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralDecomp<T: Real> {
    pub p_plus: T,
    pub p_minus: T,
    pub v_plus: [Complex<T>; 2],
    pub v_minus: [Complex<T>; 2],
}

/// State reached from beta|+> + sqrt(1-beta^2)|-> once the amplitude has
/// evolved to c: populations beta^2 |c|^2 and the rest, coherence
/// beta sqrt(1-beta^2) c.
pub fn evolve_state<T: Real>(beta: T, c: Complex<T>) -> QubitState<T> {
    evolve_state_with(beta, c, Coherence::Complex, T::zero())
}

/// Same map with an explicit coherence convention and timestamp.
pub fn evolve_state_with<T: Real>(
    beta: T,
    c: Complex<T>,
    convention: Coherence,
    time: T,
) -> QubitState<T> {
    let b2 = beta * beta;
    let cross = beta * (T::one() - b2).max(T::zero()).sqrt();
    let coh = match convention {
        Coherence::Complex => c * cross,
        Coherence::RealMagnitude => Complex::new(cross * c.norm(), T::zero()),
    };
    let p = b2 * c.norm_sqr();
    QubitState {
        rho: [
            [Complex::new(p, T::zero()), coh],
            [coh.conj(), Complex::new(T::one() - p, T::zero())],
        ],
        time,
    }
}

/// Time derivative of the evolved state from the amplitude and its
/// derivative at the same instant. Hermitian and exactly traceless.
pub fn state_derivative<T: Real>(beta: T, c: Complex<T>, cdot: Complex<T>) -> Matrix2c<T> {
    state_derivative_with(beta, c, cdot, Coherence::Complex)
}

/// Derivative under an explicit coherence convention.
pub fn state_derivative_with<T: Real>(
    beta: T,
    c: Complex<T>,
    cdot: Complex<T>,
    convention: Coherence,
) -> Matrix2c<T> {
    let b2 = beta * beta;
    let cross = beta * (T::one() - b2).max(T::zero()).sqrt();
    let p_rate = T::lit(2.0) * (c.conj() * cdot).re;
    let coh_rate = match convention {
        Coherence::Complex => cdot * cross,
        Coherence::RealMagnitude => {
            // d|c|/dt = Re(conj(c) cdot) / |c|; flat at an exact zero.
            let norm = c.norm();
            let rate = if norm > T::zero() {
                (c.conj() * cdot).re / norm
            } else {
                T::zero()
            };
            Complex::new(cross * rate, T::zero())
        }
    };
    [
        [Complex::new(b2 * p_rate, T::zero()), coh_rate],
        [coh_rate.conj(), Complex::new(-(b2 * p_rate), T::zero())],
    ]
}

/// Eigenvalues and gauge-fixed eigenvectors of a qubit state. Eigenvalues
/// come straight from the 2x2 closed form; the eigenvector uses whichever of
/// the two textbook candidates carries the larger norm, and the second one is
/// its orthogonal complement.
pub fn spectral_decompose<T: Real>(state: &QubitState<T>) -> SpectralDecomp<T> {
    let a = state.rho[0][0].re;
    let d = state.rho[1][1].re;
    let b = state.rho[0][1];
    let mean = T::lit(0.5) * (a + d);
    let lambda = (a - d).hypot(T::lit(2.0) * b.norm());
    let half = T::lit(0.5);
    let p_plus = mean + half * lambda;
    let p_minus = mean - half * lambda;

    if lambda < T::lit(1e-14) {
        // Maximally mixed within tolerance: any basis works; fix the
        // canonical one for determinism.
        return SpectralDecomp {
            p_plus,
            p_minus,
            v_plus: [Complex::one(), Complex::default()],
            v_minus: [Complex::default(), Complex::one()],
        };
    }

    let cand1 = [b, Complex::new(p_plus - a, T::zero())];
    let cand2 = [Complex::new(p_plus - d, T::zero()), b.conj()];
    let n1 = cand1[0].norm_sqr() + cand1[1].norm_sqr();
    let n2 = cand2[0].norm_sqr() + cand2[1].norm_sqr();
    let raw = if n1 >= n2 { cand1 } else { cand2 };
    let v_plus = gauge_normalize(raw);
    let v_minus = gauge_normalize([-v_plus[1].conj(), v_plus[0].conj()]);
    SpectralDecomp {
        p_plus,
        p_minus,
        v_plus,
        v_minus,
    }
}

fn gauge_normalize<T: Real>(v: [Complex<T>; 2]) -> [Complex<T>; 2] {
    let norm = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    let scale = norm.recip();
    let lead = if v[0].norm() > T::lit(1e-14) * norm {
        v[0]
    } else {
        v[1]
    };
    let lead_mag = lead.norm();
    if lead_mag == T::zero() {
        return [v[0] * scale, v[1] * scale];
    }
    // Divide out the leading component's phase so it lands real positive.
    let phase = lead / lead_mag;
    let rot = phase.conj() * scale;
    [v[0] * rot, v[1] * rot]
}
