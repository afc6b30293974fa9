//! Numeric building blocks: compensated summation, cubic Hermite
//! interpolation, adaptive Simpson quadrature, and bisection refinement.

use crate::real::Real;
use num_complex::Complex;

/// Kahan-compensated accumulator for long sums of same-scale terms.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum<T: Real> {
    sum: T,
    carry: T,
}

impl<T: Real> KahanSum<T> {
    pub fn new() -> Self {
        Self { sum: T::zero(), carry: T::zero() }
    }

    #[inline]
    pub fn add(&mut self, x: T) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> T {
        self.sum
    }
}

/// Compensated accumulator for complex terms, one Kahan stream per part.
#[derive(Clone, Copy, Debug, Default)]
pub struct ComplexKahan<T: Real> {
    re: KahanSum<T>,
    im: KahanSum<T>,
}

impl<T: Real> ComplexKahan<T> {
    pub fn new() -> Self {
        Self { re: KahanSum::new(), im: KahanSum::new() }
    }

    #[inline]
    pub fn add(&mut self, z: Complex<T>) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex<T> {
        Complex::new(self.re.value(), self.im.value())
    }
}

/// Cubic Hermite interpolant on [t0, t1] from endpoint values and slopes.
pub fn hermite<T: Real>(
    t0: T,
    t1: T,
    y0: Complex<T>,
    y1: Complex<T>,
    m0: Complex<T>,
    m1: Complex<T>,
    t: T,
) -> Complex<T> {
    let h = t1 - t0;
    let s = (t - t0) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    let h00 = two * s3 - three * s2 + T::one();
    let h10 = s3 - two * s2 + s;
    let h01 = -two * s3 + three * s2;
    let h11 = s3 - s2;
    y0 * h00 + m0 * (h10 * h) + y1 * h01 + m1 * (h11 * h)
}

const SIMPSON_MAX_DEPTH: u32 = 48;

/// Adaptive Simpson quadrature of `f` over [a, b] with a relative tolerance
/// anchored to the first whole-interval estimate.
pub fn adaptive_simpson<T, F>(f: F, a: T, b: T, rel_tol: T) -> T
where
    T: Real,
    F: FnMut(T) -> T,
{
    adaptive_simpson_floored(f, a, b, rel_tol, T::lit(1e-12))
}

/// Adaptive Simpson with an explicit absolute floor on the scale the
/// tolerance is anchored to. Callers that integrate a quantity allowed to
/// sink to the rounding noise of its own evaluation must pass a floor at
/// the scale they actually care about: otherwise the refinement chases
/// noise that never converges.
pub fn adaptive_simpson_floored<T, F>(mut f: F, a: T, b: T, rel_tol: T, scale_floor: T) -> T
where
    T: Real,
    F: FnMut(T) -> T,
{
    if a == b {
        return T::zero();
    }
    let half = T::lit(0.5);
    let m = half * (a + b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson_slice(a, b, fa, fm, fb);
    let eps = rel_tol * whole.abs().max(scale_floor);
    simpson_recurse(&mut f, a, b, fa, fm, fb, whole, eps, SIMPSON_MAX_DEPTH)
}

#[inline]
fn simpson_slice<T: Real>(a: T, b: T, fa: T, fm: T, fb: T) -> T {
    (b - a) / T::lit(6.0) * (fa + T::lit(4.0) * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn simpson_recurse<T, F>(
    f: &mut F,
    a: T,
    b: T,
    fa: T,
    fm: T,
    fb: T,
    whole: T,
    eps: T,
    depth: u32,
) -> T
where
    T: Real,
    F: FnMut(T) -> T,
{
    let half = T::lit(0.5);
    let m = half * (a + b);
    let lm = half * (a + m);
    let rm = half * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson_slice(a, m, fa, flm, fm);
    let right = simpson_slice(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= T::lit(15.0) * eps {
        left + right + delta / T::lit(15.0)
    } else {
        let eps2 = eps * half;
        simpson_recurse(f, a, m, fa, flm, fm, left, eps2, depth - 1)
            + simpson_recurse(f, m, b, fm, frm, fb, right, eps2, depth - 1)
    }
}

/// Shrink a bracketed sign change of `f` to width `tol` and return the
/// midpoint. The bracket endpoints must evaluate to opposite strict signs.
pub fn bisect_sign_change<T, F>(mut f: F, mut a: T, mut b: T, tol: T) -> T
where
    T: Real,
    F: FnMut(T) -> T,
{
    let half = T::lit(0.5);
    let mut fa = f(a);
    while b - a > tol {
        let m = half * (a + b);
        if m <= a || m >= b {
            break; // float resolution exhausted
        }
        let fm = f(m);
        if (fm > T::zero()) == (fa > T::zero()) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    half * (a + b)
}
