//! Trace-distance information-flow diagnostics: distinguishability D(t) of
//! the optimal state pair, its signed rate, backflow (non-Markovianity), and
//! total flow in both directions.

use crate::amplitude::AmplitudeTrace;
use crate::numeric::{adaptive_simpson_floored, bisect_sign_change};
use crate::qstate::QubitState;
use crate::real::Real;
use num_complex::Complex;

/// Rates with magnitude below this count as neither inflow nor outflow;
/// trapping plateaus would otherwise shed spurious sign changes.
const SIGN_DEADBAND: f64 = 1e-12;

/// Width to which a bracketed sign change of the rate is refined.
const ROOT_TOL: f64 = 1e-10;

/// Summary of the information flow over one trace.
#[derive(Clone, Debug)]
pub struct FlowReport<T: Real> {
    /// Distinguishability at t = 0 (1 for the optimal pair).
    pub d0: T,
    /// Distinguishability at the horizon.
    pub dtau: T,
    /// Backflow: distinguishability regained over intervals of increase.
    pub aleph: T,
    /// Total variation: flow counted in both directions.
    pub aleph_total: T,
    /// Refined interior extrema of D as (time, D) pairs.
    pub extrema: Vec<(T, T)>,
}

/// Trace distance between two qubit states: half the absolute-eigenvalue sum
/// of the (Hermitian) difference matrix.
pub fn trace_distance<T: Real>(s1: &QubitState<T>, s2: &QubitState<T>) -> T {
    let a = s1.rho[0][0].re - s2.rho[0][0].re;
    let d = s1.rho[1][1].re - s2.rho[1][1].re;
    let b = s1.rho[0][1] - s2.rho[0][1];
    let half = T::lit(0.5);
    let mean = half * (a + d);
    let radius = (half * (a - d)).hypot(b.norm());
    half * ((mean + radius).abs() + (mean - radius).abs())
}

/// D(t) on the trace grid for the distinguishability-optimal initial pair,
/// the excited and ground dressed states, for which D(t) = P(t) = |c(t)|^2.
pub fn optimal_pair_distance<T: Real>(trace: &AmplitudeTrace<T>) -> Vec<T> {
    trace.amplitudes().iter().map(Complex::norm_sqr).collect()
}

/// Signed rate sigma = dD/dt = 2 Re(conj(c) cdot), from the exact amplitude
/// derivative rather than any finite differencing.
pub fn sigma_rate<T: Real>(trace: &AmplitudeTrace<T>) -> Vec<T> {
    trace
        .amplitudes()
        .iter()
        .zip(trace.derivatives())
        .map(|(c, cd)| T::lit(2.0) * (c.conj() * cd).re)
        .collect()
}

/// Unsigned flow rate |sigma| on the trace grid.
pub fn flow_rate<T: Real>(trace: &AmplitudeTrace<T>) -> Vec<T> {
    sigma_rate(trace).into_iter().map(|s| s.abs()).collect()
}

/// Backflow measure: the total distinguishability regained while the rate is
/// positive, with panel boundaries refined by bisection.
pub fn non_markovianity<T: Real>(trace: &AmplitudeTrace<T>) -> T {
    panels(trace).aleph
}

/// Total flow: the total variation of D over the trace, counting loss and
/// regain alike.
pub fn total_flow<T: Real>(trace: &AmplitudeTrace<T>) -> T {
    panels(trace).aleph_total
}

/// Full decomposition of the flow over a trace.
pub fn flow_report<T: Real>(trace: &AmplitudeTrace<T>) -> FlowReport<T> {
    panels(trace)
}

/// Independent route to the total flow: adaptive quadrature of |sigma| with
/// the domain split at refined extrema and at delay kinks.
pub fn total_flow_quadrature<T: Real>(trace: &AmplitudeTrace<T>) -> T {
    let tau = trace.horizon();
    let mut cuts: Vec<T> = vec![T::zero(), tau];
    cuts.extend(refined_roots(trace));
    let td = trace.frame().t_delay;
    let mut k = 1usize;
    while T::of_usize(k) * td < tau {
        cuts.push(T::of_usize(k) * td);
        k += 1;
    }
    cuts.sort_by(|x, y| x.partial_cmp(y).expect("finite cut points"));
    cuts.dedup_by(|x, y| (*x - *y).abs() < T::lit(1e-9));
    // Windows where |sigma| has sunk to its own rounding noise must not be
    // refined relative to themselves; anchor each window's tolerance floor
    // to the global flow scale instead.
    let scale = flow_rate(trace).into_iter().fold(T::zero(), T::max);
    let mut total = T::zero();
    for pair in cuts.windows(2) {
        total += adaptive_simpson_floored(
            |t| sigma_at(trace, t).abs(),
            pair[0],
            pair[1],
            T::lit(1e-8),
            T::lit(1e-4) * scale * (pair[1] - pair[0]),
        );
    }
    total
}

fn sigma_at<T: Real>(trace: &AmplitudeTrace<T>, t: T) -> T {
    let (c, cdot) = trace.eval(t);
    T::lit(2.0) * (c.conj() * cdot).re
}

fn dsign<T: Real>(x: T) -> i8 {
    let band = T::lit(SIGN_DEADBAND);
    if x > band {
        1
    } else if x < -band {
        -1
    } else {
        0
    }
}

/// Sign changes of sigma on the grid, refined by bisection. Deadband runs are
/// skipped over: the bracket spans from the last strictly signed sample to
/// the first strictly signed sample of the opposite direction.
fn refined_roots<T: Real>(trace: &AmplitudeTrace<T>) -> Vec<T> {
    let times = trace.times();
    let sig = sigma_rate(trace);
    let mut roots = Vec::new();
    let mut last: Option<(usize, i8)> = None;
    for (j, &s) in sig.iter().enumerate() {
        let sj = dsign(s);
        if sj == 0 {
            continue;
        }
        if let Some((i, si)) = last {
            if si != sj {
                roots.push(bisect_sign_change(
                    |t| sigma_at(trace, t),
                    times[i],
                    times[j],
                    T::lit(ROOT_TOL),
                ));
            }
        }
        last = Some((j, sj));
    }
    roots
}

fn panels<T: Real>(trace: &AmplitudeTrace<T>) -> FlowReport<T> {
    let roots = refined_roots(trace);
    let tau = trace.horizon();
    let d_at = |t: T| trace.eval(t).0.norm_sqr();
    let d0 = trace.amplitudes()[0].norm_sqr();
    let dtau = trace.amplitudes().last().expect("nonempty trace").norm_sqr();

    let mut boundaries = Vec::with_capacity(roots.len() + 2);
    boundaries.push((T::zero(), d0));
    let mut extrema = Vec::with_capacity(roots.len());
    for &r in &roots {
        let d = d_at(r);
        boundaries.push((r, d));
        extrema.push((r, d));
    }
    boundaries.push((tau, dtau));

    let half = T::lit(0.5);
    let mut aleph = T::zero();
    let mut aleph_total = T::zero();
    for pair in boundaries.windows(2) {
        let (a, da) = pair[0];
        let (b, db) = pair[1];
        let delta = db - da;
        aleph_total += delta.abs();
        if dsign(sigma_at(trace, half * (a + b))) > 0 {
            aleph += delta;
        }
    }
    FlowReport {
        d0,
        dtau,
        aleph: aleph.max(T::zero()),
        aleph_total,
        extrema,
    }
}
