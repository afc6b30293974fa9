//! Shared parameter grid for the integration suites.

use qmirror::{Params64, PhysicalParams};

/// 48-point grid covering both delay regimes, several drive strengths,
/// on- and off-resonant detuning and the interesting mirror phases.
pub fn test_grid() -> Vec<Params64> {
    let mut grid = Vec::new();
    for &phi in &[0.0, std::f64::consts::FRAC_PI_4, std::f64::consts::FRAC_PI_2, std::f64::consts::PI] {
        for &t_delay in &[0.2, 2.0] {
            for &omega in &[0.0, 0.5, 1.0] {
                for &delta in &[0.0, 1.0] {
                    grid.push(PhysicalParams {
                        gamma: 1.0,
                        omega,
                        delta,
                        phi,
                        t_delay,
                        beta: 1.0,
                        tau: 10.0,
                    });
                }
            }
        }
    }
    assert_eq!(grid.len(), 48);
    grid
}
