//! Dynamics of a driven qubit facing a mirror at the end of a 1D waveguide.
//!
//! The mirror returns the emitted field after a round-trip delay, so the
//! excited-state amplitude obeys a linear delay differential equation. On top
//! of that amplitude this crate computes the reduced qubit state, its
//! evolution speed under monotone Riemannian metrics, and trace-distance
//! information-flow diagnostics (backflow and total flow).

pub mod amplitude;
pub mod geometry;
pub mod infoflow;
pub mod model;
pub mod numeric;
pub mod qstate;
pub mod real;

pub use amplitude::{AmplitudeTrace, TraceMethod};
pub use geometry::MCFunction;
pub use infoflow::FlowReport;
pub use model::{DressedFrame, PhysicalParams};
pub use qstate::{Coherence, QubitState, SpectralDecomp};
pub use real::Real;

/// Errors reported by the simulation layer.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A physical parameter is out of its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    /// A grid step does not divide the delay, or the grid is too coarse.
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    /// A candidate metric function failed the admissibility checks.
    #[error("invalid metric: {0}")]
    InvalidMetric(String),
    /// A query lies outside the domain covered by a computed trace.
    #[error("out of range: {0}")]
    OutOfRange(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Complex double, the scalar used by the concrete aliases below.
pub type C64 = num_complex::Complex<f64>;
/// Complex single.
pub type C32 = num_complex::Complex<f32>;

pub type Params64 = PhysicalParams<f64>;
pub type Params32 = PhysicalParams<f32>;
pub type Frame64 = DressedFrame<f64>;
pub type Frame32 = DressedFrame<f32>;
pub type Trace64 = AmplitudeTrace<f64>;
pub type State64 = QubitState<f64>;
pub type Metric64 = MCFunction<f64>;
