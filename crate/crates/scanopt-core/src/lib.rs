//! Modeling and control analysis for a two-mirror laser scanning system.
//!
//! The crate covers the full pipeline from actuator physics to the scan plane:
//!
//! * [`models`] — limited-angle-torquer state-space models (2nd and 3rd order),
//!   transfer functions, eigenvalues and frequency response, plus the two
//!   mechanical corrections (ten-fold damping, zero pivot stiffness).
//! * [`sim`] — exact constant-input propagation, fixed-step RK4 integration and
//!   a Coulomb stick/slip friction simulation with full torque bookkeeping.
//! * [`toc`] — near time-optimal bang-bang control synthesis by multi-start
//!   shooting over switching-interval lengths, with an adjoint-based
//!   optimality certificate.
//! * [`tracking`] — sampled-data tracking controllers that re-solve the
//!   time-optimal problem every control period, with one-step prediction and
//!   two-rate demand sampling.
//! * [`scan`] — projection of the two mirror angles onto the vertical scan
//!   plane at range, ideal pattern generation and pass segmentation.
//! * [`reference`] — frozen reference tables used by the reproduction
//!   scenarios and golden tests.
//!
//! All numerics are generic over the scalar type through [`float::Real`];
//! concrete `f64` aliases are exported at the crate root.
//!
//! Every type is immutable once constructed and every operation is a pure
//! function of its inputs, so values can be shared freely across threads;
//! independent runs (parameter sweeps, scenario batches) parallelize
//! naturally.

// Validation guards use `!(x > 0)` deliberately: the negation also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod float;
pub mod linalg;
pub mod models;
pub mod reference;
pub mod scan;
pub mod sim;
pub mod toc;
pub mod tracking;

pub use error::Error;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;

// Concrete aliases for the common double-precision case.
pub type ActuatorParams64 = models::ActuatorParams<f64>;
pub type LinearModel64 = models::LinearModel<f64>;
pub type TransferFunction64 = models::TransferFunction<f64>;
pub type ModalAnalysis64 = models::ModalAnalysis<f64>;
pub type InputSignal64 = sim::InputSignal<f64>;
pub type TimeSeries64 = sim::TimeSeries<f64>;
pub type TocProblem64 = toc::TocProblem<f64>;
pub type BangBangSolution64 = toc::BangBangSolution<f64>;
pub type PmpCertificate64 = toc::PmpCertificate<f64>;
pub type ControllerConfig64 = tracking::ControllerConfig<f64>;
pub type DemandSignal64 = tracking::DemandSignal<f64>;
pub type Plant64 = tracking::Plant<f64>;
pub type TrackingResult64 = tracking::TrackingResult<f64>;
pub type ScanConfig64 = scan::ScanConfig<f64>;
pub type ScanSample64 = scan::ScanSample<f64>;
pub type Pass64 = scan::Pass<f64>;
