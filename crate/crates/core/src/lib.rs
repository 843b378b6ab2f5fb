//! Rogers functions, their Wiener–Hopf factorisation and fluctuation
//! identities for Lévy processes with completely monotone jumps.
pub mod catalog;
pub mod curve;
pub mod error;
pub mod fluct;
pub mod mc;
pub mod quad;
pub mod rogers;
pub mod wh;
pub mod xwh;

pub use catalog::{make, FunctionSpec, StableInput, StableParams};
pub use curve::{Balance, CurveGrid, CurveSample};
pub use error::{Error, Result};
pub use fluct::{EigenfunctionSample, Estimate, PhaseData, SupremumQuery};
pub use mc::{McConfig, McSummary};
pub use num_complex::Complex64;
pub use rogers::RogersFunction;
pub use wh::{Side, WHValue};
pub use xwh::KappaValue;

/// Complex scalar used throughout.
pub type C64 = Complex64;
