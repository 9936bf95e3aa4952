//! Fine frequency estimation of a single complex tone by iterative DFT
//! interpolation with a Pade-approximated updating function, plus the A&M,
//! GAM and HAQSE benchmarks and a Monte Carlo harness.

pub mod cli;
pub mod cubic;
mod dd;
pub mod error;
pub mod estimators;
pub mod harness;
pub mod props;
pub mod signal;
pub mod updating;

pub use error::{Error, Result};
pub use estimators::{estimate, EstimateTrace, EstimatorConfig, Variant};
pub use signal::{synthesize, SampleRecord, Snr, ToneSpec};
pub use updating::{eval_f, invert, taylor_coeffs, PadeModel};
