//! Numerical toolkit for the Gaussian cognitive interference channel in
//! standard form `Y1 = X1 + a X2 + Z1`, `Y2 = b X1 + X2 + Z2`.
//!
//! Rates are in bits per complex channel use.

pub mod channel;
pub mod error;
pub mod gaussmi;
pub mod inner;
pub mod io;
pub mod outer;
pub mod region;
pub mod sweep;
pub mod verify;

pub use channel::{classify, to_standard_form, CapacityRegime, ChannelParams, RawChannel, RegimeReport};
pub use error::{Error, Result};
pub use gaussmi::{mutual_info, GaussianSystem, SystemBuilder};
pub use num_complex::Complex64;
pub use region::{GapReport, RateRegion, RegionKind};
pub use sweep::Sweep;

/// `C(x) = log2(1 + x)`.
#[inline]
pub fn cap(x: f64) -> f64 {
    (1.0 + x).log2()
}
