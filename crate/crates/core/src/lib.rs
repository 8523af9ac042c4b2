//! Distance-domain spatial degrees of freedom of near-field line-of-sight
//! channels between a planar transmit aperture and a collinear receive array.
//!
//! The crate is organised bottom-up:
//!
//! - [`geometry`]: aperture regions in the xz-plane, grid quadrature, receive
//!   arrays, extreme distances and the projection onto the plane orthogonal
//!   to the array direction.
//! - [`channel`]: exact spherical-wave and Fresnel channel coefficients and
//!   the channel matrix between sampled apertures and receive samples.
//! - [`spectral`]: Gram operators and their eigenvalues, the inverse-distance
//!   convolution kernel, and the scaled spectrum `g̃ = g̃₀ ∗ sinc(2ξ)`.
//! - [`dof`]: closed-form degree-of-freedom predictions and dominant
//!   eigenvalue counting.
//! - [`experiment`]: JSON-configured experiment runner used by the `nfdof`
//!   binary.

pub mod channel;
pub mod dof;
mod error;
pub mod experiment;
pub mod geometry;
mod interval;
pub mod spectral;

pub use error::{Error, Result};
pub use interval::{merge_intervals, union_measure, Interval};

/// Three-vector in meters.
pub type Vec3 = nalgebra::Vector3<f64>;

/// Complex scalar used for channel coefficients.
pub type Complex = num_complex::Complex64;
