//! Aperture regions, quadrature sampling, receive arrays and projection.
//!
//! All lengths are in meters. The transmit aperture lies in the xz-plane;
//! planar coordinates are stored as `(x, z)` pairs.

mod array;
mod extremes;
mod region;
mod shape;

pub use array::{
    direction_vector, sample_receive_array, Direction, ReceiveArray, ReceiveSamples, RxSampling,
};
pub use extremes::{
    extreme_distances, module_extreme_distances, projected_extreme_distances,
    projected_module_extreme_distances, ExtremeDistances,
};
pub use region::{point_order, sample_aperture, ApertureModule, ApertureRegion, SampledAperture};
pub use shape::Shape;

use crate::Vec3;

/// Point in the aperture plane, `(x, z)`.
pub type Point2 = nalgebra::Vector2<f64>;

/// `p̄ = (I − uuᵀ) p`.
pub fn project_point(p: &Vec3, direction: &Direction) -> Vec3 {
    p - direction.u * direction.u.dot(p)
}

/// Projects every sample onto the plane orthogonal to `direction`;
/// weights and module labels are kept.
pub fn project_aperture(aperture: &SampledAperture, direction: &Direction) -> SampledAperture {
    SampledAperture {
        points: aperture
            .points
            .iter()
            .map(|p| project_point(p, direction))
            .collect(),
        weights: aperture.weights.clone(),
        module: aperture.module.clone(),
        spacing: aperture.spacing,
    }
}
