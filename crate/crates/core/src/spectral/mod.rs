//! Eigenvalue spectra of the channel correlation operator, the
//! inverse-distance convolution kernel, and the scaled spectrum
//! `g̃(ξ) = g̃₀(ξ) ∗ sinc(2ξ)`.

mod eigen;
mod kernel;
mod spectrum;

pub use eigen::{
    channel_gram, channel_spectrum, gram_eigenvalues, gram_matrix, operator_eigenvalues,
    EigenSpectrum,
};
pub use kernel::{
    convolution_kernel, transform_to_inverse_distance, windowed_convolution_kernel,
    ConvolutionKernel, InverseDistanceGrid,
};
pub use spectrum::{
    convolve_sinc, convolve_sinc_with, g0_spectrum, main_lobe, measured_bandwidth,
    ConvolutionMethod, SpectrumProfile, XiGrid, DEFAULT_XI_MARGIN, DEFAULT_XI_STEP, FFT_THRESHOLD,
    MIN_XI_MARGIN,
};
