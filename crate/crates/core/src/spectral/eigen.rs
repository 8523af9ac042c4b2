use std::fmt::Write as _;

use nalgebra::DMatrix;

use crate::channel::{build_channel_matrix, ChannelMatrix, ChannelModel};
use crate::geometry::{ReceiveSamples, SampledAperture};
use crate::{Complex, Error, Result};

/// Aperture columns per channel block when streaming the Gram assembly.
const COLUMN_BLOCK: usize = 4096;

/// Relative asymmetry above which an operator is rejected as non-Hermitian.
const HERMITIAN_TOL: f64 = 1e-10;

/// Eigenvalues in descending order, negatives clamped to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSpectrum {
    pub values: Vec<f64>,
}

impl EigenSpectrum {
    pub fn from_unsorted(mut values: Vec<f64>) -> Self {
        for v in &mut values {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        values.sort_by(|a, b| b.total_cmp(a));
        Self { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `λ₁`, or 0 for an empty spectrum.
    pub fn leading(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    /// `λ_k / λ₁`; all zeros if `λ₁ = 0`.
    pub fn normalized(&self) -> Vec<f64> {
        let l1 = self.leading();
        self.values
            .iter()
            .map(|v| if l1 > 0.0 { v / l1 } else { 0.0 })
            .collect()
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    /// CSV with header `index,eigenvalue,normalized`, 1-based index.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("index,eigenvalue,normalized\n");
        for (i, (v, n)) in self.values.iter().zip(self.normalized()).enumerate() {
            let _ = writeln!(s, "{},{:.16e},{:.16e}", i + 1, v, n);
        }
        s
    }
}

/// Eigenvalues of `D^{1/2} K D^{1/2}` for a Hermitian kernel matrix `K`
/// and quadrature weights `D`.
pub fn operator_eigenvalues(kernel: &DMatrix<Complex>, weights: &[f64]) -> Result<EigenSpectrum> {
    let n = kernel.nrows();
    if kernel.ncols() != n || weights.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "kernel is {}x{}, {} weights",
            n,
            kernel.ncols(),
            weights.len()
        )));
    }
    if n == 0 {
        return Err(Error::EmptySpectrum);
    }
    if kernel.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::NonFinite("operator kernel"));
    }
    if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err(Error::param("weights", "must be finite and nonnegative"));
    }
    let sqrt_w: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
    let a = DMatrix::from_fn(n, n, |i, j| kernel[(i, j)] * (sqrt_w[i] * sqrt_w[j]));
    let scale = a.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let asymmetry = (0..n)
        .flat_map(|i| (i..n).map(move |j| (i, j)))
        .map(|(i, j)| (a[(i, j)] - a[(j, i)].conj()).norm())
        .fold(0.0, f64::max);
    if asymmetry > HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian { asymmetry, scale });
    }
    let hermitian = (&a + a.adjoint()) * Complex::new(0.5, 0.0);
    let eig = nalgebra::SymmetricEigen::new(hermitian);
    Ok(EigenSpectrum::from_unsorted(eig.eigenvalues.iter().copied().collect()))
}

/// `H W Hᴴ` as a dense matrix.
pub fn gram_matrix(h: &ChannelMatrix) -> DMatrix<Complex> {
    DMatrix::from_row_slice(h.rows, h.rows, &h.gram())
}

/// Spectrum of the discretized correlation operator for an assembled
/// channel matrix, weighted by its receive quadrature.
pub fn gram_eigenvalues(h: &ChannelMatrix) -> Result<EigenSpectrum> {
    operator_eigenvalues(&gram_matrix(h), &h.rx_weights)
}

/// `H W Hᴴ` assembled block by block over aperture columns, so the full
/// `K × M` channel is never resident.
pub fn channel_gram(
    aperture: &SampledAperture,
    rx: &ReceiveSamples,
    model: &ChannelModel,
) -> Result<DMatrix<Complex>> {
    if aperture.is_empty() {
        return Err(Error::DimensionMismatch("empty aperture".into()));
    }
    let k = rx.len();
    let mut acc = vec![Complex::new(0.0, 0.0); k * k];
    let mut start = 0;
    while start < aperture.len() {
        let end = (start + COLUMN_BLOCK).min(aperture.len());
        let block = build_channel_matrix(&aperture.slice(start..end), rx, model)?;
        block.accumulate_gram(&mut acc);
        start = end;
    }
    Ok(DMatrix::from_row_slice(k, k, &acc))
}

/// Channel-operator spectrum with `r`-domain receive weights.
pub fn channel_spectrum(
    aperture: &SampledAperture,
    rx: &ReceiveSamples,
    model: &ChannelModel,
) -> Result<EigenSpectrum> {
    operator_eigenvalues(&channel_gram(aperture, rx, model)?, &rx.r_weights)
}
