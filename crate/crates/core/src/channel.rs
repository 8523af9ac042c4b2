//! Line-of-sight channel coefficients and channel matrices.
//!
//! The Fresnel model drops the phase factor `exp(−j2πr/λ)` that is common to
//! every aperture point seen from a receive sample, so exact and Fresnel
//! matrices differ by a unit-modulus factor per row in addition to the
//! higher-order terms. Row factors leave `H W Hᴴ` eigenvalues unchanged.

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::{Direction, ReceiveArray, ReceiveSamples, SampledAperture};
use crate::{Complex, Error, Result, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    /// `h = exp(−j2π‖p−q‖/λ) / ‖p−q‖`.
    Exact,
    /// Second-order phase, `1/r` amplitude.
    #[default]
    Fresnel,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelModel {
    pub kind: ModelKind,
    pub wavelength: f64,
}

impl ChannelModel {
    pub fn new(kind: ModelKind, wavelength: f64) -> Result<Self> {
        if !(wavelength.is_finite() && wavelength > 0.0) {
            return Err(Error::param("wavelength", "must be positive and finite"));
        }
        Ok(Self { kind, wavelength })
    }

    pub fn exact(wavelength: f64) -> Result<Self> {
        Self::new(ModelKind::Exact, wavelength)
    }

    pub fn fresnel(wavelength: f64) -> Result<Self> {
        Self::new(ModelKind::Fresnel, wavelength)
    }
}

pub fn exact_coefficient(p: &Vec3, q: &Vec3, wavelength: f64) -> Result<Complex> {
    let d = (p - q).norm();
    if d == 0.0 {
        return Err(Error::ZeroPropagationDistance);
    }
    Ok(Complex::from_polar(1.0 / d, -TAU * d / wavelength))
}

/// Relative phase `(2π/λ)(uᵀp − (‖p‖² − (uᵀp)²)/(2r))`.
pub fn fresnel_phase(p: &Vec3, direction: &Direction, r: f64, wavelength: f64) -> f64 {
    let up = direction.u.dot(p);
    let quad = (p.norm_squared() - up * up).max(0.0);
    TAU / wavelength * (up - quad / (2.0 * r))
}

pub fn fresnel_coefficient(p: &Vec3, direction: &Direction, r: f64, wavelength: f64) -> Result<Complex> {
    if r.is_nan() || r <= 0.0 {
        return Err(Error::param("r", "must be positive"));
    }
    Ok(Complex::from_polar(1.0 / r, fresnel_phase(p, direction, r, wavelength)))
}

/// Dense `K × M` channel matrix, receive samples along rows.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    pub rows: usize,
    pub cols: usize,
    /// Row-major entries.
    pub entries: Vec<Complex>,
    pub rx_radii: Vec<f64>,
    /// Receive quadrature weights in the `r` domain.
    pub rx_weights: Vec<f64>,
    pub tx_weights: Vec<f64>,
    pub model: ChannelModel,
}

impl ChannelMatrix {
    pub fn row(&self, k: usize) -> &[Complex] {
        &self.entries[k * self.cols..(k + 1) * self.cols]
    }

    pub fn get(&self, k: usize, m: usize) -> Complex {
        self.entries[k * self.cols + m]
    }

    /// Adds `H W Hᴴ` into a `rows × rows` row-major accumulator.
    pub fn accumulate_gram(&self, acc: &mut [Complex]) {
        let k = self.rows;
        assert_eq!(acc.len(), k * k, "accumulator must be rows × rows");
        let sqrt_w: Vec<f64> = self.tx_weights.iter().map(|w| w.sqrt()).collect();
        let scaled: Vec<Complex> = self
            .entries
            .par_chunks(self.cols)
            .flat_map_iter(|row| row.iter().zip(&sqrt_w).map(|(h, s)| h * *s))
            .collect();
        let cols = self.cols;
        acc.par_chunks_mut(k).enumerate().for_each(|(a, acc_row)| {
            let ra = &scaled[a * cols..(a + 1) * cols];
            for (b, slot) in acc_row.iter_mut().enumerate().skip(a) {
                let rb = &scaled[b * cols..(b + 1) * cols];
                *slot += dot_conj(ra, rb);
            }
        });
        // Mirror the upper triangle.
        for a in 0..k {
            for b in 0..a {
                acc[a * k + b] = acc[b * k + a].conj();
            }
        }
    }

    /// `H W Hᴴ`, row-major `rows × rows`.
    pub fn gram(&self) -> Vec<Complex> {
        let mut acc = vec![Complex::new(0.0, 0.0); self.rows * self.rows];
        self.accumulate_gram(&mut acc);
        acc
    }
}

/// `Σ a_i conj(b_i)` with independent partial sums.
fn dot_conj(a: &[Complex], b: &[Complex]) -> Complex {
    let mut re = [0.0f64; 4];
    let mut im = [0.0f64; 4];
    let chunks_a = a.chunks_exact(4);
    let chunks_b = b.chunks_exact(4);
    let (tail_a, tail_b) = (chunks_a.remainder(), chunks_b.remainder());
    for (ca, cb) in chunks_a.zip(chunks_b) {
        for l in 0..4 {
            re[l] += ca[l].re * cb[l].re + ca[l].im * cb[l].im;
            im[l] += ca[l].im * cb[l].re - ca[l].re * cb[l].im;
        }
    }
    let mut s = Complex::new(re.iter().sum(), im.iter().sum());
    for (x, y) in tail_a.iter().zip(tail_b) {
        s += x * y.conj();
    }
    s
}

pub fn build_channel_matrix(
    aperture: &SampledAperture,
    rx: &ReceiveSamples,
    model: &ChannelModel,
) -> Result<ChannelMatrix> {
    if aperture.is_empty() || rx.is_empty() {
        return Err(Error::DimensionMismatch(
            "channel needs nonempty aperture and receive samples".into(),
        ));
    }
    let cols = aperture.len();
    let lambda = model.wavelength;
    let rows: Result<Vec<Vec<Complex>>> = rx
        .radii
        .par_iter()
        .zip(&rx.points)
        .map(|(&r, q)| match model.kind {
            ModelKind::Exact => aperture
                .points
                .iter()
                .map(|p| exact_coefficient(p, q, lambda))
                .collect(),
            ModelKind::Fresnel => aperture
                .points
                .iter()
                .map(|p| fresnel_coefficient(p, &rx.direction, r, lambda))
                .collect(),
        })
        .collect();
    let entries: Vec<Complex> = rows?.into_iter().flatten().collect();
    if entries.iter().any(|h| !(h.re.is_finite() && h.im.is_finite())) {
        return Err(Error::NonFinite("channel matrix"));
    }
    Ok(ChannelMatrix {
        rows: rx.len(),
        cols,
        entries,
        rx_radii: rx.radii.clone(),
        rx_weights: rx.r_weights.clone(),
        tx_weights: aperture.weights.clone(),
        model: *model,
    })
}

/// Largest third-order Fresnel phase term over the sampled aperture,
/// `(2π/λ) |uᵀp| (‖p‖² − (uᵀp)²) / (2 r_min²)`.
pub fn max_phase_error(aperture: &SampledAperture, array: &ReceiveArray, wavelength: f64) -> f64 {
    let u = array.direction.u;
    let scale = TAU / wavelength / (2.0 * array.r_min * array.r_min);
    aperture
        .points
        .iter()
        .map(|p| {
            let up = u.dot(p);
            up.abs() * (p.norm_squared() - up * up).max(0.0) * scale
        })
        .fold(0.0, f64::max)
}
